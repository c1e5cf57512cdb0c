#include "esr/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace esr {

namespace {

void reject_unknown_fields(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                           const char* what) {
    for (const auto& [key, val] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw std::invalid_argument(std::string("unknown field in ") + what + ": " + key);
    }
}

} // namespace

std::string fingerprint_bytes(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string game_to_json(const Game& game) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["room_size"] = game.room_size;
    j["epsilon"] = game.epsilon;
    j["agents"] = nlohmann::ordered_json::array();
    for (const auto& a : game.agents) {
        nlohmann::ordered_json ja;
        ja["id"] = a.id;
        ja["label"] = a.label;
        ja["kind"] = agent_kind_name(a.kind);
        ja["pos"] = {a.pos.x, a.pos.y, a.pos.z};
        j["agents"].push_back(ja);
    }
    return j.dump(1) + "\n";
}

Game game_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    reject_unknown_fields(j, {"format_version", "room_size", "epsilon", "agents"}, "game file");
    if (j.at("format_version").get<int>() != 1)
        throw std::invalid_argument("unsupported game file format version");
    Game g;
    g.room_size = j.at("room_size").get<int>();
    g.epsilon = j.at("epsilon").get<double>();
    for (const auto& ja : j.at("agents")) {
        reject_unknown_fields(ja, {"id", "label", "kind", "pos"}, "agent record");
        Agent a;
        a.id = ja.at("id").get<int>();
        a.label = ja.at("label").get<std::string>();
        a.kind = agent_kind_from_name(ja.at("kind").get<std::string>());
        const auto& p = ja.at("pos");
        if (p.size() != 3) throw std::invalid_argument("agent pos must have 3 coordinates");
        a.pos = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
        g.agents.push_back(std::move(a));
    }
    g.check();
    return g;
}

std::string game_fingerprint(const Game& game) { return fingerprint_bytes(game_to_json(game)); }

std::string outcome_to_json(const Outcome& outcome, const std::string& game_fp) {
    Outcome canon = outcome;
    canon.canonicalize();
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["game_fingerprint"] = game_fp;
    j["rooms"] = canon.rooms;
    return j.dump(1) + "\n";
}

Outcome outcome_from_json(const std::string& text, const std::string& expected_fp) {
    auto j = nlohmann::json::parse(text);
    reject_unknown_fields(j, {"format_version", "game_fingerprint", "rooms"}, "outcome file");
    if (j.at("format_version").get<int>() != 1)
        throw std::invalid_argument("unsupported outcome file format version");
    std::string fp = j.at("game_fingerprint").get<std::string>();
    if (!expected_fp.empty() && fp != expected_fp)
        throw std::invalid_argument("outcome file fingerprint " + fp +
                                    " does not match the game (" + expected_fp + ")");
    Outcome o;
    for (const auto& room : j.at("rooms")) o.rooms.push_back(room.get<Room>());
    return o;
}

std::string x3c_to_json(const X3CInstance& inst) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["universe_size"] = inst.universe_size;
    j["sets"] = inst.sets;
    return j.dump(1) + "\n";
}

X3CInstance x3c_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    reject_unknown_fields(j, {"format_version", "universe_size", "sets"}, "x3c file");
    if (j.at("format_version").get<int>() != 1)
        throw std::invalid_argument("unsupported x3c file format version");
    X3CInstance inst;
    inst.universe_size = j.at("universe_size").get<int>();
    for (const auto& s : j.at("sets")) {
        if (s.size() != 3) throw std::invalid_argument("x3c set must have 3 elements");
        inst.sets.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<int>()});
    }
    inst.normalize();
    return inst;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string points_to_xyz(const Game& game) {
    std::ostringstream ss;
    ss.precision(17);
    for (const auto& a : game.agents)
        ss << a.pos.x << " " << a.pos.y << " " << a.pos.z << " " << a.label << "\n";
    return ss.str();
}

} // namespace esr

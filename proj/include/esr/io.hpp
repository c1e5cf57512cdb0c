#pragma once

#include <string>

#include "esr/game.hpp"
#include "esr/x3c.hpp"

namespace esr {

/// FNV-1a 64-bit over the canonical serialized bytes, rendered as 16 hex
/// digits. Binds outcome files to the exact game file they were made for.
std::string fingerprint_bytes(const std::string& bytes);

std::string game_to_json(const Game& game);
Game game_from_json(const std::string& text);
std::string game_fingerprint(const Game& game);

std::string outcome_to_json(const Outcome& outcome, const std::string& game_fp);
/// Parses and, when expected_fp is non-empty, rejects fingerprint mismatches.
Outcome outcome_from_json(const std::string& text, const std::string& expected_fp);

std::string x3c_to_json(const X3CInstance& inst);
X3CInstance x3c_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// One "x y z label" line per agent.
std::string points_to_xyz(const Game& game);

} // namespace esr

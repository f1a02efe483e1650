#pragma once

#include "ldp/ensemble.hpp"

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace ldp::app {

inline constexpr const char* kToolName = "ldp";
inline constexpr const char* kToolVersion = "0.1.0";

// Ensemble from resolved parameters: "ensemble" is one of bosonic, laguerre, wd,
// goe, gue, gse, bdg, chiral, grid; the remaining keys depend on the family.
EnsembleSpec build_ensemble(const nlohmann::json& params);

// Parses "n", "2n", "1/2n" (proportional to n) or "1", "3/2" (constant).
TauRule parse_tau(const std::string& text);

struct CommandResult {
    std::vector<std::string> files;  // names inside out_dir
    int exit_code = 0;               // 2 when a study ends inconclusive
};

// Runs one subcommand on fully resolved parameters. Tables and scalars go to `out`;
// files go to `out_dir` (created when missing).
CommandResult run_command(const std::string& command, const nlohmann::json& params,
                          const std::string& out_dir, std::ostream& out);

// Hex SHA-256 of a file.
std::string file_digest(const std::string& path);

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& params,
                             const std::string& out_dir, const std::vector<std::string>& files);

} // namespace ldp::app

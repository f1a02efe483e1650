#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ldp::acceptance {

struct Outcome {
    int id = 0;
    bool pass = false;
    std::string summary;
    double seconds = 0.0;
};

// Runs the listed criteria (all nine when empty), printing one PASS/FAIL line each
// plus indented detail lines.
std::vector<Outcome> run(const std::vector<int>& ids, std::ostream& log);

} // namespace ldp::acceptance

#include "acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

// Usage: ldp_acceptance [criterion ...]
int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    auto outcomes = ldp::acceptance::run(ids, std::cout);
    int failed = 0;
    for (const auto& o : outcomes) failed += o.pass ? 0 : 1;
    std::cout << outcomes.size() - failed << " of " << outcomes.size() << " criteria pass\n";
    return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}

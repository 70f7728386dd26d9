#include <cstring>
#include <iostream>

#include "nlsrate/acceptance.hpp"

int main(int argc, char** argv) {
    nlsrate::acceptance::Options opt;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--skip-3d") == 0) opt.include_3d = false;

    nlsrate::acceptance::Suite suite(opt);
    const auto results = suite.run(&std::cout);
    int failed = 0;
    std::cout << "\nsummary\n";
    for (const auto& r : results) {
        std::cout << "  [" << (r.pass ? "PASS" : "FAIL") << "] " << r.id << " " << r.title << "\n";
        failed += !r.pass;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << "\n";
    return failed ? 1 : 0;
}

// Runs every acceptance criterion and prints one line each; exit 1 on any failure.
#include "fklab/acceptance.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    fklab::AcceptanceOptions opt;
    std::vector<int> ids = fklab::suite_criteria("all");
    if (argc > 1) {
        ids.clear();
        for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    }
    bool ok = true;
    for (int id : ids) {
        auto r = fklab::run_criterion(id, opt);
        std::cout << fklab::format_result(r) << std::endl;
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}

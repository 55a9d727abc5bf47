#pragma once

#include "fklab/fk_model.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace fklab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct AcceptanceOptions {
    // exact criteria run on this model and, when set, also on the second fixture
    FiniteFKModel model = ref2_model();
    bool with_ref2b = true;
    std::uint64_t seed = 20240601;
};

// Criterion ids 1..11; the suites group them.
std::vector<int> suite_criteria(const std::string& suite);
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, const AcceptanceOptions& opt);
// "PASS [n] name: detail (t s)"
std::string format_result(const CriterionResult& r);

} // namespace fklab

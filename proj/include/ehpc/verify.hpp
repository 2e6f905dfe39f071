#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ehpc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    std::size_t threads = 0;
    /// Criterion numbers to run; empty runs all of 1..10.
    std::vector<int> only;
};

inline constexpr int kCriteriaCount = 10;

CriterionResult run_criterion(int id, const VerifyOptions& opts);
std::vector<CriterionResult> run_verify(const VerifyOptions& opts);

/// One line: "[PASS] 3 name: detail (1.23 s)".
std::string format_criterion(const CriterionResult& c);

}  // namespace ehpc

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bestcell::verification {

struct Options {
    std::uint64_t seed = 42;
    std::uint64_t samples = 1'000'000;  // per Monte Carlo run
    int workers = 0;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

inline constexpr int kCriterionCount = 10;

/// Runs the analytic-vs-simulation checks with the given ids (1..10, all if empty).
///
/// Simulations are shared between checks and reseeded from `options.seed`,
/// so the report is a pure function of the options.
std::vector<CriterionResult> run(const Options& options, std::span<const int> ids = {});

/// One "PASS|FAIL <id> <name>: <detail>" line per result.
std::string render(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace bestcell::verification

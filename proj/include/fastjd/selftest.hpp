#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fastjd {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Invariant checks: Parseval, Hermitian bins, LU/inverse equivalence,
/// scaling, window-extension last-symbol energy, exact circulance, determinism.
std::vector<CheckResult> run_selftest(std::uint64_t seed = 7);

}  // namespace fastjd

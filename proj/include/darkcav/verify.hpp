#pragma once

// Self-check suite behind `darkcav verify`: randomized invariant checks over
// the numerics, model, darkstates and protocol modules.

#include <cstdint>
#include <string>
#include <vector>

namespace darkcav {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 20241018;
    int draws = 200;
    /// Test hook: perturbs one off-diagonal entry of every built Hamiltonian
    /// so the Hermiticity check has something to catch.
    bool inject_non_hermitian = false;
};

std::vector<std::string> available_checks();

/// Runs the named checks in the given order. Throws std::invalid_argument on
/// an empty selection or an unknown name.
std::vector<CheckResult> run_checks(const std::vector<std::string>& names, const VerifyOptions& options);

}  // namespace darkcav

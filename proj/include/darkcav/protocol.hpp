#pragma once

// The Zeeman/Stark jump protocol on two atoms.
//
// Start from one photon and both atoms down, |1>_p|00>_a. Atom 1 is shifted
// (omega_a + ds, g1 + dg) while the system evolves for a time dt; then the
// shift is switched off and the cavity drained. No photon at the detector
// means the atoms were projected onto the unshifted dark state
// (-g2|10> + g1|01>)/norm, which happens with probability
// p_ds(dt) = |<dark| exp(-i H_ZS dt) |1>_p|00>_a>|^2.
//
// Times are dimensionless, tau = omega_c * t_physical; all frequencies are
// in the same units as omega_c (normally omega_c = 1).

#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "darkcav/model.hpp"
#include "darkcav/numerics.hpp"
#include "darkcav/random.hpp"

namespace darkcav {

/// dt drawn uniformly from [0, horizon].
struct UniformDeltaT {};
/// dt held at a fixed value.
struct FixedDeltaT {
    double t = 0.0;
};
using DeltaTDistribution = std::variant<UniformDeltaT, FixedDeltaT>;

struct ZSJumpConfig {
    double omega_c = 1.0;
    double omega_a = 1.0;  ///< unshifted frequency of both atoms
    double g1 = 0.01;
    double g2 = 0.005;
    double ds = 0.0;  ///< frequency shift of atom 1
    double dg = 0.0;  ///< coupling shift of atom 1
    /// Time horizon. Unset means one beat period, 2 pi / (smallest level gap of H_ZS).
    std::optional<double> t_max;
    int t_steps = 2001;
    DeltaTDistribution delta_t = UniformDeltaT{};
    std::uint64_t seed = 0;

    /// Resonant atoms, g1 = coupling, g2 = coupling / 2.
    static ZSJumpConfig with_half_coupling(double g1, double ds = 0.0, double dg = 0.0);
};

/// Throws std::invalid_argument on the first violated constraint.
void validate(const ZSJumpConfig& cfg);

/// Two-atom model of the unshifted system.
CavityModel base_model(const ZSJumpConfig& cfg);
/// Single-excitation block of the shifted system, H_ZS(ds, dg).
ComplexMatrixXd zs_hamiltonian(const ZSJumpConfig& cfg);
/// |1>_p|00>_a in block order.
StateVectorXd initial_state();

/// Evaluates the jump for one configuration; construction diagonalizes H_ZS once.
class ZSJump {
public:
    explicit ZSJump(const ZSJumpConfig& cfg);

    const ZSJumpConfig& config() const { return cfg_; }
    const SpectrumXd& spectrum() const { return spectrum_; }

    /// <dark(g1, g2)| exp(-i H_ZS t) |1>_p|00>_a
    std::complex<double> amplitude(double t) const;
    double yield(double t) const { return std::norm(amplitude(t)); }
    /// exp(-i H_ZS t) |1>_p|00>_a
    StateVectorXd state(double t) const;

    /// cfg.t_max if set, else the beat period.
    double horizon() const { return horizon_; }
    double beat_period() const;
    /// Time average of the yield over [0, horizon], in closed form.
    double mean_yield() const;
    double mean_yield(double horizon) const;

private:
    ZSJumpConfig cfg_;
    SpectrumXd spectrum_;
    Eigen::VectorXcd weights_;  ///< <dark|v_k><v_k|psi0>
    double horizon_ = 0.0;
};

std::complex<double> dark_amplitude(const ZSJumpConfig& cfg, double t);

struct CurvePoint {
    double t = 0.0;
    double p = 0.0;
};

/// Yield sampled on t_steps uniform points of [0, horizon].
std::vector<CurvePoint> pds_curve(const ZSJumpConfig& cfg);

struct YieldPeak {
    double t_star = 0.0;
    double p_star = 0.0;
};

/// Grid argmax of the yield, refined by golden-section search between the
/// neighbouring grid points (to 1e-6 in t).
YieldPeak pds_max(const ZSJumpConfig& cfg);

struct GridRange {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;

    std::vector<double> values() const;
};

struct SweepResult {
    std::vector<double> ds_grid;
    std::vector<double> dg_grid;
    Eigen::MatrixXd p_max;   ///< rows follow ds, columns dg
    Eigen::MatrixXd t_star;

    /// (row, col) of the largest yield; first occurrence in row-major order.
    std::pair<Eigen::Index, Eigen::Index> argmax() const;
};

/// pds_max over the (ds, dg) grid. Grid points run in parallel on `workers`
/// threads; the result does not depend on the worker count.
SweepResult sweep(const ZSJumpConfig& base, const GridRange& ds_range, const GridRange& dg_range,
                  unsigned workers = 1);

enum class Outcome { photon_detected, dark_success };

const char* to_string(Outcome o);

struct CycleRecord {
    int cycle_index = 0;  ///< 1-based
    double delta_t = 0.0;
    double p_ds = 0.0;
    Outcome outcome = Outcome::photon_detected;
};

/// Repeat-until-success: each cycle draws dt, computes p_ds(dt) and an ideal
/// photon-drain measurement (success with probability p_ds). Stops at the
/// first success or after max_cycles.
std::vector<CycleRecord> simulate_cycles(const ZSJumpConfig& cfg, int max_cycles, RandomSource& rng);

struct TrialResult {
    int cycles_used = 0;
    bool success = false;
};

/// Independent trials, trial i using RandomSource(cfg.seed).derive(i).
std::vector<TrialResult> run_trials(const ZSJumpConfig& cfg, int trials, int max_cycles, unsigned workers = 1);

/// 1 - (1 - p)^k, accurate for small p.
double success_after_k(double p, long long k);

struct SuccessCurveRow {
    long long k = 0;
    double empirical = 0.0;
    double analytic = 0.0;
    double standard_error = 0.0;  ///< binomial, at the analytic probability
};

std::vector<SuccessCurveRow> success_curve(const std::vector<TrialResult>& trials, double p,
                                           const std::vector<long long>& ks);

/// Kolmogorov-Smirnov distance between the empirical success-cycle CDF and
/// the geometric CDF with parameter p, over cycles 1..max_cycles (censored
/// trials count as "later than max_cycles").
double geometric_ks_statistic(const std::vector<TrialResult>& trials, double p, int max_cycles);

/// Asymptotic one-sample KS critical value sqrt(-ln(alpha/2)/2)/sqrt(n).
double ks_critical_value(std::size_t n, double alpha);

}  // namespace darkcav

#include "darkcav/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "darkcav/darkstates.hpp"
#include "darkcav/parallel.hpp"

namespace darkcav {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Longest automatic horizon, in units of 1/omega_c.
constexpr double kMaxAutoHorizonPeriods = 1e4;

template <typename F>
double golden_section_max(F f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ZSJumpConfig ZSJumpConfig::with_half_coupling(double g1, double ds, double dg) {
    ZSJumpConfig cfg;
    cfg.g1 = g1;
    cfg.g2 = g1 / 2.0;
    cfg.ds = ds;
    cfg.dg = dg;
    return cfg;
}

void validate(const ZSJumpConfig& cfg) {
    require(std::isfinite(cfg.omega_c) && cfg.omega_c > 0.0, "omega_c must be positive");
    require(std::isfinite(cfg.omega_a) && cfg.omega_a > 0.0, "omega_a must be positive");
    require(std::isfinite(cfg.g1) && cfg.g1 > 0.0, "g1 must be positive");
    require(std::isfinite(cfg.g2) && cfg.g2 > 0.0, "g2 must be positive");
    require(std::isfinite(cfg.ds) && std::isfinite(cfg.dg), "ds and dg must be finite");
    require(cfg.g1 + cfg.dg >= 0.0, "g1 + dg must be non-negative");
    require(cfg.omega_a + cfg.ds > 0.0, "omega_a + ds must be positive");
    require(!cfg.t_max || (std::isfinite(*cfg.t_max) && *cfg.t_max > 0.0), "t_max must be positive");
    require(cfg.t_steps >= 2, "t_steps must be >= 2");
    if (const auto* fixed = std::get_if<FixedDeltaT>(&cfg.delta_t)) {
        require(std::isfinite(fixed->t) && fixed->t >= 0.0, "fixed delta_t must be >= 0");
    }
}

CavityModel base_model(const ZSJumpConfig& cfg) {
    CavityModel m;
    m.omega_c = cfg.omega_c;
    m.atoms = {{cfg.omega_a, cfg.g1, {}}, {cfg.omega_a, cfg.g2, {}}};
    m.photon_cutoff = 1;
    m.rwa = true;
    return m;
}

ComplexMatrixXd zs_hamiltonian(const ZSJumpConfig& cfg) {
    return single_excitation_block(apply_zs_shift(base_model(cfg), 0, cfg.ds, cfg.dg));
}

StateVectorXd initial_state() {
    return StateVectorXd::Unit(3, 2);
}

ZSJump::ZSJump(const ZSJumpConfig& cfg) : cfg_(cfg) {
    validate(cfg_);
    spectrum_ = herm_eig<double>(zs_hamiltonian(cfg_));
    const StateVectorXd dark = dark_state_block(cfg_.g1, cfg_.g2);
    const StateVectorXd psi0 = initial_state();
    weights_.resize(spectrum_.dim());
    for (Eigen::Index k = 0; k < spectrum_.dim(); ++k) {
        const auto v = spectrum_.eigenvectors.col(k);
        weights_[k] = dark.dot(v) * v.dot(psi0);
    }
    horizon_ = cfg_.t_max ? *cfg_.t_max : beat_period();
}

std::complex<double> ZSJump::amplitude(double t) const {
    std::complex<double> sum = 0.0;
    for (Eigen::Index k = 0; k < weights_.size(); ++k) {
        sum += weights_[k] * std::polar(1.0, -spectrum_.eigenvalues[k] * t);
    }
    return sum;
}

StateVectorXd ZSJump::state(double t) const {
    return evolve<double>(spectrum_, initial_state(), t);
}

double ZSJump::beat_period() const {
    const auto& ev = spectrum_.eigenvalues;
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < ev.size(); ++k) {
        const double d = ev[k] - ev[k - 1];
        if (d > 1e-12 * cfg_.omega_c) {
            gap = std::min(gap, d);
        }
    }
    const double cap = kTwoPi * kMaxAutoHorizonPeriods / cfg_.omega_c;
    return std::isfinite(gap) ? std::min(kTwoPi / gap, cap) : cap;
}

double ZSJump::mean_yield() const {
    return mean_yield(horizon_);
}

double ZSJump::mean_yield(double horizon) const {
    // <|sum_k w_k e^{-i b_k t}|^2> = sum_{k,l} w_k conj(w_l) <e^{-i (b_k - b_l) t}>
    std::complex<double> total = 0.0;
    for (Eigen::Index k = 0; k < weights_.size(); ++k) {
        for (Eigen::Index l = 0; l < weights_.size(); ++l) {
            const double omega = spectrum_.eigenvalues[k] - spectrum_.eigenvalues[l];
            const double phase = omega * horizon;
            std::complex<double> avg = 1.0;
            if (std::abs(phase) > 1e-12) {
                avg = (1.0 - std::polar(1.0, -phase)) / std::complex<double>(0.0, phase);
            }
            total += weights_[k] * std::conj(weights_[l]) * avg;
        }
    }
    return std::clamp(total.real(), 0.0, 1.0);
}

std::complex<double> dark_amplitude(const ZSJumpConfig& cfg, double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("dark_amplitude: t must be >= 0");
    }
    return ZSJump(cfg).amplitude(t);
}

std::vector<CurvePoint> pds_curve(const ZSJumpConfig& cfg) {
    const ZSJump jump(cfg);
    const double horizon = jump.horizon();
    std::vector<CurvePoint> curve(static_cast<std::size_t>(cfg.t_steps));
    for (int i = 0; i < cfg.t_steps; ++i) {
        const double t = horizon * i / (cfg.t_steps - 1);
        curve[static_cast<std::size_t>(i)] = {t, jump.yield(t)};
    }
    return curve;
}

YieldPeak pds_max(const ZSJumpConfig& cfg) {
    const std::vector<CurvePoint> curve = pds_curve(cfg);
    const auto best = std::max_element(curve.begin(), curve.end(),
                                       [](const CurvePoint& a, const CurvePoint& b) { return a.p < b.p; });
    YieldPeak peak{best->t, best->p};
    if (peak.p_star <= 0.0) {
        return peak;
    }
    const auto i = static_cast<std::size_t>(best - curve.begin());
    const double lo = curve[i == 0 ? 0 : i - 1].t;
    const double hi = curve[std::min(i + 1, curve.size() - 1)].t;
    const ZSJump jump(cfg);
    const double t = golden_section_max([&](double s) { return jump.yield(s); }, lo, hi, 1e-6);
    const double p = jump.yield(t);
    if (p > peak.p_star) {
        peak = {t, p};
    }
    return peak;
}

std::vector<double> GridRange::values() const {
    if (count < 1) {
        throw std::invalid_argument("grid range needs at least one point");
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        v[static_cast<std::size_t>(i)] = i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1);
    }
    return v;
}

std::pair<Eigen::Index, Eigen::Index> SweepResult::argmax() const {
    std::pair<Eigen::Index, Eigen::Index> best{0, 0};
    for (Eigen::Index r = 0; r < p_max.rows(); ++r) {
        for (Eigen::Index c = 0; c < p_max.cols(); ++c) {
            if (p_max(r, c) > p_max(best.first, best.second)) {
                best = {r, c};
            }
        }
    }
    return best;
}

SweepResult sweep(const ZSJumpConfig& base, const GridRange& ds_range, const GridRange& dg_range, unsigned workers) {
    for (const GridRange* r : {&ds_range, &dg_range}) {
        require(std::isfinite(r->lo) && std::isfinite(r->hi), "sweep range must be finite");
        require(r->lo >= 0.0 && r->hi >= r->lo, "sweep range must satisfy 0 <= lo <= hi");
        require(r->count >= 1, "sweep range needs at least one point");
    }
    validate(base);
    SweepResult out;
    out.ds_grid = ds_range.values();
    out.dg_grid = dg_range.values();
    const auto rows = static_cast<Eigen::Index>(out.ds_grid.size());
    const auto cols = static_cast<Eigen::Index>(out.dg_grid.size());
    out.p_max.resize(rows, cols);
    out.t_star.resize(rows, cols);
    parallel_for(static_cast<std::size_t>(rows * cols), workers, [&](std::size_t flat) {
        const Eigen::Index r = static_cast<Eigen::Index>(flat) / cols;
        const Eigen::Index c = static_cast<Eigen::Index>(flat) % cols;
        ZSJumpConfig cfg = base;
        cfg.ds = out.ds_grid[static_cast<std::size_t>(r)];
        cfg.dg = out.dg_grid[static_cast<std::size_t>(c)];
        const YieldPeak peak = pds_max(cfg);
        out.p_max(r, c) = peak.p_star;
        out.t_star(r, c) = peak.t_star;
    });
    return out;
}

const char* to_string(Outcome o) {
    return o == Outcome::dark_success ? "dark_success" : "photon_detected";
}

namespace {

// Runs one trial, reporting each cycle to `on_cycle`.
template <typename OnCycle>
TrialResult run_one_trial(const ZSJump& jump, int max_cycles, RandomSource& rng, OnCycle&& on_cycle) {
    const auto* fixed = std::get_if<FixedDeltaT>(&jump.config().delta_t);
    const double fixed_p = fixed ? jump.yield(fixed->t) : 0.0;
    for (int cycle = 1; cycle <= max_cycles; ++cycle) {
        const double dt = fixed ? fixed->t : rng.uniform(0.0, jump.horizon());
        const double p = fixed ? fixed_p : jump.yield(dt);
        const bool success = rng.bernoulli(p);
        on_cycle(CycleRecord{cycle, dt, p, success ? Outcome::dark_success : Outcome::photon_detected});
        if (success) {
            return {cycle, true};
        }
    }
    return {max_cycles, false};
}

}  // namespace

std::vector<CycleRecord> simulate_cycles(const ZSJumpConfig& cfg, int max_cycles, RandomSource& rng) {
    require(max_cycles >= 1, "max_cycles must be >= 1");
    const ZSJump jump(cfg);
    std::vector<CycleRecord> records;
    run_one_trial(jump, max_cycles, rng, [&](const CycleRecord& r) { records.push_back(r); });
    return records;
}

std::vector<TrialResult> run_trials(const ZSJumpConfig& cfg, int trials, int max_cycles, unsigned workers) {
    require(trials >= 1, "trials must be >= 1");
    require(max_cycles >= 1, "max_cycles must be >= 1");
    const ZSJump jump(cfg);
    const RandomSource root(cfg.seed);
    std::vector<TrialResult> results(static_cast<std::size_t>(trials));
    parallel_for(results.size(), workers, [&](std::size_t i) {
        RandomSource rng = root.derive(i);
        results[i] = run_one_trial(jump, max_cycles, rng, [](const CycleRecord&) {});
    });
    return results;
}

double success_after_k(double p, long long k) {
    require(p >= 0.0 && p <= 1.0, "success_after_k: p must lie in [0, 1]");
    require(k >= 0, "success_after_k: k must be >= 0");
    if (k == 0 || p == 0.0) {
        return 0.0;
    }
    if (p == 1.0) {
        return 1.0;
    }
    return -std::expm1(static_cast<double>(k) * std::log1p(-p));
}

std::vector<SuccessCurveRow> success_curve(const std::vector<TrialResult>& trials, double p,
                                           const std::vector<long long>& ks) {
    std::vector<SuccessCurveRow> rows;
    const auto n = static_cast<double>(trials.size());
    for (long long k : ks) {
        const auto hits = std::count_if(trials.begin(), trials.end(),
                                        [k](const TrialResult& t) { return t.success && t.cycles_used <= k; });
        const double analytic = success_after_k(p, k);
        rows.push_back({k, static_cast<double>(hits) / n, analytic, std::sqrt(analytic * (1.0 - analytic) / n)});
    }
    return rows;
}

double geometric_ks_statistic(const std::vector<TrialResult>& trials, double p, int max_cycles) {
    std::vector<long long> histogram(static_cast<std::size_t>(max_cycles) + 1, 0);
    for (const auto& t : trials) {
        if (t.success && t.cycles_used <= max_cycles) {
            ++histogram[static_cast<std::size_t>(t.cycles_used)];
        }
    }
    const auto n = static_cast<double>(trials.size());
    double cumulative = 0.0;
    double d = 0.0;
    for (int k = 1; k <= max_cycles; ++k) {
        cumulative += static_cast<double>(histogram[static_cast<std::size_t>(k)]);
        d = std::max(d, std::abs(cumulative / n - success_after_k(p, k)));
    }
    return d;
}

double ks_critical_value(std::size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace darkcav

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "darkcav/csv.hpp"
#include "darkcav/darkstates.hpp"
#include "darkcav/model_file.hpp"
#include "darkcav/parallel.hpp"
#include "darkcav/protocol.hpp"
#include "darkcav/verify.hpp"

namespace darkcav::cli {

namespace {

/// Raised for bad input that passed CLI11 parsing (exit code 1).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string model_path;
    std::string out_path;
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
    std::optional<double> physical;  ///< omega_c in s^-1
};

/// Model used when no --model file is given: two resonant atoms, g2 = g1/2.
const char* const kDefaultModel =
    "omega_c = 1\n"
    "rwa = true\n"
    "photon_cutoff = 1\n"
    "atom.1.omega = 1\n"
    "atom.1.g = 0.01\n"
    "atom.2.omega = 1\n"
    "atom.2.g = 0.005\n";

/// Frequency shift whose optimal single-cycle yield is about 1e-4 for the default model.
constexpr double kPresetP1e4Ds = 1.4e-4;

ModelDescription load_description(const CommonOptions& opts) {
    if (opts.model_path.empty()) {
        std::istringstream in(kDefaultModel);
        auto entries = parse_key_values(in, "<default model>");
        apply_overrides(entries, opts.overrides);
        return interpret(entries, "<default model>");
    }
    return load_model_file(opts.model_path, opts.overrides);
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw UsageError("cannot write '" + path + "'");
            }
        }
        stream_ = file_ ? file_.get() : &fallback;
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

GridRange parse_range(const std::string& text, const char* flag) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) {
        parts.push_back(p);
    }
    try {
        if (parts.size() != 3) {
            throw std::invalid_argument("expected a:b:n");
        }
        GridRange r{parse_double(parts[0]), parse_double(parts[1]), static_cast<int>(parse_integer(parts[2]))};
        if (r.count < 1 || r.lo < 0.0 || r.hi < r.lo || (r.count == 1 && r.hi != r.lo)) {
            throw std::invalid_argument("need 0 <= a <= b and n >= 1 (n = 1 requires a == b)");
        }
        return r;
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(flag) + " '" + text + "': " + e.what());
    }
}

std::vector<std::string> complex_columns(Eigen::Index dim) {
    std::vector<std::string> cols;
    for (Eigen::Index i = 0; i < dim; ++i) {
        cols.push_back("c" + std::to_string(i) + "_re");
        cols.push_back("c" + std::to_string(i) + "_im");
    }
    return cols;
}

void append_components(std::vector<std::string>& row, const StateVectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        row.push_back(format_number(v[i].real()));
        row.push_back(format_number(v[i].imag()));
    }
}

Subspace resolve_subspace(const std::string& name, const CavityModel& m) {
    if (name == "single") {
        if (!m.rwa) {
            throw UsageError("--subspace single needs rwa = true");
        }
        return Subspace::single_excitation;
    }
    if (name == "full") {
        return Subspace::full;
    }
    return m.rwa ? Subspace::single_excitation : Subspace::full;
}

CavityModel shifted_model(const ModelDescription& d) {
    if (d.zs_ds == 0.0 && d.zs_dg == 0.0) {
        return d.model;
    }
    return apply_zs_shift(d.model, d.zs_atom, d.zs_ds, d.zs_dg);
}

ZSJumpConfig protocol_config(const ModelDescription& d, const CommonOptions& opts) {
    const CavityModel& m = d.model;
    if (m.n_atoms() != 2 || !m.rwa) {
        throw UsageError("the jump protocol needs exactly two atoms and rwa = true");
    }
    if (d.zs_atom != 0) {
        throw UsageError("the jump protocol shifts atom 1 (zs.atom = 1)");
    }
    if (std::abs(m.atoms[0].omega - m.atoms[1].omega) > kDegenerateTolerance * m.omega_c) {
        throw UsageError("the jump protocol needs equal unshifted atomic frequencies");
    }
    ZSJumpConfig cfg;
    cfg.omega_c = m.omega_c;
    cfg.omega_a = m.atoms[0].omega;
    cfg.g1 = m.atoms[0].g;
    cfg.g2 = m.atoms[1].g;
    cfg.ds = d.zs_ds;
    cfg.dg = d.zs_dg;
    cfg.seed = opts.seed;
    return cfg;
}

double frequency_scale(const CommonOptions& opts, double omega_c) {
    return opts.physical ? *opts.physical / omega_c : 1.0;
}

int run_spectrum(const CommonOptions& opts, const std::string& subspace_name, std::ostream& out) {
    const ModelDescription d = load_description(opts);
    const CavityModel m = shifted_model(d);
    const Subspace subspace = resolve_subspace(subspace_name, m);
    const ComplexMatrixXd h = subspace == Subspace::single_excitation ? single_excitation_block(m)
                                                                      : build_full_hamiltonian(m);
    const SpectrumXd spec = herm_eig<double>(h);
    const double scale = frequency_scale(opts, m.omega_c);

    std::optional<AnalyticSpectrum> analytic;
    if (subspace == Subspace::single_excitation && m.n_atoms() == 2) {
        analytic = analytic_spectrum(m.omega_c, m.atoms[0].omega, m.atoms[1].omega, m.atoms[0].g, m.atoms[1].g);
    }

    std::vector<std::string> header{"index", "eigenvalue"};
    if (analytic) {
        header.insert(header.end(), {"analytic_eigenvalue", "discrepancy"});
    }
    const auto comps = complex_columns(spec.dim());
    header.insert(header.end(), comps.begin(), comps.end());
    write_csv_row(out, header);

    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        std::vector<std::string> row{std::to_string(k), format_number(spec.eigenvalues[k] * scale)};
        if (analytic) {
            const auto i = static_cast<std::size_t>(k);
            const double discrepancy =
                std::max(std::abs(analytic->eigenvalues[i] - spec.eigenvalues[k]),
                         subspace_distance<double>(analytic->eigenvectors[i], spec.vector(k)));
            row.push_back(format_number(analytic->eigenvalues[i] * scale));
            row.push_back(format_number(discrepancy));
        }
        append_components(row, spec.vector(k));
        write_csv_row(out, row);
    }
    return kExitOk;
}

int run_dark_find(const CommonOptions& opts, const std::string& subspace_name, double tol, std::ostream& out) {
    const ModelDescription d = load_description(opts);
    const CavityModel m = shifted_model(d);
    const Subspace subspace = resolve_subspace(subspace_name, m);
    const auto states = find_dark_states(m, subspace, tol);
    const double scale = frequency_scale(opts, m.omega_c);
    const Eigen::Index dim = subspace == Subspace::single_excitation ? static_cast<Eigen::Index>(m.n_atoms() + 1)
                                                                     : full_dimension(m);
    std::vector<std::string> header{"index", "energy", "emit_residual", "absorb_residual", "photon_support"};
    const auto comps = complex_columns(dim);
    header.insert(header.end(), comps.begin(), comps.end());
    write_csv_row(out, header);
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& s = states[k];
        std::vector<std::string> row{std::to_string(k), format_number(s.energy * scale),
                                     format_number(s.report.emit_residual), format_number(s.report.absorb_residual),
                                     format_number(s.report.photon_support)};
        append_components(row, s.state);
        write_csv_row(out, row);
    }
    return kExitOk;
}

struct TimeOptions {
    std::optional<double> t_max;
    int t_steps = 2001;
};

void apply_time_options(ZSJumpConfig& cfg, const TimeOptions& t) {
    cfg.t_max = t.t_max;
    cfg.t_steps = t.t_steps;
}

int run_sweep(const CommonOptions& opts, const TimeOptions& times, const std::string& ds_text,
              const std::string& dg_text, std::ostream& out, std::ostream& err) {
    const ModelDescription d = load_description(opts);
    ZSJumpConfig cfg = protocol_config(d, opts);
    apply_time_options(cfg, times);
    const GridRange ds = parse_range(ds_text, "--ds-range");
    const GridRange dg = parse_range(dg_text, "--dg-range");
    const SweepResult result = sweep(cfg, ds, dg, worker_count_from_env());
    const double f = frequency_scale(opts, cfg.omega_c);

    write_csv_row(out, {"ds", "dg", "p_max", "t_star"});
    for (std::size_t r = 0; r < result.ds_grid.size(); ++r) {
        for (std::size_t c = 0; c < result.dg_grid.size(); ++c) {
            const auto ri = static_cast<Eigen::Index>(r);
            const auto ci = static_cast<Eigen::Index>(c);
            write_csv_row(out, {format_number(result.ds_grid[r] * f), format_number(result.dg_grid[c] * f),
                                format_number(result.p_max(ri, ci)), format_number(result.t_star(ri, ci) / f)});
        }
    }
    const auto [br, bc] = result.argmax();
    std::ostringstream summary;
    summary << "# global_max p_max=" << format_number(result.p_max(br, bc))
            << " ds=" << format_number(result.ds_grid[static_cast<std::size_t>(br)] * f)
            << " dg=" << format_number(result.dg_grid[static_cast<std::size_t>(bc)] * f)
            << " t_star=" << format_number(result.t_star(br, bc) / f);
    out << summary.str() << '\n';
    err << summary.str().substr(2) << '\n';
    return kExitOk;
}

struct ProtocolOptions {
    int trials = 1000;
    int max_cycles = 10000;
    std::string delta_t = "uniform";
    std::string preset;
};

int run_protocol(CommonOptions opts, const TimeOptions& times, const ProtocolOptions& popts, std::ostream& out,
                 std::ostream& err) {
    if (!popts.preset.empty()) {
        if (popts.preset != "p1e-4") {
            throw UsageError("unknown preset '" + popts.preset + "' (known: p1e-4)");
        }
        opts.overrides.insert(opts.overrides.begin(),
                              {"zs.ds=" + format_number(kPresetP1e4Ds), "zs.dg=0"});
    }
    const ModelDescription d = load_description(opts);
    ZSJumpConfig cfg = protocol_config(d, opts);
    apply_time_options(cfg, times);
    if (popts.trials < 1 || popts.max_cycles < 1) {
        throw UsageError("--trials and --max-cycles must be >= 1");
    }

    const YieldPeak peak = pds_max(cfg);
    const ZSJump jump(cfg);
    double p_reference = jump.mean_yield();
    std::string mode = "uniform";
    if (popts.delta_t == "tstar") {
        cfg.delta_t = FixedDeltaT{peak.t_star};
        p_reference = peak.p_star;
        mode = "fixed at t_star";
    } else if (popts.delta_t != "uniform") {
        double t = 0.0;
        try {
            t = parse_double(popts.delta_t);
        } catch (const std::invalid_argument&) {
            throw UsageError("--delta-t expects uniform, tstar or a number");
        }
        if (t < 0.0) {
            throw UsageError("--delta-t must be >= 0");
        }
        cfg.delta_t = FixedDeltaT{t};
        p_reference = jump.yield(t);
        mode = "fixed";
    }

    const auto trials = run_trials(cfg, popts.trials, popts.max_cycles, worker_count_from_env());
    write_csv_row(out, {"trial", "cycles_used", "outcome"});
    for (std::size_t i = 0; i < trials.size(); ++i) {
        write_csv_row(out, {std::to_string(i), std::to_string(trials[i].cycles_used),
                            trials[i].success ? "dark_success" : "photon_detected"});
    }

    std::vector<long long> ks;
    for (long long k = 1; k <= popts.max_cycles; k *= 10) {
        ks.push_back(k);
    }
    if (ks.back() != popts.max_cycles) {
        ks.push_back(popts.max_cycles);
    }
    const auto curve = success_curve(trials, p_reference, ks);
    const double f = frequency_scale(opts, cfg.omega_c);

    err << "# protocol summary\n";
    err << "p_star=" << format_number(peak.p_star) << " t_star=" << format_number(peak.t_star / f)
        << " mean_p=" << format_number(jump.mean_yield()) << " horizon=" << format_number(jump.horizon() / f)
        << " delta_t=" << mode << " p_per_cycle=" << format_number(p_reference) << '\n';
    const auto successes = std::count_if(trials.begin(), trials.end(), [](const TrialResult& t) { return t.success; });
    err << "success_fraction=" << format_number(static_cast<double>(successes) / static_cast<double>(trials.size()))
        << '\n';
    if (cfg.ds == 0.0 && cfg.dg == 0.0) {
        err << "null_result: without a shift the dark state is an eigenvector orthogonal to "
               "|1>_p|00>_a, so no cycle can succeed\n";
    }
    err << "k,empirical,analytic,standard_error,within_3se\n";
    bool all_within = true;
    for (const auto& row : curve) {
        const double tolerance = 3.0 * std::max(row.standard_error, 1.0 / static_cast<double>(trials.size()));
        const bool within = std::abs(row.empirical - row.analytic) <= tolerance;
        all_within = all_within && within;
        err << row.k << ',' << format_number(row.empirical) << ',' << format_number(row.analytic) << ','
            << format_number(row.standard_error) << ',' << (within ? "yes" : "no") << '\n';
    }
    err << "curve_agreement=" << (all_within ? "within 3 standard errors" : "OUTSIDE 3 standard errors") << '\n';
    return kExitOk;
}

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

int run_verify(const CommonOptions& opts, const std::optional<std::string>& checks, int draws, bool inject,
               bool list, std::ostream& out) {
    if (list) {
        for (const auto& name : available_checks()) {
            out << name << '\n';
        }
        return kExitOk;
    }
    const std::vector<std::string> names = checks ? split_csv_list(*checks) : available_checks();
    if (names.empty()) {
        throw UsageError("no checks selected");
    }
    VerifyOptions v;
    v.seed = opts.seed;
    v.draws = draws;
    v.inject_non_hermitian = inject;
    std::vector<CheckResult> results;
    try {
        results = run_checks(names, v);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    bool ok = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    out << (ok ? "all checks passed" : "some checks FAILED") << '\n';
    return ok ? kExitOk : kExitCheckFailed;
}

void add_common(CLI::App* sub, CommonOptions& opts, bool with_model = true) {
    if (with_model) {
        sub->add_option("--model", opts.model_path, "Model description file")->check(CLI::ExistingFile);
        sub->add_option("--set", opts.overrides, "Override a model key, key=value (repeatable)");
    }
    sub->add_option("--out", opts.out_path, "Output file (default: stdout)");
    sub->add_option("--seed", opts.seed, "Random seed");
    sub->add_option("--physical", opts.physical, "Report in physical units given omega_c in s^-1")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"darkcav: dark states of two-level atoms in a cavity"};
    app.require_subcommand(1);
    CommonOptions opts;
    TimeOptions times;
    ProtocolOptions popts;
    std::string subspace = "auto";
    double tol = 1e-9;
    std::string ds_range = "0:0.01:50";
    std::string dg_range = "0:0.007:50";
    std::optional<std::string> checks;
    int draws = 200;
    bool inject = false;
    bool list = false;

    auto* spectrum = app.add_subcommand("spectrum", "Eigenpairs of the model Hamiltonian (CSV)");
    add_common(spectrum, opts);
    spectrum->add_option("--subspace", subspace, "single | full | auto")
        ->check(CLI::IsMember({"single", "full", "auto"}));

    auto* dark = app.add_subcommand("dark-find", "Dark eigenstates of the model (CSV)");
    add_common(dark, opts);
    dark->add_option("--subspace", subspace, "single | full | auto")->check(CLI::IsMember({"single", "full", "auto"}));
    dark->add_option("--tol", tol, "Darkness tolerance")->check(CLI::PositiveNumber);

    auto* sw = app.add_subcommand("sweep", "Maximal dark-state yield over a (ds, dg) grid (CSV)");
    add_common(sw, opts);
    sw->add_option("--ds-range", ds_range, "a:b:n");
    sw->add_option("--dg-range", dg_range, "a:b:n");
    sw->add_option("--t-max", times.t_max, "Time horizon (default: one beat period)")->check(CLI::PositiveNumber);
    sw->add_option("--t-steps", times.t_steps, "Time grid points")->check(CLI::Range(2, 100000000));

    auto* proto = app.add_subcommand("protocol", "Monte-Carlo repeat-until-success trials (CSV + summary)");
    add_common(proto, opts);
    proto->add_option("--trials", popts.trials, "Number of independent trials");
    proto->add_option("--max-cycles", popts.max_cycles, "Cycle cap per trial");
    proto->add_option("--delta-t", popts.delta_t, "uniform | tstar | <time>");
    proto->add_option("--preset", popts.preset, "p1e-4: shift giving a per-cycle yield near 1e-4");
    proto->add_option("--t-max", times.t_max, "Time horizon (default: one beat period)")->check(CLI::PositiveNumber);
    proto->add_option("--t-steps", times.t_steps, "Time grid points")->check(CLI::Range(2, 100000000));

    auto* verify = app.add_subcommand("verify", "Run the invariant self-checks");
    add_common(verify, opts, false);
    verify->add_option("--checks", checks, "Comma-separated check names (default: all)");
    verify->add_option("--draws", draws, "Random draws per check")->check(CLI::Range(1, 1000000));
    verify->add_flag("--list", list, "List check names");
    verify->add_flag("--inject-non-hermitian", inject, "Test hook: corrupt built Hamiltonians")->group("");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Output sink(opts.out_path, out);
        if (spectrum->parsed()) {
            return run_spectrum(opts, subspace, *sink);
        }
        if (dark->parsed()) {
            return run_dark_find(opts, subspace, tol, *sink);
        }
        if (sw->parsed()) {
            return run_sweep(opts, times, ds_range, dg_range, *sink, err);
        }
        if (proto->parsed()) {
            return run_protocol(opts, times, popts, *sink, err);
        }
        return run_verify(opts, checks, draws, inject, list, *sink);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace darkcav::cli

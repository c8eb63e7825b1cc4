#pragma once

// Experiment runner: configuration, sweeps, and file output for each of the
// reproducible studies. Every compute_* function is pure given its arguments;
// run_* functions wrap them with CSV/PGM output under the output directory.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qkr/classical.hpp"
#include "qkr/config.hpp"
#include "qkr/ergostats.hpp"
#include "qkr/floquet.hpp"
#include "qkr/io.hpp"
#include "qkr/observables.hpp"
#include "qkr/phase_space.hpp"
#include "qkr/rng.hpp"

#ifndef QKR_VERSION
#define QKR_VERSION "1.0.0"
#endif

namespace qkr {

inline constexpr const char* version = QKR_VERSION;
inline constexpr double critical_kick = 0.971635;

enum class Experiment { poincare, degeneracy_scan, entropy_evolution, localization_scan, observable_check, basis_check };

inline const std::vector<std::pair<Experiment, std::string>>& experiment_names()
{
    static const std::vector<std::pair<Experiment, std::string>> names = {
        {Experiment::poincare, "poincare"},
        {Experiment::degeneracy_scan, "degeneracy-scan"},
        {Experiment::entropy_evolution, "entropy-evolution"},
        {Experiment::localization_scan, "localization-scan"},
        {Experiment::observable_check, "observable-check"},
        {Experiment::basis_check, "basis-check"},
    };
    return names;
}

inline std::string experiment_name(Experiment e)
{
    for (const auto& [k, v] : experiment_names())
        if (k == e)
            return v;
    throw Error("unknown experiment");
}

inline Experiment parse_experiment(const std::string& s)
{
    for (const auto& [k, v] : experiment_names())
        if (v == s)
            return k;
    std::string all;
    for (const auto& [k, v] : experiment_names())
        all += (all.empty() ? "" : ", ") + v;
    throw Error("unknown experiment '" + s + "' (expected one of: " + all + ")");
}

/// Default effective Planck constant for localization scans, 4 pi / (53 sqrt 5).
inline double default_irrational_hbar() { return 4.0 * std::numbers::pi / (53.0 * std::sqrt(5.0)); }

struct ExperimentConfig {
    Experiment experiment = Experiment::poincare;
    std::vector<long> ells;          // empty: per-experiment default
    std::vector<double> ks = {5.0};
    std::optional<long> kicks;       // empty: per-experiment default
    std::uint64_t seed = 1;
    long ensemble_size = 32;
    long n_cells = 20;
    long classical_points = 1000000;
    std::filesystem::path output_dir = "qkr-out";
    std::vector<long> L_list = {1000, 2000, 4000};
    std::optional<double> hbar_override;
    long k0 = 0;

    std::vector<long> ell_values() const
    {
        if (!ells.empty())
            return ells;
        switch (experiment) {
        case Experiment::poincare: return {40};
        case Experiment::degeneracy_scan: return {32};
        case Experiment::entropy_evolution: return {40};
        case Experiment::observable_check: return {10};
        case Experiment::basis_check: return {7};
        case Experiment::localization_scan: return {};
        }
        return {};
    }

    long kick_count() const
    {
        if (kicks)
            return *kicks;
        switch (experiment) {
        case Experiment::poincare: return 5;
        case Experiment::entropy_evolution: return 20;
        case Experiment::observable_check: return 5000;
        default: return 0;
        }
    }

    double hbar() const { return hbar_override.value_or(default_irrational_hbar()); }

    void validate() const
    {
        for (long ell : ell_values()) {
            if (ell < 1 || ell > 46340)
                throw Error("ell must lie in [1, 46340], got " + std::to_string(ell));
            if (experiment != Experiment::basis_check && ell % 2 != 0)
                throw Error("ell must be even, got " + std::to_string(ell));
        }
        if (ks.empty())
            throw Error("K list is empty");
        for (double k : ks)
            if (!(k >= 0.0) || !std::isfinite(k))
                throw Error("K must be finite and non-negative");
        if (kick_count() < 0)
            throw Error("kicks must be non-negative");
        if (ensemble_size < 1)
            throw Error("ensemble_size must be at least 1");
        if (n_cells < 1)
            throw Error("n_cells must be at least 1");
        if (classical_points < 1)
            throw Error("classical_points must be at least 1");
        if (hbar_override && !(*hbar_override > 0.0 && std::isfinite(*hbar_override)))
            throw Error("hbar must be positive");
        if (experiment == Experiment::observable_check && kick_count() < 1)
            throw Error("observable-check needs at least one kick");
        if (experiment == Experiment::localization_scan) {
            if (L_list.empty())
                throw Error("L_list is empty");
            for (std::size_t i = 0; i < L_list.size(); ++i) {
                if (L_list[i] < 1000)
                    throw Error("L_list entries must be at least 1000");
                if (i > 0 && L_list[i] <= L_list[i - 1])
                    throw Error("L_list must be strictly ascending");
            }
            for (double k : ks)
                if (!(k > critical_kick))
                    throw Error("localization-scan needs K above K_c = 0.971635, got " + io::format_real(k));
        }
    }

    /// Canonical `key = value` echo for output metadata.
    io::Metadata echo() const
    {
        auto join_l = [](const std::vector<long>& v) {
            std::string s;
            for (long x : v)
                s += (s.empty() ? "" : ",") + std::to_string(x);
            return s;
        };
        std::string k_text;
        for (double k : ks)
            k_text += (k_text.empty() ? "" : ",") + io::format_real(k);
        io::Metadata m;
        m.emplace_back("ell", join_l(ell_values()));
        m.emplace_back("K", k_text);
        m.emplace_back("kicks", std::to_string(kick_count()));
        m.emplace_back("ensemble_size", std::to_string(ensemble_size));
        m.emplace_back("n_cells", std::to_string(n_cells));
        m.emplace_back("classical_points", std::to_string(classical_points));
        if (experiment == Experiment::localization_scan) {
            m.emplace_back("L_list", join_l(L_list));
            m.emplace_back("hbar", io::format_real(hbar()));
            m.emplace_back("k0", std::to_string(k0));
        }
        return m;
    }
};

/// Apply one `key = value` setting.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "ell")
        cfg.ells = io::parse_integer_list(value, key);
    else if (key == "K")
        cfg.ks = io::parse_real_list(value, key);
    else if (key == "kicks")
        cfg.kicks = io::parse_integer(value, key);
    else if (key == "seed") {
        const std::string v = io::trim(value);
        try {
            std::size_t used = 0;
            if (!v.empty() && v[0] == '-')
                throw Error("");
            cfg.seed = std::stoull(v, &used, 0);
            if (used != v.size())
                throw Error("");
        } catch (...) {
            throw Error("invalid seed '" + value + "' (expected an unsigned 64-bit integer)");
        }
    } else if (key == "ensemble_size")
        cfg.ensemble_size = io::parse_integer(value, key);
    else if (key == "n_cells")
        cfg.n_cells = io::parse_integer(value, key);
    else if (key == "classical_points")
        cfg.classical_points = io::parse_integer(value, key);
    else if (key == "output_dir" || key == "out")
        cfg.output_dir = value;
    else if (key == "L_list")
        cfg.L_list = io::parse_integer_list(value, key);
    else if (key == "hbar" || key == "hbar_override")
        cfg.hbar_override = io::parse_real(value, key);
    else if (key == "k0")
        cfg.k0 = io::parse_integer(value, key);
    else if (key == "experiment") {
        if (parse_experiment(value) != cfg.experiment)
            throw Error("config names experiment '" + value + "' but '" + experiment_name(cfg.experiment) +
                        "' was requested");
    } else
        throw Error("unknown configuration key '" + key + "'");
}

inline ExperimentConfig make_config(Experiment e, const std::map<std::string, std::string>& settings)
{
    ExperimentConfig cfg;
    cfg.experiment = e;
    for (const auto& [k, v] : settings)
        apply_setting(cfg, k, v);
    return cfg;
}

// --- parallel sweeps -------------------------------------------------------

/// Worker count from QKR_THREADS (0 or unset: hardware concurrency).
inline unsigned sweep_threads()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QKR_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return unsigned(v);
    }
    return hw;
}

/// out[i] = fn(i) for i in [0, n), evaluated concurrently, results in index order.
template <class T, class Fn>
std::vector<T> ordered_map(std::size_t n, Fn fn)
{
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(sweep_threads(), std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

// --- shared helpers --------------------------------------------------------

inline io::Metadata output_metadata(const ExperimentConfig& cfg)
{
    io::Metadata m;
    m.emplace_back("experiment", experiment_name(cfg.experiment));
    m.emplace_back("version", version);
    m.emplace_back("generator", SeededRng::generator_name);
    m.emplace_back("seed", std::to_string(cfg.seed));
    for (auto& kv : cfg.echo())
        m.push_back(std::move(kv));
    return m;
}

inline std::string tag_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// Normalized state with independent complex Gaussian amplitudes on n_min .. n_min + dim - 1.
inline MomentumWavefunction random_gaussian_state(long n_min, long dim, SeededRng& rng)
{
    MomentumWavefunction psi;
    psi.n_min = n_min;
    psi.amplitudes.resize(dim);
    for (long k = 0; k < dim; ++k) {
        const double r = std::sqrt(-2.0 * std::log(1.0 - rng.uniform()));
        const double a = two_pi * rng.uniform();
        psi.amplitudes(k) = cplx(r * std::cos(a), r * std::sin(a));
    }
    psi.amplitudes.normalize();
    return psi;
}

/// Equal-amplitude, zero-phase superposition of torus cells (index = P * ell + X) on momenta 1..N.
inline MomentumWavefunction cell_superposition(const std::vector<long>& cells, const RotorConfig& cfg)
{
    MomentumWavefunction psi;
    psi.n_min = 1;
    psi.amplitudes = Eigen::VectorXcd::Zero(cfg.dim());
    const long ell = cfg.ell();
    const double w = 1.0 / std::sqrt(double(cells.size()));
    for (long c : cells) {
        const MomentumWavefunction b = make_basis_state(c % ell, c / ell, cfg);
        psi.amplitudes.segment(b.n_min - 1, ell) += w * b.amplitudes;
    }
    return psi;
}

inline CellDistribution torus_distribution(const MomentumWavefunction& psi, const RotorConfig& cfg)
{
    return fold_momentum(project_to_cells(psi, cfg), cfg);
}

// --- poincare --------------------------------------------------------------

struct PoincareResult {
    long ell = 0;
    double kick = 0.0;
    long kicks = 0;
    CellDistribution quantum{2, 0, 2, true};
    CellDistribution classical{2, 0, 2, true};
    double total_variation = 0.0;
    double entropy_quantum = 0.0;
    double entropy_classical = 0.0;
};

/// Quantum and classical sections for one (ell, K), sharing the seeded initial cells.
inline PoincareResult compute_poincare(long ell, double kick, long kicks, long n_cells, long classical_points,
                                       std::uint64_t seed)
{
    const RotorConfig cfg(int(ell), kick);
    cfg.require_even("poincare");
    if (n_cells > cfg.dim())
        throw Error("n_cells exceeds the number of cells (" + std::to_string(cfg.dim()) + ")");
    SeededRng pick(SeededRng::derive(seed, 1));
    const std::vector<long> cells = pick.distinct(n_cells, cfg.dim());

    MomentumWavefunction psi = cell_superposition(cells, cfg);
    const CellDistribution initial = torus_distribution(psi, cfg);
    ClassicalEnsemble ens = sample_from_cells(initial, classical_points, SeededRng::derive(seed, 2), cfg);

    KickPropagator prop(cfg, 1);
    for (long t = 0; t < kicks; ++t)
        prop.step(psi);
    ens = evolve_ensemble(ens, kick, int(kicks));

    PoincareResult r;
    r.ell = ell;
    r.kick = kick;
    r.kicks = kicks;
    r.quantum = torus_distribution(psi, cfg);
    r.classical = coarse_grain(ens, cfg);
    r.total_variation = total_variation(r.quantum, r.classical);
    r.entropy_quantum = entropy(r.quantum);
    r.entropy_classical = entropy(r.classical);
    return r;
}

inline void write_cell_csv(const std::filesystem::path& path, const io::Metadata& meta, const CellDistribution& d)
{
    io::CsvWriter csv(path, meta, {"X", "P", "probability"});
    for (long p = 0; p < d.ell(); ++p)
        for (int x = 0; x < d.ell(); ++x)
            csv.write_row({std::to_string(x), std::to_string(p), io::format_real(d.at(x, p))});
}

// --- degeneracy scan -------------------------------------------------------

struct DegeneracyRow {
    long ell = 0;
    double kick = 0.0;
    double eta = std::nan("");
    double eta_r2 = std::nan("");
    double zeta = std::nan("");
    double zeta_r2 = std::nan("");
    double spacing_ratio = std::nan("");
    std::string error;
};

inline DegeneracyRow compute_degeneracy(long ell, double kick)
{
    DegeneracyRow row;
    row.ell = ell;
    row.kick = kick;
    try {
        const RotorConfig cfg(int(ell), kick);
        const FloquetSpectrum spec = quasi_energy_spectrum(build_periodic_matrix(cfg), false);
        const DegeneracyReport eta = eta_of_spectrum(spec);
        const DegeneracyReport zeta = zeta_of_spectrum(spec);
        row.eta = eta.parameter;
        row.eta_r2 = eta.r_squared;
        row.zeta = zeta.parameter;
        row.zeta_r2 = zeta.r_squared;
        row.spacing_ratio = spacing_ratio(spec);
    } catch (const std::exception& e) {
        row = DegeneracyRow{};
        row.ell = ell;
        row.kick = kick;
        row.error = e.what();
    }
    return row;
}

// --- entropy evolution -----------------------------------------------------

struct EntropySeries {
    double kick = 0.0;
    std::vector<double> mean;  // index = kick number, 0 .. kicks
    std::vector<double> stdev; // population standard deviation across starting cells
};

/// Starting cells for the entropy study: distinct torus cells, shared by every K.
inline std::vector<long> entropy_start_cells(long ell, long count, std::uint64_t seed)
{
    SeededRng rng(SeededRng::derive(seed, 3));
    return rng.distinct(count, ell * ell);
}

inline EntropySeries compute_entropy_series(long ell, double kick, long kicks, const std::vector<long>& cells)
{
    const RotorConfig cfg(int(ell), kick);
    cfg.require_even("entropy-evolution");
    const std::size_t steps = std::size_t(kicks) + 1;
    std::vector<std::vector<double>> s(cells.size(), std::vector<double>(steps));
    KickPropagator prop(cfg, 1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        MomentumWavefunction psi = cell_superposition({cells[i]}, cfg);
        s[i][0] = entropy(torus_distribution(psi, cfg));
        for (std::size_t t = 1; t < steps; ++t) {
            prop.step(psi);
            s[i][t] = entropy(torus_distribution(psi, cfg));
        }
    }
    EntropySeries out;
    out.kick = kick;
    for (std::size_t t = 0; t < steps; ++t) {
        double m = 0.0;
        for (const auto& row : s)
            m += row[t];
        m /= double(s.size());
        double v = 0.0;
        for (const auto& row : s)
            v += (row[t] - m) * (row[t] - m);
        out.mean.push_back(m);
        out.stdev.push_back(std::sqrt(v / double(s.size())));
    }
    return out;
}

// --- localization scan -----------------------------------------------------

struct LocalizationRow {
    double kick = 0.0;
    long states = 0;
    double eta = 0.0;
    double eta_r2 = 0.0;
    double zeta = 0.0;
    double zeta_r2 = 0.0;
    long window_dim = 0;
    double max_eigen_defect = 0.0;
};

/// One windowed eigensolve at K, reused for every L in `states`.
inline std::vector<LocalizationRow> compute_localization(double kick, double hbar, long k0,
                                                         const std::vector<long>& states)
{
    const long largest = *std::max_element(states.begin(), states.end());
    const long dim = localization_window_dim(largest, hbar, kick);
    const WindowedSpectrum ws = windowed_spectrum_around(k0, dim, hbar, kick);
    std::vector<LocalizationRow> rows;
    for (long l : states) {
        const std::vector<double> e = closest_quasi_energies(ws, l);
        const DegeneracyReport eta = eta_of_values(e);
        const DegeneracyReport zeta = zeta_of_values(e);
        rows.push_back({kick, l, eta.parameter, eta.r_squared, zeta.parameter, zeta.r_squared, dim,
                        ws.max_eigen_defect});
    }
    return rows;
}

// --- observable check ------------------------------------------------------

struct ObservableRow {
    std::string observable;
    std::string state;
    double spread = 0.0;
    AveragingReport report;

    double deviation() const { return std::abs(report.time_average - report.diagonal_average); }
};

inline std::vector<ObservableRow> compute_observable_check(long ell, double kick, long kicks, long states,
                                                           std::uint64_t seed)
{
    const RotorConfig cfg(int(ell), kick);
    cfg.require_even("observable-check");
    const long n = cfg.dim();
    const FloquetSpectrum spec = quasi_energy_spectrum(build_periodic_matrix(cfg), true);

    const std::vector<Observable> obs = {cos_theta_observable(n), momentum_squared_observable(1, n, cfg.hbar()),
                                         cell_projector_observable(0, 0, cfg, 1, n)};
    std::vector<double> spreads;
    for (const Observable& a : obs)
        spreads.push_back(a.spread());

    SeededRng rng(SeededRng::derive(seed, 4));
    std::vector<MomentumWavefunction> psis;
    for (long i = 0; i < states; ++i)
        psis.push_back(random_gaussian_state(1, n, rng));

    std::vector<ObservableRow> rows;
    {
        const Observable id = identity_observable(n);
        rows.push_back({id.label(), "random_0", 0.0, fluctuation_report(psis[0], id, cfg, spec, kicks)});
    }
    {
        MomentumWavefunction phi;
        phi.n_min = 1;
        phi.amplitudes = spec.eigenvectors->col(0);
        rows.push_back({obs[0].label(), "floquet_0", spreads[0], fluctuation_report(phi, obs[0], cfg, spec, kicks)});
    }
    const auto body = ordered_map<std::vector<ObservableRow>>(psis.size(), [&](std::size_t i) {
        std::vector<ObservableRow> out;
        for (std::size_t a = 0; a < obs.size(); ++a)
            out.push_back({obs[a].label(), "random_" + std::to_string(i), spreads[a],
                           fluctuation_report(psis[i], obs[a], cfg, spec, kicks)});
        return out;
    });
    for (const auto& chunk : body)
        rows.insert(rows.end(), chunk.begin(), chunk.end());
    return rows;
}

// --- basis check -----------------------------------------------------------

struct OrthonormalityEntry {
    long x1, p1, x2, p2;
    double residual;
};

/// |<X',P'|X,P> - delta| for all cells with P, P' in -2..2.
inline std::vector<OrthonormalityEntry> basis_orthonormality(long ell)
{
    const RotorConfig cfg(int(ell), 0.0);
    std::vector<std::pair<std::pair<long, long>, MomentumWavefunction>> states;
    for (long p = -2; p <= 2; ++p)
        for (long x = 0; x < ell; ++x)
            states.push_back({{x, p}, make_basis_state(x, p, cfg)});
    std::vector<OrthonormalityEntry> out;
    for (const auto& [a, sa] : states)
        for (const auto& [b, sb] : states) {
            const double delta = (a == b) ? 1.0 : 0.0;
            out.push_back({a.first, a.second, b.first, b.second, std::abs(inner(sa, sb) - delta)});
        }
    return out;
}

struct SpreadScaling {
    std::vector<long> ells;
    std::vector<double> rel_l;      // sqrt(Var l) / N
    std::vector<double> rel_theta;  // sqrt(Var theta) / N
    double slope_l = 0.0;
    double slope_theta = 0.0;
};

inline double loglog_slope(const std::vector<long>& xs, const std::vector<double>& ys)
{
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(double(xs[i]));
        my += std::log(ys[i]);
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(double(xs[i])) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(ys[i]) - my);
    }
    return sxy / sxx;
}

inline SpreadScaling spread_scaling(const std::vector<long>& ells)
{
    if (ells.size() < 2)
        throw Error("spread_scaling: need at least two grid sizes");
    SpreadScaling s;
    s.ells = ells;
    for (long ell : ells) {
        const RotorConfig cfg(int(ell), 0.0);
        const SpreadMoments m = basis_spread_moments(cfg);
        s.rel_l.push_back(std::sqrt(m.var_l) / double(cfg.dim()));
        s.rel_theta.push_back(std::sqrt(m.var_theta) / double(cfg.dim()));
    }
    s.slope_l = loglog_slope(ells, s.rel_l);
    s.slope_theta = loglog_slope(ells, s.rel_theta);
    return s;
}

/// Variance of the momentum index over |0,0>, from the amplitudes.
inline double seed_momentum_variance(long ell)
{
    const MomentumWavefunction psi = make_seed_state(RotorConfig(int(ell), 0.0));
    double m1 = 0.0, m2 = 0.0;
    for (long k = 0; k < psi.dim(); ++k) {
        const double w = std::norm(psi.amplitudes(k));
        const double n = double(psi.n_min + k);
        m1 += n * w;
        m2 += n * n * w;
    }
    return m2 - m1 * m1;
}

inline const std::vector<long>& spread_scaling_ells()
{
    static const std::vector<long> v = {16, 32, 64, 128};
    return v;
}

// --- runners ---------------------------------------------------------------

inline std::vector<std::filesystem::path> run_poincare(const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    std::vector<std::pair<long, double>> points;
    for (long ell : cfg.ell_values())
        for (double k : cfg.ks)
            points.emplace_back(ell, k);
    const auto results = ordered_map<PoincareResult>(points.size(), [&](std::size_t i) {
        return compute_poincare(points[i].first, points[i].second, cfg.kick_count(), cfg.n_cells,
                                cfg.classical_points, cfg.seed);
    });
    const io::Metadata meta = output_metadata(cfg);
    std::vector<fs::path> files;
    const fs::path summary = cfg.output_dir / "poincare_summary.csv";
    io::CsvWriter csv(summary, meta,
                      {"ell", "K", "kicks", "n_cells", "classical_points", "total_variation", "entropy_quantum",
                       "entropy_classical"});
    files.push_back(summary);
    for (const PoincareResult& r : results) {
        csv.write_row({std::to_string(r.ell), io::format_real(r.kick), std::to_string(r.kicks),
                       std::to_string(cfg.n_cells), std::to_string(cfg.classical_points),
                       io::format_real(r.total_variation), io::format_real(r.entropy_quantum),
                       io::format_real(r.entropy_classical)});
        const std::string stem = "ell" + std::to_string(r.ell) + "_K" + tag_real(r.kick);
        io::Metadata point = meta;
        point.emplace_back("point_ell", std::to_string(r.ell));
        point.emplace_back("point_K", io::format_real(r.kick));
        for (const auto& [name, dist] : {std::pair{"quantum", &r.quantum}, std::pair{"classical", &r.classical}}) {
            const fs::path c = cfg.output_dir / ("poincare_" + std::string(name) + "_" + stem + ".csv");
            const fs::path p = cfg.output_dir / ("poincare_" + std::string(name) + "_" + stem + ".pgm");
            write_cell_csv(c, point, *dist);
            io::write_pgm(p, *dist);
            files.push_back(c);
            files.push_back(p);
        }
    }
    return files;
}

inline std::vector<std::filesystem::path> run_degeneracy_scan(const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    std::vector<std::pair<long, double>> points;
    for (long ell : cfg.ell_values())
        for (double k : cfg.ks)
            points.emplace_back(ell, k);
    const auto rows = ordered_map<DegeneracyRow>(
        points.size(), [&](std::size_t i) { return compute_degeneracy(points[i].first, points[i].second); });

    const fs::path out = cfg.output_dir / "degeneracy_scan.csv";
    io::CsvWriter csv(out, output_metadata(cfg),
                      {"ell", "N", "K", "eta", "eta_r2", "zeta", "zeta_r2", "spacing_ratio"});
    std::vector<fs::path> files{out};
    std::vector<const DegeneracyRow*> failed;
    for (const DegeneracyRow& r : rows) {
        csv.write_row({std::to_string(r.ell), std::to_string(r.ell * r.ell), io::format_real(r.kick),
                       io::format_real(r.eta), io::format_real(r.eta_r2), io::format_real(r.zeta),
                       io::format_real(r.zeta_r2), io::format_real(r.spacing_ratio)});
        if (!r.error.empty())
            failed.push_back(&r);
    }
    if (!failed.empty()) {
        const fs::path err = cfg.output_dir / "degeneracy_scan_errors.csv";
        io::CsvWriter ecsv(err, output_metadata(cfg), {"ell", "K", "error"});
        for (const DegeneracyRow* r : failed) {
            std::string msg = r->error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            ecsv.write_row({std::to_string(r->ell), io::format_real(r->kick), msg});
        }
        files.push_back(err);
    }
    return files;
}

inline std::vector<std::filesystem::path> run_entropy_evolution(const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    const io::Metadata meta = output_metadata(cfg);
    std::vector<fs::path> files;
    for (long ell : cfg.ell_values()) {
        if (cfg.ensemble_size > ell * ell)
            throw Error("ensemble_size exceeds the number of cells (" + std::to_string(ell * ell) + ")");
        const std::vector<long> cells = entropy_start_cells(ell, cfg.ensemble_size, cfg.seed);
        const auto series = ordered_map<EntropySeries>(cfg.ks.size(), [&](std::size_t i) {
            return compute_entropy_series(ell, cfg.ks[i], cfg.kick_count(), cells);
        });
        const std::string name = cfg.ell_values().size() == 1 ? "entropy_evolution.csv"
                                                              : "entropy_evolution_ell" + std::to_string(ell) + ".csv";
        const fs::path out = cfg.output_dir / name;
        io::CsvWriter csv(out, meta, {"K", "kick", "mean_S", "std_S"});
        for (const EntropySeries& s : series)
            for (std::size_t t = 0; t < s.mean.size(); ++t)
                csv.write_row({io::format_real(s.kick), std::to_string(t), io::format_real(s.mean[t]),
                               io::format_real(s.stdev[t])});
        files.push_back(out);
    }
    return files;
}

inline std::vector<std::filesystem::path> run_localization_scan(const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    const auto blocks = ordered_map<std::vector<LocalizationRow>>(cfg.ks.size(), [&](std::size_t i) {
        return compute_localization(cfg.ks[i], cfg.hbar(), cfg.k0, cfg.L_list);
    });
    io::Metadata meta = output_metadata(cfg);
    for (const auto& b : blocks) {
        meta.emplace_back("window_dim_K" + tag_real(b.front().kick), std::to_string(b.front().window_dim));
        meta.emplace_back("max_eigen_defect_K" + tag_real(b.front().kick),
                          io::format_real(b.front().max_eigen_defect));
    }
    const fs::path out = cfg.output_dir / "localization_scan.csv";
    io::CsvWriter csv(out, meta, {"K", "L", "eta", "zeta"});
    for (const auto& b : blocks)
        for (const LocalizationRow& r : b)
            csv.write_row(
                {io::format_real(r.kick), std::to_string(r.states), io::format_real(r.eta), io::format_real(r.zeta)});
    return {out};
}

inline std::vector<std::filesystem::path> run_observable_check(const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    const io::Metadata meta = output_metadata(cfg);
    std::vector<fs::path> files;
    for (long ell : cfg.ell_values())
        for (double k : cfg.ks) {
            const auto rows = compute_observable_check(ell, k, cfg.kick_count(), cfg.ensemble_size, cfg.seed);
            const std::string name = (cfg.ell_values().size() == 1 && cfg.ks.size() == 1)
                                         ? "observable_check.csv"
                                         : "observable_check_ell" + std::to_string(ell) + "_K" + tag_real(k) + ".csv";
            const fs::path out = cfg.output_dir / name;
            io::CsvWriter csv(out, meta,
                              {"ell", "K", "observable", "state", "kicks", "time_average", "diagonal_average",
                               "fluctuation_sq", "bound", "trace_rho_mc_sq", "norm_aadag", "spread",
                               "within_bound"});
            for (const ObservableRow& r : rows)
                csv.write_row({std::to_string(ell), io::format_real(k), r.observable, r.state,
                               std::to_string(r.report.kicks), io::format_real(r.report.time_average),
                               io::format_real(r.report.diagonal_average), io::format_real(r.report.fluctuation_sq),
                               io::format_real(r.report.bound), io::format_real(r.report.trace_rho_mc_sq),
                               io::format_real(r.report.norm_aadag), io::format_real(r.spread),
                               r.report.within_bound() ? "1" : "0"});
            files.push_back(out);
        }
    return files;
}

inline std::vector<std::filesystem::path> run_basis_check(const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    const io::Metadata meta = output_metadata(cfg);
    std::vector<fs::path> files;
    const SpreadScaling scaling = spread_scaling(spread_scaling_ells());

    const fs::path summary = cfg.output_dir / "basis_summary.csv";
    io::CsvWriter s(summary, meta,
                    {"ell", "var_l", "var_l_numeric", "var_theta", "var_theta_numeric", "orthonormality_residual",
                     "slope_rel_l", "slope_rel_theta"});
    files.push_back(summary);

    const fs::path ortho = cfg.output_dir / "basis_orthonormality.csv";
    io::CsvWriter o(ortho, meta, {"ell", "X1", "P1", "X2", "P2", "residual"});
    files.push_back(ortho);

    const fs::path angle = cfg.output_dir / "basis_angle_density.csv";
    io::CsvWriter a(angle, meta, {"ell", "theta", "density"});
    files.push_back(angle);

    const fs::path mom = cfg.output_dir / "basis_momentum_density.csv";
    io::CsvWriter m(mom, meta, {"ell", "n", "probability"});
    files.push_back(mom);

    for (long ell : cfg.ell_values()) {
        const RotorConfig rc(int(ell), 0.0);
        const SpreadMoments closed = basis_spread_moments(rc);
        const auto entries = basis_orthonormality(ell);
        double worst = 0.0;
        for (const auto& e : entries) {
            worst = std::max(worst, e.residual);
            o.write_row({std::to_string(ell), std::to_string(e.x1), std::to_string(e.p1), std::to_string(e.x2),
                         std::to_string(e.p2), io::format_real(e.residual)});
        }
        s.write_row({std::to_string(ell), io::format_real(closed.var_l), io::format_real(seed_momentum_variance(ell)),
                     io::format_real(closed.var_theta), io::format_real(seed_angle_variance_numeric(int(ell))),
                     io::format_real(worst), io::format_real(scaling.slope_l), io::format_real(scaling.slope_theta)});
        const long samples = 720;
        for (long i = 0; i < samples; ++i) {
            const double theta = -std::numbers::pi + two_pi * double(i) / double(samples);
            a.write_row({std::to_string(ell), io::format_real(theta), io::format_real(seed_angle_density(theta, int(ell)))});
        }
        const MomentumWavefunction seed = make_seed_state(rc);
        for (long n = 1 - ell; n <= 2 * ell; ++n)
            m.write_row({std::to_string(ell), std::to_string(n), io::format_real(std::norm(seed.at(n)))});
    }

    const fs::path sc = cfg.output_dir / "basis_spread_scaling.csv";
    io::CsvWriter w(sc, meta, {"ell", "rel_spread_l", "rel_spread_theta"});
    for (std::size_t i = 0; i < scaling.ells.size(); ++i)
        w.write_row({std::to_string(scaling.ells[i]), io::format_real(scaling.rel_l[i]),
                     io::format_real(scaling.rel_theta[i])});
    files.push_back(sc);
    return files;
}

inline std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec)
        throw Error("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
    switch (cfg.experiment) {
    case Experiment::poincare: return run_poincare(cfg);
    case Experiment::degeneracy_scan: return run_degeneracy_scan(cfg);
    case Experiment::entropy_evolution: return run_entropy_evolution(cfg);
    case Experiment::localization_scan: return run_localization_scan(cfg);
    case Experiment::observable_check: return run_observable_check(cfg);
    case Experiment::basis_check: return run_basis_check(cfg);
    }
    throw Error("unknown experiment");
}

}  // namespace qkr

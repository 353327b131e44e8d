// Parameter scans and matching: the efficiency surface over mode count and
// coupling ratio, the optimal signal-port rate, and the physical optical
// depth of a matched design.

#pragma once

#include "echomem/model.hpp"
#include "echomem/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace echomem {

struct ScanRow {
    int mode_count;
    double ratio;        // gamma_in / gamma1
    double q_me;         // total retrieval efficiency
    double q_min_mode;   // worst per-mode retrieval efficiency incl. decoherence
    std::string annotation;  // non-empty when the quadrature complained
};

struct ScanResult {
    std::vector<int> m_grid;
    std::vector<double> ratio_grid;
    std::vector<ScanRow> rows;  // m-major: all ratios for m_grid[0], then m_grid[1], ...
};

// Uniform train builder: M copies of the prototype mode, spaced by
// spacing_factor / bandwidth, with the flip one more spacing after the last
// arrival.
inline ModeTrain make_uniform_train(const ModeSpec& proto, int mode_count,
                                    double spacing_factor = 5.0,
                                    double first_arrival = 0.0) {
    ModeTrain t;
    t.spacing_factor = spacing_factor;
    const double gap = spacing_factor / proto.bandwidth;
    t.modes.reserve(static_cast<std::size_t>(mode_count));
    for (int k = 0; k < mode_count; ++k) {
        ModeSpec m = proto;
        m.arrival_time = first_arrival + k * gap;
        t.modes.push_back(m);
    }
    t.flip_time = t.modes.back().arrival_time + gap;
    return t;
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, points > 1 ? static_cast<double>(i) / (points - 1) : 0.0);
    return g;
}

inline std::vector<int> int_range(int lo, int hi, int step = 1) {
    std::vector<int> g;
    for (int v = lo; v <= hi; v += step) g.push_back(v);
    return g;
}

// Efficiency surface over (mode count, gamma_in/gamma1). For each ratio the
// signal-port rate becomes gamma_in/ratio with the bath rate tied to the base
// config's gamma2/gamma1; the train is the base prototype extended to M modes
// with the spacing rule. Rows are emitted in deterministic grid order; a
// quadrature complaint annotates the row instead of aborting the scan.
inline ScanResult scan_ratio_modes(const SimConfig& base, const std::vector<double>& ratio_grid,
                                   const std::vector<int>& m_grid, int threads = 0) {
    if (ratio_grid.empty() || m_grid.empty())
        throw ConfigError({"scan: ratio and mode grids must be non-empty"});
    require_valid(base);

    const DerivedRates rates = derive_rates(base.ensemble);
    const double g2_over_g1 = base.cavity.gamma2 / base.cavity.gamma1;
    const ModeSpec proto = base.train.modes.front();
    const int m_max = *std::max_element(m_grid.begin(), m_grid.end());
    const ModeTrain full_train =
        make_uniform_train(proto, m_max, base.train.spacing_factor);

    ScanResult result;
    result.m_grid = m_grid;
    result.ratio_grid = ratio_grid;
    result.rows.resize(m_grid.size() * ratio_grid.size());

    // Per-ratio work: one retrieval quadrature (identical modes share it),
    // then every requested M is assembled from the decoherence factors.
    const auto compute_ratio = [&](std::size_t ri) {
        const double ratio = ratio_grid[ri];
        CavityParams cav;
        cav.gamma1 = rates.gamma_in / ratio;
        cav.gamma2 = cav.gamma1 * g2_over_g1;
        double q_me_mode = 0.0;
        std::string annotation;
        try {
            q_me_mode = retrieval_efficiency_mode(proto, cav, base.ensemble,
                                                  base.quadrature);
        } catch (const NumericError& e) {
            annotation = e.what();
        }
        const double gap = base.train.spacing_factor / proto.bandwidth;
        for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
            const int m = m_grid[mi];
            const double flip =
                full_train.modes[static_cast<std::size_t>(m - 1)].arrival_time + gap;
            double acc = 0.0, wsum = 0.0, qmin = 1.0;
            for (int k = 0; k < m; ++k) {
                const auto& mode = full_train.modes[static_cast<std::size_t>(k)];
                const double factor =
                    std::exp(-4.0 * base.ensemble.gamma21 * (flip - mode.arrival_time));
                acc += factor * q_me_mode * mode.mean_photons;
                wsum += mode.mean_photons;
                qmin = std::min(qmin, factor * q_me_mode);
            }
            ScanRow& row = result.rows[mi * ratio_grid.size() + ri];
            row.mode_count = m;
            row.ratio = ratio;
            row.q_me = wsum > 0.0 ? acc / wsum : 0.0;
            row.q_min_mode = qmin;
            row.annotation = annotation;
        }
    };

    const std::size_t nr = ratio_grid.size();
    std::size_t nthreads = threads > 0 ? static_cast<std::size_t>(threads)
                                       : std::thread::hardware_concurrency();
    nthreads = std::clamp<std::size_t>(nthreads, 1, nr);
    if (nthreads == 1) {
        for (std::size_t ri = 0; ri < nr; ++ri) compute_ratio(ri);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t ri = t; ri < nr; ri += nthreads) compute_ratio(ri);
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

struct MatchReport {
    double gamma1_required;          // narrowband matched value (= collective rate)
    double gamma1_optimal;           // argmax of the finite-bandwidth efficiency
    double q_optimal;                // retrieval efficiency at gamma1_optimal
    double q_narrowband_at_required; // closed-form value at the matched point
    double sensitivity_curvature;    // d^2 Q / d ratio^2 at the optimum
    std::optional<double> optical_depth;
};

// Physical optical depth of a cavity design: gamma1 [1/s] times length [m]
// over the speed of light.
inline double optical_depth(double gamma1_per_second, double length_m) {
    constexpr double c = 299792458.0;
    return gamma1_per_second * length_m / c;
}

// Locate the signal-port rate maximizing the single-mode retrieval
// efficiency at finite bandwidth. Grid pre-scan brackets the optimum, then
// golden-section refines within the bracket.
inline MatchReport find_optimal_gamma1(const EnsembleParams& ensemble, double gamma2,
                                       double mode_bandwidth, const QuadratureSettings& quad,
                                       ModeShape shape = ModeShape::Lorentzian) {
    const DerivedRates rates = derive_rates(ensemble);
    ModeSpec mode;
    mode.bandwidth = mode_bandwidth;
    mode.shape = shape;

    const auto objective = [&](double log_g1) {
        CavityParams cav;
        cav.gamma1 = std::exp(log_g1);
        cav.gamma2 = gamma2;
        return retrieval_efficiency_mode(mode, cav, ensemble, quad);
    };

    const double center = std::log(rates.gamma_tot);
    constexpr int kPre = 25;
    const double lo = center - std::log(50.0), hi = center + std::log(50.0);
    double best = center, best_val = -1.0;
    int best_i = -1;
    for (int i = 0; i < kPre; ++i) {
        const double x = lo + (hi - lo) * i / (kPre - 1);
        const double v = objective(x);
        if (v > best_val) {
            best_val = v;
            best = x;
            best_i = i;
        }
    }
    if (best_i == 0 || best_i == kPre - 1)
        throw NumericError("find_optimal_gamma1: optimum outside the pre-scan bracket");
    const double step = (hi - lo) / (kPre - 1);
    const double x_opt =
        golden_section_max(objective, best - step, best + step, 1e-10);

    MatchReport rep;
    rep.gamma1_required = rates.gamma_tot;
    rep.gamma1_optimal = std::exp(x_opt);
    rep.q_optimal = objective(x_opt);

    CavityParams matched;
    matched.gamma1 = rates.gamma_tot;
    matched.gamma2 = gamma2;
    rep.q_narrowband_at_required = storage_efficiency_narrowband(matched, ensemble);

    // curvature in the ratio variable r = gamma_in / gamma1 at the optimum
    const double r_opt = rates.gamma_in / rep.gamma1_optimal;
    const double hr = 1e-2 * r_opt;
    const auto q_of_ratio = [&](double r) {
        CavityParams cav;
        cav.gamma1 = rates.gamma_in / r;
        cav.gamma2 = gamma2;
        return retrieval_efficiency_mode(mode, cav, ensemble, quad);
    };
    rep.sensitivity_curvature =
        (q_of_ratio(r_opt + hr) - 2.0 * rep.q_optimal + q_of_ratio(r_opt - hr)) / (hr * hr);
    return rep;
}

}  // namespace echomem

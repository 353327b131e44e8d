// Domain types for the cavity photon-echo memory model.
//
// Unit convention: every rate (gamma1, gamma2, delta_in, gamma21, bandwidth,
// ...) is a dimensionless number in units of a common reference bandwidth;
// every time is in units of its inverse. The only operation that touches
// physical units is optimize::optical_depth.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace echomem {

// ---------------------------------------------------------------------------
// Error taxonomy. ConfigError carries the full list of violated invariants;
// NumericError covers runtime numerical failures (quadrature, oracle, poles).
// ---------------------------------------------------------------------------

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string all = "invalid configuration:";
        for (const auto& s : issues) {
            all += "\n  - ";
            all += s;
        }
        return all;
    }
    std::vector<std::string> issues_;
};

class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SingularEvaluation : public NumericError {
    using NumericError::NumericError;
};

class QuadratureError : public NumericError {
    using NumericError::NumericError;
};

class OracleError : public NumericError {
    using NumericError::NumericError;
};

// ---------------------------------------------------------------------------
// Parameter records
// ---------------------------------------------------------------------------

struct CavityParams {
    double gamma1 = 1.0;  // signal-port coupling rate, > 0
    double gamma2 = 0.0;  // bath-port loss rate, >= 0
};

struct EnsembleParams {
    double coupling_strength_sq = 1.0;  // N |g|^2 (atom number x mean coupling squared)
    double delta_in = 1.0;              // inhomogeneous half-width, > 0
    double gamma21 = 0.0;               // homogeneous decoherence rate, >= 0, < delta_in
};

struct DerivedRates {
    double delta_tot;   // delta_in + gamma21
    double gamma_tot;   // 2 N|g|^2 / delta_tot, collective absorption rate
    double gamma_in;    // 2 N|g|^2 / delta_in
    std::optional<std::uint64_t> m_max;  // ~ delta_in / gamma21; empty when gamma21 == 0
};

enum class ModeShape { Lorentzian, Gaussian };

inline const char* to_string(ModeShape s) {
    return s == ModeShape::Lorentzian ? "lorentzian" : "gaussian";
}

struct ModeSpec {
    double arrival_time = 0.0;
    double bandwidth = 1.0;     // spectral half-width (Lorentzian HWHM / Gaussian sigma)
    double mean_photons = 1.0;
    ModeShape shape = ModeShape::Lorentzian;
};

struct ModeTrain {
    std::vector<ModeSpec> modes;  // sorted by arrival_time, strictly ascending
    double flip_time = 0.0;       // detuning inversion instant; after the last pulse
    double spacing_factor = 5.0;  // required (tau_k - tau_{k-1}) * min_bandwidth
};

struct QuadratureSettings {
    double rel_tolerance = 1e-8;
    double abs_tolerance = 1e-12;
    int max_refinement_depth = 48;
};

// Widest detuning kept by the quantile discretization, as a multiple of
// delta_in. The default clips the 0.1% probability tails of the line.
inline double default_tail_truncation() {
    return 1.0 / std::tan(0.001 * std::numbers::pi);
}

struct OracleSettings {
    int n_bins = 2001;          // odd, >= 3 (center bin sits at zero detuning)
    double tail_truncation = default_tail_truncation();
    double dt = 0.0;            // integrator step; 0 = auto (0.01 / max rate)
    double t_end = 0.0;         // 0 = auto (end of the last echo window)
    int sample_stride = 0;      // trajectory sampling stride; 0 = auto
};

struct SimConfig {
    CavityParams cavity;
    EnsembleParams ensemble;
    ModeTrain train;
    QuadratureSettings quadrature;
    OracleSettings oracle;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline DerivedRates derive_rates(const EnsembleParams& e) {
    DerivedRates r;
    r.delta_tot = e.delta_in + e.gamma21;
    r.gamma_tot = 2.0 * e.coupling_strength_sq / r.delta_tot;
    r.gamma_in = 2.0 * e.coupling_strength_sq / e.delta_in;
    if (e.gamma21 > 0.0) {
        const double q = e.delta_in / e.gamma21;
        // floor with a guard against 99999.9999... representation of an
        // exact ratio
        const double rounded = std::nearbyint(q);
        const double m = (std::abs(q - rounded) < 1e-9 * std::max(q, 1.0))
                             ? rounded
                             : std::floor(q);
        r.m_max = static_cast<std::uint64_t>(m);
    }
    return r;
}

// Spectral density of one temporal mode at detuning nu from the carrier,
// normalized so that the integral over nu equals mean_photons.
inline double mode_spectral_density(const ModeSpec& mode, double nu) {
    const double d = mode.bandwidth;
    switch (mode.shape) {
    case ModeShape::Lorentzian:
        return mode.mean_photons * (1.0 / std::numbers::pi) * d / (d * d + nu * nu);
    case ModeShape::Gaussian:
        return mode.mean_photons / (d * std::sqrt(2.0 * std::numbers::pi)) *
               std::exp(-nu * nu / (2.0 * d * d));
    }
    return 0.0;
}

// Same density with mean_photons factored out. Efficiency integrals use this
// form so that modes with zero mean photon number still have a well-defined
// normalized profile.
inline double mode_unit_spectral_density(const ModeSpec& mode, double nu) {
    ModeSpec unit = mode;
    unit.mean_photons = 1.0;
    return mode_spectral_density(unit, nu);
}

// ---------------------------------------------------------------------------
// Validation. Every violated invariant is reported with its field path; no
// fail-fast. An empty result means the configuration is valid.
// ---------------------------------------------------------------------------

namespace detail {

inline void check(bool ok, std::vector<std::string>& out, const std::string& msg) {
    if (!ok) out.push_back(msg);
}

}  // namespace detail

inline void validate_cavity(const CavityParams& c, std::vector<std::string>& out,
                            const std::string& prefix = "cavity") {
    detail::check(std::isfinite(c.gamma1) && c.gamma1 > 0.0, out,
                  prefix + ".gamma1 > 0 violated");
    detail::check(std::isfinite(c.gamma2) && c.gamma2 >= 0.0, out,
                  prefix + ".gamma2 >= 0 violated");
}

inline void validate_ensemble(const EnsembleParams& e, std::vector<std::string>& out,
                              const std::string& prefix = "ensemble") {
    detail::check(std::isfinite(e.coupling_strength_sq) && e.coupling_strength_sq > 0.0,
                  out, prefix + ".coupling_strength_sq > 0 violated");
    detail::check(std::isfinite(e.delta_in) && e.delta_in > 0.0, out,
                  prefix + ".delta_in > 0 violated");
    detail::check(std::isfinite(e.gamma21) && e.gamma21 >= 0.0, out,
                  prefix + ".gamma21 >= 0 violated");
    detail::check(!(e.gamma21 >= e.delta_in), out,
                  prefix + ".gamma21 < delta_in violated (weak-decoherence regime)");
}

inline void validate_train(const ModeTrain& t, std::vector<std::string>& out,
                           const std::string& prefix = "train") {
    detail::check(!t.modes.empty(), out, prefix + ".modes must not be empty");
    detail::check(std::isfinite(t.spacing_factor) && t.spacing_factor > 0.0, out,
                  prefix + ".spacing_factor > 0 violated");
    double min_bw = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t.modes.size(); ++k) {
        const auto& m = t.modes[k];
        const std::string p = prefix + ".modes[" + std::to_string(k) + "]";
        detail::check(std::isfinite(m.bandwidth) && m.bandwidth > 0.0, out,
                      p + ".bandwidth > 0 violated");
        detail::check(std::isfinite(m.mean_photons) && m.mean_photons >= 0.0, out,
                      p + ".mean_photons >= 0 violated");
        if (m.bandwidth > 0.0) min_bw = std::min(min_bw, m.bandwidth);
        if (k > 0) {
            detail::check(m.arrival_time > t.modes[k - 1].arrival_time, out,
                          p + ".arrival_time must be strictly greater than the previous mode's");
        }
    }
    if (!t.modes.empty() && std::isfinite(min_bw)) {
        const double min_gap = t.spacing_factor / min_bw;
        for (std::size_t k = 1; k < t.modes.size(); ++k) {
            const double gap = t.modes[k].arrival_time - t.modes[k - 1].arrival_time;
            detail::check(gap >= min_gap * (1.0 - 1e-12), out,
                          prefix + ".modes[" + std::to_string(k) +
                              "]: inter-mode spacing " + std::to_string(gap) +
                              " below spacing_factor/min_bandwidth = " +
                              std::to_string(min_gap));
        }
        const auto& last = t.modes.back();
        if (last.bandwidth > 0.0) {
            detail::check(t.flip_time > last.arrival_time + 1.0 / last.bandwidth, out,
                          prefix + ".flip_time must exceed the last arrival by more "
                          "than one pulse duration (1/bandwidth)");
        }
    }
}

inline void validate_quadrature(const QuadratureSettings& q, std::vector<std::string>& out,
                                const std::string& prefix = "quadrature") {
    detail::check(std::isfinite(q.rel_tolerance) && q.rel_tolerance > 0.0, out,
                  prefix + ".rel_tolerance > 0 violated");
    detail::check(std::isfinite(q.abs_tolerance) && q.abs_tolerance > 0.0, out,
                  prefix + ".abs_tolerance > 0 violated");
    detail::check(q.max_refinement_depth >= 1, out,
                  prefix + ".max_refinement_depth >= 1 violated");
}

inline void validate_oracle(const OracleSettings& o, std::vector<std::string>& out,
                            const std::string& prefix = "oracle") {
    detail::check(o.n_bins >= 3, out, prefix + ".n_bins >= 3 violated");
    detail::check(o.n_bins % 2 == 1, out, prefix + ".n_bins must be odd");
    detail::check(std::isfinite(o.tail_truncation) && o.tail_truncation > 0.0, out,
                  prefix + ".tail_truncation > 0 violated");
    detail::check(std::isfinite(o.dt) && o.dt >= 0.0, out, prefix + ".dt >= 0 violated");
    detail::check(std::isfinite(o.t_end) && o.t_end >= 0.0, out,
                  prefix + ".t_end >= 0 violated");
    detail::check(o.sample_stride >= 0, out, prefix + ".sample_stride >= 0 violated");
}

inline std::vector<std::string> validate(const SimConfig& cfg) {
    std::vector<std::string> out;
    validate_cavity(cfg.cavity, out);
    validate_ensemble(cfg.ensemble, out);
    validate_train(cfg.train, out);
    validate_quadrature(cfg.quadrature, out);
    validate_oracle(cfg.oracle, out);
    return out;
}

inline void require_valid(const SimConfig& cfg) {
    auto issues = validate(cfg);
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace echomem

// Frequency-domain engine: cavity-ensemble transfer function, the spectral
// storage filter, and the closed-form storage/retrieval efficiencies obtained
// by integrating the filter against each mode's spectral density.

#pragma once

#include "echomem/model.hpp"
#include "echomem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace echomem {

// Response of the coupled cavity-ensemble system in the Laplace domain,
//   f(p) = [ p + (gamma1+gamma2)/2 + N|g|^2 / (p + delta_in + gamma21) ]^-1.
// Throws SingularEvaluation when p is too close to a pole of f or to the
// ensemble-line pole.
inline std::complex<double> transfer_function(std::complex<double> p,
                                              const CavityParams& cavity,
                                              const EnsembleParams& ensemble,
                                              double abs_tolerance = 1e-12) {
    const double kappa_half = 0.5 * (cavity.gamma1 + cavity.gamma2);
    const std::complex<double> line = p + (ensemble.delta_in + ensemble.gamma21);
    if (std::abs(line) < abs_tolerance)
        throw SingularEvaluation("transfer_function: p at the ensemble-line pole");
    const std::complex<double> denom = p + kappa_half + ensemble.coupling_strength_sq / line;
    if (std::abs(denom) < abs_tolerance)
        throw SingularEvaluation("transfer_function: p at a pole of the response");
    return 1.0 / denom;
}

// Single-pass storage transfer probability at detuning nu:
//   Z(nu, Delta, Gamma) = Delta^2/(Delta^2+nu^2)
//                       * 4 gamma1 Gamma / |gamma1+gamma2 + Gamma/(1 - i nu/Delta) - 2 i nu|^2.
// Z is even in nu and bounded by gamma1/(gamma1+gamma2) <= 1.
inline double spectral_filter(double nu, double delta, double gamma_abs,
                              const CavityParams& cavity) {
    if (gamma_abs == 0.0) return 0.0;
    const double line = delta * delta / (delta * delta + nu * nu);
    const std::complex<double> denom =
        cavity.gamma1 + cavity.gamma2 +
        gamma_abs / std::complex<double>(1.0, -nu / delta) -
        std::complex<double>(0.0, 2.0 * nu);
    return line * 4.0 * cavity.gamma1 * gamma_abs / std::norm(denom);
}

namespace detail {

inline double filter_scale(const CavityParams& c, double delta, double gamma_abs,
                           double bandwidth) {
    return std::max({delta, c.gamma1 + c.gamma2 + gamma_abs, bandwidth});
}

inline QuadratureResult filtered_mode_integral(const ModeSpec& mode,
                                               const CavityParams& cavity,
                                               double delta, double gamma_abs,
                                               int filter_power,
                                               const QuadratureSettings& quad) {
    const double scale = filter_scale(cavity, delta, gamma_abs, mode.bandwidth);
    return integrate_real_line(
        [&](double nu) {
            const double z = spectral_filter(nu, delta, gamma_abs, cavity);
            const double zp = filter_power == 1 ? z : z * z;
            return zp * mode_unit_spectral_density(mode, nu);
        },
        scale, quad);
}

inline double checked_efficiency(const QuadratureResult& r, const char* what) {
    if (!r.converged)
        throw QuadratureError(std::string(what) +
                              ": quadrature did not converge at max depth "
                              "(error estimate " +
                              std::to_string(r.error_estimate) + ")");
    return std::clamp(r.value, 0.0, 1.0);
}

}  // namespace detail

namespace detail {

inline QuadratureResult storage_mode_quad(const ModeSpec& mode, const CavityParams& cavity,
                                          const EnsembleParams& ensemble,
                                          const QuadratureSettings& quad) {
    const DerivedRates r = derive_rates(ensemble);
    return filtered_mode_integral(mode, cavity, r.delta_tot, r.gamma_tot, 1, quad);
}

inline QuadratureResult retrieval_mode_quad(const ModeSpec& mode, const CavityParams& cavity,
                                            const EnsembleParams& ensemble,
                                            const QuadratureSettings& quad) {
    const DerivedRates r = derive_rates(ensemble);
    return filtered_mode_integral(mode, cavity, ensemble.delta_in, r.gamma_in, 2, quad);
}

}  // namespace detail

// Storage efficiency of a single mode: the filter integrated against the
// mode's normalized spectral density, with the total-line parameters.
inline double storage_efficiency_mode(const ModeSpec& mode, const CavityParams& cavity,
                                      const EnsembleParams& ensemble,
                                      const QuadratureSettings& quad) {
    return detail::checked_efficiency(detail::storage_mode_quad(mode, cavity, ensemble, quad),
                                      "storage_efficiency_mode");
}

// Monochromatic (narrowband) limit of the storage efficiency; exact closed
// form, equal to the filter at zero detuning. Reaches 1 when the collective
// absorption rate matches gamma1 and the bath port is closed.
inline double storage_efficiency_narrowband(const CavityParams& cavity,
                                            const EnsembleParams& ensemble) {
    const DerivedRates r = derive_rates(ensemble);
    const double kappa = cavity.gamma1 + cavity.gamma2;
    const double ratio = r.gamma_tot / kappa;
    return (cavity.gamma1 / kappa) * (4.0 * ratio) / ((1.0 + ratio) * (1.0 + ratio));
}

// Retrieval efficiency of a single mode: the filter enters squared (one pass
// for absorption, one for re-emission) and with the bare inhomogeneous-line
// parameters.
inline double retrieval_efficiency_mode(const ModeSpec& mode, const CavityParams& cavity,
                                        const EnsembleParams& ensemble,
                                        const QuadratureSettings& quad) {
    return detail::checked_efficiency(
        detail::retrieval_mode_quad(mode, cavity, ensemble, quad),
        "retrieval_efficiency_mode");
}

// Photon-number-weighted mean of per-mode values.
inline double weighted_total(const std::vector<double>& values,
                             const std::vector<double>& weights) {
    double acc = 0.0, wsum = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        acc += values[k] * weights[k];
        wsum += weights[k];
    }
    return wsum > 0.0 ? acc / wsum : 0.0;
}

struct EfficiencyReport {
    std::vector<double> per_mode_storage;            // Q_st per mode
    std::vector<double> per_mode_retrieval;          // Q_me per mode (no decoherence)
    std::vector<double> per_mode_decoherence_factor; // exp(-4 gamma21 (tau - tau_k))
    std::vector<bool> per_mode_regime_warning;       // gamma21 not << bandwidth
    double total_storage = 0.0;
    double total_memory = 0.0;
    double max_quadrature_error = 0.0;
};

namespace detail {

// Modes generated by the same rule share bit-identical (shape, bandwidth);
// cache the quadrature per distinct pair within one report.
struct ModeCache {
    struct Entry {
        ModeShape shape;
        double bandwidth;
        double value;
    };
    std::vector<Entry> entries;

    template <typename F>
    double get(const ModeSpec& m, F&& compute) {
        for (const auto& e : entries)
            if (e.shape == m.shape && e.bandwidth == m.bandwidth) return e.value;
        const double v = compute();
        entries.push_back({m.shape, m.bandwidth, v});
        return v;
    }
};

}  // namespace detail

// Total multimode storage efficiency (photon-number-weighted mean over modes).
inline double storage_efficiency_total(const ModeTrain& train, const CavityParams& cavity,
                                       const EnsembleParams& ensemble,
                                       const QuadratureSettings& quad) {
    detail::ModeCache cache;
    std::vector<double> q, w;
    q.reserve(train.modes.size());
    w.reserve(train.modes.size());
    for (const auto& m : train.modes) {
        q.push_back(cache.get(
            m, [&] { return storage_efficiency_mode(m, cavity, ensemble, quad); }));
        w.push_back(m.mean_photons);
    }
    return weighted_total(q, w);
}

// Full multimode report: per-mode storage/retrieval efficiencies, decoherence
// factors accumulated over each mode's storage interval, and the weighted
// totals. total_memory = sum_k factor_k * Q_me_k * n_k / sum_k n_k.
inline EfficiencyReport memory_efficiency_total(const ModeTrain& train,
                                                const CavityParams& cavity,
                                                const EnsembleParams& ensemble,
                                                const QuadratureSettings& quad) {
    EfficiencyReport rep;
    detail::ModeCache st_cache, me_cache;
    const std::size_t m = train.modes.size();
    rep.per_mode_storage.reserve(m);
    rep.per_mode_retrieval.reserve(m);
    rep.per_mode_decoherence_factor.reserve(m);
    rep.per_mode_regime_warning.reserve(m);

    for (const auto& mode : train.modes) {
        rep.per_mode_storage.push_back(st_cache.get(mode, [&] {
            const auto q = detail::storage_mode_quad(mode, cavity, ensemble, quad);
            rep.max_quadrature_error = std::max(rep.max_quadrature_error, q.error_estimate);
            return detail::checked_efficiency(q, "storage_efficiency_mode");
        }));
        rep.per_mode_retrieval.push_back(me_cache.get(mode, [&] {
            const auto q = detail::retrieval_mode_quad(mode, cavity, ensemble, quad);
            rep.max_quadrature_error = std::max(rep.max_quadrature_error, q.error_estimate);
            return detail::checked_efficiency(q, "retrieval_efficiency_mode");
        }));
        rep.per_mode_decoherence_factor.push_back(
            std::exp(-4.0 * ensemble.gamma21 * (train.flip_time - mode.arrival_time)));
        rep.per_mode_regime_warning.push_back(ensemble.gamma21 > 0.1 * mode.bandwidth);
    }

    std::vector<double> weights, weighted_me;
    weights.reserve(m);
    weighted_me.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        weights.push_back(train.modes[k].mean_photons);
        weighted_me.push_back(rep.per_mode_retrieval[k] * rep.per_mode_decoherence_factor[k]);
    }
    rep.total_storage = weighted_total(rep.per_mode_storage, weights);
    rep.total_memory = weighted_total(weighted_me, weights);
    return rep;
}

// Spectral amplitude of the echo of mode k: the input amplitude (zero-phase
// square root of the spectral density) filtered once more by the storage
// filter, with the linear phase that places the reconstructed pulse at
// 2*flip_time - arrival_time.
inline std::complex<double> echo_spectral_amplitude(double nu, std::size_t mode_index,
                                                    const ModeTrain& train,
                                                    const CavityParams& cavity,
                                                    const EnsembleParams& ensemble) {
    const ModeSpec& mode = train.modes.at(mode_index);
    const DerivedRates r = derive_rates(ensemble);
    const double z = spectral_filter(nu, ensemble.delta_in, r.gamma_in, cavity);
    const double amp = -z * std::sqrt(mode_spectral_density(mode, nu));
    const double phase = nu * (mode.arrival_time - 2.0 * train.flip_time);
    return amp * std::exp(std::complex<double>(0.0, phase));
}

}  // namespace echomem

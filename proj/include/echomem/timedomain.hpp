// Brute-force oracle: direct numerical integration of the linearized
// cavity-ensemble equations with the detuning flip, independent of the
// frequency-domain engine.
//
// Model (classical complex amplitudes; exact for expectation values because
// the equations are linear and the initial atom/bath state carries no
// excitation):
//   da/dt   = sum_j g_j s_j - (gamma1+gamma2)/2 a + sqrt(gamma1) b_in(t)
//   ds_j/dt = -g_j a - (i D_j(t) + gamma21) s_j,   D_j(t > flip) = -D_j
//   b_out   = sqrt(gamma1) a - b_in          (one-port input-output convention)
// Homogeneous decoherence enters as deterministic decay of s_j; the couplings
// g_j are real by convention.
//
// Integration: fixed-step 4th-order scheme with the diagonal (detuning and
// decay) part propagated by exact exponentials, so arbitrarily large bin
// detunings do not constrain the step. The step only has to resolve the
// coupling and cavity rates.

#pragma once

#include "echomem/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace echomem {

struct AtomBin {
    double detuning;     // D_j
    double weight;       // w_j, sum to 1
    double coupling_sq;  // |g_j|^2 = N|g|^2 w_j
};

// Equal-weight quantile discretization of the Lorentzian line of half-width
// delta_in. Bin m sits at the tangent of its quantile; the configured
// tail_truncation clips the far wings (default keeps quantiles
// [0.001, 0.999]). Detunings come out exactly symmetric, the center bin at 0.
inline std::vector<AtomBin> discretize_ensemble(const EnsembleParams& ensemble,
                                                const OracleSettings& settings) {
    const int n = settings.n_bins;
    if (n < 3 || n % 2 == 0)
        throw OracleError("discretize_ensemble: n_bins must be odd and >= 3");
    const double span =
        2.0 * std::atan(settings.tail_truncation) / std::numbers::pi;  // quantile mass kept
    std::vector<AtomBin> bins(n);
    const double w = 1.0 / n;
    const double gsq = ensemble.coupling_strength_sq * w;
    const int half = n / 2;
    for (int m = 0; m <= half; ++m) {
        const double q_offset = span * ((m + 0.5) / n - 0.5);  // in (-span/2, 0]
        const double det = ensemble.delta_in * std::tan(std::numbers::pi * q_offset);
        bins[m] = {det, w, gsq};
        bins[n - 1 - m] = {-det, w, gsq};
    }
    bins[half].detuning = 0.0;
    return bins;
}

// Analytic input envelope of one mode, normalized so the integral of
// |envelope|^2 over time equals mean_photons.
//  - Lorentzian spectrum: one-sided exponential starting at the arrival time
//    (its power spectrum is exactly the Lorentzian density).
//  - Gaussian spectrum: transform-limited Gaussian centered on the arrival.
inline std::complex<double> input_envelope(const ModeSpec& mode, double t) {
    const double d = mode.bandwidth;
    const double dt = t - mode.arrival_time;
    switch (mode.shape) {
    case ModeShape::Lorentzian: {
        if (dt < 0.0) return {0.0, 0.0};
        return {std::sqrt(2.0 * mode.mean_photons * d) * std::exp(-d * dt), 0.0};
    }
    case ModeShape::Gaussian: {
        const double amp = std::sqrt(mode.mean_photons) *
                           std::pow(2.0 / std::numbers::pi, 0.25) * std::sqrt(d);
        return {amp * std::exp(-d * d * dt * dt), 0.0};
    }
    }
    return {0.0, 0.0};
}

struct InputField {
    std::function<std::complex<double>(double)> amplitude;
    double start = 0.0;               // identically zero before this instant
    std::vector<double> breakpoints;  // kinks/jumps; integration legs split here
};

inline InputField train_input(const ModeTrain& train) {
    InputField in;
    double start = std::numeric_limits<double>::infinity();
    for (const auto& m : train.modes) {
        start = std::min(start, m.shape == ModeShape::Lorentzian
                                    ? m.arrival_time
                                    : m.arrival_time - 7.0 / m.bandwidth);
        in.breakpoints.push_back(m.arrival_time);
    }
    in.start = start;
    auto modes = train.modes;
    in.amplitude = [modes](double t) {
        std::complex<double> b{0.0, 0.0};
        for (const auto& m : modes) b += input_envelope(m, t);
        return b;
    };
    return in;
}

struct EnergyAudit {
    double n_in = 0.0;                 // integral |b_in|^2
    double n_out_signal = 0.0;         // integral |b_out|^2
    double n_lost_bath = 0.0;          // gamma2 integral |a|^2
    double n_lost_decoherence = 0.0;   // 2 gamma21 integral sum_j |s_j|^2
    double n_residual = 0.0;           // |a|^2 + sum_j |s_j|^2 at t_end

    double defect() const {
        return n_in - (n_out_signal + n_lost_bath + n_lost_decoherence + n_residual);
    }
    double relative_defect() const {
        return std::abs(defect()) / std::max(n_in, 1e-30);
    }
};

struct Trajectory {
    std::vector<double> time;
    std::vector<std::complex<double>> cavity_amp;
    std::vector<std::complex<double>> input_amp;
    std::vector<std::complex<double>> output_amp;
    std::vector<double> excitation;           // sum_j |s_j|^2 at samples
    std::vector<double> cum_input_energy;     // integral of |b_in|^2 up to sample
    std::vector<double> cum_output_energy;    // integral of |b_out|^2
    std::vector<double> cum_output_tmoment;   // integral of t |b_out|^2
    std::vector<std::complex<double>> coherence_at_flip;
    std::vector<AtomBin> bins;
    EnergyAudit audit;
    double flip_time = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    double dt_main = 0.0;  // resolved requested step

    std::size_t index_at(double t) const {
        const auto it = std::lower_bound(time.begin(), time.end(), t);
        if (it == time.end()) return time.size() - 1;
        if (it == time.begin()) return 0;
        const std::size_t i = static_cast<std::size_t>(it - time.begin());
        return (t - time[i - 1] < time[i] - t) ? i - 1 : i;
    }

    double interp(const std::vector<double>& v, double t) const {
        if (t <= time.front()) return v.front();
        if (t >= time.back()) return v.back();
        const auto it = std::upper_bound(time.begin(), time.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - time.begin());
        const double u = (t - time[i - 1]) / (time[i] - time[i - 1]);
        return v[i - 1] + u * (v[i] - v[i - 1]);
    }
};

namespace detail {

struct OracleState {
    // structure-of-arrays coherences
    std::vector<double> sr, si;
    // exponential propagators over half and full step
    std::vector<double> ehr, ehi, efr, efi;
    std::vector<double> g;
    std::complex<double> a{0.0, 0.0};
    double excitation_ode = 0.0;  // sum_j |s_j|^2 integrated alongside
    double q_in = 0.0, q_out = 0.0, r_out = 0.0, q_dec = 0.0, q_bath = 0.0;

    // coherence sums S0 = sum g s, SE = sum g E s, SF = sum g F s
    std::complex<double> s0, se, sf;
    // constants per leg
    std::complex<double> ge;  // sum g^2 E
    double g0 = 0.0;          // sum g^2

    double direct_excitation() const {
        double p = 0.0;
        for (std::size_t j = 0; j < sr.size(); ++j) p += sr[j] * sr[j] + si[j] * si[j];
        return p;
    }
};

inline void prepare_leg(OracleState& st, const std::vector<AtomBin>& bins,
                        double gamma21, double h, bool flipped) {
    const std::size_t n = bins.size();
    st.ehr.resize(n);
    st.ehi.resize(n);
    st.efr.resize(n);
    st.efi.resize(n);
    const double decay = std::exp(-gamma21 * 0.5 * h);
    std::complex<double> ge{0.0, 0.0};
    double g0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double det = flipped ? -bins[j].detuning : bins[j].detuning;
        const double ph = -det * 0.5 * h;
        const double er = decay * std::cos(ph);
        const double ei = decay * std::sin(ph);
        st.ehr[j] = er;
        st.ehi[j] = ei;
        st.efr[j] = er * er - ei * ei;
        st.efi[j] = 2.0 * er * ei;
        const double gsq = st.g[j] * st.g[j];
        ge += gsq * std::complex<double>(er, ei);
        g0 += gsq;
    }
    st.ge = ge;
    st.g0 = g0;
    // refresh coherence sums with the new propagators
    std::complex<double> s0{0, 0}, se{0, 0}, sf{0, 0};
    for (std::size_t j = 0; j < n; ++j) {
        const std::complex<double> s{st.sr[j], st.si[j]};
        const std::complex<double> e{st.ehr[j], st.ehi[j]};
        const std::complex<double> f{st.efr[j], st.efi[j]};
        s0 += st.g[j] * s;
        se += st.g[j] * (e * s);
        sf += st.g[j] * (f * s);
    }
    st.s0 = s0;
    st.se = se;
    st.sf = sf;
}

}  // namespace detail

// Integrate the driven cavity-ensemble system from input.start to t_end with
// the detuning flip at flip_time. The trajectory is sampled every
// sample_stride steps (auto: capped near 20k samples) plus at every leg
// boundary.
inline Trajectory simulate_driven(const CavityParams& cavity, const EnsembleParams& ensemble,
                                  const OracleSettings& settings, const InputField& input,
                                  double flip_time, double t_end) {
    const DerivedRates rates = derive_rates(ensemble);
    const double dt_req =
        settings.dt > 0.0
            ? settings.dt
            : 0.01 / std::max({cavity.gamma1, rates.gamma_in, ensemble.delta_in});
    const double stability_rate =
        std::max({cavity.gamma1 + cavity.gamma2, rates.gamma_in, ensemble.delta_in,
                  std::sqrt(ensemble.coupling_strength_sq)});
    if (dt_req * stability_rate > 0.05 * (1.0 + 1e-9))
        throw OracleError("simulate: step too large for the fastest rate (dt * rate = " +
                          std::to_string(dt_req * stability_rate) + " > 0.05)");
    if (!(t_end > flip_time) || !(flip_time > input.start))
        throw OracleError("simulate: need start < flip_time < t_end");

    // integration legs split at input kinks and at the flip
    std::vector<double> edges{input.start, flip_time, t_end};
    for (double b : input.breakpoints)
        if (b > input.start && b < t_end) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                edges.end());

    std::size_t total_steps = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        total_steps += static_cast<std::size_t>(
            std::ceil((edges[i + 1] - edges[i]) / dt_req - 1e-9));
    const std::size_t stride =
        settings.sample_stride > 0
            ? static_cast<std::size_t>(settings.sample_stride)
            : std::max<std::size_t>(1, total_steps / 20000);

    const auto bins = discretize_ensemble(ensemble, settings);
    const std::size_t n = bins.size();

    detail::OracleState st;
    st.sr.assign(n, 0.0);
    st.si.assign(n, 0.0);
    st.g.resize(n);
    for (std::size_t j = 0; j < n; ++j) st.g[j] = std::sqrt(bins[j].coupling_sq);

    Trajectory traj;
    traj.bins = bins;
    traj.flip_time = flip_time;
    traj.t_start = input.start;
    traj.t_end = t_end;
    traj.dt_main = dt_req;

    const double root_g1 = std::sqrt(cavity.gamma1);
    const double kappa_half = 0.5 * (cavity.gamma1 + cavity.gamma2);
    const double g21 = ensemble.gamma21;

    const auto record = [&](double t) {
        const std::complex<double> b = t >= input.start ? input.amplitude(t)
                                                        : std::complex<double>{0.0, 0.0};
        traj.time.push_back(t);
        traj.cavity_amp.push_back(st.a);
        traj.input_amp.push_back(b);
        traj.output_amp.push_back(root_g1 * st.a - b);
        traj.excitation.push_back(st.direct_excitation());
        traj.cum_input_energy.push_back(st.q_in);
        traj.cum_output_energy.push_back(st.q_out);
        traj.cum_output_tmoment.push_back(st.r_out);
    };

    record(input.start);
    bool flipped = false;

    for (std::size_t leg = 0; leg + 1 < edges.size(); ++leg) {
        const double a_t = edges[leg];
        const double b_t = edges[leg + 1];
        const std::size_t steps = static_cast<std::size_t>(
            std::max(1.0, std::ceil((b_t - a_t) / dt_req - 1e-9)));
        const double h = (b_t - a_t) / static_cast<double>(steps);
        detail::prepare_leg(st, bins, g21, h, flipped);

        const double ca_h = std::exp(-kappa_half * 0.5 * h);
        const double ca_f = ca_h * ca_h;

        for (std::size_t step = 0; step < steps; ++step) {
            const double t0 = a_t + static_cast<double>(step) * h;
            const double tm = t0 + 0.5 * h;
            const double t1 = t0 + h;
            // a leg may end exactly on an input jump; the last stage needs the
            // left limit there
            const double t1_eval = (step + 1 == steps) ? t1 - 1e-9 * h : t1;
            const std::complex<double> b0 = input.amplitude(t0);
            const std::complex<double> bm = input.amplitude(tm);
            const std::complex<double> b1 = input.amplitude(t1_eval);

            // stage cavity amplitudes and coherence sums (the per-bin stage
            // derivatives are -g_j times the stage cavity amplitude, so the
            // bins only need one combined pass at the end of the step)
            const std::complex<double> c1 = st.a;
            const std::complex<double> sum1 = st.s0;
            const std::complex<double> k1a = sum1 + root_g1 * b0;

            const std::complex<double> c2 = ca_h * (st.a + 0.5 * h * k1a);
            const std::complex<double> sum2 = st.se - 0.5 * h * st.a * st.ge;
            const std::complex<double> k2a = sum2 + root_g1 * bm;

            const std::complex<double> c3 = ca_h * st.a + 0.5 * h * k2a;
            const std::complex<double> sum3 = st.se - 0.5 * h * c2 * st.g0;
            const std::complex<double> k3a = sum3 + root_g1 * bm;

            const std::complex<double> c4 = ca_f * st.a + h * ca_h * k3a;
            const std::complex<double> sum4 = st.sf - h * c3 * st.ge;
            const std::complex<double> k4a = sum4 + root_g1 * b1;

            // excitation P and the energy accumulators ride along in the same
            // staging; dP/dt = -2 Re(a conj(sum g s)) - 2 gamma21 P
            const double p1 = st.excitation_ode;
            const auto dp = [&](const std::complex<double>& c, const std::complex<double>& s,
                                double p) {
                return -2.0 * (c.real() * s.real() + c.imag() * s.imag()) - 2.0 * g21 * p;
            };
            const double dp1 = dp(c1, sum1, p1);
            const double p2 = p1 + 0.5 * h * dp1;
            const double dp2 = dp(c2, sum2, p2);
            const double p3 = p1 + 0.5 * h * dp2;
            const double dp3 = dp(c3, sum3, p3);
            const double p4 = p1 + h * dp3;
            const double dp4 = dp(c4, sum4, p4);

            const auto flux = [&](const std::complex<double>& c, const std::complex<double>& b) {
                return std::norm(root_g1 * c - b);
            };
            const double fo1 = flux(c1, b0), fo2 = flux(c2, bm), fo3 = flux(c3, bm),
                         fo4 = flux(c4, b1);
            const double fi1 = std::norm(b0), fi2 = std::norm(bm), fi4 = std::norm(b1);
            const double pa1 = std::norm(c1), pa2 = std::norm(c2), pa3 = std::norm(c3),
                         pa4 = std::norm(c4);

            st.q_in += h / 6.0 * (fi1 + 4.0 * fi2 + fi4);
            st.q_out += h / 6.0 * (fo1 + 2.0 * (fo2 + fo3) + fo4);
            st.r_out += h / 6.0 * (t0 * fo1 + 2.0 * tm * (fo2 + fo3) + t1 * fo4);
            st.q_dec += h / 6.0 * 2.0 * g21 * (p1 + 2.0 * (p2 + p3) + p4);
            st.q_bath += h / 6.0 * cavity.gamma2 * (pa1 + 2.0 * (pa2 + pa3) + pa4);
            st.excitation_ode = p1 + h / 6.0 * (dp1 + 2.0 * (dp2 + dp3) + dp4);

            // cavity update
            st.a = ca_f * st.a +
                   h / 6.0 * (ca_f * k1a + 2.0 * ca_h * (k2a + k3a) + k4a);

            // fused bin pass: update coherences and rebuild the sums
            const std::complex<double> w1 = h / 6.0 * c1;
            const std::complex<double> we = h / 3.0 * (c2 + c3);
            const std::complex<double> w4 = h / 6.0 * c4;
            const double w1r = w1.real(), w1i = w1.imag();
            const double wer = we.real(), wei = we.imag();
            const double w4r = w4.real(), w4i = w4.imag();
            double s0r = 0.0, s0i = 0.0, ser = 0.0, sei = 0.0, sfr = 0.0, sfi = 0.0;
            const double* __restrict ehr = st.ehr.data();
            const double* __restrict ehi = st.ehi.data();
            const double* __restrict efr = st.efr.data();
            const double* __restrict efi = st.efi.data();
            const double* __restrict g = st.g.data();
            double* __restrict sr = st.sr.data();
            double* __restrict si = st.si.data();
            for (std::size_t j = 0; j < n; ++j) {
                const double er = ehr[j], ei = ehi[j], fr = efr[j], fi = efi[j];
                const double br = fr * w1r - fi * w1i + er * wer - ei * wei + w4r;
                const double bi = fr * w1i + fi * w1r + er * wei + ei * wer + w4i;
                const double nr = fr * sr[j] - fi * si[j] - g[j] * br;
                const double ni = fr * si[j] + fi * sr[j] - g[j] * bi;
                sr[j] = nr;
                si[j] = ni;
                s0r += g[j] * nr;
                s0i += g[j] * ni;
                ser += g[j] * (er * nr - ei * ni);
                sei += g[j] * (er * ni + ei * nr);
                sfr += g[j] * (fr * nr - fi * ni);
                sfi += g[j] * (fr * ni + fi * nr);
            }
            st.s0 = {s0r, s0i};
            st.se = {ser, sei};
            st.sf = {sfr, sfi};

            if (step + 1 < steps && (step + 1) % stride == 0) record(t0 + h);
        }

        if (!std::isfinite(st.a.real()) || !std::isfinite(st.q_out))
            throw OracleError("simulate: non-finite amplitudes (unstable step?)");

        record(b_t);
        if (!flipped && std::abs(b_t - flip_time) < 1e-12) {
            flipped = true;
            traj.coherence_at_flip.resize(n);
            for (std::size_t j = 0; j < n; ++j)
                traj.coherence_at_flip[j] = {st.sr[j], st.si[j]};
        }
    }

    traj.audit.n_in = st.q_in;
    traj.audit.n_out_signal = st.q_out;
    traj.audit.n_lost_bath = st.q_bath;
    traj.audit.n_lost_decoherence = st.q_dec;
    traj.audit.n_residual = std::norm(st.a) + st.direct_excitation();
    if (traj.audit.relative_defect() > 1e-6)
        throw OracleError("simulate: energy audit defect " +
                          std::to_string(traj.audit.relative_defect()) +
                          " exceeds 1e-6 of the input energy");
    return traj;
}

// Echo re-emission windows, one per mode, centered on 2*flip - arrival with
// half-width of half the (minimum) mode spacing.
struct EchoWindow {
    double lo, hi, center;
};

inline std::vector<EchoWindow> retrieval_windows(const ModeTrain& train) {
    const std::size_t m = train.modes.size();
    double spacing;
    if (m >= 2) {
        spacing = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < m; ++k)
            spacing = std::min(spacing, train.modes[k].arrival_time -
                                            train.modes[k - 1].arrival_time);
    } else {
        spacing = 2.0 * (train.flip_time - train.modes.front().arrival_time);
    }
    const double half = 0.5 * spacing;
    std::vector<EchoWindow> w(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double c = 2.0 * train.flip_time - train.modes[k].arrival_time;
        w[k] = {c - half, c + half, c};
    }
    for (std::size_t k = 1; k < m; ++k)
        if (w[k].hi > w[k - 1].lo + 1e-12 && w[k].lo < w[k - 1].hi - 1e-12 &&
            w[k].center > w[k - 1].center)
            throw OracleError("retrieval_windows: echo windows overlap (spacing violation)");
    return w;
}

// Full simulation of a validated configuration: input train, flip, and
// enough trailing time to cover every echo window.
inline Trajectory simulate(const SimConfig& cfg) {
    require_valid(cfg);
    const InputField input = train_input(cfg.train);
    double t_end = cfg.oracle.t_end;
    if (t_end <= 0.0) {
        for (const auto& w : retrieval_windows(cfg.train)) t_end = std::max(t_end, w.hi);
    }
    return simulate_driven(cfg.cavity, cfg.ensemble, cfg.oracle, input,
                           cfg.train.flip_time, t_end);
}

// Stored excitation fraction at time tau: sum_j |s_j(tau)|^2 / n_in.
inline double storage_efficiency_oracle(const Trajectory& traj, double tau) {
    const std::size_t i = traj.index_at(tau);
    if (std::abs(traj.time[i] - tau) > 1e-6 * std::max(1.0, std::abs(tau)))
        throw OracleError("storage_efficiency_oracle: no sample near requested time");
    return traj.excitation[i] / std::max(traj.audit.n_in, 1e-30);
}

struct EchoMode {
    double efficiency;  // windowed output energy / nominal mode photons
    double centroid;    // energy-weighted mean emission time
    double window_lo, window_hi;
};

struct EchoReport {
    std::vector<EchoMode> modes;
    double total_retrieved_fraction = 0.0;  // all windowed energy / n_in
};

inline EchoReport retrieval_efficiency_oracle(const Trajectory& traj,
                                              const ModeTrain& train) {
    const auto windows = retrieval_windows(train);
    EchoReport rep;
    rep.modes.reserve(windows.size());
    double total = 0.0;
    for (std::size_t k = 0; k < windows.size(); ++k) {
        const auto& w = windows[k];
        const double energy = traj.interp(traj.cum_output_energy, w.hi) -
                              traj.interp(traj.cum_output_energy, w.lo);
        const double tmom = traj.interp(traj.cum_output_tmoment, w.hi) -
                            traj.interp(traj.cum_output_tmoment, w.lo);
        const double nbar = train.modes[k].mean_photons;
        EchoMode em;
        em.efficiency = nbar > 0.0 ? energy / nbar : 0.0;
        em.centroid = energy > 0.0 ? tmom / energy : w.center;
        em.window_lo = w.lo;
        em.window_hi = w.hi;
        rep.modes.push_back(em);
        total += energy;
    }
    rep.total_retrieved_fraction = total / std::max(traj.audit.n_in, 1e-30);
    return rep;
}

enum class FieldSelect { Output, Input };

struct Spectrum {
    std::vector<double> nu;
    std::vector<std::complex<double>> amplitude;
    std::vector<double> power;

    double centroid() const {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < nu.size(); ++i) {
            num += nu[i] * power[i];
            den += power[i];
        }
        return den > 0.0 ? num / den : 0.0;
    }

    double total_power() const {
        double p = 0.0;
        const double dnu = nu.size() > 1 ? nu[1] - nu[0] : 0.0;
        for (double v : power) p += v * dnu;
        return p;
    }
};

// Discrete spectrum of the sampled output (or input) field over a window,
// frequency axis centered on the carrier. Resolution is 2 pi / window length.
inline Spectrum echo_spectrum(const Trajectory& traj, double t_lo, double t_hi,
                              double nu_max, FieldSelect field = FieldSelect::Output) {
    if (!(t_hi > t_lo))
        throw OracleError("echo_spectrum: empty window");
    const double dnu = 2.0 * std::numbers::pi / (t_hi - t_lo);
    const int kmax = static_cast<int>(std::floor(nu_max / dnu));
    if (kmax < 2)
        throw OracleError("echo_spectrum: window too short for requested resolution");

    const auto lo = std::lower_bound(traj.time.begin(), traj.time.end(), t_lo);
    const auto hi = std::upper_bound(traj.time.begin(), traj.time.end(), t_hi);
    const std::size_t i0 = static_cast<std::size_t>(lo - traj.time.begin());
    const std::size_t i1 = static_cast<std::size_t>(hi - traj.time.begin());
    if (i1 < i0 + 16)
        throw OracleError("echo_spectrum: too few samples in window");

    const auto& f = field == FieldSelect::Output ? traj.output_amp : traj.input_amp;
    Spectrum sp;
    sp.nu.reserve(2 * kmax + 1);
    sp.amplitude.reserve(2 * kmax + 1);
    sp.power.reserve(2 * kmax + 1);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (int k = -kmax; k <= kmax; ++k) {
        const double nu = k * dnu;
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = i0; i < i1; ++i) {
            const double wl = i > i0 ? traj.time[i] - traj.time[i - 1] : 0.0;
            const double wr = i + 1 < i1 ? traj.time[i + 1] - traj.time[i] : 0.0;
            const double w = 0.5 * (wl + wr);
            acc += w * f[i] * std::exp(std::complex<double>(0.0, nu * traj.time[i]));
        }
        sp.nu.push_back(nu);
        sp.amplitude.push_back(norm * acc);
        sp.power.push_back(std::norm(norm * acc));
    }
    return sp;
}

}  // namespace echomem

#include "echomem/timedomain.hpp"

#include "echomem/model.hpp"
#include "echomem/spectral.hpp"
#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace echomem;

namespace {

const QuadratureSettings kQuad;

// matched system: collective absorption rate = gamma1 = line width
SimConfig matched_config(double ratio, double g2_over_g1, double bandwidth,
                         double gamma21 = 0.0) {
    const double delta = 10.0;
    SimConfig cfg;
    cfg.cavity.gamma1 = delta / ratio;
    cfg.cavity.gamma2 = g2_over_g1 * cfg.cavity.gamma1;
    cfg.ensemble = {0.5 * delta * delta, delta, gamma21};
    ModeSpec m;
    m.arrival_time = 0.0;
    m.bandwidth = bandwidth;
    m.mean_photons = 1.0;
    cfg.train.modes = {m};
    cfg.train.flip_time = 5.0 / bandwidth;
    return cfg;
}

// half the default step; keeps the energy audit well inside its tolerance
// when every rate sits at the same scale
void tighten_dt(SimConfig& cfg) {
    const DerivedRates r = derive_rates(cfg.ensemble);
    cfg.oracle.dt =
        0.005 / std::max({cfg.cavity.gamma1, r.gamma_in, cfg.ensemble.delta_in});
}

}  // namespace

TEST_CASE("ensemble discretization") {
    SECTION("three bins sit symmetrically with equal weights") {
        EnsembleParams ens{12.0, 2.0, 0.0};
        OracleSettings os;
        os.n_bins = 3;
        const auto bins = discretize_ensemble(ens, os);
        REQUIRE(bins.size() == 3);
        CHECK(bins[1].detuning == 0.0);
        CHECK(bins[0].detuning == Catch::Approx(-bins[2].detuning).epsilon(1e-15));
        CHECK(bins[0].detuning < 0.0);
        for (const auto& b : bins) CHECK(b.weight == Catch::Approx(1.0 / 3).epsilon(1e-15));
    }
    SECTION("weights and couplings account for the whole ensemble") {
        EnsembleParams ens{400.0, 10.0, 1e-4};
        OracleSettings os;
        const auto bins = discretize_ensemble(ens, os);
        double wsum = 0.0, csum = 0.0;
        for (const auto& b : bins) {
            wsum += b.weight;
            csum += b.coupling_sq;
        }
        CHECK(std::abs(wsum - 1.0) < 1e-12);
        CHECK(std::abs(csum - 400.0) / 400.0 < 1e-12);
    }
    SECTION("free decay of the discrete line tracks the exponential") {
        EnsembleParams ens{400.0, 10.0, 0.0};
        OracleSettings os;  // 2001 bins
        const auto bins = discretize_ensemble(ens, os);
        double worst = 0.0;
        for (int i = 0; i <= 500; ++i) {
            const double t = 0.5 / 500.0 * i;  // t * delta_in in [0, 5]
            std::complex<double> acc{0.0, 0.0};
            for (const auto& b : bins)
                acc += b.weight * std::exp(std::complex<double>(0.0, -b.detuning * t));
            worst = std::max(worst, std::abs(acc - std::exp(-ens.delta_in * t)));
        }
        CHECK(worst <= 1e-2);
    }
}

TEST_CASE("input envelopes") {
    SECTION("unit energy for both shapes") {
        for (ModeShape s : {ModeShape::Lorentzian, ModeShape::Gaussian}) {
            ModeSpec m;
            m.arrival_time = 3.0;
            m.bandwidth = 0.7;
            m.mean_photons = 2.0;
            m.shape = s;
            const double e = testutil::ref_energy(
                [&](double t) { return input_envelope(m, t); }, m.arrival_time - 30.0,
                m.arrival_time + 60.0);
            CHECK(e == Catch::Approx(2.0).epsilon(1e-8));
        }
    }
    SECTION("envelope peaks at the arrival time") {
        for (ModeShape s : {ModeShape::Lorentzian, ModeShape::Gaussian}) {
            ModeSpec m;
            m.arrival_time = 1.0;
            m.bandwidth = 0.5;
            m.shape = s;
            const double peak = std::abs(input_envelope(m, m.arrival_time));
            for (double t = -4.0; t < 12.0; t += 0.01)
                CHECK(std::abs(input_envelope(m, t)) <= peak * (1.0 + 1e-12));
        }
    }
    SECTION("power spectrum of the sampled envelope matches the spectral density") {
        for (ModeShape s : {ModeShape::Lorentzian, ModeShape::Gaussian}) {
            ModeSpec m;
            m.arrival_time = 0.0;
            m.bandwidth = 1.0;
            m.mean_photons = 1.0;
            m.shape = s;
            const double dt = 1e-3;
            const double t_lo = -20.0, t_hi = 40.0;
            const std::size_t n = static_cast<std::size_t>((t_hi - t_lo) / dt) + 1;
            for (double nu = -5.0; nu <= 5.0; nu += 1.25) {
                std::complex<double> acc{0.0, 0.0};
                for (std::size_t i = 0; i < n; ++i) {
                    const double t = t_lo + dt * static_cast<double>(i);
                    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
                    acc += w * input_envelope(m, t) *
                           std::exp(std::complex<double>(0.0, nu * t));
                }
                const double power = std::norm(acc * dt) / (2.0 * std::numbers::pi);
                CHECK(power == Catch::Approx(mode_spectral_density(m, nu)).epsilon(0.01));
            }
        }
    }
}

TEST_CASE("empty cavity reflects every photon") {
    SimConfig cfg = matched_config(1.0, 0.0, 1.0);
    cfg.ensemble.coupling_strength_sq = 1e-30;  // effectively no atoms
    cfg.oracle.n_bins = 3;
    const auto traj = simulate(cfg);
    CHECK(traj.audit.n_out_signal / traj.audit.n_in == Catch::Approx(1.0).margin(1e-4));
    CHECK(traj.audit.relative_defect() <= 1e-6);
}

TEST_CASE("matched absorption stores the pulse with no reflection") {
    SimConfig cfg = matched_config(1.0, 0.0, 0.05);
    tighten_dt(cfg);
    cfg.oracle.t_end = cfg.train.flip_time + 1.0;  // storage stage only
    const auto traj = simulate(cfg);
    const double stored = storage_efficiency_oracle(traj, cfg.train.flip_time);
    CHECK(stored >= 0.99);
    // impedance matching: the output stays dark while the pulse is absorbed
    const double reflected = traj.interp(traj.cum_output_energy, cfg.train.flip_time);
    CHECK(reflected / traj.audit.n_in < 0.01);
    CHECK(traj.audit.relative_defect() <= 1e-6);
}

TEST_CASE("storage efficiency matches the frequency-domain value") {
    SECTION("matched narrowband point") {
        SimConfig cfg = matched_config(1.0, 0.0, 0.05);
        tighten_dt(cfg);
        cfg.oracle.t_end = cfg.train.flip_time + 1.0;
        const auto traj = simulate(cfg);
        const double oracle = storage_efficiency_oracle(traj, cfg.train.flip_time);
        const double analytic =
            storage_efficiency_mode(cfg.train.modes[0], cfg.cavity, cfg.ensemble, kQuad);
        CHECK(std::abs(oracle - analytic) / analytic <= 1e-2);
    }
    SECTION("lossy cavity agrees with the closed form at one half") {
        // gamma2 = gamma1 and collective rate = gamma1 + gamma2 puts the
        // monochromatic efficiency exactly at 0.5
        const double delta = 10.0;
        SimConfig cfg;
        cfg.cavity = {10.0, 10.0};
        cfg.ensemble = {100.0, delta, 0.0};  // collective rate 20
        ModeSpec m;
        m.arrival_time = 0.0;
        m.bandwidth = 0.05;
        m.mean_photons = 1.0;
        cfg.train.modes = {m};
        cfg.train.flip_time = 100.0;
        cfg.oracle.t_end = 101.0;
        tighten_dt(cfg);
        REQUIRE(storage_efficiency_narrowband(cfg.cavity, cfg.ensemble) == 0.5);
        const auto traj = simulate(cfg);
        const double oracle = storage_efficiency_oracle(traj, cfg.train.flip_time);
        CHECK(oracle == Catch::Approx(0.5).epsilon(1e-2));
        CHECK(traj.audit.relative_defect() <= 1e-6);
    }
    SECTION("nothing stored without atoms") {
        SimConfig cfg = matched_config(1.0, 0.0, 1.0);
        cfg.ensemble.coupling_strength_sq = 1e-30;
        cfg.oracle.n_bins = 3;
        const auto traj = simulate(cfg);
        CHECK(storage_efficiency_oracle(traj, cfg.train.flip_time) < 1e-10);
    }
}

TEST_CASE("echoes emerge mirrored in time and order") {
    const double delta = 10.0, bw = 1.0;
    SimConfig cfg;
    cfg.cavity = {delta, 0.0};
    cfg.ensemble = {0.5 * delta * delta, delta, 0.0};
    for (int k = 0; k < 3; ++k) {
        ModeSpec m;
        m.arrival_time = 8.0 * k;
        m.bandwidth = bw;
        m.mean_photons = 1.0;
        cfg.train.modes.push_back(m);
    }
    cfg.train.flip_time = 24.0;
    tighten_dt(cfg);
    const auto traj = simulate(cfg);
    const auto echo = retrieval_efficiency_oracle(traj, cfg.train);
    REQUIRE(echo.modes.size() == 3);
    for (int k = 0; k < 3; ++k) {
        const double predicted = 2.0 * cfg.train.flip_time - 8.0 * k;
        CHECK(std::abs(echo.modes[k].centroid - predicted) <= 1.0 / bw);
    }
    // first-in, last-out: the earliest mode re-emits last
    CHECK(echo.modes[0].centroid > echo.modes[1].centroid);
    CHECK(echo.modes[1].centroid > echo.modes[2].centroid);
    CHECK(echo.total_retrieved_fraction <= 1.0);
    CHECK(traj.audit.relative_defect() <= 1e-6);

    SECTION("windows partition the retrieval interval without overlap") {
        const auto windows = retrieval_windows(cfg.train);
        for (std::size_t k = 1; k < windows.size(); ++k)
            CHECK(windows[k].hi <= windows[k - 1].lo + 1e-9);
    }
}

TEST_CASE("retrieval efficiency matches the frequency-domain value") {
    SECTION("reference surface parameters, single mode") {
        SimConfig cfg;
        cfg.ensemble = {400.0, 10.0, 1e-4};
        const DerivedRates r = derive_rates(cfg.ensemble);
        cfg.cavity = {r.gamma_in, 0.01 * r.gamma_in};
        ModeSpec m;
        m.arrival_time = 0.0;
        m.bandwidth = 1.0;
        m.mean_photons = 1.0;
        cfg.train.modes = {m};
        cfg.train.flip_time = 5.0;
        tighten_dt(cfg);
        const auto traj = simulate(cfg);
        const auto echo = retrieval_efficiency_oracle(traj, cfg.train);
        const double analytic = retrieval_efficiency_mode(m, cfg.cavity, cfg.ensemble, kQuad) *
                                std::exp(-4.0 * cfg.ensemble.gamma21 * 5.0);
        CHECK(std::abs(echo.modes[0].efficiency - analytic) / analytic <= 2e-2);
        CHECK(traj.audit.relative_defect() <= 1e-6);
    }
    SECTION("time-reversal limit: nearly everything comes back") {
        SimConfig cfg = matched_config(1.0, 0.0, 0.1);
        cfg.oracle.dt = 0.5 * 0.01 / 10.0;
        const auto traj = simulate(cfg);
        const auto echo = retrieval_efficiency_oracle(traj, cfg.train);
        CHECK(echo.total_retrieved_fraction >= 0.98);
        CHECK(traj.audit.relative_defect() <= 1e-6);
    }
}

TEST_CASE("step and bin convergence") {
    SimConfig cfg = matched_config(1.0, 0.0, 0.5);
    const auto run = [&](double dt, int n_bins) {
        SimConfig c = cfg;
        c.oracle.dt = dt;
        c.oracle.n_bins = n_bins;
        const auto traj = simulate(c);
        const auto echo = retrieval_efficiency_oracle(traj, c.train);
        return std::pair{storage_efficiency_oracle(traj, c.train.flip_time),
                         echo.modes[0].efficiency};
    };
    const double dt0 = 0.01 / 10.0;
    const auto base = run(dt0, 2001);
    SECTION("halving the step barely moves the efficiencies") {
        const auto fine = run(0.5 * dt0, 2001);
        CHECK(std::abs(base.first - fine.first) <= 1e-4);
        CHECK(std::abs(base.second - fine.second) <= 1e-4);
    }
    SECTION("doubling the bin count barely moves the efficiencies") {
        const auto dense = run(dt0, 4001);
        CHECK(std::abs(base.first - dense.first) <= 1e-3);
        CHECK(std::abs(base.second - dense.second) <= 1e-3);
    }
}

TEST_CASE("linearity of the model") {
    const double delta = 10.0;
    CavityParams cav{delta, 0.0};
    EnsembleParams ens{0.5 * delta * delta, delta, 0.0};
    OracleSettings os;
    os.n_bins = 201;
    ModeTrain train;
    ModeSpec m;
    m.arrival_time = 0.0;
    m.bandwidth = 1.0;
    m.mean_photons = 1.0;
    train.modes = {m};
    train.flip_time = 8.0;
    const InputField in1 = train_input(train);
    InputField in2 = in1;
    const auto base_amp = in1.amplitude;
    const double c = 1.7;
    in2.amplitude = [base_amp, c](double t) { return c * base_amp(t); };
    const auto t1 = simulate_driven(cav, ens, os, in1, 8.0, 20.0);
    const auto t2 = simulate_driven(cav, ens, os, in2, 8.0, 20.0);
    CHECK(t2.audit.n_in == Catch::Approx(c * c * t1.audit.n_in).epsilon(1e-10));
    CHECK(t2.audit.n_out_signal ==
          Catch::Approx(c * c * t1.audit.n_out_signal).epsilon(1e-10));
    const auto e1 = retrieval_efficiency_oracle(t1, train);
    const auto e2 = retrieval_efficiency_oracle(t2, train);
    CHECK(e2.modes[0].efficiency ==
          Catch::Approx(c * c * e1.modes[0].efficiency).epsilon(1e-10));
    // argmax-type observables do not move
    CHECK(e2.modes[0].centroid == Catch::Approx(e1.modes[0].centroid).epsilon(1e-9));
}

TEST_CASE("echo spectrum") {
    const double delta = 10.0, bw = 1.0;
    SimConfig cfg;
    cfg.cavity = {delta, 0.0};
    cfg.ensemble = {0.5 * delta * delta, delta, 0.0};
    ModeSpec m;
    m.arrival_time = 8.0;
    m.bandwidth = bw;
    m.mean_photons = 1.0;
    m.shape = ModeShape::Gaussian;
    cfg.train.modes = {m};
    cfg.train.flip_time = 16.0;
    cfg.oracle.sample_stride = 4;
    cfg.oracle.t_end = 40.0;
    tighten_dt(cfg);
    const auto traj = simulate(cfg);
    const auto spec = echo_spectrum(traj, 20.0, 36.0, 3.0);

    SECTION("symmetric input gives a symmetric echo spectrum") {
        CHECK(std::abs(spec.centroid()) <= 0.05 * bw);
    }
    SECTION("echo power spectrum is the doubly filtered input spectrum") {
        const DerivedRates r = derive_rates(cfg.ensemble);
        for (std::size_t i = 0; i < spec.nu.size(); ++i) {
            const double nu = spec.nu[i];
            if (std::abs(nu) > 2.0 * bw) continue;
            const double z = spectral_filter(nu, cfg.ensemble.delta_in, r.gamma_in, cfg.cavity);
            const double predicted = z * z * mode_spectral_density(m, nu);
            CHECK(spec.power[i] == Catch::Approx(predicted).epsilon(0.05));
        }
    }
    SECTION("window too short for the requested resolution") {
        CHECK_THROWS_AS(echo_spectrum(traj, 20.0, 20.5, 3.0), OracleError);
    }
}

TEST_CASE("oracle error paths") {
    SECTION("oversized explicit step is rejected") {
        SimConfig cfg = matched_config(1.0, 0.0, 1.0);
        cfg.oracle.dt = 1.0;  // dt * rate = 10
        CHECK_THROWS_AS(simulate(cfg), OracleError);
    }
    SECTION("end time must clear the flip") {
        SimConfig cfg = matched_config(1.0, 0.0, 1.0);
        cfg.oracle.t_end = cfg.train.flip_time - 1.0;
        CHECK_THROWS_AS(simulate(cfg), OracleError);
    }
    SECTION("even bin count is rejected") {
        EnsembleParams ens{1.0, 1.0, 0.0};
        OracleSettings os;
        os.n_bins = 4;
        CHECK_THROWS_AS(discretize_ensemble(ens, os), OracleError);
    }
    SECTION("querying storage away from any sample is an error") {
        SimConfig cfg = matched_config(1.0, 0.0, 1.0);
        const auto traj = simulate(cfg);
        CHECK_THROWS_AS(storage_efficiency_oracle(traj, traj.t_end + 100.0), OracleError);
    }
}

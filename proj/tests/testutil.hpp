// Shared test helpers. ref_integrate_even is the independent fixed-grid
// oracle for every spectral integral: log-spaced trapezoid with grid
// doubling, no adaptivity, no tangent map, so it shares nothing with the
// implementation path it checks.

#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sys/wait.h>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace testutil {

// Integral over (-inf, inf) of an even function with features between
// scale_small and scale_big. Substitutes nu = e^u on the positive axis.
inline double ref_integrate_even(const std::function<double(double)>& f, double scale_small,
                                 double scale_big, double tol = 1e-9) {
    const double nu_min = 1e-10 * scale_small;
    const double nu_max = 1e8 * scale_big;
    const double u_lo = std::log(nu_min);
    const double u_hi = std::log(nu_max);

    const auto grid_sum = [&](std::size_t n) {
        const double h = (u_hi - u_lo) / static_cast<double>(n - 1);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = u_lo + h * static_cast<double>(i);
            const double nu = std::exp(u);
            const double g = f(nu) * nu;
            acc += (i == 0 || i == n - 1) ? 0.5 * g : g;
        }
        return acc * h;
    };

    double prev = grid_sum((1 << 14) + 1);
    for (int k = 15; k <= 24; ++k) {
        const double cur = grid_sum((std::size_t(1) << k) + 1);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur)))
            return 2.0 * (cur + f(0.0) * nu_min);
        prev = cur;
    }
    throw std::runtime_error("ref_integrate_even did not stabilize");
}

// Time integral of |f|^2 on [lo, hi] by plain composite trapezoid.
inline double ref_energy(const std::function<std::complex<double>(double)>& f, double lo,
                         double hi, std::size_t n = 2'000'001) {
    const double h = (hi - lo) / static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = lo + h * static_cast<double>(i);
        const double g = std::norm(f(t));
        acc += (i == 0 || i == n - 1) ? 0.5 * g : g;
    }
    return acc * h;
}

// Minimal process runner for CLI tests: returns exit code, captures stdout.
struct RunResult {
    int exit_code;
    std::string output;
};

inline RunResult run_command(const std::string& cmd) {
    std::string full = cmd + " 2>/dev/null";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

inline std::string cli_path() {
    const char* env = std::getenv("ECHOMEM_CLI");
    if (env) return env;
    return "./tools/echomem";  // fallback when run from the build directory
}

inline std::string temp_dir() {
    std::string tmpl = "/tmp/echomem_test_XXXXXX";
    char* dir = mkdtemp(tmpl.data());
    if (!dir) throw std::runtime_error("mkdtemp failed");
    return dir;
}

}  // namespace testutil

#include "waveguide.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace uswg {

void WaveguideConfig::validate() const {
    if (N < 3 || N % 2 == 0)
        throw ConfigError("waveguide.N must be odd and >= 3, got " + std::to_string(N));
    if (!(L > 0.0))
        throw ConfigError("waveguide.L must be positive");
    if (!(v_g > 0.0))
        throw ConfigError("waveguide.v_g must be positive");
    if (alpha < 0.0)
        throw ConfigError("alpha must be >= 0, got " + std::to_string(alpha));
}

ModeSet build_modes(const WaveguideConfig& cfg) {
    cfg.validate();
    ModeSet ms;
    ms.N = cfg.N;
    ms.L = cfg.L;
    ms.v_g = cfg.v_g;
    ms.omega_c = cfg.omega_c();
    ms.dx = cfg.dx();
    ms.alpha = cfg.alpha;
    ms.k.resize(cfg.N);
    ms.omega.resize(cfg.N);
    ms.g.resize(cfg.N);

    const int half = (cfg.N - 1) / 2;
    const double two_pi_over_L = 2.0 * M_PI / cfg.L;
    // g_k^2 = pi*alpha*v_g*omega_k/(2L) below cutoff, i.e. g^2/omega is the
    // constant pi*alpha*v_g/(2L) on the coupled set.
    const double gsq_over_omega = M_PI * cfg.alpha * cfg.v_g / (2.0 * cfg.L);
    for (int i = 0; i < cfg.N; ++i) {
        const int m = i - half;
        ms.k[i] = two_pi_over_L * m;
        // computed from |m| so omega(m) == omega(-m) bit-exactly
        const double s = std::sin(M_PI * std::abs(m) / cfg.N);
        ms.omega[i] = 2.0 * ms.omega_c * s;
        ms.g[i] = (ms.omega[i] > ms.omega_c || m == 0)
                      ? 0.0
                      : std::sqrt(gsq_over_omega * ms.omega[i]);
    }
    return ms;
}

double spectral_function_analytic(double omega, double alpha) {
    if (omega < 0.0)
        throw ConfigError("spectral_function_analytic: omega must be >= 0");
    return M_PI * alpha * omega;
}

std::vector<SpectralBin> spectral_function_reconstruct(const ModeSet& modes,
                                                       int n_bins) {
    if (n_bins < 10)
        throw ConfigError("spectral reconstruction needs n_bins >= 10, got " +
                          std::to_string(n_bins));
    const double width = modes.omega_c / n_bins;
    std::vector<SpectralBin> bins(n_bins);
    std::vector<double> wsum(n_bins, 0.0);
    for (int b = 0; b < n_bins; ++b)
        bins[b] = {(b + 0.5) * width, 0.0, 0};
    for (std::size_t i = 0; i < modes.size(); ++i) {
        // every in-band mode is binned; modes above the cutoff carry g = 0
        // and are out of histogram range anyway. Decoupled in-band modes
        // contribute count but no weight, so alpha = 0 reads back as J = 0
        // rather than as a wall of empty-bin flags.
        if (modes.omega[i] > modes.omega_c) continue;
        int b = static_cast<int>(modes.omega[i] / width);
        if (b >= n_bins) b = n_bins - 1;  // omega == omega_c edge
        wsum[b] += modes.g[i] * modes.g[i];
        bins[b].count += 1;
    }
    for (int b = 0; b < n_bins; ++b) {
        bins[b].J_binned = bins[b].count > 0
                               ? 2.0 * M_PI * wsum[b] / width
                               : std::numeric_limits<double>::quiet_NaN();
    }
    return bins;
}

} // namespace uswg

#pragma once

#include <cstddef>
#include <vector>

namespace uswg {

// Discretized transmission line with periodic boundary conditions.
// N odd so the modes come as k=0 plus (N-1)/2 symmetric +-k pairs.
struct WaveguideConfig {
    int N = 1001;
    double L = 125.66370614359172;  // 40*pi
    double v_g = 1.0;
    double alpha = 0.1;

    double dx() const { return L / N; }
    double omega_c() const { return v_g * N / L; }

    // Throws ConfigError on violation (even N, non-positive L or v_g, alpha < 0).
    void validate() const;
};

// Mode arrays indexed i = 0..N-1 with m = i - (N-1)/2, k_m = 2*pi*m/L.
// omega_k = 2*omega_c*|sin(k dx / 2)| (full band dispersion, not the linear
// approximation). g_k = sqrt(pi*alpha*v_g*omega_k/(2L)) below the cutoff and
// exactly 0 for omega_k > omega_c; the k=0 entry is kept with g=0 so the
// +-m bookkeeping never needs a special case.
struct ModeSet {
    std::vector<double> k;
    std::vector<double> omega;
    std::vector<double> g;
    int N = 0;
    double L = 0.0;
    double v_g = 1.0;
    double omega_c = 0.0;
    double dx = 0.0;
    double alpha = 0.0;

    std::size_t size() const { return k.size(); }
    int m_of(std::size_t i) const { return static_cast<int>(i) - (N - 1) / 2; }
};

ModeSet build_modes(const WaveguideConfig& cfg);

// Continuum Ohmic form J(omega) = pi*alpha*omega.
double spectral_function_analytic(double omega, double alpha);

struct SpectralBin {
    double omega_center;
    double J_binned;   // 2*pi * sum g_k^2 / bin_width; NaN when the bin is empty
    int count;         // modes that landed in the bin (0 flags an empty bin)
};

// Histogram estimate of J over omega in [0, omega_c]. Empty bins carry
// count = 0 and J_binned = NaN rather than a silent zero.
std::vector<SpectralBin> spectral_function_reconstruct(const ModeSet& modes,
                                                       int n_bins);

} // namespace uswg

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mmdepth/types.hpp"

namespace mmdepth::radar {

/// Stepped-frequency waveform: N_f discrete tones f_n = f_min + n * df,
/// n = 0 .. N_f-1, with df = (f_max - f_min) / N_f.
struct FscwConfig {
    double f_min_hz = 0.0;
    double f_max_hz = 0.0;
    int n_f = 0;
    double phi_c = 0.0;         // constant phase offset, radians
    double c = kSpeedOfLight;  // propagation speed, m/s

    double freq_step() const { return (f_max_hz - f_min_hz) / n_f; }
    double freq(int n) const { return f_min_hz + n * freq_step(); }
    void validate() const;
};

struct MimoArray {
    std::vector<Vec3> tx;
    std::vector<Vec3> rx;
    void validate() const;
};

struct PointScatterer {
    Vec3 position;
    double reflectivity = 1.0;  // amplitude A, >= 0
};

/// Complex received signal indexed [rx][tx][freq].
struct RawSignalCube {
    FscwConfig config;
    MimoArray array;
    std::vector<std::complex<double>> data;

    int n_rx() const { return int(array.rx.size()); }
    int n_tx() const { return int(array.tx.size()); }
    int n_f() const { return config.n_f; }

    std::complex<double>& at(int rx, int tx, int f) {
        return data[(size_t(rx) * n_tx() + tx) * n_f() + f];
    }
    const std::complex<double>& at(int rx, int tx, int f) const {
        return data[(size_t(rx) * n_tx() + tx) * n_f() + f];
    }
    void validate() const;
};

struct AmcwConfig {
    double f_m_hz = 0.0;  // modulation frequency
    double period() const { return 1.0 / f_m_hz; }
    void validate() const;
};

/// TX elements uniformly spaced along the two vertical edges of an L x L
/// square in the z = 0 plane centered at the origin, RX along the two
/// horizontal edges. Boresight is +z.
MimoArray build_square_array(double aperture, int n_per_edge);

/// Born single-scattering forward model:
///   s_r(f_n, r_i, t_j) = sum_k A_k w_k exp(-i 2pi f_n tau_kij + i phi_c)
/// with tau_kij = (|t_j - p_k| + |p_k - r_i|) / c and w_k = 1, or the
/// per-leg spreading loss 1/(|t_j - p_k| |p_k - r_i|) when enabled.
RawSignalCube simulate_fscw(std::span<const PointScatterer> scatterers,
                            const MimoArray& array, const FscwConfig& config,
                            bool spreading = false, int n_threads = 1);

/// Range from a phase shift: r = c * dphi / (2 pi f).
double phase_to_range(double delta_phi, double f_hz);

/// Four-bucket phase extraction: phi = atan2(c270 - c90, c0 - c180).
double amcw_four_bucket(double c0, double c90, double c180, double c270);

/// Mean |s| over all entries of each cube, averaged over frames.
double signal_magnitude(std::span<const RawSignalCube> frames);

}  // namespace mmdepth::radar

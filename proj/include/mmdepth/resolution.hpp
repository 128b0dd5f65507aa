#pragma once

#include "mmdepth/types.hpp"

namespace mmdepth::resolution {

struct StereoParams {
    double baseline_m = 0.0;         // B
    double focal_px = 0.0;           // f
    double disparity_px = 0.0;       // D
    double disparity_res_px = 1.0;   // dD
    double depth_m = 0.0;            // z
};

struct AmcwParams {
    double f_m_hz = 0.0;        // modulation frequency
    double p_illum_w = 0.0;     // P_l
    double p_ambient_w = 0.0;   // P_a
    double illum_area = 0.0;    // I
    double quantum_eff = 0.0;   // q_e
    double k_optical = 0.0;     // k_o
    double reflectivity = 0.0;  // rho
    double integration_s = 0.0; // dt
};

struct MimoResolutionParams {
    double f_min_hz = 0.0;
    double f_max_hz = 0.0;
    double aperture_m = 0.0;  // L
    double distance_m = 0.0;  // z

    double bandwidth() const { return f_max_hz - f_min_hz; }
    void validate() const;
};

/// Rayleigh criterion: omega = 1.22 * lambda / L.
double rayleigh_angular(double lambda_m, double aperture_m);

/// Cross-range resolution of a square MIMO aperture:
/// delta_xy = c / (4 f_max) * sqrt(4 (z/L)^2 + 1).
double mimo_cross_range(const MimoResolutionParams& p);

/// Range resolution with the full bandwidth b = f_max - f_min:
/// delta_z = 0.5 c / (b + (1 - 1/sqrt(1 + 0.5 (L/z)^2)) * f_min).
double mimo_range_res(const MimoResolutionParams& p);

/// Stereo depth from disparity: d = f B / D (f and D in pixels).
double stereo_depth(const StereoParams& p);

/// Stereo depth resolution: delta_z = z^2 / (B f) * dD.
double stereo_depth_res(const StereoParams& p);

/// AMCW range resolution:
/// delta_z = (c / f_m) * sqrt((P_l + P_a) / P_l * I / (k_o q_e rho dt)).
double amcw_range_res(const AmcwParams& p);

}  // namespace mmdepth::resolution

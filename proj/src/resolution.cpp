#include "mmdepth/resolution.hpp"

#include <cmath>

namespace mmdepth::resolution {

void MimoResolutionParams::validate() const {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz)) {
        throw std::runtime_error("require f_max > f_min > 0");
    }
    if (!(aperture_m > 0.0) || !(distance_m > 0.0)) {
        throw std::runtime_error("require aperture and distance > 0");
    }
}

double rayleigh_angular(double lambda_m, double aperture_m) {
    if (!(aperture_m > 0.0)) throw std::runtime_error("require aperture > 0");
    return 1.22 * lambda_m / aperture_m;
}

double mimo_cross_range(const MimoResolutionParams& p) {
    p.validate();
    double ratio = p.distance_m / p.aperture_m;
    return kSpeedOfLight / (4.0 * p.f_max_hz) * std::sqrt(4.0 * ratio * ratio + 1.0);
}

double mimo_range_res(const MimoResolutionParams& p) {
    p.validate();
    double lz = p.aperture_m / p.distance_m;
    double curvature = 1.0 - 1.0 / std::sqrt(1.0 + 0.5 * lz * lz);
    return 0.5 * kSpeedOfLight / (p.bandwidth() + curvature * p.f_min_hz);
}

double stereo_depth(const StereoParams& p) {
    if (!(p.baseline_m > 0.0) || !(p.focal_px > 0.0)) {
        throw std::runtime_error("require baseline and focal > 0");
    }
    if (!(p.disparity_px > 0.0)) throw std::runtime_error("require disparity > 0");
    return p.focal_px * p.baseline_m / p.disparity_px;
}

double stereo_depth_res(const StereoParams& p) {
    if (!(p.baseline_m > 0.0) || !(p.focal_px > 0.0)) {
        throw std::runtime_error("require baseline and focal > 0");
    }
    return p.depth_m * p.depth_m / (p.baseline_m * p.focal_px) * p.disparity_res_px;
}

double amcw_range_res(const AmcwParams& p) {
    if (!(p.f_m_hz > 0.0) || !(p.p_illum_w > 0.0) || p.p_ambient_w < 0.0 ||
        !(p.illum_area > 0.0) || !(p.quantum_eff > 0.0) || !(p.k_optical > 0.0) ||
        !(p.reflectivity > 0.0) || !(p.integration_s > 0.0)) {
        throw std::runtime_error("all AMCW parameters must be positive");
    }
    double radicand = (p.p_illum_w + p.p_ambient_w) / p.p_illum_w * p.illum_area /
                      (p.k_optical * p.quantum_eff * p.reflectivity * p.integration_s);
    return kSpeedOfLight / p.f_m_hz * std::sqrt(radicand);
}

}  // namespace mmdepth::resolution

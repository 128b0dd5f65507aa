#pragma once

#include "mmdepth/signal.hpp"
#include "mmdepth/types.hpp"

namespace mmdepth::radar {

/// Regular voxel grid; origin is the center of voxel (0,0,0).
struct VoxelGridSpec {
    Vec3 origin;
    Vec3 step;
    std::array<int, 3> dims{0, 0, 0};  // (N_x, N_y, N_z)

    size_t count() const { return size_t(dims[0]) * dims[1] * dims[2]; }
    Vec3 center(int ix, int iy, int iz) const {
        return {origin.x + ix * step.x, origin.y + iy * step.y, origin.z + iz * step.z};
    }
    void validate() const;
};

struct ConfidenceVolume {
    VoxelGridSpec spec;
    std::vector<std::complex<double>> values;  // [x + Nx * (y + Ny * z)]

    std::complex<double>& at(int ix, int iy, int iz) {
        return values[size_t(ix) + spec.dims[0] * (size_t(iy) + size_t(spec.dims[1]) * iz)];
    }
    const std::complex<double>& at(int ix, int iy, int iz) const {
        return values[size_t(ix) + spec.dims[0] * (size_t(iy) + size_t(spec.dims[1]) * iz)];
    }
};

/// Phase-only matched filter over the voxel grid:
///   c_BP(p) = sum_n sum_i sum_j s_r(f_n, r_i, t_j) exp(+i 2pi f_n tau_ij(p)).
/// Summation order within a voxel is fixed (i, j, n), so results are
/// bit-identical for any thread count.
ConfidenceVolume backproject(const RawSignalCube& cube, const VoxelGridSpec& spec,
                             int n_threads = 1);

struct MaxProjection {
    DepthImage depth;                // orthographic, z of per-column argmax
    std::vector<double> confidence;  // W x H, max |c_BP| per column
};

/// Per pixel (u,v) = (x,y): argmax over z of |c_BP|, ties broken toward the
/// smallest z. The output depth image carries the orthographic transform
/// implied by the grid (pixel u maps to world x = origin.x + u * step.x).
MaxProjection max_projection(const ConfidenceVolume& vol);

/// Invalidates pixels whose confidence falls below
/// max(confidence) * 10^(threshold_db / 20).
DepthImage db_threshold_filter(const DepthImage& depth, std::span<const double> confidence,
                               double threshold_db);

}  // namespace mmdepth::radar

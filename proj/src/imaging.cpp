#include "mmdepth/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace mmdepth::radar {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void VoxelGridSpec::validate() const {
    if (!(step.x > 0.0 && step.y > 0.0 && step.z > 0.0)) {
        throw std::runtime_error("voxel step components must be > 0");
    }
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) {
        throw std::runtime_error("voxel dims must be positive");
    }
    if (!origin.finite()) throw std::runtime_error("non-finite grid origin");
}

ConfidenceVolume backproject(const RawSignalCube& cube, const VoxelGridSpec& spec,
                             int n_threads) {
    cube.validate();
    spec.validate();

    ConfidenceVolume vol;
    vol.spec = spec;
    vol.values.assign(spec.count(), {0.0, 0.0});

    const int nrx = cube.n_rx(), ntx = cube.n_tx(), nf = cube.n_f();
    const double c = cube.config.c;
    const double f_min = cube.config.f_min_hz;
    const double f_step = cube.config.freq_step();
    const auto& rx = cube.array.rx;
    const auto& tx = cube.array.tx;
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];

    auto worker = [&](size_t lo, size_t hi) {
        for (size_t v = lo; v < hi; ++v) {
            int ix = int(v % nx);
            int iy = int((v / nx) % ny);
            int iz = int(v / (size_t(nx) * ny));
            Vec3 p = spec.center(ix, iy, iz);
            std::complex<double> acc{0.0, 0.0};
            for (int i = 0; i < nrx; ++i) {
                double d_rx = distance(p, rx[i]);
                for (int j = 0; j < ntx; ++j) {
                    double tau = (distance(tx[j], p) + d_rx) / c;
                    // conjugate-phase hypothesis, unit amplitude
                    std::complex<double> ph = std::polar(1.0, kTwoPi * f_min * tau);
                    std::complex<double> step = std::polar(1.0, kTwoPi * f_step * tau);
                    const std::complex<double>* s = &cube.at(i, j, 0);
                    for (int n = 0; n < nf; ++n) {
                        acc += s[n] * ph;
                        ph *= step;
                    }
                }
            }
            vol.values[v] = acc;
        }
    };

    const size_t total = spec.count();
    if (n_threads <= 1 || total < 2) {
        worker(0, total);
    } else {
        size_t nt = std::min<size_t>(n_threads, total);
        std::vector<std::thread> pool;
        for (size_t t = 0; t < nt; ++t) {
            pool.emplace_back(worker, total * t / nt, total * (t + 1) / nt);
        }
        for (auto& th : pool) th.join();
    }
    return vol;
}

MaxProjection max_projection(const ConfidenceVolume& vol) {
    const auto& s = vol.spec;
    const int nx = s.dims[0], ny = s.dims[1], nz = s.dims[2];

    MaxProjection out;
    out.depth.width = nx;
    out.depth.height = ny;
    out.depth.data.assign(size_t(nx) * ny, 0.0);
    out.confidence.assign(size_t(nx) * ny, 0.0);

    ProjectionModel model;
    model.kind = ProjectionKind::orthographic;
    model.scale = {1.0 / s.step.x, 0, 0, 0, 1.0 / s.step.y, 0, 0, 0, 1.0};
    model.offset = {-s.origin.x / s.step.x, -s.origin.y / s.step.y, 0.0};
    out.depth.projection = model;
    out.depth.transform = model.embed();

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            double best = 0.0;
            int best_z = -1;
            for (int iz = 0; iz < nz; ++iz) {
                double mag = std::abs(vol.at(ix, iy, iz));
                if (best_z < 0 || mag > best) {  // ties keep the smaller z
                    best = mag;
                    best_z = iz;
                }
            }
            out.confidence[size_t(iy) * nx + ix] = best;
            // a column with no response stays invalid
            out.depth.at(ix, iy) = best > 0.0 ? s.origin.z + best_z * s.step.z : 0.0;
        }
    }
    return out;
}

DepthImage db_threshold_filter(const DepthImage& depth, std::span<const double> confidence,
                               double threshold_db) {
    if (threshold_db > 0.0) throw std::runtime_error("threshold must be <= 0 dB");
    if (confidence.size() != depth.data.size()) {
        throw std::runtime_error("confidence size mismatch");
    }
    double peak = 0.0;
    for (double c : confidence) peak = std::max(peak, c);

    DepthImage out = depth;
    if (peak == 0.0) {
        std::fill(out.data.begin(), out.data.end(), 0.0);
        return out;
    }
    double cutoff = peak * std::pow(10.0, threshold_db / 20.0);
    for (size_t i = 0; i < out.data.size(); ++i) {
        if (confidence[i] < cutoff) out.data[i] = 0.0;
    }
    return out;
}

}  // namespace mmdepth::radar

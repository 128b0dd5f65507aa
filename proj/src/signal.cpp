#include "mmdepth/signal.hpp"

#include <cmath>
#include <numbers>
#include <thread>

namespace mmdepth::radar {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void FscwConfig::validate() const {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz)) {
        throw std::runtime_error("require f_max > f_min > 0");
    }
    if (n_f < 1) throw std::runtime_error("require n_f >= 1");
    if (!(c > 0.0)) throw std::runtime_error("require c > 0");
    if (!std::isfinite(phi_c)) throw std::runtime_error("non-finite phi_c");
}

void MimoArray::validate() const {
    if (tx.empty() || rx.empty()) throw std::runtime_error("empty antenna array");
    for (const auto& p : tx) {
        if (!p.finite()) throw std::runtime_error("non-finite TX position");
    }
    for (const auto& p : rx) {
        if (!p.finite()) throw std::runtime_error("non-finite RX position");
    }
}

void RawSignalCube::validate() const {
    config.validate();
    array.validate();
    if (data.size() != size_t(n_rx()) * n_tx() * n_f()) {
        throw std::runtime_error("signal cube size mismatch");
    }
    for (const auto& v : data) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw std::runtime_error("non-finite signal value");
        }
    }
}

void AmcwConfig::validate() const {
    if (!(f_m_hz > 0.0)) throw std::runtime_error("require f_m > 0");
}

MimoArray build_square_array(double aperture, int n_per_edge) {
    if (!(aperture > 0.0)) throw std::runtime_error("require aperture > 0");
    if (n_per_edge < 1) throw std::runtime_error("require n_per_edge >= 1");
    const double h = aperture / 2.0;
    MimoArray a;
    a.tx.reserve(2 * n_per_edge);
    a.rx.reserve(2 * n_per_edge);
    for (int k = 0; k < n_per_edge; ++k) {
        // centered sampling keeps n_per_edge = 1 at the edge midpoint
        double s = -h + (k + 0.5) * aperture / n_per_edge;
        a.tx.push_back({-h, s, 0.0});  // left vertical edge
        a.tx.push_back({+h, s, 0.0});  // right vertical edge
        a.rx.push_back({s, -h, 0.0});  // bottom horizontal edge
        a.rx.push_back({s, +h, 0.0});  // top horizontal edge
    }
    return a;
}

RawSignalCube simulate_fscw(std::span<const PointScatterer> scatterers,
                            const MimoArray& array, const FscwConfig& config,
                            bool spreading, int n_threads) {
    config.validate();
    array.validate();
    if (scatterers.empty()) throw std::runtime_error("no scatterers");
    for (const auto& s : scatterers) {
        if (s.reflectivity < 0.0) throw std::runtime_error("negative reflectivity");
        if (!s.position.finite()) throw std::runtime_error("non-finite scatterer position");
    }

    RawSignalCube cube;
    cube.config = config;
    cube.array = array;
    const int nrx = cube.n_rx(), ntx = cube.n_tx(), nf = config.n_f;
    cube.data.assign(size_t(nrx) * ntx * nf, {0.0, 0.0});

    auto worker = [&](int rx_begin, int rx_end) {
        for (int i = rx_begin; i < rx_end; ++i) {
            for (int j = 0; j < ntx; ++j) {
                for (const auto& sc : scatterers) {
                    double d_tx = distance(array.tx[j], sc.position);
                    double d_rx = distance(sc.position, array.rx[i]);
                    double w = sc.reflectivity;
                    if (spreading) {
                        if (d_tx < 1e-9 || d_rx < 1e-9) {
                            throw std::runtime_error("scatterer coincides with an antenna");
                        }
                        w /= d_tx * d_rx;
                    }
                    double tau = (d_tx + d_rx) / config.c;
                    // phase step per frequency bin, accumulated multiplicatively
                    std::complex<double> ph =
                        std::polar(1.0, -kTwoPi * config.f_min_hz * tau + config.phi_c);
                    std::complex<double> step =
                        std::polar(1.0, -kTwoPi * config.freq_step() * tau);
                    for (int n = 0; n < nf; ++n) {
                        cube.at(i, j, n) += w * ph;
                        ph *= step;
                    }
                }
            }
        }
    };

    if (n_threads <= 1 || nrx < 2) {
        worker(0, nrx);
    } else {
        int nt = std::min(n_threads, nrx);
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) {
            int lo = nrx * t / nt, hi = nrx * (t + 1) / nt;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return cube;
}

double phase_to_range(double delta_phi, double f_hz) {
    if (!(f_hz > 0.0)) throw std::runtime_error("require f > 0");
    return kSpeedOfLight * delta_phi / (kTwoPi * f_hz);
}

double amcw_four_bucket(double c0, double c90, double c180, double c270) {
    if (c0 == c90 && c90 == c180 && c180 == c270) {
        throw std::runtime_error("no modulation detected");
    }
    return std::atan2(c270 - c90, c0 - c180);
}

double signal_magnitude(std::span<const RawSignalCube> frames) {
    if (frames.empty()) throw std::runtime_error("no signal frames");
    const auto& f0 = frames.front();
    double acc = 0.0;
    for (const auto& cube : frames) {
        if (cube.data.size() != f0.data.size()) {
            throw std::runtime_error("signal frames differ in dimensions");
        }
        double sum = 0.0;
        for (const auto& v : cube.data) sum += std::abs(v);
        acc += sum / double(cube.data.size());
    }
    return acc / double(frames.size());
}

}  // namespace mmdepth::radar

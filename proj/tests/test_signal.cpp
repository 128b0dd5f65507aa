#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mmdepth/signal.hpp"
#include "test_util.hpp"

using namespace mmdepth;
using namespace mmdepth::radar;
using testutil::check_throws_with;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pi(double a) {
    while (a > std::numbers::pi) a -= kTwoPi;
    while (a < -std::numbers::pi) a += kTwoPi;
    return a;
}

// Straight-line reference evaluation of the forward model, no recurrences.
RawSignalCube brute_force_sim(std::span<const PointScatterer> sc, const MimoArray& arr,
                              const FscwConfig& cfg, bool spreading) {
    RawSignalCube cube;
    cube.config = cfg;
    cube.array = arr;
    cube.data.assign(size_t(arr.rx.size()) * arr.tx.size() * cfg.n_f, {0, 0});
    for (size_t i = 0; i < arr.rx.size(); ++i) {
        for (size_t j = 0; j < arr.tx.size(); ++j) {
            for (int n = 0; n < cfg.n_f; ++n) {
                std::complex<double> acc{0, 0};
                for (const auto& s : sc) {
                    double d_tx = distance(arr.tx[j], s.position);
                    double d_rx = distance(s.position, arr.rx[i]);
                    double w = s.reflectivity;
                    if (spreading) w /= d_tx * d_rx;
                    double tau = (d_tx + d_rx) / cfg.c;
                    acc += w * std::polar(1.0, -kTwoPi * cfg.freq(n) * tau + cfg.phi_c);
                }
                cube.at(int(i), int(j), n) = acc;
            }
        }
    }
    return cube;
}

}  // namespace

TEST_CASE("square array layout") {
    MimoArray a = build_square_array(0.138, 47);
    CHECK(a.tx.size() == 94);
    CHECK(a.rx.size() == 94);
    for (const auto& p : a.tx) {
        CHECK(std::abs(p.x) == doctest::Approx(0.069).epsilon(1e-12));
        CHECK(std::abs(p.y) <= 0.069 + 1e-12);
        CHECK(p.z == 0.0);
    }
    for (const auto& p : a.rx) {
        CHECK(std::abs(p.y) == doctest::Approx(0.069).epsilon(1e-12));
        CHECK(std::abs(p.x) <= 0.069 + 1e-12);
    }

    MimoArray one = build_square_array(0.2, 1);
    REQUIRE(one.tx.size() == 2);
    REQUIRE(one.rx.size() == 2);
    // single element per edge sits at the edge midpoint
    CHECK(one.tx[0].y == doctest::Approx(0.0));
    CHECK(one.rx[0].x == doctest::Approx(0.0));

    check_throws_with([] { build_square_array(-1.0, 4); }, "aperture");
    check_throws_with([] { build_square_array(0.1, 0); }, "n_per_edge");
}

TEST_CASE("monostatic closed-form phase") {
    const double R = 0.31;
    MimoArray arr;
    arr.tx = {{0, 0, 0}};
    arr.rx = {{0, 0, 0}};
    FscwConfig cfg{72e9, 82e9, 8, 0.4};
    std::vector<PointScatterer> sc{{{0, 0, R}, 1.0}};
    RawSignalCube cube = simulate_fscw(sc, arr, cfg);
    for (int n = 0; n < cfg.n_f; ++n) {
        double expected = wrap_pi(cfg.phi_c - kTwoPi * cfg.freq(n) * 2.0 * R / cfg.c);
        CHECK(wrap_pi(std::arg(cube.at(0, 0, n)) - expected) ==
              doctest::Approx(0.0).epsilon(1e-9));
        CHECK(std::abs(cube.at(0, 0, n)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("linearity over scatterer sets") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    MimoArray arr = build_square_array(0.1, 2);
    FscwConfig cfg{60e9, 70e9, 5, 0.0};
    for (int it = 0; it < 20; ++it) {
        std::vector<PointScatterer> a{{{u(rng), u(rng), 0.3 + u(rng)}, 1.0}};
        std::vector<PointScatterer> b{{{u(rng), u(rng), 0.25 + u(rng)}, 0.7},
                                      {{u(rng), u(rng), 0.35 + u(rng)}, 1.3}};
        std::vector<PointScatterer> both = a;
        both.insert(both.end(), b.begin(), b.end());
        RawSignalCube ca = simulate_fscw(a, arr, cfg);
        RawSignalCube cb = simulate_fscw(b, arr, cfg);
        RawSignalCube cboth = simulate_fscw(both, arr, cfg);
        for (size_t i = 0; i < cboth.data.size(); ++i) {
            CHECK(std::abs(cboth.data[i] - (ca.data[i] + cb.data[i])) <=
                  1e-12 * std::abs(cboth.data[i]) + 1e-12);
        }
    }
}

TEST_CASE("simulator matches brute-force oracle") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-0.04, 0.04);
    MimoArray arr = build_square_array(0.12, 1);  // 2x2
    FscwConfig cfg{72e9, 82e9, 4, 0.25};
    for (bool spreading : {false, true}) {
        std::vector<PointScatterer> sc;
        for (int k = 0; k < 3; ++k) sc.push_back({{u(rng), u(rng), 0.3 + u(rng)}, 0.5 + k * 0.5});
        RawSignalCube fast = simulate_fscw(sc, arr, cfg, spreading);
        RawSignalCube slow = brute_force_sim(sc, arr, cfg, spreading);
        for (size_t i = 0; i < fast.data.size(); ++i) {
            CHECK(std::abs(fast.data[i] - slow.data[i]) <= 1e-12 * std::abs(slow.data[i]) + 1e-15);
        }
    }
}

TEST_CASE("simulator is thread-count independent") {
    MimoArray arr = build_square_array(0.1, 3);
    FscwConfig cfg{72e9, 82e9, 6, 0.0};
    std::vector<PointScatterer> sc{{{0.01, -0.02, 0.3}, 1.0}, {{-0.01, 0.02, 0.35}, 0.8}};
    RawSignalCube one = simulate_fscw(sc, arr, cfg, false, 1);
    RawSignalCube four = simulate_fscw(sc, arr, cfg, false, 4);
    CHECK(one.data == four.data);
}

TEST_CASE("spreading rejects coincident antenna") {
    MimoArray arr;
    arr.tx = {{0, 0, 0}};
    arr.rx = {{0.05, 0, 0}};
    FscwConfig cfg{72e9, 82e9, 2, 0.0};
    std::vector<PointScatterer> sc{{{0, 0, 0}, 1.0}};
    check_throws_with([&] { simulate_fscw(sc, arr, cfg, true); }, "coincides");
    CHECK_NOTHROW(simulate_fscw(sc, arr, cfg, false));
}

TEST_CASE("geometry reciprocity") {
    FscwConfig cfg{72e9, 82e9, 4, 0.1};
    std::vector<PointScatterer> sc{{{0.01, 0.02, 0.3}, 1.0}};
    MimoArray a, b;
    a.tx = {{-0.05, 0, 0}};
    a.rx = {{0.05, 0, 0}};
    b.tx = a.rx;
    b.rx = a.tx;
    RawSignalCube ca = simulate_fscw(sc, a, cfg);
    RawSignalCube cb = simulate_fscw(sc, b, cfg);
    for (size_t i = 0; i < ca.data.size(); ++i) {
        CHECK(std::abs(ca.data[i] - cb.data[i]) <= 1e-12);
    }
}

TEST_CASE("phase_to_range") {
    const double c = kSpeedOfLight;
    SUBCASE("one full cycle is one wavelength") {
        double lambda = 0.005;
        CHECK(phase_to_range(kTwoPi, c / lambda) == doctest::Approx(lambda).epsilon(1e-12));
    }
    SUBCASE("zero phase") { CHECK(phase_to_range(0.0, 75e9) == 0.0); }
    SUBCASE("pi at 75 GHz") {
        CHECK(phase_to_range(std::numbers::pi, 75e9) ==
              doctest::Approx(0.0019986163866666667).epsilon(1e-12));
    }
    SUBCASE("periodicity c/f") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (int it = 0; it < 100; ++it) {
            double phi = u(rng), f = 10e9 * (1.0 + std::abs(u(rng)));
            double diff = phase_to_range(phi + kTwoPi, f) - phase_to_range(phi, f);
            CHECK(diff == doctest::Approx(c / f).epsilon(1e-9));
        }
    }
    check_throws_with([] { phase_to_range(1.0, 0.0); }, "f > 0");
}

TEST_CASE("amcw four-bucket phase") {
    CHECK(amcw_four_bucket(1, 0, -1, 0) == doctest::Approx(0.0));
    CHECK(amcw_four_bucket(0, -1, 0, 1) == doctest::Approx(std::numbers::pi / 2));
    // samples of cos(theta + phi0): the extraction returns the phase lead
    double phi0 = 0.7;
    double c0 = std::cos(phi0), c90 = std::cos(std::numbers::pi / 2 + phi0);
    double c180 = std::cos(std::numbers::pi + phi0);
    double c270 = std::cos(1.5 * std::numbers::pi + phi0);
    CHECK(amcw_four_bucket(c0, c90, c180, c270) == doctest::Approx(phi0).epsilon(1e-12));
    check_throws_with([] { amcw_four_bucket(2, 2, 2, 2); }, "no modulation");
}

TEST_CASE("signal magnitude") {
    RawSignalCube cube;
    cube.config = {72e9, 82e9, 1, 0.0};
    cube.array.tx = {{0, 0, 0}};
    cube.array.rx = {{0, 0, 0}, {0.01, 0, 0}};
    cube.config.n_f = 1;
    cube.data = {{1, 0}, {0, 1}};
    CHECK(signal_magnitude(std::span(&cube, 1)) == doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("matches scalar oracle and is phase-rotation invariant") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int it = 0; it < 100; ++it) {
            RawSignalCube r = cube;
            r.config.n_f = 3;
            r.data.clear();
            for (int i = 0; i < 2 * 1 * 3; ++i) r.data.push_back({u(rng), u(rng)});
            double oracle = 0.0;
            for (const auto& v : r.data) oracle += std::abs(v);
            oracle /= double(r.data.size());
            CHECK(signal_magnitude(std::span(&r, 1)) == doctest::Approx(oracle).epsilon(1e-12));

            RawSignalCube rot = r;
            auto phase = std::polar(1.0, u(rng));
            for (auto& v : rot.data) v *= phase;
            CHECK(signal_magnitude(std::span(&rot, 1)) ==
                  doctest::Approx(signal_magnitude(std::span(&r, 1))).epsilon(1e-12));
        }
    }
}

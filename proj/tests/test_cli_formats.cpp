#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmdepth/geometry.hpp"
#include "mmdepth/io.hpp"
#include "mmdepth/metrics.hpp"
#include "mmdepth/signal.hpp"
#include "test_util.hpp"

using namespace mmdepth;
using testutil::check_throws_with;
using testutil::tmp_path;

namespace {

#ifndef MMDEPTH_CLI
#define MMDEPTH_CLI "./mmdepth"
#endif

int run_cli(const std::string& args) {
    std::string cmd = std::string(MMDEPTH_CLI) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("signal cube round trip") {
    radar::MimoArray arr = radar::build_square_array(0.1, 2);
    radar::FscwConfig cfg{72e9, 82e9, 4, 0.5};
    std::vector<radar::PointScatterer> sc{{{0.01, -0.02, 0.3}, 1.0}};
    radar::RawSignalCube cube = radar::simulate_fscw(sc, arr, cfg);

    std::string path = tmp_path("cube.rsc");
    io::save_signal_cube(cube, path);
    radar::RawSignalCube back = io::load_signal_cube(path);

    CHECK(back.n_rx() == cube.n_rx());
    CHECK(back.n_tx() == cube.n_tx());
    CHECK(back.n_f() == cube.n_f());
    CHECK(back.config.f_min_hz == cfg.f_min_hz);
    CHECK(back.config.phi_c == cfg.phi_c);
    REQUIRE(back.data.size() == cube.data.size());
    for (size_t i = 0; i < cube.data.size(); ++i) {
        // payload is float32: round trip matches to float precision
        CHECK(back.data[i].real() == doctest::Approx(cube.data[i].real()).epsilon(1e-6));
        CHECK(back.data[i].imag() == doctest::Approx(cube.data[i].imag()).epsilon(1e-6));
    }

    // re-save of the loaded cube is byte-identical (float payload is stable)
    std::string path2 = tmp_path("cube2.rsc");
    io::save_signal_cube(back, path2);
    CHECK(slurp(path) == slurp(path2));

    std::ofstream(path, std::ios::binary) << "NOTMAGIC\x02\x00\x00\x00{}";
    check_throws_with([&] { io::load_signal_cube(path); }, "bad magic");
}

TEST_CASE("manifest and erosion metadata loading") {
    std::string dir = tmp_path("scene");
    std::filesystem::create_directories(dir);

    DepthImage frame;
    frame.width = 2;
    frame.height = 2;
    frame.data = {0.25, 0.5, 0.0, 0.5};
    io::save_depth_image(frame, dir + "/f0.dmap");
    SegMask mask = SegMask::filled(2, 2, true);
    io::save_mask(mask, dir + "/m.pgm");
    io::save_calibration(Transform4::identity(), dir + "/k.json");
    TriMesh mesh;
    mesh.vertices = {{0, 0, 0.4}, {2, 0, 0.4}, {0, 2, 0.4}};
    mesh.faces = {{0, 1, 2}};
    io::save_mesh(mesh, dir + "/gt.obj");

    std::ofstream(dir + "/manifest.json") << R"({"captures": [{
        "sensor": "tof", "object": "cup",
        "frames": ["f0.dmap"], "masks": ["m.pgm"],
        "calibration": "k.json", "gt_mesh": "gt.obj",
        "distance_cm": 40, "material_class": "skin", "quasi_static": true}]})";

    auto entries = io::load_manifest(dir + "/manifest.json");
    REQUIRE(entries.size() == 1);
    const auto& e = entries[0];
    CHECK(e.capture.sensor == "tof");
    CHECK(e.capture.object == "cup");
    CHECK(e.capture.frames.size() == 1);
    CHECK(e.capture.masks.size() == 1);
    CHECK(e.capture.distance_cm == 40);
    CHECK(e.capture.material == MaterialClass::skin);
    CHECK(e.capture.quasi_static);
    CHECK(io::load_mesh(e.gt_mesh_path).faces.size() == 1);

    std::ofstream(dir + "/erosion.json") << R"({"erosion": {"cup/tof": 3}})";
    auto erosion = io::load_erosion_metadata(dir + "/erosion.json");
    CHECK(erosion.at("cup/tof") == 3);
}

TEST_CASE("cli exit codes") {
    CHECK(run_cli("definitely-not-a-subcommand") == 2);
    CHECK(run_cli("") == 2);  // missing subcommand
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("filter /nonexistent.dmap /nonexistent.dmap -o /dev/null") == 1);
    CHECK(run_cli("resolution --sensor mimo --z 0.3") == 0);
    CHECK(run_cli("resolution --sensor warp-drive") == 1);
}

TEST_CASE("cli demo, evaluate and analyze pipeline") {
    std::string dir = tmp_path("demo");
    REQUIRE(run_cli("demo --out " + dir) == 0);
    REQUIRE(run_cli("evaluate --manifest " + dir + "/manifest.json --erosion-metadata " +
                    dir + "/erosion.json --out " + dir + "/results") == 0);

    auto reports = metrics::load_reports_json(dir + "/results/results.json");
    REQUIRE(reports.size() == 2);
    for (const auto& r : reports) {
        REQUIRE(r.stats.count("C1") == 1);
        if (r.sensor == "ortho-exact") {
            CHECK(std::abs(r.stats.at("C1").mean) <= 1e-6);
            CHECK(std::abs(r.stats.at("P1").mean) <= 1e-6);
        } else {
            CHECK(r.sensor == "ortho-shifted");
            CHECK(r.erosion_k == 2);
            // 3 mm plane shift -> 0.3 cm across the board
            CHECK(r.stats.at("P1").mean == doctest::Approx(0.3).epsilon(1e-4));
            CHECK(r.stats.at("C1").mean == doctest::Approx(0.3).epsilon(1e-3));
        }
    }

    // evaluate is deterministic: a second run writes byte-identical outputs
    REQUIRE(run_cli("evaluate --manifest " + dir + "/manifest.json --erosion-metadata " +
                    dir + "/erosion.json --out " + dir + "/results2") == 0);
    CHECK(slurp(dir + "/results/results.json") == slurp(dir + "/results2/results.json"));
    CHECK(slurp(dir + "/results/results.csv") == slurp(dir + "/results2/results.csv"));

    REQUIRE(run_cli("analyze --reports " + dir + "/results/results.json --out " + dir +
                    "/plots") == 0);
    CHECK(std::filesystem::exists(dir + "/plots/boxplot.csv"));
    CHECK(std::filesystem::exists(dir + "/plots/scatter.csv"));
    CHECK(std::filesystem::exists(dir + "/plots/barycentric.csv"));
}

TEST_CASE("cli radar chain: simulate, backproject, filter, unproject") {
    std::string dir = tmp_path("radar");
    std::filesystem::create_directories(dir);

    // scatterer on a voxel center of the requested grid
    REQUIRE(run_cli("simulate --scatterer 0.004,-0.008,0.304,1 --aperture 0.138 "
                    "--n-per-edge 4 --nf 16 -o " + dir + "/cube.rsc") == 0);
    REQUIRE(run_cli("backproject " + dir + "/cube.rsc --origin -0.02,-0.02,0.28 "
                    "--step 0.004,0.004,0.004 --dims 11,11,11 -o " + dir +
                    "/depth.dmap --confidence " + dir + "/conf.dmap") == 0);
    REQUIRE(run_cli("filter " + dir + "/depth.dmap " + dir + "/conf.dmap --db -14 -o " +
                    dir + "/filtered.dmap") == 0);
    REQUIRE(run_cli("unproject " + dir + "/filtered.dmap -o " + dir + "/cloud.obj") == 0);

    // surviving points cluster at the scatterer in x/y; peak depth is its z
    std::ifstream in(dir + "/cloud.obj");
    REQUIRE(in.good());
    std::string tag;
    double x, y, z;
    int count = 0;
    bool found_exact = false;
    while (in >> tag >> x >> y >> z) {
        REQUIRE(tag == "v");
        ++count;
        CHECK(std::abs(x - 0.004) <= 0.012);
        CHECK(std::abs(y + 0.008) <= 0.012);
        if (std::abs(x - 0.004) < 1e-9 && std::abs(y + 0.008) < 1e-9) {
            found_exact = true;
            CHECK(std::abs(z - 0.304) <= 1e-6);
        }
    }
    CHECK(count >= 1);
    CHECK(found_exact);

    REQUIRE(run_cli("average " + dir + "/depth.dmap " + dir + "/depth.dmap -o " + dir +
                    "/avg.dmap") == 0);
    auto avg = io::load_depth_image(dir + "/avg.dmap");
    auto depth = io::load_depth_image(dir + "/depth.dmap");
    CHECK(avg.data == depth.data);

    REQUIRE(run_cli("rasterize " + dir + "/nonexistent.obj --like " + dir +
                    "/depth.dmap -o /dev/null") == 1);
}

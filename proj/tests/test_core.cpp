#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "mmdepth/io.hpp"
#include "mmdepth/types.hpp"
#include "test_util.hpp"

using namespace mmdepth;
using testutil::check_throws_with;
using testutil::tmp_path;

TEST_CASE("Transform4 basics") {
    Transform4 t = Transform4::translation({1.0, 2.0, 3.0});
    Vec3 p = t.apply({0.5, 0.0, -1.0});
    CHECK(p.x == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(p.y == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.z == doctest::Approx(2.0).epsilon(1e-15));

    Transform4 inv = t.inverse();
    Vec3 q = inv.apply(p);
    CHECK(q.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(q.z == doctest::Approx(-1.0).epsilon(1e-12));

    CHECK(Transform4::identity().det() == doctest::Approx(1.0));

    Transform4 singular;
    singular.at(0, 0) = 0.0;
    singular.at(1, 1) = 0.0;
    check_throws_with([&] { singular.inverse(); }, "not invertible");

    Transform4 bad_row;
    bad_row.at(3, 3) = 2.0;
    check_throws_with([&] { bad_row.validate(); }, "last row");
}

TEST_CASE("Transform4 inverse matches product identity on random matrices") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        Transform4 t;
        do {
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 4; ++j) t.at(i, j) = u(rng);
            }
        } while (std::abs(t.det()) <= 1e-3);
        Transform4 id = t * t.inverse();
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                CHECK(id.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("depth image round trip is exact") {
    DepthImage img;
    img.width = 2;
    img.height = 2;
    // float32-representable values survive the on-disk quantization exactly
    img.data = {0.3125, 0.0, 0.40625, 0.5};
    img.projection.kind = ProjectionKind::perspective;
    img.projection.scale = {500, 0, 320, 0, 500, 240, 0, 0, 1};
    img.projection.offset = {0.0, 0.0, 0.0};
    img.transform = img.projection.embed();

    std::string path = tmp_path("round.dmap");
    io::save_depth_image(img, path);
    DepthImage back = io::load_depth_image(path);

    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.data == img.data);
    CHECK(back.projection.kind == img.projection.kind);
    CHECK(back.projection.scale == img.projection.scale);
    CHECK(back.transform.m == img.transform.m);
    CHECK(back.valid(0, 0));
    CHECK_FALSE(back.valid(1, 0));

    // byte-identical re-save
    io::save_depth_image(back, tmp_path("round2.dmap"));
    std::ifstream a(path, std::ios::binary), b(tmp_path("round2.dmap"), std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), {});
    std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("depth image container errors") {
    std::string path = tmp_path("bad.dmap");
    std::ofstream(path, std::ios::binary) << "XXXXXXXX\x04\x00\x00\x00{}";
    check_throws_with([&] { io::load_depth_image(path); }, "bad magic");

    DepthImage img;
    img.width = 2;
    img.height = 2;
    img.data = {0.25, 0.25, 0.25, 0.25};
    std::string good = tmp_path("good.dmap");
    io::save_depth_image(img, good);

    std::ifstream in(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});

    std::string cut = tmp_path("cut.dmap");
    std::ofstream(cut, std::ios::binary) << bytes.substr(0, bytes.size() - 3);
    check_throws_with([&] { io::load_depth_image(cut); }, "truncated payload");

    std::string fat = tmp_path("fat.dmap");
    std::ofstream(fat, std::ios::binary) << bytes << "zzzz";
    check_throws_with([&] { io::load_depth_image(fat); }, "oversized payload");

    std::string hdr = tmp_path("hdr.dmap");
    std::ofstream(hdr, std::ios::binary) << bytes.substr(0, 10);
    check_throws_with([&] { io::load_depth_image(hdr); },
                      bytes.size() > 10 ? "bad magic" : "truncated header");
}

TEST_CASE("minimal OBJ mesh") {
    std::string path = tmp_path("tri.obj");
    std::ofstream(path) << "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
    TriMesh mesh = io::load_mesh(path);
    REQUIRE(mesh.vertices.size() == 3);
    REQUIRE(mesh.faces.size() == 1);
    CHECK(mesh.vertices[1].x == 1.0);
    CHECK(mesh.faces[0] == std::array<int, 3>{0, 1, 2});

    // f with v/vt/vn tokens
    std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\n";
    CHECK(io::load_mesh(path).faces.size() == 1);

    std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n";
    check_throws_with([&] { io::load_mesh(path); }, "out of range");

    std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n";
    check_throws_with([&] { io::load_mesh(path); }, "degenerate");

    TriMesh rt;
    rt.vertices = {{0, 0, 0}, {0.1, 0, 0}, {0, 0.1, 0.05}};
    rt.faces = {{0, 1, 2}};
    io::save_mesh(rt, path);
    TriMesh back = io::load_mesh(path);
    CHECK(back.vertices[2].z == rt.vertices[2].z);
    CHECK(back.faces == rt.faces);
}

TEST_CASE("PGM mask") {
    std::string path = tmp_path("mask.pgm");
    std::ofstream(path, std::ios::binary) << "P5\n2 2\n255\n" << '\0' << char(255) << '\0'
                                          << char(255);
    SegMask m = io::load_mask(path);
    CHECK_FALSE(m.at(0, 0));
    CHECK(m.at(1, 0));
    CHECK_FALSE(m.at(0, 1));
    CHECK(m.at(1, 1));

    io::save_mask(m, path);
    SegMask back = io::load_mask(path);
    CHECK(back.bits == m.bits);

    std::ofstream(path, std::ios::binary) << "P6\n2 2\n255\nxxxx";
    check_throws_with([&] { io::load_mask(path); }, "bad magic");
}

TEST_CASE("calibration JSON") {
    std::string path = tmp_path("calib.json");
    std::ofstream(path) << "[1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]";
    Transform4 t = io::load_calibration(path);
    CHECK(t.m == Transform4::identity().m);

    Transform4 shift = Transform4::translation({0.01, -0.02, 0.3});
    io::save_calibration(shift, path);
    CHECK(io::load_calibration(path).m == shift.m);

    std::ofstream(path) << "[0,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,1]";
    check_throws_with([&] { io::load_calibration(path); }, "not invertible");
}

TEST_CASE("material class names") {
    for (auto c : {MaterialClass::metal, MaterialClass::fibers_and_stone,
                   MaterialClass::polymer, MaterialClass::skin,
                   MaterialClass::foam_and_fabric, MaterialClass::outside_fov}) {
        CHECK(material_from_string(to_string(c)) == c);
    }
    check_throws_with([] { material_from_string("granite"); }, "unknown material");
}

TEST_CASE("TriMesh and DepthImage validation") {
    DepthImage img;
    img.width = 1;
    img.height = 1;
    img.data = {-0.5};
    check_throws_with([&] { img.validate(); }, "negative depth");
    img.data = {0.5};
    CHECK_NOTHROW(img.validate());
}

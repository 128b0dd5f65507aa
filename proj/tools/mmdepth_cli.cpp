// Subcommand front-end for the imaging and evaluation pipeline. Binary
// formats stream through files; subcommands compose through paths.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmdepth/analysis.hpp"
#include "mmdepth/geometry.hpp"
#include "mmdepth/imaging.hpp"
#include "mmdepth/io.hpp"
#include "mmdepth/metrics.hpp"
#include "mmdepth/resolution.hpp"
#include "mmdepth/signal.hpp"

namespace {

using namespace mmdepth;

Vec3 parse_vec3(const std::string& s) {
    Vec3 v;
    char sep1, sep2;
    std::istringstream ss(s);
    if (!(ss >> v.x >> sep1 >> v.y >> sep2 >> v.z) || sep1 != ',' || sep2 != ',') {
        throw std::runtime_error("expected x,y,z: " + s);
    }
    return v;
}

void save_point_cloud(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[128];
    for (const auto& p : cloud.points) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", p.x, p.y, p.z);
        out << buf;
    }
}

int default_threads() {
    if (const char* env = std::getenv("MMDEPTH_THREADS")) {
        return std::max(1, std::atoi(env));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Synthetic scene so the evaluation pipeline runs with zero external data:
// a tilted plate mesh, one sensor reproducing the rasterized GT exactly and
// one shifted 3 mm along the viewing axis.
void generate_demo(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto p = [&](const std::string& n) { return dir + "/" + n; };

    TriMesh plate;
    plate.vertices = {{-0.05, -0.05, 0.300}, {0.05, -0.05, 0.302},
                      {0.05, 0.05, 0.304}, {-0.05, 0.05, 0.302}};
    plate.faces = {{0, 1, 2}, {0, 2, 3}};
    io::save_mesh(plate, p("plate_gt.obj"));

    Transform4 calib = Transform4::translation({0.002, -0.001, 0.0});
    io::save_calibration(calib, p("calibration.json"));

    ProjectionModel model;
    model.kind = ProjectionKind::orthographic;
    model.scale = {1.0 / 0.002, 0, 0, 0, 1.0 / 0.002, 0, 0, 0, 1.0};
    model.offset = {32.0, 32.0, 0.0};

    TriMesh plate_s = geom::align_to_sensor(plate, calib);
    DepthImage base = geom::rasterize_mesh_depth(plate_s, model, model.embed(), 64, 64);

    SegMask mask = SegMask::filled(64, 64, true);
    io::save_mask(mask, p("mask.pgm"));

    DepthImage shifted = base;
    for (double& d : shifted.data) {
        if (d > 0.0) d += 0.003;
    }
    io::save_depth_image(base, p("exact_frame0.dmap"));
    io::save_depth_image(base, p("exact_frame1.dmap"));
    io::save_depth_image(shifted, p("shifted_frame0.dmap"));
    io::save_depth_image(shifted, p("shifted_frame1.dmap"));

    nlohmann::json manifest;
    auto entry = [&](const std::string& sensor, const std::string& stem) {
        return nlohmann::json{
            {"sensor", sensor},
            {"object", "plate"},
            {"frames", {stem + "_frame0.dmap", stem + "_frame1.dmap"}},
            {"masks", {"mask.pgm"}},
            {"calibration", "calibration.json"},
            {"gt_mesh", "plate_gt.obj"},
            {"distance_cm", 30},
            {"material_class", "metal"},
        };
    };
    manifest["captures"] = {entry("ortho-exact", "exact"), entry("ortho-shifted", "shifted")};
    std::ofstream(p("manifest.json")) << manifest.dump(2) << "\n";

    nlohmann::json erosion = {{"erosion", {{"plate/ortho-shifted", 2}}}};
    std::ofstream(p("erosion.json")) << erosion.dump(2) << "\n";
    std::cout << "demo scene written to " << dir << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"near-field radar imaging and multimodal depth evaluation"};
    app.require_subcommand(1);
    app.set_config("--config");
    int threads = default_threads();
    app.add_option("--threads", threads, "worker thread count")->envname("MMDEPTH_THREADS");

    // --- simulate
    auto* sim = app.add_subcommand("simulate", "simulate a raw signal cube");
    std::vector<std::string> scatterer_specs;
    double aperture = 0.138;
    int n_per_edge = 4, n_f = 32, random_scatterers = 0;
    double f_min = 72e9, f_max = 82e9, phi_c = 0.0;
    unsigned seed = 1;
    bool spreading = false;
    std::string sim_out;
    sim->add_option("--scatterer", scatterer_specs, "scatterer as x,y,z,amp (repeatable)");
    sim->add_option("--random-scatterers", random_scatterers, "draw N random scatterers");
    sim->add_option("--seed", seed, "RNG seed for random scenes");
    sim->add_option("--aperture", aperture, "square aperture size L (m)");
    sim->add_option("--n-per-edge", n_per_edge, "antennas per edge");
    sim->add_option("--fmin", f_min, "lowest frequency (Hz)");
    sim->add_option("--fmax", f_max, "highest frequency (Hz)");
    sim->add_option("--nf", n_f, "number of frequency steps");
    sim->add_option("--phic", phi_c, "constant phase offset (rad)");
    sim->add_flag("--spreading", spreading, "apply per-leg spreading loss");
    sim->add_option("-o,--out", sim_out, "output .rsc path")->required();

    // --- backproject
    auto* bp = app.add_subcommand("backproject", "form a confidence volume and depth map");
    std::string bp_in, bp_depth_out, bp_conf_out;
    std::string origin_s = "-0.05,-0.05,0.25", step_s = "0.002,0.002,0.002";
    std::string dims_s = "48,48,48";
    bp->add_option("input", bp_in, "input .rsc")->required();
    bp->add_option("--origin", origin_s, "grid origin x,y,z (m)");
    bp->add_option("--step", step_s, "voxel step x,y,z (m)");
    bp->add_option("--dims", dims_s, "grid dims nx,ny,nz");
    bp->add_option("-o,--out", bp_depth_out, "output depth .dmap")->required();
    bp->add_option("--confidence", bp_conf_out, "output confidence .dmap")->required();

    // --- filter
    auto* flt = app.add_subcommand("filter", "confidence-threshold a depth map");
    std::string flt_depth, flt_conf, flt_out;
    double threshold_db = -14.0;
    flt->add_option("depth", flt_depth, "depth .dmap")->required();
    flt->add_option("confidence", flt_conf, "confidence .dmap")->required();
    flt->add_option("--db", threshold_db, "threshold in dB relative to the maximum");
    flt->add_option("-o,--out", flt_out, "output .dmap")->required();

    // --- unproject
    auto* unp = app.add_subcommand("unproject", "depth map to point cloud");
    std::string unp_in, unp_mask, unp_out;
    unp->add_option("input", unp_in, "input .dmap")->required();
    unp->add_option("--mask", unp_mask, "segmentation .pgm");
    unp->add_option("-o,--out", unp_out, "output .obj point list")->required();

    // --- rasterize
    auto* ras = app.add_subcommand("rasterize", "mesh to simulated depth map");
    std::string ras_mesh, ras_like, ras_out;
    int ras_w = 0, ras_h = 0;
    ras->add_option("mesh", ras_mesh, "input .obj (already in sensor space)")->required();
    ras->add_option("--like", ras_like, "take projection/size from this .dmap")->required();
    ras->add_option("--width", ras_w, "override raster width");
    ras->add_option("--height", ras_h, "override raster height");
    ras->add_option("-o,--out", ras_out, "output .dmap")->required();

    // --- average
    auto* avg = app.add_subcommand("average", "average valid depth across frames");
    std::vector<std::string> avg_in;
    std::string avg_out;
    avg->add_option("frames", avg_in, "input .dmap frames")->required();
    avg->add_option("-o,--out", avg_out, "output .dmap")->required();

    // --- evaluate
    auto* ev = app.add_subcommand("evaluate", "run the metric pipeline over a manifest");
    std::string ev_manifest, ev_erosion, ev_out_dir = ".";
    ev->add_option("--manifest", ev_manifest, "capture manifest .json")->required();
    ev->add_option("--erosion-metadata", ev_erosion, "per object/sensor erosion kernels");
    ev->add_option("--out", ev_out_dir, "output directory");

    // --- analyze
    auto* an = app.add_subcommand("analyze", "aggregate reports into plot data");
    std::string an_reports, an_contexts, an_out = "plots";
    an->add_option("--reports", an_reports, "results.json from evaluate")->required();
    an->add_option("--contexts", an_contexts, "per-object context .json");
    an->add_option("--out", an_out, "output directory");

    // --- resolution
    auto* res = app.add_subcommand("resolution", "closed-form resolution calculators");
    std::string res_sensor;
    double res_z = 0.3, res_L = 0.138, res_fmin = 72e9, res_fmax = 82e9;
    double res_lambda = 0.00375;
    double res_B = 0.05, res_f_px = 1000.0, res_D = 100.0, res_dD = 1.0;
    double res_fm = 0, res_pl = 1, res_pa = 0, res_I = 1, res_qe = 1, res_ko = 1,
           res_rho = 1, res_dt = 1;
    res->add_option("--sensor", res_sensor, "one of mimo|stereo|amcw|rayleigh")->required();
    res->add_option("--z", res_z, "distance (m)");
    res->add_option("--L", res_L, "aperture (m)");
    res->add_option("--fmin", res_fmin, "lowest frequency (Hz)");
    res->add_option("--fmax", res_fmax, "highest frequency (Hz)");
    res->add_option("--lambda", res_lambda, "wavelength (m, rayleigh)");
    res->add_option("--baseline", res_B, "stereo baseline (m)");
    res->add_option("--focal", res_f_px, "stereo focal length (px)");
    res->add_option("--disparity", res_D, "stereo disparity (px)");
    res->add_option("--disparity-res", res_dD, "stereo disparity resolution (px)");
    res->add_option("--fm", res_fm, "AMCW modulation frequency (Hz)");
    res->add_option("--pl", res_pl, "AMCW illumination power (W)");
    res->add_option("--pa", res_pa, "AMCW ambient power (W)");
    res->add_option("--illum-area", res_I, "AMCW illumination area");
    res->add_option("--qe", res_qe, "AMCW quantum efficiency");
    res->add_option("--ko", res_ko, "AMCW optical constant");
    res->add_option("--rho", res_rho, "AMCW target reflectivity");
    res->add_option("--dt", res_dt, "AMCW integration time (s)");

    // --- demo
    auto* demo = app.add_subcommand("demo", "write a synthetic evaluation scene");
    std::string demo_out = "demo_scene";
    demo->add_option("--out", demo_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*sim) {
        std::vector<radar::PointScatterer> scatterers;
        for (const auto& s : scatterer_specs) {
            radar::PointScatterer sc;
            std::istringstream ss(s);
            char c1, c2, c3;
            if (!(ss >> sc.position.x >> c1 >> sc.position.y >> c2 >> sc.position.z >> c3 >>
                  sc.reflectivity)) {
                throw std::runtime_error("expected x,y,z,amp: " + s);
            }
            scatterers.push_back(sc);
        }
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> xy(-0.04, 0.04), z(0.26, 0.34);
        for (int i = 0; i < random_scatterers; ++i) {
            scatterers.push_back({{xy(rng), xy(rng), z(rng)}, 1.0});
        }
        radar::FscwConfig cfg{f_min, f_max, n_f, phi_c};
        auto cube = radar::simulate_fscw(scatterers, radar::build_square_array(aperture, n_per_edge),
                                         cfg, spreading, threads);
        io::save_signal_cube(cube, sim_out);
    } else if (*bp) {
        auto cube = io::load_signal_cube(bp_in);
        radar::VoxelGridSpec spec;
        spec.origin = parse_vec3(origin_s);
        spec.step = parse_vec3(step_s);
        Vec3 d = parse_vec3(dims_s);
        spec.dims = {int(d.x), int(d.y), int(d.z)};
        auto vol = radar::backproject(cube, spec, threads);
        auto proj = radar::max_projection(vol);
        io::save_depth_image(proj.depth, bp_depth_out);
        DepthImage conf = proj.depth;
        conf.data.assign(proj.confidence.begin(), proj.confidence.end());
        io::save_depth_image(conf, bp_conf_out);
    } else if (*flt) {
        auto depth = io::load_depth_image(flt_depth);
        auto conf = io::load_depth_image(flt_conf);
        if (conf.data.size() != depth.data.size()) {
            throw std::runtime_error("confidence map size mismatch");
        }
        io::save_depth_image(radar::db_threshold_filter(depth, conf.data, threshold_db),
                             flt_out);
    } else if (*unp) {
        auto depth = io::load_depth_image(unp_in);
        if (!unp_mask.empty()) {
            auto mask = io::load_mask(unp_mask);
            save_point_cloud(geom::unproject(depth, &mask), unp_out);
        } else {
            save_point_cloud(geom::unproject(depth), unp_out);
        }
    } else if (*ras) {
        auto mesh = io::load_mesh(ras_mesh);
        auto like = io::load_depth_image(ras_like);
        int w = ras_w > 0 ? ras_w : like.width;
        int h = ras_h > 0 ? ras_h : like.height;
        io::save_depth_image(
            geom::rasterize_mesh_depth(mesh, like.projection, like.transform, w, h), ras_out);
    } else if (*avg) {
        std::vector<DepthImage> frames;
        for (const auto& f : avg_in) frames.push_back(io::load_depth_image(f));
        io::save_depth_image(geom::average_frames(frames), avg_out);
    } else if (*ev) {
        auto entries = io::load_manifest(ev_manifest);
        std::map<std::string, int> erosion;
        if (!ev_erosion.empty()) erosion = io::load_erosion_metadata(ev_erosion);
        std::vector<metrics::MetricReport> reports;
        for (const auto& e : entries) {
            auto mesh = io::load_mesh(e.gt_mesh_path);
            int k = 0;
            auto it = erosion.find(e.capture.object + "/" + e.capture.sensor);
            if (it != erosion.end()) k = it->second;
            reports.push_back(metrics::evaluate_capture(e.capture, mesh, k));
        }
        std::filesystem::create_directories(ev_out_dir);
        metrics::write_reports_json(reports, ev_out_dir + "/results.json");
        metrics::write_reports_csv(reports, ev_out_dir + "/results.csv");
        std::cout << "wrote " << reports.size() << " reports to " << ev_out_dir << "\n";
    } else if (*an) {
        auto reports = metrics::load_reports_json(an_reports);
        std::vector<analysis::ObjectContext> contexts;
        if (!an_contexts.empty()) {
            std::ifstream in(an_contexts);
            if (!in) throw std::runtime_error("cannot read " + an_contexts);
            for (const auto& j : nlohmann::json::parse(in)) {
                analysis::ObjectContext c;
                c.object = j.at("object").get<std::string>();
                c.material = material_from_string(j.value("material_class", "polymer"));
                c.signal_magnitude = j.value("magnitude", 0.0);
                c.incidence_median_deg = j.value("incidence_median_deg", 0.0);
                c.relative_area = j.value("rel_area", 0.0);
                c.outside_fov = j.value("outside_fov", false);
                contexts.push_back(c);
            }
        } else {
            std::set<std::string> seen;
            for (const auto& r : reports) {
                if (seen.insert(r.object).second) {
                    contexts.push_back({.object = r.object});
                }
            }
        }
        analysis::emit_plot_data(reports, contexts, an_out);
        std::cout << "plot data written to " << an_out << "\n";
    } else if (*res) {
        char buf[256];
        if (res_sensor == "mimo") {
            resolution::MimoResolutionParams p{res_fmin, res_fmax, res_L, res_z};
            double dxy = resolution::mimo_cross_range(p) * 1e3;
            double dz = resolution::mimo_range_res(p) * 1e3;
            std::snprintf(buf, sizeof(buf),
                          "delta_x = %.9g mm\ndelta_y = %.9g mm\ndelta_z = %.9g mm\n", dxy,
                          dxy, dz);
        } else if (res_sensor == "stereo") {
            resolution::StereoParams p{res_B, res_f_px, res_D, res_dD, res_z};
            std::snprintf(buf, sizeof(buf), "depth = %.9g m\ndelta_z = %.9g mm\n",
                          resolution::stereo_depth(p), resolution::stereo_depth_res(p) * 1e3);
        } else if (res_sensor == "amcw") {
            resolution::AmcwParams p{res_fm, res_pl, res_pa, res_I, res_qe, res_ko, res_rho,
                                     res_dt};
            std::snprintf(buf, sizeof(buf), "delta_z = %.9g mm\n",
                          resolution::amcw_range_res(p) * 1e3);
        } else if (res_sensor == "rayleigh") {
            std::snprintf(buf, sizeof(buf), "omega = %.9g rad\n",
                          resolution::rayleigh_angular(res_lambda, res_L));
        } else {
            throw std::runtime_error("unknown sensor family: " + res_sensor);
        }
        std::cout << buf;
    } else if (*demo) {
        generate_demo(demo_out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

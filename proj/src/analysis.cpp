#include "mmdepth/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "mmdepth/geometry.hpp"

namespace mmdepth::analysis {

std::array<double, 3> barycentric_weights(const std::array<double, 3>& mu) {
    for (double m : mu) {
        if (m < 0.0 || !std::isfinite(m)) throw std::runtime_error("weights require nonnegative mu");
    }
    double sum = mu[0] + mu[1] + mu[2];
    if (sum <= 0.0) throw std::runtime_error("undefined weights");
    std::array<double, 3> w{mu[0] / sum, mu[1] / sum, mu[2] / sum};
    // pin the sum to exactly 1 by absorbing the rounding residue into one
    // weight; fall back when that would push it below zero
    w[2] = 1.0 - (w[0] + w[1]);
    if (w[2] < 0.0) {
        w[2] = 0.0;
        if (w[0] >= w[1]) {
            w[0] = 1.0 - w[1];
        } else {
            w[1] = 1.0 - w[0];
        }
    }
    return w;
}

double incidence_angle_median(const TriMesh& mesh) {
    auto normals = geom::vertex_normals(mesh);
    std::vector<double> angles;
    for (const auto& n : normals) {
        double len = n.norm();
        if (len < 0.5) continue;  // isolated vertex, no valid normal
        double c = std::clamp(std::abs(n.z), 0.0, 1.0);
        angles.push_back(std::acos(c) * 180.0 / std::numbers::pi);
    }
    if (angles.empty()) throw std::runtime_error("mesh has no valid normals");
    return metrics::summarize(angles).median;
}

double relative_surface_area(const BBox2& object_xy, const BBox2& aperture_xy) {
    if (!object_xy.valid() || !aperture_xy.valid()) {
        throw std::runtime_error("invalid bounding box");
    }
    double b_area = aperture_xy.area();
    if (b_area <= 0.0) throw std::runtime_error("aperture box has zero area");
    double ix = std::min(object_xy.max_x, aperture_xy.max_x) -
                std::max(object_xy.min_x, aperture_xy.min_x);
    double iy = std::min(object_xy.max_y, aperture_xy.max_y) -
                std::max(object_xy.min_y, aperture_xy.min_y);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    return ix * iy / b_area;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
    double pos = q * double(sorted.size() - 1);
    size_t lo = size_t(std::floor(pos));
    size_t hi = size_t(std::ceil(pos));
    double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

BoxStats box_stats(std::span<const double> values) {
    if (values.empty()) throw std::runtime_error("empty distribution");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    BoxStats b;
    b.count = sorted.size();
    b.min = sorted.front();
    b.max = sorted.back();
    b.q1 = quantile(sorted, 0.25);
    b.median = quantile(sorted, 0.5);
    b.q3 = quantile(sorted, 0.75);
    for (double v : sorted) b.mean += v;
    b.mean /= double(b.count);

    double iqr = b.q3 - b.q1;
    double fence_lo = b.q1 - 1.5 * iqr;
    double fence_hi = b.q3 + 1.5 * iqr;
    b.whisker_lo = b.max;
    b.whisker_hi = b.min;
    for (double v : sorted) {
        if (v >= fence_lo && v <= fence_hi) {
            b.whisker_lo = std::min(b.whisker_lo, v);
            b.whisker_hi = std::max(b.whisker_hi, v);
        } else {
            b.outliers.push_back(v);
        }
    }
    return b;
}

namespace {

const char* kMetricNames[4] = {"C1", "C2", "P1", "P2"};

void write_svg_scatter(const std::string& path,
                       const std::vector<std::array<double, 2>>& pts,
                       const std::string& x_label, const std::string& y_label) {
    double xmax = 1e-12, ymax = 1e-12;
    for (const auto& p : pts) {
        xmax = std::max(xmax, p[0]);
        ymax = std::max(ymax, p[1]);
    }
    std::ofstream out(path, std::ios::binary);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"420\" height=\"320\">\n"
        << "<rect x=\"40\" y=\"20\" width=\"360\" height=\"260\" fill=\"none\" "
           "stroke=\"black\"/>\n"
        << "<text x=\"200\" y=\"310\">" << x_label << "</text>\n"
        << "<text x=\"10\" y=\"160\" transform=\"rotate(-90 10 160)\">" << y_label
        << "</text>\n";
    for (const auto& p : pts) {
        double cx = 40.0 + 360.0 * p[0] / xmax;
        double cy = 280.0 - 260.0 * p[1] / ymax;
        out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy)
            << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace

void emit_plot_data(std::span<const metrics::MetricReport> reports,
                    std::span<const ObjectContext> contexts, const std::string& out_dir) {
    if (reports.empty()) throw std::runtime_error("no reports");
    std::filesystem::create_directories(out_dir);
    auto p = [&](const std::string& name) { return out_dir + "/" + name; };

    std::set<std::string> sensors;
    std::set<int> distances;
    std::set<std::string> objects;
    // (object, sensor, metric) -> mean, preferring the 30 cm capture
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<int, double>> mu;
    for (const auto& r : reports) {
        sensors.insert(r.sensor);
        distances.insert(r.distance_cm);
        objects.insert(r.object);
        for (const auto* name : kMetricNames) {
            auto it = r.stats.find(name);
            if (it == r.stats.end() || it->second.count == 0) continue;
            auto key = std::make_tuple(r.object, r.sensor, std::string(name));
            auto found = mu.find(key);
            if (found == mu.end() || std::abs(r.distance_cm - 30) <
                                         std::abs(found->second.first - 30)) {
                mu[key] = {r.distance_cm, it->second.mean};
            }
        }
    }

    // --- boxplot.csv: distribution of per-object means per sensor/metric/distance
    {
        std::ofstream out(p("boxplot.csv"), std::ios::binary);
        out << "sensor,metric,distance_cm,count,min,q1,median,q3,max,mean,"
               "whisker_lo,whisker_hi,outliers\n";
        for (const auto& sensor : sensors) {
            for (const auto* metric : kMetricNames) {
                for (int dist : distances) {
                    std::vector<double> vals;
                    for (const auto& r : reports) {
                        if (r.sensor != sensor || r.distance_cm != dist) continue;
                        auto it = r.stats.find(metric);
                        if (it != r.stats.end() && it->second.count > 0) {
                            vals.push_back(it->second.mean);
                        }
                    }
                    if (vals.empty()) continue;
                    BoxStats b = box_stats(vals);
                    out << sensor << ',' << metric << ',' << dist << ',' << b.count << ','
                        << fmt(b.min) << ',' << fmt(b.q1) << ',' << fmt(b.median) << ','
                        << fmt(b.q3) << ',' << fmt(b.max) << ',' << fmt(b.mean) << ','
                        << fmt(b.whisker_lo) << ',' << fmt(b.whisker_hi) << ',';
                    for (size_t i = 0; i < b.outliers.size(); ++i) {
                        if (i) out << ';';
                        out << fmt(b.outliers[i]);
                    }
                    out << '\n';
                }
            }
        }
    }

    // --- scatter.csv: signal magnitude and scene context vs depth deviation
    {
        std::ofstream out(p("scatter.csv"), std::ios::binary);
        out << "object,material_class,magnitude,C1_mean,incidence_median_deg,rel_area,"
               "outside_fov\n";
        std::vector<std::array<double, 2>> pts;
        for (const auto& ctx : contexts) {
            double c1_sum = 0.0;
            int c1_n = 0;
            for (const auto& sensor : sensors) {
                auto it = mu.find({ctx.object, sensor, "C1"});
                if (it != mu.end()) {
                    c1_sum += it->second.second;
                    ++c1_n;
                }
            }
            double c1 = c1_n > 0 ? c1_sum / c1_n : 0.0;
            out << ctx.object << ',' << to_string(ctx.material) << ','
                << fmt(ctx.signal_magnitude) << ',' << fmt(c1) << ','
                << fmt(ctx.incidence_median_deg) << ',' << fmt(ctx.relative_area) << ','
                << (ctx.outside_fov ? 1 : 0) << '\n';
            pts.push_back({ctx.signal_magnitude, c1});
        }
        write_svg_scatter(p("scatter.svg"), pts, "signal magnitude", "C1 mean (cm)");
    }

    // --- barycentric.csv: one triple per 3-subset of sensors, per metric
    {
        std::ofstream out(p("barycentric.csv"), std::ios::binary);
        out << "metric,triple,object,label_a,label_b,label_c,w_a,w_b,w_c\n";
        std::vector<std::string> sensor_list(sensors.begin(), sensors.end());
        const size_t n = sensor_list.size();
        std::ofstream svg(p("barycentric.svg"), std::ios::binary);
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"380\">\n"
               "<polygon points=\"200,20 40,340 360,340\" fill=\"none\" "
               "stroke=\"black\"/>\n";
        for (const auto* metric : kMetricNames) {
            for (size_t a = 0; a < n; ++a) {
                for (size_t b = a + 1; b < n; ++b) {
                    for (size_t c = b + 1; c < n; ++c) {
                        std::string triple = std::string(metric) + ":" + sensor_list[a] +
                                             "-" + sensor_list[b] + "-" + sensor_list[c];
                        for (const auto& object : objects) {
                            auto ia = mu.find({object, sensor_list[a], metric});
                            auto ib = mu.find({object, sensor_list[b], metric});
                            auto ic = mu.find({object, sensor_list[c], metric});
                            if (ia == mu.end() || ib == mu.end() || ic == mu.end()) continue;
                            std::array<double, 3> m{ia->second.second, ib->second.second,
                                                    ic->second.second};
                            if (m[0] + m[1] + m[2] <= 0.0) continue;
                            auto w = barycentric_weights(m);
                            out << metric << ',' << triple << ',' << object << ','
                                << sensor_list[a] << ',' << sensor_list[b] << ','
                                << sensor_list[c] << ',' << fmt(w[0]) << ',' << fmt(w[1])
                                << ',' << fmt(w[2]) << '\n';
                            double x = w[0] * 200.0 + w[1] * 40.0 + w[2] * 360.0;
                            double y = w[0] * 20.0 + w[1] * 340.0 + w[2] * 340.0;
                            svg << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
                                << "\" r=\"2\" fill=\"firebrick\"/>\n";
                        }
                    }
                }
            }
        }
        svg << "</svg>\n";
    }

    // --- boxplot.svg: one box per sensor/metric at the first distance
    {
        std::ofstream svg(p("boxplot.svg"), std::ios::binary);
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"320\">\n";
        double ymax = 1e-12;
        std::vector<std::pair<std::string, BoxStats>> boxes;
        for (const auto& sensor : sensors) {
            for (const auto* metric : kMetricNames) {
                std::vector<double> vals;
                for (const auto& r : reports) {
                    auto it = r.stats.find(metric);
                    if (r.sensor == sensor && it != r.stats.end() && it->second.count > 0) {
                        vals.push_back(it->second.mean);
                    }
                }
                if (vals.empty()) continue;
                auto b = box_stats(vals);
                ymax = std::max(ymax, b.max);
                boxes.emplace_back(sensor + "/" + metric, b);
            }
        }
        double x = 30.0;
        for (const auto& [label, b] : boxes) {
            auto ypix = [&](double v) { return 280.0 - 250.0 * v / ymax; };
            svg << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(ypix(b.q3))
                << "\" width=\"24\" height=\"" << fmt(ypix(b.q1) - ypix(b.q3))
                << "\" fill=\"none\" stroke=\"black\"/>\n"
                << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(ypix(b.median))
                << "\" x2=\"" << fmt(x + 24.0) << "\" y2=\"" << fmt(ypix(b.median))
                << "\" stroke=\"black\"/>\n"
                << "<text x=\"" << fmt(x) << "\" y=\"300\" font-size=\"7\">" << label
                << "</text>\n";
            x += 36.0;
        }
        svg << "</svg>\n";
    }
}

}  // namespace mmdepth::analysis

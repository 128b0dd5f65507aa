#include "mmdepth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "mmdepth/geometry.hpp"

#include <json.hpp>

namespace mmdepth::metrics {

SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) throw std::runtime_error("cannot summarize an empty list");
    SummaryStats s;
    s.count = values.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / double(s.count);
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(var / double(s.count));
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    size_t n = sorted.size();
    s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return s;
}

namespace {

double dist2(const Vec3& a, const Vec3& b) {
    double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

double axis_coord(const Vec3& p, int axis) {
    return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
}

// Median-split k-d tree over indices into the destination cloud. Search is
// exact: subtrees are pruned only when strictly farther than the best hit,
// so the reported distance always equals the brute-force minimum.
class KdTree {
  public:
    explicit KdTree(const std::vector<Vec3>& pts) : pts_(pts) {
        idx_.resize(pts.size());
        std::iota(idx_.begin(), idx_.end(), size_t(0));
        nodes_.reserve(pts.size());
        root_ = build(0, pts.size());
    }

    double nearest_dist2(const Vec3& q) const {
        double best = std::numeric_limits<double>::infinity();
        search(root_, q, best);
        return best;
    }

  private:
    struct Node {
        size_t point;
        int axis;
        int left = -1, right = -1;
    };

    int build(size_t lo, size_t hi) {
        if (lo >= hi) return -1;
        Vec3 mn = pts_[idx_[lo]], mx = mn;
        for (size_t i = lo; i < hi; ++i) {
            const Vec3& p = pts_[idx_[i]];
            mn = {std::min(mn.x, p.x), std::min(mn.y, p.y), std::min(mn.z, p.z)};
            mx = {std::max(mx.x, p.x), std::max(mx.y, p.y), std::max(mx.z, p.z)};
        }
        Vec3 ext = mx - mn;
        int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : ext.y >= ext.z ? 1 : 2;
        size_t mid = (lo + hi) / 2;
        std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                         [&](size_t a, size_t b) {
                             return axis_coord(pts_[a], axis) < axis_coord(pts_[b], axis);
                         });
        int node = int(nodes_.size());
        nodes_.push_back({idx_[mid], axis});
        nodes_[node].left = build(lo, mid);
        nodes_[node].right = build(mid + 1, hi);
        return node;
    }

    void search(int node, const Vec3& q, double& best) const {
        if (node < 0) return;
        const Node& n = nodes_[node];
        double d2 = dist2(q, pts_[n.point]);
        if (d2 < best) best = d2;
        double diff = axis_coord(q, n.axis) - axis_coord(pts_[n.point], n.axis);
        int near = diff < 0.0 ? n.left : n.right;
        int far = diff < 0.0 ? n.right : n.left;
        search(near, q, best);
        if (diff * diff <= best) search(far, q, best);
    }

    const std::vector<Vec3>& pts_;
    std::vector<size_t> idx_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace

std::vector<double> chamfer_one_sided(const PointCloud& source, const PointCloud& dest) {
    if (dest.points.empty()) throw std::runtime_error("empty destination cloud");
    KdTree tree(dest.points);
    std::vector<double> out;
    out.reserve(source.points.size());
    for (const auto& p : source.points) out.push_back(std::sqrt(tree.nearest_dist2(p)));
    return out;
}

ProjectiveError projective_error(const DepthImage& d, const DepthImage& f,
                                 const SegMask* domain) {
    if (d.width != f.width || d.height != f.height) {
        throw std::runtime_error("depth map dimensions differ");
    }
    if (d.projection.kind != f.projection.kind) {
        throw std::runtime_error("depth map projection models differ");
    }
    if (domain && (domain->width != d.width || domain->height != d.height)) {
        throw std::runtime_error("domain mask dimensions differ");
    }
    ProjectiveError out;
    for (int v = 0; v < d.height; ++v) {
        for (int u = 0; u < d.width; ++u) {
            if (domain && !domain->at(u, v)) continue;
            if (!d.valid(u, v) || !f.valid(u, v)) continue;
            double diff = d.at(u, v) - f.at(u, v);
            out.signed_err.push_back(diff);
            out.abs_err.push_back(std::abs(diff));
        }
    }
    return out;
}

namespace {

SummaryStats stats_cm(std::vector<double> meters, bool& empty_flag) {
    if (meters.empty()) {
        empty_flag = true;
        return {};
    }
    for (double& v : meters) v *= 100.0;
    return summarize(meters);
}

}  // namespace

MetricReport evaluate_capture(const CaptureRecord& capture, const TriMesh& gt_mesh,
                              int erosion_k) {
    capture.validate();
    gt_mesh.validate();

    DepthImage d_s = capture.quasi_static
                         ? capture.frames.front()
                         : geom::average_frames(std::span(capture.frames));

    // The segmentation restricts validity; downstream only {d > 0} matters.
    if (!capture.masks.empty()) {
        const SegMask& seg = capture.masks.front();
        for (int v = 0; v < d_s.height; ++v) {
            for (int u = 0; u < d_s.width; ++u) {
                if (!seg.at(u, v)) d_s.at(u, v) = 0.0;
            }
        }
    }

    TriMesh mesh_s = geom::align_to_sensor(gt_mesh, capture.calibration);
    // The rasterizer samples at pixel centers and shifts its output transform
    // by -0.5 to compensate; pre-shifting by +0.5 makes it sample exactly at
    // the sensor grid's own unprojection points (integer coordinates under
    // the sensor transform), so pixel (u,v) of both maps covers one point.
    Transform4 pre;
    if (d_s.projection.kind == ProjectionKind::perspective) {
        pre.at(0, 2) = 0.5;
        pre.at(1, 2) = 0.5;
    } else {
        pre.at(0, 3) = 0.5;
        pre.at(1, 3) = 0.5;
    }
    DepthImage d_g = geom::rasterize_mesh_depth(mesh_s, d_s.projection,
                                                pre * d_s.transform, d_s.width,
                                                d_s.height);
    // Both reconstructions sample the same pixel grid through the sensor
    // transform, keeping the Chamfer comparison density-uniform.
    d_g.projection = d_s.projection;
    d_g.transform = d_s.transform;

    PointCloud r_s = geom::unproject(d_s);
    PointCloud r_g = geom::unproject(d_g);

    MetricReport report;
    report.object = capture.object;
    report.sensor = capture.sensor;
    report.distance_cm = capture.distance_cm;
    report.erosion_k = erosion_k;

    if (!r_s.points.empty() && !r_g.points.empty()) {
        report.stats["C1"] = stats_cm(chamfer_one_sided(r_g, r_s), report.empty_domain);
        report.stats["C2"] = stats_cm(chamfer_one_sided(r_s, r_g), report.empty_domain);
    } else {
        report.empty_domain = true;
        report.stats["C1"] = {};
        report.stats["C2"] = {};
    }

    SegMask m_g = SegMask::filled(d_g.width, d_g.height, false);
    for (int v = 0; v < d_g.height; ++v) {
        for (int u = 0; u < d_g.width; ++u) m_g.set(u, v, d_g.valid(u, v));
    }

    ProjectiveError p1 = projective_error(d_s, d_g, &m_g);
    report.stats["P1"] = stats_cm(p1.abs_err, report.empty_domain);
    report.stats["P1s"] = stats_cm(p1.signed_err, report.empty_domain);

    SegMask m_ge = geom::erode_mask(m_g, erosion_k);
    ProjectiveError p2 = projective_error(d_s, d_g, &m_ge);
    report.stats["P2"] = stats_cm(p2.abs_err, report.empty_domain);
    report.stats["P2s"] = stats_cm(p2.signed_err, report.empty_domain);

    return report;
}

namespace {

nlohmann::json stats_to_json(const SummaryStats& s) {
    return {{"mean_cm", s.mean}, {"std_cm", s.stdev}, {"median_cm", s.median},
            {"count", s.count}};
}

SummaryStats stats_from_json(const nlohmann::json& j) {
    SummaryStats s;
    s.mean = j.at("mean_cm").get<double>();
    s.stdev = j.at("std_cm").get<double>();
    s.median = j.at("median_cm").get<double>();
    s.count = j.at("count").get<size_t>();
    return s;
}

}  // namespace

void write_reports_json(std::span<const MetricReport> reports, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json metrics = nlohmann::json::object();
        for (const auto& [name, s] : r.stats) metrics[name] = stats_to_json(s);
        arr.push_back({{"object", r.object},
                       {"sensor", r.sensor},
                       {"distance_cm", r.distance_cm},
                       {"erosion_k", r.erosion_k},
                       {"empty_domain", r.empty_domain},
                       {"metrics", metrics}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << arr.dump(2) << "\n";
}

void write_reports_csv(std::span<const MetricReport> reports, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "object,sensor,distance_cm,metric,mean_cm,std_cm,median_cm,count\n";
    char buf[128];
    for (const auto& r : reports) {
        for (const auto& [name, s] : r.stats) {
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%zu", s.mean, s.stdev,
                          s.median, s.count);
            out << r.object << ',' << r.sensor << ',' << r.distance_cm << ',' << name
                << ',' << buf << '\n';
        }
    }
}

std::vector<MetricReport> load_reports_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json arr = nlohmann::json::parse(in);
    std::vector<MetricReport> reports;
    for (const auto& j : arr) {
        MetricReport r;
        r.object = j.at("object").get<std::string>();
        r.sensor = j.at("sensor").get<std::string>();
        r.distance_cm = j.at("distance_cm").get<int>();
        r.erosion_k = j.at("erosion_k").get<int>();
        r.empty_domain = j.value("empty_domain", false);
        for (const auto& [name, s] : j.at("metrics").items()) {
            r.stats[name] = stats_from_json(s);
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace mmdepth::metrics

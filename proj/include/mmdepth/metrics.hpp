#pragma once

#include <map>
#include <span>
#include <string>

#include "mmdepth/types.hpp"

namespace mmdepth::metrics {

struct SummaryStats {
    double mean = 0.0;
    double stdev = 0.0;  // population (1/N)
    double median = 0.0;
    size_t count = 0;
};

/// Population standard deviation; median is the midpoint average for even N.
SummaryStats summarize(std::span<const double> values);

/// Per source point: Euclidean distance to the nearest destination point.
/// Backed by a k-d tree that matches a brute-force scan bitwise.
std::vector<double> chamfer_one_sided(const PointCloud& source, const PointCloud& dest);

struct ProjectiveError {
    std::vector<double> abs_err;     // |D - F| over the domain
    std::vector<double> signed_err;  // D - F (sensor minus GT when D = sensor)
};

/// Differences over pixels that are in the domain mask (all pixels when
/// null) and valid in both images.
ProjectiveError projective_error(const DepthImage& d, const DepthImage& f,
                                 const SegMask* domain = nullptr);

/// Per-object, per-sensor statistics in centimeters.
struct MetricReport {
    std::string object;
    std::string sensor;
    int distance_cm = 0;
    int erosion_k = 0;
    std::map<std::string, SummaryStats> stats;  // C1, C2, P1, P2, P1s, P2s
    bool empty_domain = false;                  // some metric had no samples
};

/// Full evaluation pipeline for one capture: frame averaging (or first
/// frame for quasi-static captures), joint alignment of the GT mesh into
/// sensor space, rasterization to the sensor's pixel grid, unprojection of
/// both depth maps, then C1/C2/P1/P2 and the signed projective variants.
MetricReport evaluate_capture(const CaptureRecord& capture, const TriMesh& gt_mesh,
                              int erosion_k);

void write_reports_json(std::span<const MetricReport> reports, const std::string& path);
void write_reports_csv(std::span<const MetricReport> reports, const std::string& path);
std::vector<MetricReport> load_reports_json(const std::string& path);

}  // namespace mmdepth::metrics

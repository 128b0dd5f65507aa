#pragma once

#include <span>

#include "mmdepth/metrics.hpp"
#include "mmdepth/types.hpp"

namespace mmdepth::analysis {

/// Affine coordinates w_i = mu_i / sum(mu), renormalized to sum exactly 1.
std::array<double, 3> barycentric_weights(const std::array<double, 3>& mu);

/// Median angle (degrees) between per-vertex surface normals and the +z
/// depth axis, folded to [0, 90] so that flipped normals are equivalent.
/// Vertices without a valid normal are skipped.
double incidence_angle_median(const TriMesh& mesh);

struct BBox2 {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    double area() const { return (max_x - min_x) * (max_y - min_y); }
    bool valid() const { return max_x >= min_x && max_y >= min_y; }
};

/// area(A intersect B) / area(B).
double relative_surface_area(const BBox2& object_xy, const BBox2& aperture_xy);

/// Per-object scene context for the scatter plots.
struct ObjectContext {
    std::string object;
    MaterialClass material = MaterialClass::polymer;
    double signal_magnitude = 0.0;
    double incidence_median_deg = 0.0;
    double relative_area = 0.0;
    bool outside_fov = false;
};

/// Writes boxplot.csv, scatter.csv and barycentric.csv (plus minimal SVG
/// renderings of each) into out_dir. Boxplot whiskers extend to the last
/// sample within 1.5 IQR; samples beyond them are listed as outliers.
void emit_plot_data(std::span<const metrics::MetricReport> reports,
                    std::span<const ObjectContext> contexts, const std::string& out_dir);

/// Five-number summary used by the boxplot table.
struct BoxStats {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
    double whisker_lo = 0, whisker_hi = 0;
    std::vector<double> outliers;
    size_t count = 0;
};

BoxStats box_stats(std::span<const double> values);

}  // namespace mmdepth::analysis

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmdepth {

constexpr double kSpeedOfLight = 299792458.0;  // m/s, vacuum

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// 4x4 homogeneous transform, row-major, translation in meters.
/// Last row must be (0,0,0,1) and the matrix invertible.
struct Transform4 {
    std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

    static Transform4 identity() { return {}; }
    static Transform4 translation(const Vec3& t);

    double& at(int r, int c) { return m[r * 4 + c]; }
    double at(int r, int c) const { return m[r * 4 + c]; }

    Transform4 operator*(const Transform4& o) const;

    /// Applies the transform to a point (homogeneous w = 1), returns the
    /// first three components after perspective division by the fourth.
    Vec3 apply(const Vec3& p) const;
    std::array<double, 4> apply4(const std::array<double, 4>& v) const;

    double det() const;
    Transform4 inverse() const;  // throws on |det| <= 1e-12

    bool affine_last_row() const {
        return m[12] == 0.0 && m[13] == 0.0 && m[14] == 0.0 && m[15] == 1.0;
    }
    void validate() const;
};

enum class ProjectionKind { perspective, orthographic };

/// Projection of a depth image: pixel = I * p + t (applied homogeneously
/// through the embedded 4x4 matrix T). Perspective divides by depth (a = d),
/// orthographic does not (a = 1).
struct ProjectionModel {
    ProjectionKind kind = ProjectionKind::orthographic;
    std::array<double, 9> scale{1, 0, 0, 0, 1, 0, 0, 0, 1};  // I, row-major
    Vec3 offset;                                             // t

    /// T = [[I t],[0 0 0 1]]
    Transform4 embed() const;
};

/// W x H metric depth map, row-major. A value of 0 marks an invalid pixel;
/// every consumer treats exactly {d > 0} as valid.
struct DepthImage {
    int width = 0, height = 0;
    std::vector<double> data;  // meters
    ProjectionModel projection;
    Transform4 transform;  // usually projection.embed()

    double at(int u, int v) const { return data[size_t(v) * width + u]; }
    double& at(int u, int v) { return data[size_t(v) * width + u]; }
    bool valid(int u, int v) const { return at(u, v) > 0.0; }

    void validate() const;
};

struct SegMask {
    int width = 0, height = 0;
    std::vector<uint8_t> bits;  // 0 or 1, row-major

    bool at(int u, int v) const { return bits[size_t(v) * width + u] != 0; }
    void set(int u, int v, bool b) { bits[size_t(v) * width + u] = b ? 1 : 0; }

    static SegMask filled(int w, int h, bool value);
};

struct PointCloud {
    std::vector<Vec3> points;
    void validate() const;
};

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    /// Checks index ranges and rejects faces with area below 1e-12.
    void validate() const;
};

enum class MaterialClass {
    metal,
    fibers_and_stone,
    polymer,
    skin,
    foam_and_fabric,
    outside_fov,
};

std::string to_string(MaterialClass c);
MaterialClass material_from_string(const std::string& s);

/// One sensor's capture of one object: frames, masks and calibration into
/// the common ground-truth space.
struct CaptureRecord {
    std::string sensor;
    std::string object;
    std::vector<DepthImage> frames;
    std::vector<SegMask> masks;  // may be empty (radar: validity is the mask)
    Transform4 calibration;      // K_{g->s}
    int distance_cm = 30;        // one of {30, 40, 50}
    MaterialClass material = MaterialClass::polymer;
    bool quasi_static = false;

    void validate() const;
};

}  // namespace mmdepth

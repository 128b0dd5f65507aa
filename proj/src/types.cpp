#include "mmdepth/types.hpp"

#include <algorithm>

namespace mmdepth {

Transform4 Transform4::translation(const Vec3& t) {
    Transform4 r;
    r.at(0, 3) = t.x;
    r.at(1, 3) = t.y;
    r.at(2, 3) = t.z;
    return r;
}

Transform4 Transform4::operator*(const Transform4& o) const {
    Transform4 r;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += at(i, k) * o.at(k, j);
            r.at(i, j) = s;
        }
    }
    return r;
}

Vec3 Transform4::apply(const Vec3& p) const {
    auto v = apply4({p.x, p.y, p.z, 1.0});
    if (v[3] != 1.0) {
        return {v[0] / v[3], v[1] / v[3], v[2] / v[3]};
    }
    return {v[0], v[1], v[2]};
}

std::array<double, 4> Transform4::apply4(const std::array<double, 4>& v) const {
    std::array<double, 4> r{};
    for (int i = 0; i < 4; ++i) {
        r[i] = at(i, 0) * v[0] + at(i, 1) * v[1] + at(i, 2) * v[2] + at(i, 3) * v[3];
    }
    return r;
}

double Transform4::det() const {
    // Laplace expansion over 3x3 minors of the first row.
    auto m3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
        return at(r0, c0) * (at(r1, c1) * at(r2, c2) - at(r1, c2) * at(r2, c1)) -
               at(r0, c1) * (at(r1, c0) * at(r2, c2) - at(r1, c2) * at(r2, c0)) +
               at(r0, c2) * (at(r1, c0) * at(r2, c1) - at(r1, c1) * at(r2, c0));
    };
    return at(0, 0) * m3(1, 2, 3, 1, 2, 3) - at(0, 1) * m3(1, 2, 3, 0, 2, 3) +
           at(0, 2) * m3(1, 2, 3, 0, 1, 3) - at(0, 3) * m3(1, 2, 3, 0, 1, 2);
}

Transform4 Transform4::inverse() const {
    if (std::abs(det()) <= 1e-12) {
        throw std::runtime_error("transform not invertible");
    }
    // Gauss-Jordan with partial pivoting.
    std::array<double, 32> a{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) a[i * 8 + j] = at(i, j);
        a[i * 8 + 4 + i] = 1.0;
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r) {
            if (std::abs(a[r * 8 + col]) > std::abs(a[pivot * 8 + col])) pivot = r;
        }
        if (pivot != col) {
            for (int j = 0; j < 8; ++j) std::swap(a[col * 8 + j], a[pivot * 8 + j]);
        }
        double p = a[col * 8 + col];
        for (int j = 0; j < 8; ++j) a[col * 8 + j] /= p;
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = a[r * 8 + col];
            if (f == 0.0) continue;
            for (int j = 0; j < 8; ++j) a[r * 8 + j] -= f * a[col * 8 + j];
        }
    }
    Transform4 inv;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) inv.at(i, j) = a[i * 8 + 4 + j];
    }
    return inv;
}

void Transform4::validate() const {
    for (double v : m) {
        if (!std::isfinite(v)) throw std::runtime_error("non-finite transform");
    }
    if (!affine_last_row()) throw std::runtime_error("transform last row must be (0,0,0,1)");
    if (std::abs(det()) <= 1e-12) throw std::runtime_error("transform not invertible");
}

Transform4 ProjectionModel::embed() const {
    Transform4 t;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) t.at(i, j) = scale[i * 3 + j];
    }
    t.at(0, 3) = offset.x;
    t.at(1, 3) = offset.y;
    t.at(2, 3) = offset.z;
    return t;
}

void DepthImage::validate() const {
    if (width <= 0 || height <= 0) throw std::runtime_error("non-positive image dimensions");
    if (data.size() != size_t(width) * height) throw std::runtime_error("depth data size mismatch");
    for (double d : data) {
        if (!std::isfinite(d)) throw std::runtime_error("non-finite depth value");
        if (d < 0.0) throw std::runtime_error("negative depth value");
    }
    transform.validate();
}

SegMask SegMask::filled(int w, int h, bool value) {
    SegMask m;
    m.width = w;
    m.height = h;
    m.bits.assign(size_t(w) * h, value ? 1 : 0);
    return m;
}

void PointCloud::validate() const {
    for (const auto& p : points) {
        if (!p.finite()) throw std::runtime_error("non-finite point coordinate");
    }
}

void TriMesh::validate() const {
    const int n = int(vertices.size());
    for (const auto& v : vertices) {
        if (!v.finite()) throw std::runtime_error("non-finite vertex");
    }
    for (const auto& f : faces) {
        for (int idx : f) {
            if (idx < 0 || idx >= n) throw std::runtime_error("face index out of range");
        }
        const Vec3& a = vertices[f[0]];
        const Vec3& b = vertices[f[1]];
        const Vec3& c = vertices[f[2]];
        double area = 0.5 * (b - a).cross(c - a).norm();
        if (area <= 1e-12) throw std::runtime_error("degenerate face");
    }
}

std::string to_string(MaterialClass c) {
    switch (c) {
        case MaterialClass::metal: return "metal";
        case MaterialClass::fibers_and_stone: return "fibers-and-stone";
        case MaterialClass::polymer: return "polymer";
        case MaterialClass::skin: return "skin";
        case MaterialClass::foam_and_fabric: return "foam-and-fabric";
        case MaterialClass::outside_fov: return "outside-fov";
    }
    throw std::runtime_error("unknown material class");
}

MaterialClass material_from_string(const std::string& s) {
    if (s == "metal") return MaterialClass::metal;
    if (s == "fibers-and-stone") return MaterialClass::fibers_and_stone;
    if (s == "polymer") return MaterialClass::polymer;
    if (s == "skin") return MaterialClass::skin;
    if (s == "foam-and-fabric") return MaterialClass::foam_and_fabric;
    if (s == "outside-fov") return MaterialClass::outside_fov;
    throw std::runtime_error("unknown material class: " + s);
}

void CaptureRecord::validate() const {
    if (frames.empty()) throw std::runtime_error("capture has no frames");
    const auto& f0 = frames.front();
    for (const auto& f : frames) {
        f.validate();
        if (f.width != f0.width || f.height != f0.height ||
            f.projection.kind != f0.projection.kind) {
            throw std::runtime_error("frames differ in dimensions or projection");
        }
    }
    for (const auto& m : masks) {
        if (m.width != f0.width || m.height != f0.height) {
            throw std::runtime_error("mask dimensions do not match frames");
        }
    }
    calibration.validate();
    if (distance_cm != 30 && distance_cm != 40 && distance_cm != 50) {
        throw std::runtime_error("distance tag must be 30, 40 or 50 cm");
    }
}

}  // namespace mmdepth

#include "mmdepth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace mmdepth::geom {

PointCloud unproject(const DepthImage& depth, const SegMask* mask) {
    if (mask && (mask->width != depth.width || mask->height != depth.height)) {
        throw std::runtime_error("mask dimensions do not match depth image");
    }
    const bool perspective = depth.projection.kind == ProjectionKind::perspective;
    const Transform4 inv = depth.transform.inverse();

    PointCloud cloud;
    for (int v = 0; v < depth.height; ++v) {
        for (int u = 0; u < depth.width; ++u) {
            double d = depth.at(u, v);
            if (d <= 0.0) continue;
            if (mask && !mask->at(u, v)) continue;
            double a = perspective ? d : 1.0;
            auto p = inv.apply4({u * a, v * a, d, 1.0});
            cloud.points.push_back({p[0], p[1], p[2]});
        }
    }
    return cloud;
}

PointCloud align_to_sensor(const PointCloud& cloud, const Transform4& k_g_to_s) {
    k_g_to_s.validate();
    PointCloud out;
    out.points.reserve(cloud.points.size());
    for (const auto& p : cloud.points) out.points.push_back(k_g_to_s.apply(p));
    return out;
}

TriMesh align_to_sensor(const TriMesh& mesh, const Transform4& k_g_to_s) {
    k_g_to_s.validate();
    TriMesh out = mesh;
    for (auto& v : out.vertices) v = k_g_to_s.apply(v);
    return out;
}

namespace {

struct ScreenVertex {
    double u, v;  // projected continuous pixel coordinates
    double d;     // depth along the projection axis
};

double edge_fn(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
    return (b.u - a.u) * (py - a.v) - (b.v - a.v) * (px - a.u);
}

// Deterministic ownership of boundary samples: each shared edge belongs to
// exactly one adjacent triangle.
bool edge_accepts_zero(const ScreenVertex& a, const ScreenVertex& b) {
    double dx = b.u - a.u, dy = b.v - a.v;
    return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

}  // namespace

DepthImage rasterize_mesh_depth(const TriMesh& mesh, const ProjectionModel& model,
                                const Transform4& transform, int width, int height) {
    if (width <= 0 || height <= 0) throw std::runtime_error("non-positive raster size");
    mesh.validate();
    const bool perspective = model.kind == ProjectionKind::perspective;

    DepthImage out;
    out.width = width;
    out.height = height;
    out.data.assign(size_t(width) * height, 0.0);

    // Output transform maps the pixel-center sample points back to (u, v),
    // so unprojecting the result lands exactly on the rasterized surface.
    Transform4 shift;
    out.projection = model;
    if (perspective) {
        shift.at(0, 2) = -0.5;
        shift.at(1, 2) = -0.5;
        out.projection.scale[2] -= 0.5;
        out.projection.scale[5] -= 0.5;
    } else {
        shift.at(0, 3) = -0.5;
        shift.at(1, 3) = -0.5;
        out.projection.offset.x -= 0.5;
        out.projection.offset.y -= 0.5;
    }
    out.transform = shift * transform;

    std::vector<double> zbuf(size_t(width) * height, std::numeric_limits<double>::infinity());

    for (const auto& face : mesh.faces) {
        ScreenVertex sv[3];
        bool skip = false;
        for (int i = 0; i < 3; ++i) {
            const Vec3& p = mesh.vertices[face[i]];
            auto q = transform.apply4({p.x, p.y, p.z, 1.0});
            if (perspective) {
                if (q[2] <= 1e-12) {  // behind the camera
                    skip = true;
                    break;
                }
                sv[i] = {q[0] / q[2], q[1] / q[2], q[2]};
            } else {
                sv[i] = {q[0], q[1], q[2]};
            }
        }
        if (skip) continue;

        double area = edge_fn(sv[0], sv[1], sv[2].u, sv[2].v);
        if (area == 0.0) continue;
        if (area < 0.0) {  // normalize to counter-clockwise screen winding
            std::swap(sv[1], sv[2]);
            area = -area;
        }

        double umin = std::min({sv[0].u, sv[1].u, sv[2].u});
        double umax = std::max({sv[0].u, sv[1].u, sv[2].u});
        double vmin = std::min({sv[0].v, sv[1].v, sv[2].v});
        double vmax = std::max({sv[0].v, sv[1].v, sv[2].v});
        int u0 = std::max(0, int(std::ceil(umin - 0.5)));
        int u1 = std::min(width - 1, int(std::floor(umax - 0.5)));
        int v0 = std::max(0, int(std::ceil(vmin - 0.5)));
        int v1 = std::min(height - 1, int(std::floor(vmax - 0.5)));

        for (int v = v0; v <= v1; ++v) {
            double py = v + 0.5;
            for (int u = u0; u <= u1; ++u) {
                double px = u + 0.5;
                double w0 = edge_fn(sv[1], sv[2], px, py);
                double w1 = edge_fn(sv[2], sv[0], px, py);
                double w2 = edge_fn(sv[0], sv[1], px, py);
                bool inside = (w0 > 0.0 || (w0 == 0.0 && edge_accepts_zero(sv[1], sv[2]))) &&
                              (w1 > 0.0 || (w1 == 0.0 && edge_accepts_zero(sv[2], sv[0]))) &&
                              (w2 > 0.0 || (w2 == 0.0 && edge_accepts_zero(sv[0], sv[1])));
                if (!inside) continue;
                double la = w0 / area, lb = w1 / area, lc = w2 / area;
                double d;
                if (perspective) {
                    // perspective-correct 1/z interpolation
                    d = 1.0 / (la / sv[0].d + lb / sv[1].d + lc / sv[2].d);
                } else {
                    d = la * sv[0].d + lb * sv[1].d + lc * sv[2].d;
                }
                if (d <= 0.0) continue;
                size_t idx = size_t(v) * width + u;
                if (d < zbuf[idx]) {
                    zbuf[idx] = d;
                    out.data[idx] = d;
                }
            }
        }
    }
    return out;
}

DepthImage average_frames(std::span<const DepthImage> frames) {
    if (frames.empty()) throw std::runtime_error("no frames to average");
    const auto& f0 = frames.front();
    for (const auto& f : frames) {
        if (f.width != f0.width || f.height != f0.height ||
            f.projection.kind != f0.projection.kind) {
            throw std::runtime_error("frames differ in dimensions or projection");
        }
    }
    DepthImage out = f0;
    for (size_t i = 0; i < out.data.size(); ++i) {
        double sum = 0.0;
        int count = 0;
        for (const auto& f : frames) {
            if (f.data[i] > 0.0) {
                sum += f.data[i];
                ++count;
            }
        }
        out.data[i] = count > 0 ? sum / count : 0.0;
    }
    return out;
}

SegMask erode_mask(const SegMask& mask, int k) {
    if (k < 0) throw std::runtime_error("erosion kernel must be >= 0");
    if (k > 20) {
        std::cerr << "warning: erosion kernel " << k << " exceeds the expected range [0,20]\n";
    }
    if (k <= 1) return mask;

    const int lo = -((k - 1) / 2), hi = k / 2;  // k offsets, anchor at center
    SegMask out = mask;
    for (int v = 0; v < mask.height; ++v) {
        for (int u = 0; u < mask.width; ++u) {
            bool keep = true;
            for (int dv = lo; keep && dv <= hi; ++dv) {
                for (int du = lo; du <= hi; ++du) {
                    int uu = u + du, vv = v + dv;
                    if (uu < 0 || vv < 0 || uu >= mask.width || vv >= mask.height ||
                        !mask.at(uu, vv)) {
                        keep = false;
                        break;
                    }
                }
            }
            out.set(u, v, keep);
        }
    }
    return out;
}

std::vector<Vec3> vertex_normals(const TriMesh& mesh) {
    mesh.validate();
    std::vector<Vec3> acc(mesh.vertices.size());
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        Vec3 n = (b - a).cross(c - a);  // magnitude ~ 2 * face area
        for (int idx : f) acc[idx] = acc[idx] + n;
    }
    for (auto& n : acc) {
        double len = n.norm();
        n = len > 1e-20 ? n * (1.0 / len) : Vec3{0, 0, 0};
    }
    return acc;
}

}  // namespace mmdepth::geom

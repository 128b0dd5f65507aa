#pragma once

#include <optional>
#include <span>

#include "mmdepth/types.hpp"

namespace mmdepth::geom {

/// Back-projects every valid pixel (d > 0, mask-true if a mask is given)
/// through the image's transform: p = T^{-1} (u*a, v*a, d, 1) with a = d
/// for perspective and a = 1 for orthographic images. Row-major order.
PointCloud unproject(const DepthImage& depth, const SegMask* mask = nullptr);

/// Applies K_{g->s} to every point / vertex: p' = K p.
PointCloud align_to_sensor(const PointCloud& cloud, const Transform4& k_g_to_s);
TriMesh align_to_sensor(const TriMesh& mesh, const Transform4& k_g_to_s);

/// Z-buffer rasterization at pixel centers (u + 0.5, v + 0.5) in projected
/// coordinates; the nearest surface wins, uncovered pixels stay invalid.
/// The returned image carries a transform shifted by half a pixel so that
/// unproject() maps pixel (u,v) back to the exact sample point.
DepthImage rasterize_mesh_depth(const TriMesh& mesh, const ProjectionModel& model,
                                const Transform4& transform, int width, int height);

/// Per-pixel mean over frames where the pixel is valid; pixels invalid in
/// every frame stay invalid.
DepthImage average_frames(std::span<const DepthImage> frames);

/// Morphological erosion with a k x k all-true structuring element,
/// anchored at the center. k <= 1 is the identity.
SegMask erode_mask(const SegMask& mask, int k);

/// Area-weighted vertex normals, unit length; isolated vertices get the
/// zero vector.
std::vector<Vec3> vertex_normals(const TriMesh& mesh);

}  // namespace mmdepth::geom

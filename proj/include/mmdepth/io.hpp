#pragma once

#include <map>
#include <string>
#include <vector>

#include "mmdepth/signal.hpp"
#include "mmdepth/types.hpp"

namespace mmdepth::io {

/// .dmap container: magic "MRNDMAP1", little-endian u32 JSON header length,
/// JSON header (width/height/projection/intrinsics/offset/transform), then
/// width*height little-endian float32 depth values, row-major.
DepthImage load_depth_image(const std::string& path);
void save_depth_image(const DepthImage& img, const std::string& path);

/// ASCII OBJ subset: "v x y z" and "f a b c" lines (1-based indices).
TriMesh load_mesh(const std::string& path);
void save_mesh(const TriMesh& mesh, const std::string& path);

/// Binary PGM (P5), 0 = background, nonzero = object.
SegMask load_mask(const std::string& path);
void save_mask(const SegMask& mask, const std::string& path);

/// JSON array of 16 row-major reals.
Transform4 load_calibration(const std::string& path);
void save_calibration(const Transform4& t, const std::string& path);

/// .rsc container: magic "MRNRSC01", u32 JSON header length, JSON header
/// (n_rx/n_tx/n_f/f_min_hz/f_max_hz/rx_positions/tx_positions/phi_c), then
/// interleaved float32 (re, im) in [rx][tx][f] order, little-endian.
radar::RawSignalCube load_signal_cube(const std::string& path);
void save_signal_cube(const radar::RawSignalCube& cube, const std::string& path);

/// Capture manifest: JSON listing per-capture sensor, object, frame/mask
/// files, calibration, gt mesh, distance tag and material class. Relative
/// paths resolve against the manifest's directory.
struct ManifestEntry {
    CaptureRecord capture;
    std::string gt_mesh_path;
};
std::vector<ManifestEntry> load_manifest(const std::string& path);

/// Evaluation metadata: {"erosion": {"<object>/<sensor>": k, ...}}.
std::map<std::string, int> load_erosion_metadata(const std::string& path);

}  // namespace mmdepth::io

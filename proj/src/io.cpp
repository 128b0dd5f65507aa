#include "mmdepth/io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmdepth::io {

namespace {

using nlohmann::json;

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_all(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

uint32_t read_u32le(const unsigned char* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
           uint32_t(p[3]) << 24;
}

void append_u32le(std::string& s, uint32_t v) {
    s.push_back(char(v & 0xff));
    s.push_back(char(v >> 8 & 0xff));
    s.push_back(char(v >> 16 & 0xff));
    s.push_back(char(v >> 24 & 0xff));
}

float read_f32le(const unsigned char* p) {
    uint32_t bits = read_u32le(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

void append_f32le(std::string& s, float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    append_u32le(s, bits);
}

// splits a container into (header json, payload pointer, payload size)
json parse_container(const std::string& bytes, const char* magic, size_t& payload_off) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), magic, 8) != 0) {
        throw std::runtime_error("bad magic");
    }
    uint32_t hlen = read_u32le(reinterpret_cast<const unsigned char*>(bytes.data()) + 8);
    if (bytes.size() < 12 + size_t(hlen)) throw std::runtime_error("truncated header");
    payload_off = 12 + hlen;
    return json::parse(bytes.substr(12, hlen));
}

json transform_to_json(const Transform4& t) {
    return std::vector<double>(t.m.begin(), t.m.end());
}

Transform4 transform_from_json(const json& j) {
    auto v = j.get<std::vector<double>>();
    if (v.size() != 16) throw std::runtime_error("transform must have 16 entries");
    Transform4 t;
    std::copy(v.begin(), v.end(), t.m.begin());
    return t;
}

}  // namespace

DepthImage load_depth_image(const std::string& path) {
    std::string bytes = read_all(path);
    size_t off = 0;
    json h = parse_container(bytes, "MRNDMAP1", off);

    DepthImage img;
    img.width = h.at("width").get<int>();
    img.height = h.at("height").get<int>();
    if (img.width <= 0 || img.height <= 0) throw std::runtime_error("bad image dimensions");

    std::string kind = h.at("projection").get<std::string>();
    img.projection.kind = kind == "perspective" ? ProjectionKind::perspective
                        : kind == "orthographic"
                            ? ProjectionKind::orthographic
                            : throw std::runtime_error("unknown projection: " + kind);
    auto intr = h.at("intrinsics").get<std::vector<double>>();
    if (intr.size() != 9) throw std::runtime_error("intrinsics must have 9 entries");
    std::copy(intr.begin(), intr.end(), img.projection.scale.begin());
    auto offs = h.at("offset").get<std::vector<double>>();
    if (offs.size() != 3) throw std::runtime_error("offset must have 3 entries");
    img.projection.offset = {offs[0], offs[1], offs[2]};
    img.transform = transform_from_json(h.at("transform"));

    size_t n = size_t(img.width) * img.height;
    if (bytes.size() - off != n * 4) {
        throw std::runtime_error(bytes.size() - off < n * 4 ? "truncated payload"
                                                            : "oversized payload");
    }
    img.data.resize(n);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + off;
    for (size_t i = 0; i < n; ++i) img.data[i] = read_f32le(p + i * 4);
    img.validate();
    return img;
}

void save_depth_image(const DepthImage& img, const std::string& path) {
    img.validate();
    json h;
    h["width"] = img.width;
    h["height"] = img.height;
    h["projection"] =
        img.projection.kind == ProjectionKind::perspective ? "perspective" : "orthographic";
    h["intrinsics"] = std::vector<double>(img.projection.scale.begin(),
                                          img.projection.scale.end());
    h["offset"] = std::vector<double>{img.projection.offset.x, img.projection.offset.y,
                                      img.projection.offset.z};
    h["transform"] = transform_to_json(img.transform);
    std::string header = h.dump();

    std::string bytes = "MRNDMAP1";
    append_u32le(bytes, uint32_t(header.size()));
    bytes += header;
    for (double d : img.data) append_f32le(bytes, float(d));
    write_all(path, bytes);
}

TriMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    TriMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z)) {
                throw std::runtime_error("malformed vertex at line " + std::to_string(line_no));
            }
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> f{};
            for (int i = 0; i < 3; ++i) {
                std::string tok;
                if (!(ss >> tok)) {
                    throw std::runtime_error("malformed face at line " + std::to_string(line_no));
                }
                // accept v, v/vt, v/vt/vn; only the vertex index is used
                f[i] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            mesh.faces.push_back(f);
        }
        // other tags (vn, vt, o, ...) are ignored
    }
    mesh.validate();
    return mesh;
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
    mesh.validate();
    std::ostringstream out;
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        out << buf;
    }
    for (const auto& f : mesh.faces) {
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    }
    write_all(path, out.str());
}

SegMask load_mask(const std::string& path) {
    std::string bytes = read_all(path);
    std::istringstream ss(bytes);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    ss >> magic;
    if (magic != "P5") throw std::runtime_error("bad magic");
    ss >> w >> h >> maxval;
    if (!ss || w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
        throw std::runtime_error("malformed PGM header");
    }
    ss.get();  // single whitespace after maxval
    size_t off = size_t(ss.tellg());
    size_t n = size_t(w) * h;
    if (bytes.size() - off < n) throw std::runtime_error("truncated payload");

    SegMask mask;
    mask.width = w;
    mask.height = h;
    mask.bits.resize(n);
    for (size_t i = 0; i < n; ++i) {
        mask.bits[i] = bytes[off + i] != 0 ? 1 : 0;
    }
    return mask;
}

void save_mask(const SegMask& mask, const std::string& path) {
    std::string bytes = "P5\n" + std::to_string(mask.width) + " " +
                        std::to_string(mask.height) + "\n255\n";
    for (uint8_t b : mask.bits) bytes.push_back(b ? char(255) : char(0));
    write_all(path, bytes);
}

Transform4 load_calibration(const std::string& path) {
    json j = json::parse(read_all(path));
    Transform4 t = transform_from_json(j);
    t.validate();
    return t;
}

void save_calibration(const Transform4& t, const std::string& path) {
    write_all(path, transform_to_json(t).dump() + "\n");
}

radar::RawSignalCube load_signal_cube(const std::string& path) {
    std::string bytes = read_all(path);
    size_t off = 0;
    json h = parse_container(bytes, "MRNRSC01", off);

    radar::RawSignalCube cube;
    int n_rx = h.at("n_rx").get<int>();
    int n_tx = h.at("n_tx").get<int>();
    cube.config.n_f = h.at("n_f").get<int>();
    cube.config.f_min_hz = h.at("f_min_hz").get<double>();
    cube.config.f_max_hz = h.at("f_max_hz").get<double>();
    cube.config.phi_c = h.at("phi_c").get<double>();
    for (const auto& p : h.at("rx_positions")) {
        cube.array.rx.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                 p.at(2).get<double>()});
    }
    for (const auto& p : h.at("tx_positions")) {
        cube.array.tx.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                 p.at(2).get<double>()});
    }
    if (int(cube.array.rx.size()) != n_rx || int(cube.array.tx.size()) != n_tx) {
        throw std::runtime_error("antenna count mismatch");
    }

    size_t n = size_t(n_rx) * n_tx * cube.config.n_f;
    if (bytes.size() - off != n * 8) {
        throw std::runtime_error(bytes.size() - off < n * 8 ? "truncated payload"
                                                            : "oversized payload");
    }
    cube.data.resize(n);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + off;
    for (size_t i = 0; i < n; ++i) {
        cube.data[i] = {double(read_f32le(p + i * 8)), double(read_f32le(p + i * 8 + 4))};
    }
    cube.validate();
    return cube;
}

void save_signal_cube(const radar::RawSignalCube& cube, const std::string& path) {
    cube.validate();
    json h;
    h["n_rx"] = cube.n_rx();
    h["n_tx"] = cube.n_tx();
    h["n_f"] = cube.n_f();
    h["f_min_hz"] = cube.config.f_min_hz;
    h["f_max_hz"] = cube.config.f_max_hz;
    h["phi_c"] = cube.config.phi_c;
    auto positions = [](const std::vector<Vec3>& v) {
        json arr = json::array();
        for (const auto& p : v) arr.push_back({p.x, p.y, p.z});
        return arr;
    };
    h["rx_positions"] = positions(cube.array.rx);
    h["tx_positions"] = positions(cube.array.tx);
    std::string header = h.dump();

    std::string bytes = "MRNRSC01";
    append_u32le(bytes, uint32_t(header.size()));
    bytes += header;
    for (const auto& v : cube.data) {
        append_f32le(bytes, float(v.real()));
        append_f32le(bytes, float(v.imag()));
    }
    write_all(path, bytes);
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    json j = json::parse(read_all(path));
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    std::vector<ManifestEntry> entries;
    for (const auto& c : j.at("captures")) {
        ManifestEntry e;
        e.capture.sensor = c.at("sensor").get<std::string>();
        e.capture.object = c.at("object").get<std::string>();
        for (const auto& f : c.at("frames")) {
            e.capture.frames.push_back(load_depth_image(resolve(f.get<std::string>())));
        }
        if (c.contains("masks")) {
            for (const auto& m : c.at("masks")) {
                e.capture.masks.push_back(load_mask(resolve(m.get<std::string>())));
            }
        }
        e.capture.calibration = load_calibration(resolve(c.at("calibration").get<std::string>()));
        e.capture.distance_cm = c.at("distance_cm").get<int>();
        e.capture.material = material_from_string(c.value("material_class", "polymer"));
        e.capture.quasi_static = c.value("quasi_static", false);
        e.gt_mesh_path = resolve(c.at("gt_mesh").get<std::string>());
        e.capture.validate();
        entries.push_back(std::move(e));
    }
    return entries;
}

std::map<std::string, int> load_erosion_metadata(const std::string& path) {
    json j = json::parse(read_all(path));
    std::map<std::string, int> out;
    for (const auto& [key, value] : j.at("erosion").items()) {
        out[key] = value.get<int>();
    }
    return out;
}

}  // namespace mmdepth::io

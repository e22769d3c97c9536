#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "linfbp/data.hpp"
#include "linfbp/geometry.hpp"
#include "linfbp/learn.hpp"
#include "linfbp/phantom.hpp"

// Raw array files are little-endian by contract; this toolkit targets
// little-endian hosts and verifies that here rather than byte-swapping.
static_assert(std::endian::native == std::endian::little,
              "raw file formats are written assuming a little-endian host");

namespace linfbp {

using json = nlohmann::json;

namespace io {

/// Sidecar convention: same stem, ".json" extension.
inline std::filesystem::path sidecar_path(const std::filesystem::path& artifact) {
    std::filesystem::path p = artifact;
    p.replace_extension(".json");
    return p;
}

/// All artifact writes go through a temp file + rename, so interrupted runs
/// never leave partial files behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    const std::filesystem::path dir = path.parent_path();
    if (!dir.empty() && !std::filesystem::is_directory(dir))
        throw std::runtime_error("output directory does not exist: " + dir.string());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp.string());
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

inline json read_json(const std::filesystem::path& path) {
    return json::parse(read_file_bytes(path));
}

inline std::string pack_f32(const std::vector<double>& values) {
    std::string bytes(values.size() * sizeof(float), '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        const float v = static_cast<float>(values[i]);
        std::memcpy(bytes.data() + i * sizeof(float), &v, sizeof(float));
    }
    return bytes;
}

inline std::vector<double> unpack_f32(const std::string& bytes) {
    if (bytes.size() % sizeof(float) != 0)
        throw std::runtime_error("raw f32 file has a truncated sample");
    std::vector<double> values(bytes.size() / sizeof(float));
    for (std::size_t i = 0; i < values.size(); ++i) {
        float v;
        std::memcpy(&v, bytes.data() + i * sizeof(float), sizeof(float));
        values[i] = static_cast<double>(v);
    }
    return values;
}

} // namespace io

inline json to_json(const Geometry& g) {
    json j{{"n_bins", g.n_bins},
           {"bin_width_mm", g.bin_width},
           {"n_views", g.n_views},
           {"angle_span_rad", g.angle_span},
           {"detector_center_offset", g.detector_center_offset}};
    if (!g.custom_angles.empty()) j["view_angles_rad"] = g.custom_angles;
    return j;
}

inline Geometry geometry_from_json(const json& j) {
    Geometry g = make_geometry(j.at("n_bins").get<int>(), j.at("bin_width_mm").get<double>(),
                               j.at("n_views").get<int>(), j.at("angle_span_rad").get<double>(),
                               j.at("detector_center_offset").get<double>());
    if (j.contains("view_angles_rad")) {
        g.custom_angles = j.at("view_angles_rad").get<std::vector<double>>();
        if (g.custom_angles.size() != static_cast<std::size_t>(g.n_views))
            throw std::runtime_error("geometry sidecar: view_angles_rad length mismatch");
    }
    return g;
}

inline json to_json(const GridSpec& g) {
    return json{{"height", g.height}, {"width", g.width}, {"pixel_size_mm", g.pixel_size}};
}

inline GridSpec grid_from_json(const json& j) {
    return make_grid(j.at("height").get<int>(), j.at("width").get<int>(),
                     j.at("pixel_size_mm").get<double>());
}

inline json to_json(const PhantomSpec& p) {
    json ellipses = json::array();
    for (const auto& e : p.ellipses)
        ellipses.push_back(json{{"cx", e.cx},
                                {"cy", e.cy},
                                {"a", e.a},
                                {"b", e.b},
                                {"rotation_rad", e.rotation},
                                {"density", e.density}});
    return json{{"fov_radius", p.fov_radius}, {"ellipses", ellipses}};
}

inline PhantomSpec phantom_from_json(const json& j) {
    PhantomSpec p;
    p.fov_radius = j.at("fov_radius").get<double>();
    for (const auto& e : j.at("ellipses")) {
        p.ellipses.push_back({e.at("cx").get<double>(), e.at("cy").get<double>(),
                              e.at("a").get<double>(), e.at("b").get<double>(),
                              e.at("rotation_rad").get<double>(), e.at("density").get<double>()});
    }
    validate(p);
    return p;
}

/// Sinogram file pair: <stem>.raw (little-endian float32, detector-major,
/// view-contiguous) plus <stem>.json carrying geometry, kind and provenance.
inline void save_sinogram(const std::filesystem::path& raw_path, const Sinogram& sino,
                          const json& provenance = json::object()) {
    json sidecar{{"type", "sinogram"},
                 {"geometry", to_json(sino.geometry)},
                 {"kind", sino.kind == SinogramKind::raw ? "raw" : "filtered"},
                 {"dtype", "float32-le"}};
    if (!provenance.empty()) sidecar["provenance"] = provenance;
    io::write_file_atomic(raw_path, io::pack_f32(sino.samples));
    io::write_json(io::sidecar_path(raw_path), sidecar);
}

inline Sinogram load_sinogram(const std::filesystem::path& raw_path) {
    const json sidecar = io::read_json(io::sidecar_path(raw_path));
    Sinogram sino(geometry_from_json(sidecar.at("geometry")),
                  sidecar.at("kind").get<std::string>() == "filtered" ? SinogramKind::filtered
                                                                      : SinogramKind::raw);
    auto values = io::unpack_f32(io::read_file_bytes(raw_path));
    if (values.size() != sino.samples.size())
        throw std::runtime_error("sinogram file size does not match geometry: " + raw_path.string());
    sino.samples = std::move(values);
    return sino;
}

inline void save_image(const std::filesystem::path& raw_path, const ImageGrid& img,
                       const json& provenance = json::object()) {
    json sidecar{{"type", "image"},
                 {"grid", to_json(img.grid)},
                 {"dtype", "float32-le"}};
    if (!provenance.empty()) sidecar["provenance"] = provenance;
    io::write_file_atomic(raw_path, io::pack_f32(img.values));
    io::write_json(io::sidecar_path(raw_path), sidecar);
}

inline ImageGrid load_image(const std::filesystem::path& raw_path) {
    const json sidecar = io::read_json(io::sidecar_path(raw_path));
    ImageGrid img(grid_from_json(sidecar.at("grid")));
    auto values = io::unpack_f32(io::read_file_bytes(raw_path));
    if (values.size() != img.values.size())
        throw std::runtime_error("image file size does not match grid: " + raw_path.string());
    img.values = std::move(values);
    return img;
}

/**
 * 16-bit PGM preview. The window [lo, hi] maps linearly to [0, 65535] with
 * clamping; by default the image's own min/max. Samples are big-endian per
 * the PGM specification.
 */
inline void save_pgm16(const std::filesystem::path& path, const ImageGrid& img,
                       std::optional<double> window_lo = std::nullopt,
                       std::optional<double> window_hi = std::nullopt) {
    double lo = window_lo.value_or(0.0);
    double hi = window_hi.value_or(0.0);
    if (!window_lo || !window_hi) {
        const auto [mn, mx] = std::minmax_element(img.values.begin(), img.values.end());
        if (!window_lo) lo = *mn;
        if (!window_hi) hi = *mx;
    }
    if (!(hi > lo)) hi = lo + 1.0;
    std::string bytes = "P5\n" + std::to_string(img.grid.width) + " " +
                        std::to_string(img.grid.height) + "\n65535\n";
    bytes.reserve(bytes.size() + img.values.size() * 2);
    for (double v : img.values) {
        double s = (v - lo) / (hi - lo);
        if (s < 0.0) s = 0.0;
        if (s > 1.0) s = 1.0;
        const auto q = static_cast<std::uint16_t>(std::lround(s * 65535.0));
        bytes.push_back(static_cast<char>(q >> 8));
        bytes.push_back(static_cast<char>(q & 0xFF));
    }
    io::write_file_atomic(path, bytes);
}

inline std::string pack_f64(const std::vector<double>& values) {
    std::string bytes(values.size() * sizeof(double), '\0');
    std::memcpy(bytes.data(), values.data(), bytes.size());
    return bytes;
}

/**
 * Checkpoint file: one line of JSON (architecture, basis, geometry, seed,
 * epoch, optimizer settings) followed by a little-endian float64 blob in
 * the order w1, b1, w2, b2, then the RMSProp squared-gradient averages in
 * the same order, then momentum buffers when momentum > 0.
 */
struct CheckpointMeta {
    BasisSet basis;
    Geometry geometry;
    std::uint64_t seed = 0;
};

inline void save_checkpoint(const std::filesystem::path& path, const TrainState& state,
                            const CheckpointMeta& meta) {
    const ModelParams& p = state.params;
    json header{{"format", "linfbp-checkpoint"},
                {"version", 1},
                {"architecture",
                 {{"hidden", p.hidden}, {"k1", p.k1}, {"k2", p.k2}, {"out_channels", p.out_channels}}},
                {"basis", {{"family", to_string(meta.basis.family)}, {"k", meta.basis.k}}},
                {"geometry", to_json(meta.geometry)},
                {"seed", meta.seed},
                {"epoch", state.epoch},
                {"optimizer",
                 {{"rho", state.opt.rho},
                  {"eps", state.opt.eps},
                  {"momentum", state.opt.momentum},
                  {"momentum_saved", state.opt.momentum > 0.0}}}};
    std::string bytes = header.dump() + "\n";
    auto append = [&](const std::vector<double>& v) { bytes += pack_f64(v); };
    append(p.w1);
    append(p.b1);
    append(p.w2);
    append(p.b2);
    append(state.opt.sq.w1);
    append(state.opt.sq.b1);
    append(state.opt.sq.w2);
    append(state.opt.sq.b2);
    if (state.opt.momentum > 0.0) {
        append(state.opt.mom.w1);
        append(state.opt.mom.b1);
        append(state.opt.mom.w2);
        append(state.opt.mom.b2);
    }
    io::write_file_atomic(path, bytes);
}

struct Checkpoint {
    TrainState state;
    CheckpointMeta meta;
};

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string bytes = io::read_file_bytes(path);
    const std::size_t nl = bytes.find('\n');
    if (nl == std::string::npos) throw std::runtime_error("checkpoint: missing header line");
    const json header = json::parse(bytes.substr(0, nl));
    if (header.at("format").get<std::string>() != "linfbp-checkpoint")
        throw std::runtime_error("checkpoint: unrecognized format");
    Checkpoint ck;
    const auto& arch = header.at("architecture");
    ck.state.params = make_model(arch.at("hidden").get<int>(), arch.at("k1").get<int>(),
                                 arch.at("k2").get<int>(), arch.at("out_channels").get<int>());
    ck.meta.basis = make_basis(basis_family_from_string(header.at("basis").at("family").get<std::string>()),
                               header.at("basis").at("k").get<int>());
    ck.meta.geometry = geometry_from_json(header.at("geometry"));
    ck.meta.seed = header.at("seed").get<std::uint64_t>();
    ck.state.epoch = header.at("epoch").get<int>();
    const auto& opt = header.at("optimizer");
    ck.state.opt = make_optim_state(ck.state.params, opt.at("rho").get<double>(),
                                    opt.at("eps").get<double>(), opt.at("momentum").get<double>());
    const bool momentum_saved = opt.at("momentum_saved").get<bool>();

    std::size_t pos = nl + 1;
    auto take = [&](std::vector<double>& v) {
        const std::size_t n = v.size() * sizeof(double);
        if (pos + n > bytes.size()) throw std::runtime_error("checkpoint: truncated blob");
        std::memcpy(v.data(), bytes.data() + pos, n);
        pos += n;
    };
    take(ck.state.params.w1);
    take(ck.state.params.b1);
    take(ck.state.params.w2);
    take(ck.state.params.b2);
    take(ck.state.opt.sq.w1);
    take(ck.state.opt.sq.b1);
    take(ck.state.opt.sq.w2);
    take(ck.state.opt.sq.b2);
    if (momentum_saved) {
        take(ck.state.opt.mom.w1);
        take(ck.state.opt.mom.b1);
        take(ck.state.opt.mom.w2);
        take(ck.state.opt.mom.b2);
    }
    if (pos != bytes.size()) throw std::runtime_error("checkpoint: trailing bytes");
    return ck;
}

/// Training log CSV: epoch, sample_index, loss (full float precision).
inline void save_training_log(const std::filesystem::path& path, const std::vector<LogRow>& rows) {
    std::string out = "epoch,sample_index,loss\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", r.epoch, r.sample, r.loss);
        out += buf;
    }
    io::write_file_atomic(path, out);
}

} // namespace linfbp

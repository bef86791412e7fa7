#include "scenetok/io.hpp"

#include "scenetok/error.hpp"
#include "scenetok/fusion.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace scenetok::io {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'S', 'T', 'K', '1'};
constexpr std::size_t kHeaderSize = 12;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
    return v;
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
    require(j.is_object() && j.contains(key), where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(where + ": field '" + key + "' has the wrong type");
    }
}

json parse_json(std::string_view text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(what + ": " + e.what());
    }
}

// Rethrows library exceptions from malformed documents as input errors.
template <typename F>
auto guarded(const std::string& what, F&& body) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw InputError(what + ": " + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec3(const json& j, const std::string& where) {
    require(j.is_array() && j.size() == 3, where + ": expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}


}  // namespace

// ---------------------------------------------------------------------------

std::string encode_blob(const Blob& blob) {
    require(blob.values.size() == static_cast<std::size_t>(blob.count) * blob.dim, "blob payload does not match count x dim");
    std::string out(kMagic, 4);
    out.reserve(kHeaderSize + 4 * blob.values.size());
    put_u32(out, blob.count);
    put_u32(out, blob.dim);
    for (float f : blob.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
    return out;
}

Blob decode_blob(std::string_view bytes) {
    require(bytes.size() >= kHeaderSize, "STK1 blob shorter than its header");
    require(std::memcmp(bytes.data(), kMagic, 4) == 0, "bad STK1 magic");
    Blob b;
    b.count = get_u32(bytes, 4);
    b.dim = get_u32(bytes, 8);
    const std::uint64_t n = static_cast<std::uint64_t>(b.count) * b.dim;
    require(bytes.size() == kHeaderSize + 4 * n, "STK1 size " + std::to_string(bytes.size()) + " != 12 + 4*" +
                                                      std::to_string(b.count) + "*" + std::to_string(b.dim));
    b.values.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) b.values[i] = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4 * i));
    return b;
}

void write_blob(const fs::path& path, const Blob& blob) { write_text(path, encode_blob(blob)); }

Blob read_blob(const fs::path& path) {
    try {
        return decode_blob(read_text(path));
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

Blob to_blob(const FeatureSet& features) {
    Blob b{static_cast<std::uint32_t>(features.count()), static_cast<std::uint32_t>(features.dim()), {}};
    b.values.reserve(features.data().size());
    for (double x : features.data()) b.values.push_back(static_cast<float>(x));
    return b;
}

FeatureSet to_features(const Blob& blob, Anchor anchor) {
    std::vector<double> data(blob.values.begin(), blob.values.end());
    return {blob.count, blob.dim, std::move(data), anchor};
}

DepthMap to_depth(const Blob& blob, int height, int width) {
    require(blob.dim == 1, "depth blob must have dim 1, got " + std::to_string(blob.dim));
    require(height >= 1 && width >= 1 && blob.count == static_cast<std::uint64_t>(height) * width,
            "depth blob holds " + std::to_string(blob.count) + " values, expected " + std::to_string(height) + "x" +
                std::to_string(width));
    return {height, width, std::vector<double>(blob.values.begin(), blob.values.end())};
}

Blob to_blob(const DepthMap& depth) {
    Blob b{static_cast<std::uint32_t>(depth.values.size()), 1, {}};
    for (double d : depth.values) b.values.push_back(static_cast<float>(d));
    return b;
}

// ---------------------------------------------------------------------------

std::string dump_manifest(const SceneManifest& m) {
    json j;
    j["kind"] = "scene";
    j["grid"] = {{"height", m.grid_height}, {"width", m.grid_width}, {"stride", m.stride}};
    json views = json::array();
    for (const auto& v : m.views) {
        views.push_back({{"index", v.index},
                         {"intrinsics", {{"fx", v.intrinsics.fx}, {"fy", v.intrinsics.fy}, {"cx", v.intrinsics.cx}, {"cy", v.intrinsics.cy}}},
                         {"rotation", v.rotation},
                         {"translation", v.translation},
                         {"depth", v.depth}});
    }
    j["views"] = views;
    json features = json::object();
    if (m.f_im) features["f_im"] = *m.f_im;
    if (m.f_pe) features["f_pe"] = *m.f_pe;
    if (m.f_3d) features["f_3d"] = *m.f_3d;
    if (!features.empty()) j["features"] = features;
    if (m.scene_points) j["scene_points"] = *m.scene_points;
    if (!m.boxes.empty()) {
        json boxes = json::array();
        for (const auto& b : m.boxes) boxes.push_back({{"min", b.min}, {"max", b.max}, {"label", b.label}});
        j["boxes"] = boxes;
    }
    return dump(j);
}

namespace {

BoxRecord parse_box(const json& b) {
    BoxRecord r;
    r.min = get<std::array<double, 3>>(b, "min", "box");
    r.max = get<std::array<double, 3>>(b, "max", "box");
    if (b.contains("label")) r.label = get<std::string>(b, "label", "box");
    return r;
}

}  // namespace

SceneManifest parse_manifest(std::string_view text) {
    return guarded("scene manifest", [&] {
        const json j = parse_json(text, "scene manifest");
        require(j.is_object() && j.value("kind", "") == "scene", "scene manifest: 'kind' must be \"scene\"");
        SceneManifest m;
        const json& grid = j.at("grid");
        m.grid_height = get<int>(grid, "height", "grid");
        m.grid_width = get<int>(grid, "width", "grid");
        m.stride = get<int>(grid, "stride", "grid");
        require(m.grid_height >= 1 && m.grid_width >= 1 && m.stride >= 1, "grid height, width and stride must be >= 1");
        require(j.contains("views") && j["views"].is_array() && !j["views"].empty(), "scene manifest needs a non-empty 'views' list");
        for (const auto& v : j["views"]) {
            ViewRecord r;
            r.index = get<int>(v, "index", "view");
            const json& k = v.at("intrinsics");
            r.intrinsics = {get<double>(k, "fx", "intrinsics"), get<double>(k, "fy", "intrinsics"),
                            get<double>(k, "cx", "intrinsics"), get<double>(k, "cy", "intrinsics")};
            r.rotation = get<std::array<double, 9>>(v, "rotation", "view");
            r.translation = get<std::array<double, 3>>(v, "translation", "view");
            r.depth = get<std::string>(v, "depth", "view");
            m.views.push_back(std::move(r));
        }
        for (std::size_t i = 0; i < m.views.size(); ++i) {
            require(m.views[i].index == static_cast<int>(i), "view indices must be 0..V-1 in order");
        }
        if (j.contains("features")) {
            const json& f = j["features"];
            if (f.contains("f_im")) m.f_im = get<std::string>(f, "f_im", "features");
            if (f.contains("f_pe")) m.f_pe = get<std::string>(f, "f_pe", "features");
            if (f.contains("f_3d")) m.f_3d = get<std::string>(f, "f_3d", "features");
        }
        if (j.contains("scene_points")) m.scene_points = get<std::string>(j, "scene_points", "scene manifest");
        if (j.contains("boxes")) {
            for (const auto& b : j["boxes"]) m.boxes.push_back(parse_box(b));
        }
        return m;
    });
}

void write_manifest(const fs::path& path, const SceneManifest& manifest) { write_text(path, dump_manifest(manifest)); }

SceneManifest read_manifest(const fs::path& path) { return parse_manifest(read_text(path)); }

CameraView to_camera(const ViewRecord& r) {
    Mat3 R;
    R << r.rotation[0], r.rotation[1], r.rotation[2], r.rotation[3], r.rotation[4], r.rotation[5], r.rotation[6],
        r.rotation[7], r.rotation[8];
    return {r.index, r.intrinsics, R, Vec3(r.translation[0], r.translation[1], r.translation[2])};
}

ObjectBox to_box(const BoxRecord& r) {
    return {Vec3(r.min[0], r.min[1], r.min[2]), Vec3(r.max[0], r.max[1], r.max[2]), r.label};
}

BoxRecord to_record(const ObjectBox& box) {
    const auto& a = box.min_corner();
    const auto& b = box.max_corner();
    return {{a.x(), a.y(), a.z()}, {b.x(), b.y(), b.z()}, box.label()};
}

std::vector<ObjectBox> read_boxes(const fs::path& path) {
    return guarded(path.string(), [&] {
        const json j = parse_json(read_text(path), path.string());
        const json& list = j.is_object() ? j.at("boxes") : j;
        require(list.is_array(), path.string() + ": expected a list of boxes");
        std::vector<ObjectBox> out;
        for (const auto& b : list) out.push_back(to_box(parse_box(b)));
        return out;
    });
}

void write_boxes(const fs::path& path, std::span<const ObjectBox> boxes) {
    json list = json::array();
    for (const auto& b : boxes) {
        const auto r = to_record(b);
        list.push_back({{"min", r.min}, {"max", r.max}, {"label", r.label}});
    }
    write_text(path, dump(json{{"boxes", list}}));
}

std::optional<FeatureSet> Scene::token_features() const {
    if (!f_im || !f_pe || !f_3d) return std::nullopt;
    const auto nn = nearest_neighbor_map(scene_points, grid);
    const auto fused = fuse_tokens(*f_im, *f_3d, *f_pe, nn);
    std::vector<std::size_t> rows;
    rows.reserve(cloud.size());
    for (const auto& p : cloud.source_patch()) rows.push_back(grid.flat_index(*p));
    auto out = fused.gather(rows);
    return FeatureSet(out.count(), out.dim(), out.data(), Anchor::per_point);
}

Scene assemble_scene(SceneManifest manifest, std::span<const DepthMap> depths, std::optional<FeatureSet> f_im,
                     std::optional<FeatureSet> f_pe, std::optional<FeatureSet> f_3d, std::vector<Vec3> scene_points) {
    require(depths.size() == manifest.views.size(), "one depth map per view is required");
    Scene s;
    s.manifest = std::move(manifest);
    const auto& m = s.manifest;
    std::vector<PatchGrid> slices;
    for (std::size_t k = 0; k < m.views.size(); ++k) {
        s.views.push_back(to_camera(m.views[k]));
        slices.push_back(unproject_depth(depths[k], s.views.back(), m.stride, m.grid_height, m.grid_width));
    }
    s.grid = PatchGrid::stack(slices);
    s.cloud = flatten_grid(s.grid, s.views);
    s.scene_points = scene_points.empty() ? s.cloud.positions() : std::move(scene_points);
    const std::size_t patches = s.grid.size();
    auto check = [](const std::optional<FeatureSet>& f, std::size_t expected, const char* name) {
        if (f) {
            require(f->count() == expected, std::string(name) + " has " + std::to_string(f->count()) +
                                                " rows, expected " + std::to_string(expected));
        }
    };
    check(f_im, patches, "f_im");
    check(f_pe, patches, "f_pe");
    check(f_3d, s.scene_points.size(), "f_3d");
    if (f_im) s.f_im = FeatureSet(f_im->count(), f_im->dim(), f_im->data(), Anchor::per_patch);
    if (f_pe) s.f_pe = FeatureSet(f_pe->count(), f_pe->dim(), f_pe->data(), Anchor::per_patch);
    if (f_3d) s.f_3d = FeatureSet(f_3d->count(), f_3d->dim(), f_3d->data(), Anchor::per_point);
    for (const auto& b : m.boxes) s.boxes.push_back(to_box(b));
    return s;
}

Scene load_scene(const fs::path& manifest_path) {
    auto manifest = read_manifest(manifest_path);
    const fs::path dir = manifest_path.parent_path();
    std::vector<DepthMap> depths;
    for (const auto& v : manifest.views) {
        depths.push_back(to_depth(read_blob(resolve(dir, v.depth)), manifest.grid_height * manifest.stride,
                                  manifest.grid_width * manifest.stride));
    }
    std::vector<Vec3> points;
    if (manifest.scene_points) {
        const auto blob = read_blob(resolve(dir, *manifest.scene_points));
        require(blob.dim == 3, "scene_points blob must have dim 3");
        for (std::size_t i = 0; i < blob.count; ++i)
            points.emplace_back(blob.values[3 * i], blob.values[3 * i + 1], blob.values[3 * i + 2]);
        require(!points.empty(), "scene_points blob is empty");
    }
    auto load = [&](const std::optional<std::string>& p, Anchor anchor) -> std::optional<FeatureSet> {
        if (!p) return std::nullopt;
        return to_features(read_blob(resolve(dir, *p)), anchor);
    };
    auto f_im = load(manifest.f_im, Anchor::per_patch);
    auto f_pe = load(manifest.f_pe, Anchor::per_patch);
    auto f_3d = load(manifest.f_3d, Anchor::per_point);
    auto scene = assemble_scene(std::move(manifest), depths, std::move(f_im), std::move(f_pe), std::move(f_3d),
                                std::move(points));
    scene.directory = dir;
    return scene;
}

// ---------------------------------------------------------------------------

std::string dump_selection(const SelectionRecord& r) {
    json j;
    j["kind"] = "selection";
    j["scene"] = r.scene;
    j["method"] = std::string(to_string(r.selection.method));
    j["count"] = r.selection.indices.size();
    j["start"] = r.start;
    if (r.selection.weight) j["weight"] = *r.selection.weight;
    if (r.voxel_size) j["voxel_size"] = *r.voxel_size;
    j["indices"] = r.selection.indices;
    if (!r.counts.empty()) j["counts"] = r.counts;
    if (!r.centroids.empty()) {
        json c = json::array();
        for (const auto& p : r.centroids) c.push_back(vec3_json(p));
        j["centroids"] = c;
    }
    return dump(j);
}

SelectionRecord parse_selection(std::string_view text) {
    return guarded("selection record", [&] {
        const json j = parse_json(text, "selection record");
        require(j.is_object() && j.value("kind", "") == "selection", "selection record: 'kind' must be \"selection\"");
        SelectionRecord r;
        r.scene = get<std::string>(j, "scene", "selection");
        r.selection.method = parse_sample_method(get<std::string>(j, "method", "selection"));
        r.start = get<std::size_t>(j, "start", "selection");
        if (j.contains("weight")) r.selection.weight = get<double>(j, "weight", "selection");
        if (j.contains("voxel_size")) r.voxel_size = get<double>(j, "voxel_size", "selection");
        r.selection.indices = get<std::vector<std::size_t>>(j, "indices", "selection");
        require(get<std::size_t>(j, "count", "selection") == r.selection.indices.size(),
                "selection record: count does not match indices");
        if (j.contains("counts")) r.counts = get<std::vector<std::size_t>>(j, "counts", "selection");
        if (j.contains("centroids")) {
            for (const auto& c : j["centroids"]) r.centroids.push_back(json_vec3(c, "centroid"));
        }
        return r;
    });
}

// ---------------------------------------------------------------------------

std::string dump_tokens(const TokenRecord& r) {
    json j;
    j["kind"] = "tokens";
    j["source"] = r.source;
    j["order"] = std::string(to_string(r.sequence.scheme));
    if (r.seed) j["seed"] = *r.seed;
    json list = json::array();
    for (const auto& t : r.sequence.tokens) {
        json e{{"id", t.id}, {"group", t.group}, {"position", vec3_json(t.position)}};
        if (t.patch) e["patch"] = {t.patch->view, t.patch->row, t.patch->col};
        list.push_back(std::move(e));
    }
    j["tokens"] = list;
    return dump(j);
}

TokenRecord parse_tokens(std::string_view text) {
    return guarded("token sequence", [&] {
        const json j = parse_json(text, "token sequence");
        require(j.is_object() && j.value("kind", "") == "tokens", "token sequence: 'kind' must be \"tokens\"");
        TokenRecord r;
        r.source = get<std::string>(j, "source", "tokens");
        r.sequence.scheme = parse_permutation(get<std::string>(j, "order", "tokens"));
        if (j.contains("seed")) r.seed = get<std::uint64_t>(j, "seed", "tokens");
        for (const auto& e : j.at("tokens")) {
            Token t;
            t.id = get<std::size_t>(e, "id", "token");
            t.group = get<int>(e, "group", "token");
            t.position = json_vec3(e.at("position"), "token position");
            if (e.contains("patch")) {
                const auto p = get<std::array<int, 3>>(e, "patch", "token");
                t.patch = PatchAddress{p[0], p[1], p[2]};
            }
            r.sequence.tokens.push_back(std::move(t));
        }
        return r;
    });
}

void attach_features(TokenSequence& sequence, const Blob& blob) {
    require(blob.count == sequence.size(), "token feature blob has " + std::to_string(blob.count) + " rows for " +
                                               std::to_string(sequence.size()) + " tokens");
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const auto* row = blob.values.data() + i * blob.dim;
        sequence.tokens[i].feature.assign(row, row + blob.dim);
    }
}

std::optional<Blob> token_feature_blob(const TokenSequence& sequence) {
    if (sequence.tokens.empty() || sequence.tokens.front().feature.empty()) return std::nullopt;
    const auto dim = sequence.tokens.front().feature.size();
    Blob b{static_cast<std::uint32_t>(sequence.size()), static_cast<std::uint32_t>(dim), {}};
    for (const auto& t : sequence.tokens) {
        require(t.feature.size() == dim, "tokens carry features of different dimensions");
        for (double x : t.feature) b.values.push_back(static_cast<float>(x));
    }
    return b;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    out.push_back(cell);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

}  // namespace

std::vector<ScoreTable> parse_score_csv(std::string_view text) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
    }
    require(!lines.empty(), "score CSV is empty");
    std::vector<Metric> header;
    for (const auto& name : split_csv_line(lines[0])) header.push_back(parse_metric(name));
    for (std::size_t i = 0; i < header.size(); ++i)
        for (std::size_t k = 0; k < i; ++k) require(header[i] != header[k], "score CSV repeats a metric column");

    std::vector<ScoreTable> rows;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_csv_line(lines[r]);
        require(cells.size() == header.size(), "score CSV row " + std::to_string(r) + " has " +
                                                   std::to_string(cells.size()) + " cells, header has " +
                                                   std::to_string(header.size()));
        ScoreTable t;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c] == "-" || cells[c].empty()) continue;
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cells[c], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            require(used == cells[c].size(), "score CSV: '" + cells[c] + "' is not a number");
            t.set(header[c], v);
        }
        rows.push_back(std::move(t));
    }
    require(!rows.empty(), "score CSV has no data rows");
    return rows;
}

std::vector<ScoreTable> read_score_csv(const fs::path& path) {
    try {
        return parse_score_csv(read_text(path));
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

ScoreTable read_score_table(const fs::path& path) {
    auto rows = read_score_csv(path);
    require(rows.size() == 1, path.string() + ": expected exactly one data row, found " + std::to_string(rows.size()));
    return rows.front();
}

std::string dump_score_csv(std::span<const ScoreTable> rows) {
    std::string out;
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
        if (i) out += ',';
        out += to_string(kAllMetrics[i]);
    }
    out += '\n';
    for (const auto& t : rows) {
        for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
            if (i) out += ',';
            if (!t.has(kAllMetrics[i])) {
                out += '-';
                continue;
            }
            out += json(t.at(kAllMetrics[i])).dump();
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string dump_stats(const SamplingStats& s) {
    json j{{"points", s.points},
           {"views", s.views},
           {"k", s.k},
           {"points_per_view_std", s.points_per_view_std},
           {"views_per_neighborhood_mean", s.views_per_neighborhood_mean},
           {"nn_distance_mean", s.nn_distance_mean},
           {"nn_distance_std", s.nn_distance_std}};
    return dump(j);
}

std::string stats_csv_header() {
    return "points,views,k,points_per_view_std,views_per_neighborhood_mean,nn_distance_mean,nn_distance_std\n";
}

std::string stats_csv_row(const SamplingStats& s) {
    std::ostringstream o;
    o << s.points << ',' << s.views << ',' << s.k << ',' << json(s.points_per_view_std).dump() << ','
      << json(s.views_per_neighborhood_mean).dump() << ',' << json(s.nn_distance_mean).dump() << ','
      << json(s.nn_distance_std).dump() << '\n';
    return o.str();
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    require(static_cast<bool>(out), "failed writing " + path.string());
}

}  // namespace scenetok::io

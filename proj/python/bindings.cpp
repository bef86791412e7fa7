#include "scenetok/error.hpp"
#include "scenetok/fusion.hpp"
#include "scenetok/io.hpp"
#include "scenetok/metrics.hpp"
#include "scenetok/ordering.hpp"
#include "scenetok/sampling.hpp"
#include "scenetok/stats.hpp"
#include "scenetok/synth.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace scenetok;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

PointMatrix to_matrix(const DoubleArray& a) {
    require(a.ndim() == 2, "expected a 2-D array of points");
    const auto n = static_cast<std::size_t>(a.shape(0));
    const auto d = static_cast<std::size_t>(a.shape(1));
    return {d, std::vector<double>(a.data(), a.data() + n * d)};
}

std::vector<Vec3> to_vec3(const DoubleArray& a) {
    require(a.ndim() == 2 && a.shape(1) == 3, "expected an (N, 3) array");
    std::vector<Vec3> out(static_cast<std::size_t>(a.shape(0)));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Vec3(a.at(i, 0), a.at(i, 1), a.at(i, 2));
    return out;
}

DoubleArray from_vec3(const std::vector<Vec3>& v) {
    DoubleArray out({static_cast<py::ssize_t>(v.size()), py::ssize_t{3}});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (int a = 0; a < 3; ++a) m(i, a) = v[i][a];
    return out;
}

DoubleArray from_features(const FeatureSet& f) {
    DoubleArray out({static_cast<py::ssize_t>(f.count()), static_cast<py::ssize_t>(f.dim())});
    std::copy(f.data().begin(), f.data().end(), out.mutable_data());
    return out;
}

FeatureSet to_features(const DoubleArray& a, Anchor anchor) {
    const auto m = to_matrix(a);
    return {m.rows(), m.dim(), m.data(), anchor};
}

IntArray from_indices(const std::vector<std::size_t>& v) {
    IntArray out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ViewedPointCloud to_cloud(const DoubleArray& positions, const IntArray& view_ids, const DoubleArray& view_origins) {
    auto pos = to_vec3(positions);
    const auto origins = to_vec3(view_origins);
    require(view_ids.ndim() == 1 && static_cast<std::size_t>(view_ids.shape(0)) == pos.size(),
            "view_ids must have one entry per point");
    std::vector<int> ids(view_ids.data(), view_ids.data() + view_ids.shape(0));
    std::vector<Vec3> per_point;
    for (int id : ids) {
        require(id >= 0 && static_cast<std::size_t>(id) < origins.size(), "view id outside the origin table");
        per_point.push_back(origins[id]);
    }
    const auto n = pos.size();
    return {std::move(pos), std::move(ids), std::move(per_point), std::vector<std::optional<PatchAddress>>(n)};
}

// Tokens from positions and (N, 3) patch addresses.
std::vector<Token> to_tokens(const DoubleArray& positions, const IntArray& patches) {
    const auto pos = to_vec3(positions);
    require(patches.ndim() == 2 && patches.shape(1) == 3 && static_cast<std::size_t>(patches.shape(0)) == pos.size(),
            "patches must be an (N, 3) array of (view, row, col)");
    std::vector<Token> out(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        out[i].id = i;
        out[i].position = pos[i];
        out[i].patch = PatchAddress{static_cast<int>(patches.at(i, 0)), static_cast<int>(patches.at(i, 1)),
                                    static_cast<int>(patches.at(i, 2))};
    }
    return out;
}

py::dict sequence_dict(const TokenSequence& s) {
    py::dict d;
    d["ids"] = from_indices(s.ids());
    std::vector<int> groups;
    for (const auto& t : s.tokens) groups.push_back(t.group);
    d["groups"] = groups;
    d["order"] = std::string(to_string(s.scheme));
    return d;
}

ScoreTable to_table(const std::map<std::string, double>& m) {
    ScoreTable t;
    for (const auto& [k, v] : m) t.set(parse_metric(k), v);
    return t;
}

py::dict scene_dict(const io::Scene& s) {
    py::dict d;
    d["positions"] = from_vec3(s.cloud.positions());
    std::vector<int> ids = s.cloud.view_ids();
    d["view_ids"] = ids;
    std::vector<Vec3> origins;
    for (const auto& v : s.views) origins.push_back(v.translation());
    d["view_origins"] = from_vec3(origins);
    std::vector<std::array<int, 3>> patches;
    for (const auto& p : s.cloud.source_patch()) patches.push_back({p->view, p->row, p->col});
    d["patches"] = patches;
    d["scene_points"] = from_vec3(s.scene_points);
    if (auto f = s.token_features()) d["token_features"] = from_features(*f);
    py::list boxes;
    for (const auto& b : s.boxes) {
        boxes.append(py::make_tuple(std::array<double, 3>{b.min_corner().x(), b.min_corner().y(), b.min_corner().z()},
                                    std::array<double, 3>{b.max_corner().x(), b.max_corner().y(), b.max_corner().z()},
                                    b.label()));
    }
    d["boxes"] = boxes;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-view scene token sampling, ordering, statistics and scoring";
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    m.def(
        "fps",
        [](const DoubleArray& points, std::size_t m, std::size_t start) { return from_indices(fps(to_matrix(points), m, start).indices); },
        py::arg("points"), py::arg("m"), py::arg("start") = 0);
    m.def(
        "fps_oracle",
        [](const DoubleArray& points, std::size_t m, std::size_t start) {
            return from_indices(fps_oracle(to_matrix(points), m, start).indices);
        },
        py::arg("points"), py::arg("m"), py::arg("start") = 0);
    m.def(
        "fps6d",
        [](const DoubleArray& positions, const IntArray& view_ids, const DoubleArray& view_origins, std::size_t m,
           double w, std::size_t start) {
            return from_indices(fps6d(to_cloud(positions, view_ids, view_origins), m, w, start).indices);
        },
        py::arg("positions"), py::arg("view_ids"), py::arg("view_origins"), py::arg("m"),
        py::arg("w") = kDefaultViewWeight, py::arg("start") = 0);
    m.def(
        "lift_6d",
        [](const DoubleArray& positions, const IntArray& view_ids, const DoubleArray& view_origins, double w) {
            const auto l = lift_6d(to_cloud(positions, view_ids, view_origins), w);
            DoubleArray out({static_cast<py::ssize_t>(l.rows()), py::ssize_t{6}});
            std::copy(l.data().begin(), l.data().end(), out.mutable_data());
            return out;
        },
        py::arg("positions"), py::arg("view_ids"), py::arg("view_origins"), py::arg("w") = kDefaultViewWeight);
    m.def(
        "voxel_average",
        [](const DoubleArray& positions, std::optional<DoubleArray> features, double voxel_size) {
            const auto pos = to_vec3(positions);
            const ViewedPointCloud cloud(pos, std::vector<int>(pos.size(), 0), std::vector<Vec3>(pos.size(), Vec3::Zero()),
                                         std::vector<std::optional<PatchAddress>>(pos.size()));
            std::optional<FeatureSet> f;
            if (features) f = to_features(*features, Anchor::per_point);
            const auto r = voxel_average(cloud, f, voxel_size);
            py::dict d;
            d["centroids"] = from_vec3(r.centroids);
            d["counts"] = from_indices(r.counts);
            d["representatives"] = from_indices(r.representatives);
            d["keys"] = r.keys;
            if (r.features) d["features"] = from_features(*r.features);
            return d;
        },
        py::arg("positions"), py::arg("features") = py::none(), py::arg("voxel_size") = kDefaultVoxelSize);

    m.def(
        "nearest_neighbor_map",
        [](const DoubleArray& scene_points, const DoubleArray& patch_coords) {
            const auto coords = to_vec3(patch_coords);
            PatchGrid g(1, 1, static_cast<int>(coords.size()));
            for (int i = 0; i < static_cast<int>(coords.size()); ++i) g.set({0, 0, i}, coords[i], true);
            const auto pts = to_vec3(scene_points);
            return from_indices(nearest_neighbor_map(std::span<const Vec3>(pts), g).indices);
        },
        py::arg("scene_points"), py::arg("patch_coords"),
        "Index of the closest scene point for each patch coordinate (ties to the lowest index).");
    m.def(
        "fuse_tokens",
        [](const DoubleArray& f_im, const DoubleArray& f_3d, const DoubleArray& f_pe, const IntArray& nn) {
            const auto im = to_features(f_im, Anchor::per_patch);
            require(nn.ndim() == 1 && static_cast<std::size_t>(nn.shape(0)) == im.count(), "nn must have one entry per patch");
            NearestIndexMap map{1, 1, static_cast<int>(im.count()), {}, std::vector<std::uint8_t>(im.count(), 1)};
            for (py::ssize_t i = 0; i < nn.shape(0); ++i) {
                require(nn.at(i) >= 0, "negative nearest index");
                map.indices.push_back(static_cast<std::size_t>(nn.at(i)));
            }
            return from_features(
                fuse_tokens(im, to_features(f_3d, Anchor::per_point), to_features(f_pe, Anchor::per_patch), map));
        },
        py::arg("f_im"), py::arg("f_3d"), py::arg("f_pe"), py::arg("nn"));

    m.def(
        "order_patch", [](const DoubleArray& p, const IntArray& patches) { return sequence_dict(order_patch(to_tokens(p, patches))); },
        py::arg("positions"), py::arg("patches"));
    m.def(
        "order_random",
        [](const DoubleArray& p, const IntArray& patches, std::uint64_t seed) {
            return sequence_dict(order_random(to_tokens(p, patches), seed));
        },
        py::arg("positions"), py::arg("patches"), py::arg("seed"));
    m.def(
        "order_default",
        [](const DoubleArray& p, const IntArray& patches, const std::vector<std::size_t>& selection) {
            return sequence_dict(order_default(to_tokens(p, patches), {selection, SampleMethod::fps, std::nullopt}));
        },
        py::arg("positions"), py::arg("patches"), py::arg("selection"));
    m.def(
        "order_objects",
        [](const DoubleArray& p, const IntArray& patches, const std::vector<std::pair<std::array<double, 3>, std::array<double, 3>>>& boxes) {
            std::vector<ObjectBox> bx;
            for (const auto& [lo, hi] : boxes) bx.emplace_back(Vec3(lo[0], lo[1], lo[2]), Vec3(hi[0], hi[1], hi[2]));
            return sequence_dict(order_objects(to_tokens(p, patches), bx));
        },
        py::arg("positions"), py::arg("patches"), py::arg("boxes"), "boxes: list of (min_corner, max_corner)");

    m.def(
        "compute_stats",
        [](const DoubleArray& positions, const IntArray& view_ids, std::size_t view_count, std::size_t k) {
            std::vector<Vec3> origins(view_count, Vec3::Zero());
            const auto s = compute_stats(to_cloud(positions, view_ids, from_vec3(origins)), view_count, k);
            py::dict d;
            d["points_per_view_std"] = s.points_per_view_std;
            d["views_per_neighborhood_mean"] = s.views_per_neighborhood_mean;
            d["nn_distance_mean"] = s.nn_distance_mean;
            d["nn_distance_std"] = s.nn_distance_std;
            d["k"] = s.k;
            d["points"] = s.points;
            d["views"] = s.views;
            return d;
        },
        py::arg("positions"), py::arg("view_ids"), py::arg("view_count"), py::arg("k") = kDefaultNeighborhood);

    m.def(
        "normalized_score",
        [](const std::map<std::string, double>& scores, const std::map<std::string, double>& baseline, const std::string& task) {
            return normalized_score(to_table(scores), to_table(baseline), parse_task(task));
        },
        py::arg("scores"), py::arg("baseline"), py::arg("task") = "all");
    m.def(
        "multi_seed_summary",
        [](const std::vector<std::map<std::string, double>>& runs, const std::map<std::string, double>& baseline,
           const std::string& task) {
            std::vector<ScoreTable> tables;
            for (const auto& r : runs) tables.push_back(to_table(r));
            const auto s = multi_seed_summary(tables, to_table(baseline), parse_task(task));
            return py::make_tuple(s.mean, s.std);
        },
        py::arg("runs"), py::arg("baseline"), py::arg("task") = "all");
    m.def("format_one_decimal", &format_one_decimal, py::arg("value"));

    m.def(
        "load_scene", [](const std::filesystem::path& p) { return scene_dict(io::load_scene(p)); }, py::arg("manifest"));
    m.def(
        "synth_scene",
        [](const std::filesystem::path& dir, int views, std::uint64_t seed, int rooms, int height, int width, int feature_dim) {
            synth::Options o;
            o.views = views;
            o.seed = seed;
            o.rooms = rooms;
            o.grid_height = height;
            o.grid_width = width;
            o.feature_dim = feature_dim;
            return synth::write_scene(synth::generate(o), dir);
        },
        py::arg("directory"), py::arg("views") = 8, py::arg("seed") = 0, py::arg("rooms") = 1, py::arg("height") = 48,
        py::arg("width") = 64, py::arg("feature_dim") = 0, "Writes a synthetic scene and returns its manifest path.");
}

#include "scenetok/synth.hpp"

#include "scenetok/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

namespace scenetok::synth {
namespace {

// Portable uniform draws; std distributions differ across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

struct Box {
    Vec3 lo;
    Vec3 hi;
};

double exit_distance(const Vec3& o, const Vec3& d, const Room& room) {
    double t = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (d[a] > 0)
            t = std::min(t, (room.hi[a] - o[a]) / d[a]);
        else if (d[a] < 0)
            t = std::min(t, (room.lo[a] - o[a]) / d[a]);
    }
    return t;
}

// Entry distance of the ray into the box, +inf when missed.
double entry_distance(const Vec3& o, const Vec3& d, const Box& box) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < box.lo[a] || o[a] > box.hi[a]) return std::numeric_limits<double>::infinity();
            continue;
        }
        double n = (box.lo[a] - o[a]) / d[a];
        double f = (box.hi[a] - o[a]) / d[a];
        if (n > f) std::swap(n, f);
        t0 = std::max(t0, n);
        t1 = std::min(t1, f);
    }
    if (t1 < t0 || t0 <= 0.0) return std::numeric_limits<double>::infinity();
    return t0;
}

double box_surface_distance(const Vec3& p, const Vec3& lo, const Vec3& hi) {
    const Vec3 outside = (lo - p).cwiseMax(p - hi).cwiseMax(0.0);
    if (outside.squaredNorm() > 0.0) return outside.norm();
    return std::min((p - lo).minCoeff(), (hi - p).minCoeff());
}

Mat3 look_rotation(double yaw, double pitch) {
    const Vec3 forward(std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch), -std::sin(pitch));
    const Vec3 right = forward.cross(Vec3::UnitZ()).normalized();
    const Vec3 down = forward.cross(right);
    Mat3 r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    return r;
}

double f32(double x) { return static_cast<double>(static_cast<float>(x)); }

std::string numbered(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03d.stk", prefix, i);
    return buf;
}

}  // namespace

SynthScene generate(const Options& options) {
    require(options.rooms >= 1, "synthetic scene needs at least one room");
    require(options.views >= 1, "synthetic scene needs at least one view");
    require(options.grid_height >= 1 && options.grid_width >= 1 && options.stride >= 1, "grid and stride must be >= 1");
    require(options.boxes_per_room >= 0 && options.feature_dim >= 0, "box and feature counts must be >= 0");
    require(options.dropout >= 0.0 && options.dropout < 1.0, "dropout must lie in [0, 1)");
    require(options.fov_degrees > 1.0 && options.fov_degrees < 170.0, "field of view must lie in (1, 170) degrees");

    Rng rng(options.seed);
    SynthScene out;
    out.options = options;
    auto& m = out.manifest;
    m.grid_height = options.grid_height;
    m.grid_width = options.grid_width;
    m.stride = options.stride;

    std::vector<std::vector<Box>> boxes(options.rooms);
    double x0 = 0.0;
    for (int r = 0; r < options.rooms; ++r) {
        const Vec3 size(rng.uniform(4.0, 6.0), rng.uniform(3.5, 5.5), rng.uniform(2.6, 3.2));
        out.rooms.push_back({Vec3(x0, 0.0, 0.0), Vec3(x0 + size.x(), size.y(), size.z())});
        x0 += size.x() + 1.0;
    }
    for (int r = 0; r < options.rooms; ++r) {
        const auto& room = out.rooms[r];
        for (int b = 0; b < options.boxes_per_room; ++b) {
            const Vec3 half(rng.uniform(0.2, 0.6), rng.uniform(0.2, 0.6), 0.0);
            const double height = rng.uniform(0.4, 1.2);
            const Vec3 c(rng.uniform(room.lo.x() + 0.1 + half.x(), room.hi.x() - 0.1 - half.x()),
                         rng.uniform(room.lo.y() + 0.1 + half.y(), room.hi.y() - 0.1 - half.y()), 0.0);
            Box box{Vec3(c.x() - half.x(), c.y() - half.y(), 0.0), Vec3(c.x() + half.x(), c.y() + half.y(), height)};
            boxes[r].push_back(box);
            char label[32];
            std::snprintf(label, sizeof label, "box_%d_%d", r, b);
            m.boxes.push_back({{box.lo.x(), box.lo.y(), box.lo.z()}, {box.hi.x(), box.hi.y(), box.hi.z()}, label});
        }
    }

    const int px_h = options.grid_height * options.stride;
    const int px_w = options.grid_width * options.stride;
    const double fx = 0.5 * px_w / std::tan(0.5 * options.fov_degrees * std::numbers::pi / 180.0);
    const Intrinsics K{fx, fx, 0.5 * px_w - 0.5, 0.5 * px_h - 0.5};

    for (int k = 0; k < options.views; ++k) {
        const int r = k % options.rooms;
        const int per_room = (options.views - r + options.rooms - 1) / options.rooms;
        const int j = k / options.rooms;
        const auto& room = out.rooms[r];
        const Vec3 center = 0.5 * (room.lo + room.hi);
        const double radius = 0.3 * std::min(room.hi.x() - room.lo.x(), room.hi.y() - room.lo.y());
        const double angle = 2.0 * std::numbers::pi * j / per_room + rng.uniform(-0.2, 0.2);
        const Vec3 origin(center.x() + radius * std::cos(angle), center.y() + radius * std::sin(angle), 1.5);
        const double yaw = angle + std::numbers::pi + rng.uniform(-0.3, 0.3);
        const double pitch = rng.uniform(0.25, 0.45);
        const Mat3 R = look_rotation(yaw, pitch);

        ViewRecord v;
        v.index = k;
        v.intrinsics = K;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) v.rotation[3 * a + b] = R(a, b);
        v.translation = {origin.x(), origin.y(), origin.z()};
        v.depth = numbered("depth", k);
        m.views.push_back(v);

        DepthMap depth{px_h, px_w, std::vector<double>(static_cast<std::size_t>(px_h) * px_w)};
        for (int y = 0; y < px_h; ++y) {
            for (int x = 0; x < px_w; ++x) {
                const Vec3 dir = R * Vec3((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
                double t = exit_distance(origin, dir, room);
                for (const auto& box : boxes[r]) t = std::min(t, entry_distance(origin, dir, box));
                const bool drop = options.dropout > 0.0 && rng.uniform() < options.dropout;
                // Stored at the precision of the on-disk format.
                depth.values[static_cast<std::size_t>(y) * px_w + x] = drop ? 0.0 : f32(t);
            }
        }
        out.depths.push_back(std::move(depth));
    }

    if (options.feature_dim > 0) {
        const auto dim = static_cast<std::size_t>(options.feature_dim);
        const std::size_t patches = static_cast<std::size_t>(options.views) * options.grid_height * options.grid_width;
        std::vector<double> im(patches * dim), pe(patches * dim);
        for (auto& x : im) x = f32(rng.uniform(-1.0, 1.0));
        for (std::size_t p = 0; p < patches; ++p)
            for (std::size_t d = 0; d < dim; ++d) pe[p * dim + d] = f32(std::sin(0.01 * static_cast<double>((p + 1) * (d + 1))));
        out.f_im = FeatureSet(patches, dim, std::move(im), Anchor::per_patch);
        out.f_pe = FeatureSet(patches, dim, std::move(pe), Anchor::per_patch);

        // Values are kept at the on-disk float precision.
        // f_3d: smooth function of position, so nearby points share features.
        const auto cloud = io::assemble_scene(m, out.depths).cloud;
        std::vector<Vec3> freq(dim);
        for (auto& f : freq) f = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        std::vector<double> f3(cloud.size() * dim);
        for (std::size_t i = 0; i < cloud.size(); ++i)
            for (std::size_t d = 0; d < dim; ++d) f3[i * dim + d] = f32(std::sin(freq[d].dot(cloud.positions()[i])));
        out.f_3d = FeatureSet(cloud.size(), dim, std::move(f3), Anchor::per_point);
        m.f_im = "f_im.stk";
        m.f_pe = "f_pe.stk";
        m.f_3d = "f_3d.stk";
    }
    return out;
}

io::Scene to_scene(const SynthScene& synth) {
    return io::assemble_scene(synth.manifest, synth.depths, synth.f_im, synth.f_pe, synth.f_3d);
}

std::filesystem::path write_scene(const SynthScene& synth, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    for (std::size_t k = 0; k < synth.depths.size(); ++k)
        io::write_blob(directory / synth.manifest.views[k].depth, io::to_blob(synth.depths[k]));
    if (synth.f_im) io::write_blob(directory / *synth.manifest.f_im, io::to_blob(*synth.f_im));
    if (synth.f_pe) io::write_blob(directory / *synth.manifest.f_pe, io::to_blob(*synth.f_pe));
    if (synth.f_3d) io::write_blob(directory / *synth.manifest.f_3d, io::to_blob(*synth.f_3d));
    const auto path = directory / "scene.json";
    io::write_manifest(path, synth.manifest);
    return path;
}

double surface_distance(const SynthScene& synth, const Vec3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& room : synth.rooms) best = std::min(best, box_surface_distance(p, room.lo, room.hi));
    for (const auto& b : synth.manifest.boxes) {
        best = std::min(best, box_surface_distance(p, Vec3(b.min[0], b.min[1], b.min[2]), Vec3(b.max[0], b.max[1], b.max[2])));
    }
    return best;
}

}  // namespace scenetok::synth

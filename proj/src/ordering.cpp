#include "scenetok/ordering.hpp"

#include "scenetok/error.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace scenetok {

std::string_view to_string(Permutation p) {
    switch (p) {
        case Permutation::none: return "none";
        case Permutation::patch: return "patch";
        case Permutation::random: return "random";
        case Permutation::selection: return "default";
        case Permutation::objects: return "objects";
    }
    return "none";
}

Permutation parse_permutation(std::string_view name) {
    if (name == "none") return Permutation::none;
    if (name == "patch") return Permutation::patch;
    if (name == "random") return Permutation::random;
    if (name == "default") return Permutation::selection;
    if (name == "objects") return Permutation::objects;
    throw InputError("unknown token order '" + std::string(name) + "'");
}

std::vector<std::size_t> TokenSequence::ids() const {
    std::vector<std::size_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.id);
    return out;
}

ObjectBox::ObjectBox(const Vec3& min_corner, const Vec3& max_corner, std::string label)
    : min_(min_corner), max_(max_corner), label_(std::move(label)) {
    require(min_.allFinite() && max_.allFinite(), "object box corners must be finite");
    require((min_.array() <= max_.array()).all(), "object box '" + label_ + "' has negative extent");
}

double ObjectBox::volume() const { return (max_ - min_).prod(); }

bool ObjectBox::contains(const Vec3& p) const {
    return (p.array() >= min_.array()).all() && (p.array() <= max_.array()).all();
}

std::vector<Token> make_tokens(const ViewedPointCloud& cloud, const std::optional<FeatureSet>& features) {
    if (features) require(features->count() == cloud.size(), "token features must align with the point cloud");
    std::vector<Token> out(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        out[i].id = i;
        out[i].position = cloud.positions()[i];
        out[i].patch = cloud.source_patch()[i];
        if (features) {
            const auto r = features->row(i);
            out[i].feature.assign(r.begin(), r.end());
        }
    }
    return out;
}

namespace {

void sort_by_patch(std::vector<Token>& tokens) {
    for (const auto& t : tokens) require(t.patch.has_value(), "token " + std::to_string(t.id) + " has no source patch");
    std::stable_sort(tokens.begin(), tokens.end(), [](const Token& a, const Token& b) { return *a.patch < *b.patch; });
}

}  // namespace

TokenSequence order_patch(std::vector<Token> tokens) {
    sort_by_patch(tokens);
    return {std::move(tokens), Permutation::patch};
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    // Largest multiple of bound that fits; draws at or above it are rejected.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

TokenSequence order_random(std::vector<Token> tokens, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = tokens.size(); i > 1; --i) {
        const auto j = uniform_below(rng, i);
        std::swap(tokens[i - 1], tokens[j]);
    }
    return {std::move(tokens), Permutation::random};
}

TokenSequence order_default(std::vector<Token> tokens, const SampleSelection& selection) {
    require(selection.indices.size() == tokens.size(),
            "selection has " + std::to_string(selection.indices.size()) + " indices but there are " +
                std::to_string(tokens.size()) + " tokens");
    std::unordered_map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        require(slot.emplace(tokens[i].id, i).second, "duplicate token id " + std::to_string(tokens[i].id));
    }
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (auto idx : selection.indices) {
        auto it = slot.find(idx);
        require(it != slot.end(), "selection index " + std::to_string(idx) + " has no matching token");
        out.push_back(std::move(tokens[it->second]));
        slot.erase(it);
    }
    return {std::move(out), Permutation::selection};
}

TokenSequence order_objects(std::vector<Token> tokens, std::span<const ObjectBox> boxes) {
    std::vector<std::size_t> by_size(boxes.size());
    std::iota(by_size.begin(), by_size.end(), std::size_t{0});
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](std::size_t a, std::size_t b) { return boxes[a].volume() < boxes[b].volume(); });

    // Group slot 0 is the scene; slot r + 1 is the r-th smallest box.
    std::vector<std::vector<Token>> groups(boxes.size() + 1);
    for (auto& t : tokens) {
        std::size_t slot = 0;
        for (std::size_t r = 0; r < by_size.size(); ++r) {
            if (boxes[by_size[r]].contains(t.position)) {
                slot = r + 1;
                break;
            }
        }
        t.group = slot == 0 ? kSceneGroup : static_cast<int>(by_size[slot - 1]);
        groups[slot].push_back(std::move(t));
    }
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (auto& g : groups) {
        sort_by_patch(g);
        std::move(g.begin(), g.end(), std::back_inserter(out));
    }
    return {std::move(out), Permutation::objects};
}

}  // namespace scenetok

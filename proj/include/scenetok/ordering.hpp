#pragma once

#include "scenetok/features.hpp"
#include "scenetok/geometry.hpp"
#include "scenetok/sampling.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scenetok {

enum class Permutation { none, patch, random, selection, objects };

std::string_view to_string(Permutation p);
Permutation parse_permutation(std::string_view name);

inline constexpr int kSceneGroup = -1;

struct Token {
    std::size_t id = 0;  // index of the source point
    std::vector<double> feature;
    Vec3 position = Vec3::Zero();
    std::optional<PatchAddress> patch;
    int group = kSceneGroup;  // kSceneGroup or the input index of the owning box

    bool operator==(const Token&) const = default;
};

struct TokenSequence {
    std::vector<Token> tokens;
    Permutation scheme = Permutation::none;

    std::size_t size() const { return tokens.size(); }
    std::vector<std::size_t> ids() const;

    bool operator==(const TokenSequence&) const = default;
};

class ObjectBox {
public:
    ObjectBox(const Vec3& min_corner, const Vec3& max_corner, std::string label = {});

    const Vec3& min_corner() const { return min_; }
    const Vec3& max_corner() const { return max_; }
    const std::string& label() const { return label_; }

    double volume() const;
    // Closed on every axis.
    bool contains(const Vec3& p) const;

private:
    Vec3 min_;
    Vec3 max_;
    std::string label_;
};

// One token per point. Row i of `features` (when given) becomes token i's feature.
std::vector<Token> make_tokens(const ViewedPointCloud& cloud, const std::optional<FeatureSet>& features = {});

// Stable sort by (view, row, col).
TokenSequence order_patch(std::vector<Token> tokens);

// Uniform shuffle driven by a 64-bit Mersenne Twister; the bounded draws use
// rejection sampling so the result is identical on every platform.
TokenSequence order_random(std::vector<Token> tokens, std::uint64_t seed);

// Tokens in the order of an FPS selection. The selection must name each
// token id exactly once.
TokenSequence order_default(std::vector<Token> tokens, const SampleSelection& selection);

// Scene tokens first, then one group per box from smallest to largest
// volume (ties by box index); every group in patch order. A token belongs to
// the smallest box that contains it.
TokenSequence order_objects(std::vector<Token> tokens, std::span<const ObjectBox> boxes);

// Uniform integer in [0, bound) from a 64-bit generator.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

}  // namespace scenetok

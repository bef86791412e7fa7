#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scenetok {

enum class Anchor { per_point, per_patch };

// count x dim opaque feature vectors, row-major.
class FeatureSet {
public:
    FeatureSet() = default;
    FeatureSet(std::size_t count, std::size_t dim, std::vector<double> data, Anchor anchor);
    static FeatureSet zeros(std::size_t count, std::size_t dim, Anchor anchor);

    std::size_t count() const { return count_; }
    std::size_t dim() const { return dim_; }
    Anchor anchor() const { return anchor_; }
    const std::vector<double>& data() const { return data_; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    // Rows at the given indices, in order.
    FeatureSet gather(std::span<const std::size_t> indices) const;

private:
    std::size_t count_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
    Anchor anchor_ = Anchor::per_point;
};

}  // namespace scenetok

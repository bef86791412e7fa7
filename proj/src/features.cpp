#include "scenetok/features.hpp"

#include "scenetok/error.hpp"

#include <cmath>

namespace scenetok {

FeatureSet::FeatureSet(std::size_t count, std::size_t dim, std::vector<double> data, Anchor anchor)
    : count_(count), dim_(dim), data_(std::move(data)), anchor_(anchor) {
    require(dim >= 1, "feature dimension must be >= 1");
    require(data_.size() == count * dim, "feature buffer length does not equal count x dim");
    for (double x : data_) require(std::isfinite(x), "feature values must be finite");
}

FeatureSet FeatureSet::zeros(std::size_t count, std::size_t dim, Anchor anchor) {
    return {count, dim, std::vector<double>(count * dim, 0.0), anchor};
}

FeatureSet FeatureSet::gather(std::span<const std::size_t> indices) const {
    std::vector<double> out;
    out.reserve(indices.size() * dim_);
    for (auto i : indices) {
        require(i < count_, "feature index out of range");
        const auto r = row(i);
        out.insert(out.end(), r.begin(), r.end());
    }
    return {indices.size(), dim_, std::move(out), anchor_};
}

}  // namespace scenetok

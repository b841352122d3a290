#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "invdens/error.hpp"

namespace invdens {

using Point = std::vector<double>;

/// Row-major collection of points in R^d.
class PointSet {
public:
  PointSet() = default;
  PointSet(std::size_t dim, std::size_t count) : dim_(dim), data_(dim * count, 0.0) {
    if (dim == 0) throw ParameterError("point dimension must be positive");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  double at(std::size_t i, std::size_t coord) const { return data_[i * dim_ + coord]; }
  double& at(std::size_t i, std::size_t coord) { return data_[i * dim_ + coord]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

} // namespace invdens

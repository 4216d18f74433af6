#include "plapfd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plapfd/errors.hpp"

namespace plapfd {

const char* to_string(Extension ext) {
  switch (ext) {
    case Extension::Zero:
      return "zero";
    case Extension::BoundaryTrace:
      return "boundary";
  }
  return "unknown";
}

Grid::Grid(int dim, double spacing, double half_width) : dim_(dim), spacing_(spacing) {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("grid dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw DomainError("grid spacing must be positive and finite");
  }
  if (!(half_width >= spacing) || !std::isfinite(half_width)) {
    throw DomainError("grid half width must be finite and at least one spacing");
  }
  // Tolerate half widths that are an integer multiple of h up to rounding.
  const double ratio = half_width / spacing;
  half_nodes_ = static_cast<int>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
  strides_.assign(dim, 1);
  const std::size_t n = nodes_per_axis();
  for (int axis = dim - 2; axis >= 0; --axis) strides_[axis] = strides_[axis + 1] * n;
  size_ = strides_[0] * n;
}

bool Grid::contains(std::span<const int> index) const noexcept {
  for (int i = 0; i < dim_; ++i) {
    if (index[i] < -half_nodes_ || index[i] > half_nodes_) return false;
  }
  return true;
}

std::size_t Grid::flatten(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != dim_) throw ConfigError("index dimension does not match grid");
  if (!contains(index)) throw DomainError("index outside grid");
  std::size_t flat = 0;
  for (int i = 0; i < dim_; ++i) flat += static_cast<std::size_t>(index[i] + half_nodes_) * strides_[i];
  return flat;
}

void Grid::unflatten(std::size_t flat, std::span<int> index) const noexcept {
  for (int i = 0; i < dim_; ++i) {
    index[i] = static_cast<int>(flat / strides_[i]) - half_nodes_;
    flat %= strides_[i];
  }
}

MultiIndex Grid::unflatten(std::size_t flat) const {
  MultiIndex index(dim_);
  unflatten(flat, index);
  return index;
}

void Grid::point(std::size_t flat, std::span<double> x) const noexcept {
  for (int i = 0; i < dim_; ++i) {
    x[i] = coordinate(static_cast<int>(flat / strides_[i]) - half_nodes_);
    flat %= strides_[i];
  }
}

std::vector<double> Grid::point(std::size_t flat) const {
  std::vector<double> x(dim_);
  point(flat, x);
  return x;
}

bool Grid::operator==(const Grid& other) const noexcept {
  return dim_ == other.dim_ && spacing_ == other.spacing_ && half_nodes_ == other.half_nodes_;
}

GridField::GridField(Grid grid, std::vector<double> values, Extension extension)
    : grid_(std::move(grid)), values_(std::move(values)), extension_(extension) {
  if (values_.size() != grid_.size()) throw ConfigError("field size does not match grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("grid field values must be finite");
  }
}

GridField GridField::sample(const Grid& grid, const ScalarField& fn, Extension extension) {
  std::vector<double> values(grid.size());
  std::vector<double> x(grid.dim());
  for (std::size_t k = 0; k < values.size(); ++k) {
    grid.point(k, x);
    values[k] = fn(x);
  }
  return GridField(grid, std::move(values), extension);
}

double GridField::at(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != grid_.dim()) throw ConfigError("index dimension does not match grid");
  const int n = grid_.half_nodes();
  std::size_t flat = 0;
  for (int i = 0; i < grid_.dim(); ++i) {
    int j = index[i];
    if (j < -n || j > n) {
      if (extension_ == Extension::Zero) return 0.0;
      j = std::clamp(j, -n, n);
    }
    flat += static_cast<std::size_t>(j + n) * grid_.stride(i);
  }
  return values_[flat];
}

double GridField::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace plapfd

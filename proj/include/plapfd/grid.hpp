#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace plapfd {

/// Largest supported spatial dimension.
inline constexpr int kMaxDim = 8;

/// Node index vector alpha; node alpha sits at x = h * alpha.
using MultiIndex = std::vector<int>;

/// A real-valued function on R^d.
using ScalarField = std::function<double(std::span<const double>)>;

/// How a field is read outside the grid box.
enum class Extension {
  Zero,           ///< every out-of-range node reads 0
  BoundaryTrace,  ///< out-of-range nodes read the nearest boundary node
};

const char* to_string(Extension ext);

/// Uniform grid h*Z^d restricted to the box [-L, L]^d, L an integer multiple of h.
///
/// Node indices on each axis run over [-n, n] with n = ceil(L/h); storage is
/// row-major with the last axis fastest.
class Grid {
 public:
  Grid(int dim, double spacing, double half_width);

  int dim() const noexcept { return dim_; }
  double spacing() const noexcept { return spacing_; }
  int half_nodes() const noexcept { return half_nodes_; }
  /// Half width actually covered, n*h (>= the requested value).
  double half_width() const noexcept { return half_nodes_ * spacing_; }
  std::size_t nodes_per_axis() const noexcept { return 2 * static_cast<std::size_t>(half_nodes_) + 1; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const noexcept { return strides_[axis]; }

  double coordinate(int index) const noexcept { return index * spacing_; }
  bool contains(std::span<const int> index) const noexcept;
  std::size_t flatten(std::span<const int> index) const;
  void unflatten(std::size_t flat, std::span<int> index) const noexcept;
  MultiIndex unflatten(std::size_t flat) const;
  void point(std::size_t flat, std::span<double> x) const noexcept;
  std::vector<double> point(std::size_t flat) const;

  bool operator==(const Grid& other) const noexcept;

 private:
  int dim_;
  double spacing_;
  int half_nodes_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

/// Values of a discrete solution on one time level, together with the rule
/// used for reads outside the box. Immutable after construction.
class GridField {
 public:
  GridField(Grid grid, std::vector<double> values, Extension extension = Extension::Zero);

  /// Samples fn at every node.
  static GridField sample(const Grid& grid, const ScalarField& fn, Extension extension = Extension::Zero);

  const Grid& grid() const noexcept { return grid_; }
  Extension extension() const noexcept { return extension_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t flat) const noexcept { return values_[flat]; }
  /// Read at any index vector; out-of-range reads follow the extension rule.
  double at(std::span<const int> index) const;

  double sup_norm() const noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
  Extension extension_;
};

}  // namespace plapfd

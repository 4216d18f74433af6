#include "plapfd/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "plapfd/errors.hpp"

namespace plapfd {

namespace {

// ln(1e-300): magnitudes of J_p below this are flushed to zero.
const double kLogTiny = std::log(1e-300);

bool inside_ball(long norm2, double h, double r) { return static_cast<double>(norm2) * h * h < r * r; }

// Support check for generic stencils: the closed ball, so that the three-point
// stencil with r = h qualifies.
bool inside_closed_ball(long norm2, double h, double r) {
  return static_cast<double>(norm2) * h * h <= r * r * (1.0 + 1e-12);
}

long norm2(std::span<const int> beta) {
  long s = 0;
  for (int b : beta) s += static_cast<long>(b) * b;
  return s;
}

void check_compatible(const Stencil& stencil, const Grid& grid) {
  if (stencil.dim() != grid.dim()) throw ConfigError("stencil and field dimensions differ");
  const double h = grid.spacing();
  if (std::abs(stencil.spacing() - h) > 1e-12 * h) throw ConfigError("stencil and field spacings differ");
}

}  // namespace

Exponent::Exponent(double p) : p_(p) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw DomainError("p must be ≥ 2");
}

PowerMap::PowerMap(Exponent p) : p_(p.value()) {
  if (p_ == 2.0) {
    kind_ = Kind::Identity;
  } else if (p_ == 3.0) {
    kind_ = Kind::Square;
  } else if (p_ == 4.0) {
    kind_ = Kind::Cube;
  } else {
    kind_ = Kind::General;
  }
}

double PowerMap::general(double xi) const noexcept {
  if (xi == 0.0) return 0.0;
  const double log_mag = (p_ - 1.0) * std::log(std::abs(xi));
  if (log_mag < kLogTiny) return 0.0;
  return std::copysign(std::exp(log_mag), xi);
}

double jp(double xi, double p) {
  if (!std::isfinite(xi)) throw DomainError("jp argument must be finite");
  return PowerMap(Exponent(p))(xi);
}

Stencil::Stencil(int dim, double spacing, double radius, double p, double m_bound, std::vector<StencilEntry> entries)
    : dim_(dim), spacing_(spacing), radius_(radius), m_bound_(m_bound), power_(Exponent(p)) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("stencil dimension out of range");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("stencil spacing must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("stencil radius must be positive");
  if (!(m_bound > 0.0) || !std::isfinite(m_bound)) throw DomainError("stencil bound M must be positive");

  for (auto& e : entries) {
    if (static_cast<int>(e.offset.size()) != dim) throw ConfigError("stencil offset has wrong dimension");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) throw PreconditionError("stencil weights must be nonnegative");
    if (norm2(e.offset) == 0 && e.weight != 0.0) throw PreconditionError("stencil weight at the zero offset must vanish");
    if (!inside_closed_ball(norm2(e.offset), spacing, radius)) throw PreconditionError("stencil offset outside the ball B_r");
  }
  std::erase_if(entries, [](const StencilEntry& e) { return norm2(e.offset) == 0; });
  if (entries.empty()) throw DegenerateStencilError("stencil has no offsets");

  std::sort(entries.begin(), entries.end(),
            [](const StencilEntry& a, const StencilEntry& b) { return a.offset < b.offset; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].offset == entries[i - 1].offset) throw PreconditionError("duplicate stencil offset");
  }
  for (const auto& e : entries) {
    MultiIndex neg(e.offset);
    for (int& b : neg) b = -b;
    auto it = std::lower_bound(entries.begin(), entries.end(), neg,
                               [](const StencilEntry& a, const MultiIndex& key) { return a.offset < key; });
    if (it == entries.end() || it->offset != neg || it->weight != e.weight) {
      throw PreconditionError("stencil weights must be symmetric");
    }
  }

  for (const auto& e : entries) {
    weight_sum_ += e.weight;
    for (int b : e.offset) reach_ = std::max(reach_, std::abs(b));
  }
  const double bound = m_bound * std::pow(radius, -p);
  if (weight_sum_ > bound * (1.0 + 1e-12)) {
    throw PreconditionError("stencil weight sum " + std::to_string(weight_sum_) + " exceeds M r^-p = " +
                            std::to_string(bound));
  }
  entries_ = std::move(entries);
}

Stencil stencil_1d(double h, double p) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("h must be positive");
  const double w = 1.0 / std::pow(h, p);
  return Stencil(1, h, h, p, 2.0, {{{-1}, w}, {{1}, w}});
}

double unit_ball_volume(int d) {
  if (d < 1) throw DomainError("dimension must be positive");
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double dpd_constant(int d, double p) {
  if (d < 1) throw DomainError("dimension must be positive");
  static_cast<void>(Exponent(p));
  const double a = 0.5 * d;
  const double b = 0.5 * (p - 1.0);
  const double c = 0.5 * (d + p);
  // Gamma(c) overflows a double beyond ~171.6.
  const double ratio = c < 170.0 ? std::tgamma(a) * std::tgamma(b) / std::tgamma(c)
                                 : std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(c));
  return d / (4.0 * std::sqrt(std::numbers::pi)) * ((p - 1.0) / (d + p)) * ratio;
}

Stencil stencil_ball(double r, double h, double p, int d) {
  if (d < 2 || d > kMaxDim) throw DomainError("ball stencil needs 2 <= d <= " + std::to_string(kMaxDim));
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("r must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("h must be positive");
  static_cast<void>(Exponent(p));
  if (h > r / std::sqrt(static_cast<double>(d))) {
    throw PreconditionError("ball stencil requires h <= r/sqrt(d)");
  }

  const double dpd = dpd_constant(d, p);
  const double weight = std::pow(h, d) / (dpd * unit_ball_volume(d) * std::pow(r, p + d));
  const int m = static_cast<int>(std::ceil(r / h));

  std::vector<StencilEntry> entries;
  MultiIndex beta(d, -m);
  while (true) {
    const long n2 = norm2(beta);
    if (n2 != 0 && inside_ball(n2, h, r)) entries.push_back({beta, weight});
    int axis = d - 1;
    while (axis >= 0 && beta[axis] == m) beta[axis--] = -m;
    if (axis < 0) break;
    ++beta[axis];
  }
  if (entries.empty()) throw DegenerateStencilError("no lattice points inside B_r");
  return Stencil(d, h, r, p, std::pow(2.0, d) / dpd, std::move(entries));
}

double couple_h_to_r(double r, double p, int d, double c) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("r must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("coupling constant must be positive");
  if (d < 2) throw DomainError("h-r coupling applies to d >= 2");
  static_cast<void>(Exponent(p));
  const double gamma = (p > 2.0 && p <= 3.0) ? p / (p - 1.0) : 1.5;
  return std::min(c * std::pow(r, gamma), r / std::sqrt(static_cast<double>(d)));
}

double apply_dp(const Stencil& stencil, const GridField& field, std::span<const int> alpha) {
  const Grid& grid = field.grid();
  check_compatible(stencil, grid);
  if (static_cast<int>(alpha.size()) != grid.dim() || !grid.contains(alpha)) {
    throw DomainError("node index outside grid");
  }
  const int d = grid.dim();
  const double center = field.at(alpha);
  const PowerMap& power = stencil.power();
  std::array<int, kMaxDim> nb{};
  double sum = 0.0;
  for (const auto& e : stencil.entries()) {
    for (int i = 0; i < d; ++i) nb[i] = alpha[i] + e.offset[i];
    sum += power(field.at(std::span<const int>(nb.data(), d)) - center) * e.weight;
  }
  return sum;
}

std::vector<double> apply_dp(const Stencil& stencil, const GridField& field, int threads) {
  const Grid& grid = field.grid();
  check_compatible(stencil, grid);
  const int d = grid.dim();
  const int inner = grid.half_nodes() - stencil.reach();
  const auto& entries = stencil.entries();
  const PowerMap power = stencil.power();

  std::vector<std::ptrdiff_t> flat_offsets;
  std::vector<double> weights;
  for (const auto& e : entries) {
    std::ptrdiff_t off = 0;
    for (int i = 0; i < d; ++i) off += static_cast<std::ptrdiff_t>(e.offset[i]) * static_cast<std::ptrdiff_t>(grid.stride(i));
    flat_offsets.push_back(off);
    weights.push_back(e.weight);
  }
  const std::size_t m = entries.size();
  const double* values = field.values().data();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  std::vector<double> out(grid.size());

#ifdef _OPENMP
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#else
  const int nthreads = 1;
  (void)threads;
#endif

#pragma omp parallel for num_threads(nthreads) schedule(static) if (nthreads > 1 && n >= 4096)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    std::array<int, kMaxDim> idx{};
    grid.unflatten(static_cast<std::size_t>(k), std::span<int>(idx.data(), d));
    bool interior = true;
    for (int i = 0; i < d; ++i) interior = interior && std::abs(idx[i]) <= inner;
    const double center = values[k];
    double sum = 0.0;
    if (interior) {
      for (std::size_t j = 0; j < m; ++j) sum += power(values[k + flat_offsets[j]] - center) * weights[j];
    } else {
      std::array<int, kMaxDim> nb{};
      for (std::size_t j = 0; j < m; ++j) {
        for (int i = 0; i < d; ++i) nb[i] = idx[i] + entries[j].offset[i];
        sum += power(field.at(std::span<const int>(nb.data(), d)) - center) * weights[j];
      }
    }
    out[k] = sum;
  }
  return out;
}

}  // namespace plapfd

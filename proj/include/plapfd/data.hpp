#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plapfd/exact.hpp"
#include "plapfd/grid.hpp"
#include "plapfd/stepping.hpp"

namespace plapfd {

/// Initial/source data together with the grid conventions it needs.
struct DataSet {
  std::string name;
  HolderData data;
  Extension extension = Extension::Zero;
  /// Set when the exact solution is a Barenblatt profile.
  std::optional<BarenblattSolution> exact;
};

/// Barenblatt profile at t = 0 (i.e. at unit time for t_shift = 1), f = 0,
/// a = 1 with L = K p/(p-2) t_shift^-(alpha+beta).
DataSet barenblatt_data(const BarenblattSolution& sol);

/// u0 = value, f = source everywhere; read with boundary-trace extension.
DataSet constant_data(double value, double source = 0.0);

/// u0 = (1 - |x|)_+, f = 0, Lipschitz with L = 1.
DataSet hat_data();

/// u0 = (1 - |x|^a)_+ and f = source_scale * u0; a-Hoelder with L = 1.
DataSet cusp_data(double a, double source_scale = 0.0);

/// u0 = cos(pi x_1 / h) (1 - |x|)_+: alternates sign from node to node.
DataSet oscillatory_data(double h);

/// Piecewise-linear 1D data through (x_i, u_i) and optionally (x_i, f_i),
/// constant beyond the end points and read with boundary-trace extension.
/// The Lipschitz constants are the largest slopes.
DataSet tabulated_data(std::vector<double> x, std::vector<double> u, std::vector<double> f = {});

/// factor * u0 and factor * f, with all constants scaled by |factor|.
HolderData scaled_data(const HolderData& base, double factor);

}  // namespace plapfd

#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace dwssp {

/// Uniform periodic grid on the unit interval, nodes x_i = i/n, i = 0..n-1.
struct PeriodicGrid {
  int n = 0;
  double dx = 0.0;

  PeriodicGrid() = default;
  explicit PeriodicGrid(int n_) : n(n_), dx(1.0 / n_) {
    if (n_ < 2) throw std::invalid_argument("PeriodicGrid: n >= 2 required");
  }
  double node(int i) const { return i * dx; }
  bool operator==(const PeriodicGrid& o) const { return n == o.n; }
};

/// Solution values on a periodic grid.
struct GridFunction {
  PeriodicGrid grid;
  Eigen::VectorXd values;

  GridFunction() = default;
  GridFunction(PeriodicGrid g, Eigen::VectorXd v)
      : grid(g), values(std::move(v)) {
    if (values.size() != grid.n)
      throw std::invalid_argument("GridFunction: value count does not match grid");
  }
  static GridFunction zero(PeriodicGrid g) {
    return GridFunction(g, Eigen::VectorXd::Zero(g.n));
  }
};

/// Periodic total variation, sum_i |u_{i+1} - u_i| including the wrap term.
double tv_seminorm(const GridFunction& u);

/// Max norm.
double max_norm(const GridFunction& u);

/// Sum of values (the conserved quantity of flux-difference operators).
double grid_sum(const GridFunction& u);

}  // namespace dwssp

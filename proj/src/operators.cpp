#include "dwssp/operators.hpp"

#include "dwssp/kernels.hpp"

namespace dwssp {

namespace {

void require_weno_width(const PeriodicGrid& g) {
  if (g.n < 5)
    throw std::invalid_argument("weno5: grid must have at least 5 cells");
}

}  // namespace

GridFunction upwind_first(const GridFunction& u) {
  GridFunction out = GridFunction::zero(u.grid);
  kernels::upwind_diff(u.values.data(), out.values.data(), u.grid.n, u.grid.dx);
  return out;
}

GridFunction downwind_first(const GridFunction& u) {
  GridFunction out = GridFunction::zero(u.grid);
  kernels::downwind_diff(u.values.data(), out.values.data(), u.grid.n,
                         u.grid.dx);
  return out;
}

GridFunction weno5_advection(const GridFunction& u, Bias bias) {
  require_weno_width(u.grid);
  GridFunction out = GridFunction::zero(u.grid);
  kernels::weno5_advection(u.values.data(), out.values.data(), u.grid.n,
                           u.grid.dx, bias == Bias::Downwind);
  return out;
}

GridFunction weno5_burgers(const GridFunction& u, Bias bias) {
  require_weno_width(u.grid);
  GridFunction out = GridFunction::zero(u.grid);
  kernels::weno5_burgers(u.values.data(), out.values.data(), u.grid.n,
                         u.grid.dx, bias == Bias::Downwind);
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> operator_matrices(
    SpatialScheme scheme, const PeriodicGrid& grid) {
  if (scheme != SpatialScheme::FirstOrder)
    throw std::invalid_argument(
        "operator_matrices: only the first-order scheme is linear");
  const int n = grid.n;
  const double s = 1.0 / grid.dx;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd Lt = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    L(i, i) = -s;
    L(i, (i + n - 1) % n) = s;
    Lt(i, i) = s;
    Lt(i, (i + 1) % n) = -s;
  }
  return {L, Lt};
}

SemiDiscretization advection_first_order(const PeriodicGrid& grid) {
  SemiDiscretization semi;
  semi.grid = grid;
  semi.dt_fe = grid.dx;
  semi.linear = true;
  auto [L, Lt] = operator_matrices(SpatialScheme::FirstOrder, grid);
  semi.matF = L;
  semi.matFtilde = -Lt;
  const int n = grid.n;
  const double dx = grid.dx;
  semi.apply_F = [n, dx](const Eigen::VectorXd& u) {
    Eigen::VectorXd out(n);
    kernels::upwind_diff(u.data(), out.data(), n, dx);
    return out;
  };
  semi.apply_Ftilde = [n, dx](const Eigen::VectorXd& u) {
    Eigen::VectorXd out(n);
    kernels::downwind_diff(u.data(), out.data(), n, dx);
    return out;
  };
  return semi;
}

SemiDiscretization advection_weno5(const PeriodicGrid& grid) {
  require_weno_width(grid);
  SemiDiscretization semi;
  semi.grid = grid;
  semi.dt_fe = grid.dx;
  semi.linear = false;
  const int n = grid.n;
  const double dx = grid.dx;
  semi.apply_F = [n, dx](const Eigen::VectorXd& u) {
    Eigen::VectorXd out(n);
    kernels::weno5_advection(u.data(), out.data(), n, dx, false);
    return out;
  };
  semi.apply_Ftilde = [n, dx](const Eigen::VectorXd& u) {
    Eigen::VectorXd out(n);
    kernels::weno5_advection(u.data(), out.data(), n, dx, true);
    return out;
  };
  return semi;
}

SemiDiscretization burgers_weno5(const PeriodicGrid& grid,
                                 double max_wave_speed) {
  require_weno_width(grid);
  if (!(max_wave_speed > 0.0))
    throw std::invalid_argument("burgers_weno5: max_wave_speed > 0 required");
  SemiDiscretization semi;
  semi.grid = grid;
  semi.dt_fe = grid.dx / max_wave_speed;
  semi.linear = false;
  const int n = grid.n;
  const double dx = grid.dx;
  semi.apply_F = [n, dx](const Eigen::VectorXd& u) {
    Eigen::VectorXd out(n);
    kernels::weno5_burgers(u.data(), out.data(), n, dx, false);
    return out;
  };
  semi.apply_Ftilde = [n, dx](const Eigen::VectorXd& u) {
    Eigen::VectorXd out(n);
    kernels::weno5_burgers(u.data(), out.data(), n, dx, true);
    return out;
  };
  return semi;
}

}  // namespace dwssp

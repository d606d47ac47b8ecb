#pragma once

#include "dwssp/grid.hpp"

#include <functional>
#include <utility>

namespace dwssp {

enum class SpatialScheme { FirstOrder, Weno5 };

/// F(u)_i = -(u_i - u_{i-1}) / dx; approximates -u_x for unit-speed advection.
GridFunction upwind_first(const GridFunction& u);

/// Ftilde(u)_i = (u_{i+1} - u_i) / dx; approximates +u_x.
GridFunction downwind_first(const GridFunction& u);

enum class Bias { Upwind, Downwind };

/// WENO5 flux-difference operator for unit-speed advection. Upwind bias
/// approximates -u_x, downwind bias +u_x. Requires n >= 5.
GridFunction weno5_advection(const GridFunction& u, Bias bias);

/// WENO5 flux-difference operator for the flux u^2/2 with global
/// Lax-Friedrichs splitting. Upwind bias approximates -(u^2/2)_x, downwind
/// bias +(u^2/2)_x. Requires n >= 5.
GridFunction weno5_burgers(const GridFunction& u, Bias bias);

/// Dense circulant matrices of the first-order discretizations:
/// L has -1 on the diagonal, +1 on the subdiagonal and in the (0, n-1)
/// corner; Ltilde is its mirror with +1 diagonal, -1 superdiagonal and -1 in
/// the (n-1, 0) corner, both scaled by 1/dx. They satisfy
/// upwind_first(u) = L u and downwind_first(u) = -Ltilde u.
/// Only the first-order scheme has operator matrices; Weno5 throws.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> operator_matrices(
    SpatialScheme scheme, const PeriodicGrid& grid);

/// Paired upwind/downwind operators with their forward-Euler step bound.
/// apply_F approximates -f(U)_x, apply_Ftilde approximates +f(U)_x. For
/// linear discretizations the dense matrices with apply_F(u) = matF * u and
/// apply_Ftilde(u) = matFtilde * u are stored as well.
struct SemiDiscretization {
  PeriodicGrid grid;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_F;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_Ftilde;
  double dt_fe = 0.0;
  bool linear = false;
  Eigen::MatrixXd matF, matFtilde;  // populated when linear
};

/// First-order advection pair; dt_fe = dx (the usual CFL bound).
SemiDiscretization advection_first_order(const PeriodicGrid& grid);

/// WENO5 advection pair; dt_fe = dx, used for CFL bookkeeping only.
SemiDiscretization advection_weno5(const PeriodicGrid& grid);

/// WENO5 pair for the flux u^2/2; dt_fe = dx / max_wave_speed, used for CFL
/// bookkeeping only.
SemiDiscretization burgers_weno5(const PeriodicGrid& grid,
                                 double max_wave_speed);

}  // namespace dwssp

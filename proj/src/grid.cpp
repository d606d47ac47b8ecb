#include "dwssp/grid.hpp"

#include "dwssp/kernels.hpp"

namespace dwssp {

double tv_seminorm(const GridFunction& u) {
  return kernels::tv_seminorm(u.values.data(), u.grid.n);
}

double max_norm(const GridFunction& u) {
  return kernels::max_abs(u.values.data(), u.grid.n);
}

double grid_sum(const GridFunction& u) {
  return kernels::sum(u.values.data(), u.grid.n);
}

}  // namespace dwssp

#pragma once

namespace dwssp::kernels {

// Stencil and reduction kernels on periodic arrays of length n. Each kernel
// comes in an OpenMP variant (default name) and a serial reference variant
// (_serial suffix) that the tests and the benchmark compare against.
//
// Pointwise kernels evaluate identical expressions per element, so the two
// variants agree bitwise; reductions may differ by accumulation order.

// out_i = -(u_i - u_{i-1}) / dx, first-order difference biased with the wind.
void upwind_diff(const double* u, double* out, int n, double dx);
void upwind_diff_serial(const double* u, double* out, int n, double dx);

// out_i = (u_{i+1} - u_i) / dx, biased against the wind (approximates +u_x).
void downwind_diff(const double* u, double* out, int n, double dx);
void downwind_diff_serial(const double* u, double* out, int n, double dx);

// Fifth-order WENO flux-difference approximation for unit-speed advection.
// downwind=false: out ~ -u_x from left-biased reconstruction;
// downwind=true:  out ~ +u_x with all stencil biases mirrored.
// Requires n >= 5.
void weno5_advection(const double* u, double* out, int n, double dx,
                     bool downwind);
void weno5_advection_serial(const double* u, double* out, int n, double dx,
                            bool downwind);

// Same for the flux u^2/2 with global Lax-Friedrichs splitting
// fplus/fminus = (f +- a u)/2, a = max_i |u_i|.
// downwind=false: out ~ -(u^2/2)_x; downwind=true: out ~ +(u^2/2)_x.
void weno5_burgers(const double* u, double* out, int n, double dx,
                   bool downwind);
void weno5_burgers_serial(const double* u, double* out, int n, double dx,
                          bool downwind);

double tv_seminorm(const double* u, int n);
double tv_seminorm_serial(const double* u, int n);

double max_abs(const double* u, int n);
double max_abs_serial(const double* u, int n);

double sum(const double* u, int n);
double sum_serial(const double* u, int n);

}  // namespace dwssp::kernels

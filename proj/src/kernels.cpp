#include "dwssp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dwssp::kernels {

namespace {

inline double sqr(double x) { return x * x; }

// Jiang-Shu WENO5 face value from five cell values ordered from the biased
// side: reconstructs at the interface between f0 and fp1. Calling it with the
// arguments in reversed spatial order yields the mirrored bias, bitwise.
inline double weno5_face(double fm2, double fm1, double f0, double fp1,
                         double fp2) {
  constexpr double eps = 1e-6;
  const double p0 = (2.0 * fm2 - 7.0 * fm1 + 11.0 * f0) / 6.0;
  const double p1 = (-fm1 + 5.0 * f0 + 2.0 * fp1) / 6.0;
  const double p2 = (2.0 * f0 + 5.0 * fp1 - fp2) / 6.0;

  const double b0 = 13.0 / 12.0 * sqr(fm2 - 2.0 * fm1 + f0) +
                    0.25 * sqr(fm2 - 4.0 * fm1 + 3.0 * f0);
  const double b1 =
      13.0 / 12.0 * sqr(fm1 - 2.0 * f0 + fp1) + 0.25 * sqr(fm1 - fp1);
  const double b2 = 13.0 / 12.0 * sqr(f0 - 2.0 * fp1 + fp2) +
                    0.25 * sqr(3.0 * f0 - 4.0 * fp1 + fp2);

  const double a0 = 0.1 / sqr(eps + b0);
  const double a1 = 0.6 / sqr(eps + b1);
  const double a2 = 0.3 / sqr(eps + b2);
  return (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2);
}

// Copy with three ghost cells on each side; p[i+3] = u[i mod n].
std::vector<double> pad3(const double* u, int n) {
  std::vector<double> p(n + 6);
  for (int i = 0; i < 3; ++i) p[i] = u[n - 3 + i];
  std::copy(u, u + n, p.begin() + 3);
  for (int i = 0; i < 3; ++i) p[n + 3 + i] = u[i];
  return p;
}

// Face values at x_{i+1/2} for i = 0..n-1 from padded data.
// downwind=false: left-biased (cells i-2..i+2);
// downwind=true:  right-biased (cells i+3..i-1, mirrored argument order).
template <bool Parallel>
void weno5_faces(const std::vector<double>& p, double* face, int n,
                 bool downwind) {
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < n; ++i) {
    const double* c = p.data() + i + 3;  // c[0] = u_i
    face[i] = downwind ? weno5_face(c[3], c[2], c[1], c[0], c[-1])
                       : weno5_face(c[-2], c[-1], c[0], c[1], c[2]);
  }
}

// out_i = sign * (face_i - face_{i-1}) / dx with periodic wrap.
template <bool Parallel>
void flux_difference(const double* face, double* out, int n, double dx,
                     double sign) {
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < n; ++i) {
    const double left = face[(i + n - 1) % n];
    out[i] = sign * (face[i] - left) / dx;
  }
}

template <bool Parallel>
void weno5_advection_impl(const double* u, double* out, int n, double dx,
                          bool downwind) {
  const std::vector<double> p = pad3(u, n);
  std::vector<double> face(n);
  weno5_faces<Parallel>(p, face.data(), n, downwind);
  flux_difference<Parallel>(face.data(), out, n, dx, downwind ? 1.0 : -1.0);
}

template <bool Parallel>
void weno5_burgers_impl(const double* u, double* out, int n, double dx,
                        bool downwind) {
  double a = 0.0;
  for (int i = 0; i < n; ++i) a = std::max(a, std::abs(u[i]));

  std::vector<double> fplus(n), fminus(n);
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < n; ++i) {
    const double f = 0.5 * u[i] * u[i];
    fplus[i] = 0.5 * (f + a * u[i]);
    fminus[i] = 0.5 * (f - a * u[i]);
  }
  const std::vector<double> pp = pad3(fplus.data(), n);
  const std::vector<double> pm = pad3(fminus.data(), n);

  // fplus carries right-going waves (reconstructed with the wind), fminus
  // left-going ones; the downwind operator mirrors both biases.
  std::vector<double> face(n), tmp(n);
  weno5_faces<Parallel>(pp, face.data(), n, downwind);
  weno5_faces<Parallel>(pm, tmp.data(), n, !downwind);
#pragma omp parallel for schedule(static) if (Parallel)
  for (int i = 0; i < n; ++i) face[i] += tmp[i];

  flux_difference<Parallel>(face.data(), out, n, dx, downwind ? 1.0 : -1.0);
}

}  // namespace

void upwind_diff(const double* u, double* out, int n, double dx) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double um1 = u[(i + n - 1) % n];
    out[i] = -(u[i] - um1) / dx;
  }
}

void upwind_diff_serial(const double* u, double* out, int n, double dx) {
  for (int i = 0; i < n; ++i) {
    const double um1 = u[(i + n - 1) % n];
    out[i] = -(u[i] - um1) / dx;
  }
}

void downwind_diff(const double* u, double* out, int n, double dx) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double up1 = u[(i + 1) % n];
    out[i] = (up1 - u[i]) / dx;
  }
}

void downwind_diff_serial(const double* u, double* out, int n, double dx) {
  for (int i = 0; i < n; ++i) {
    const double up1 = u[(i + 1) % n];
    out[i] = (up1 - u[i]) / dx;
  }
}

void weno5_advection(const double* u, double* out, int n, double dx,
                     bool downwind) {
  weno5_advection_impl<true>(u, out, n, dx, downwind);
}

void weno5_advection_serial(const double* u, double* out, int n, double dx,
                            bool downwind) {
  weno5_advection_impl<false>(u, out, n, dx, downwind);
}

void weno5_burgers(const double* u, double* out, int n, double dx,
                   bool downwind) {
  weno5_burgers_impl<true>(u, out, n, dx, downwind);
}

void weno5_burgers_serial(const double* u, double* out, int n, double dx,
                          bool downwind) {
  weno5_burgers_impl<false>(u, out, n, dx, downwind);
}

double tv_seminorm(const double* u, int n) {
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (int i = 0; i < n; ++i) acc += std::abs(u[(i + 1) % n] - u[i]);
  return acc;
}

double tv_seminorm_serial(const double* u, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::abs(u[(i + 1) % n] - u[i]);
  return acc;
}

double max_abs(const double* u, int n) {
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

double max_abs_serial(const double* u, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(u[i]));
  return m;
}

double sum(const double* u, int n) {
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (int i = 0; i < n; ++i) acc += u[i];
  return acc;
}

double sum_serial(const double* u, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += u[i];
  return acc;
}

}  // namespace dwssp::kernels

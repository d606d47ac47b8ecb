#include "dwssp/solver.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace dwssp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using Matvec = std::function<VectorXd(const VectorXd&)>;

// Restarted GMRES for A x = b with x0 = 0. Returns the best iterate once the
// relative residual target is met or the cycle budget is exhausted; the outer
// Newton loop owns overall convergence control.
VectorXd gmres(const Matvec& matvec, const VectorXd& b, int restart,
               double rel_tol) {
  const long n = b.size();
  VectorXd x = VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return x;
  const double target = std::max(rel_tol * bnorm, 1e-300);
  const int m = std::max(1, static_cast<int>(std::min<long>(restart, n)));
  const int max_cycles =
      static_cast<int>(std::min<long>(200, 4 * n / m + 2));

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    VectorXd r = (cycle == 0) ? b : VectorXd(b - matvec(x));
    const double beta = r.norm();
    if (beta <= target) return x;

    MatrixXd V(n, m + 1);
    MatrixXd H = MatrixXd::Zero(m + 1, m);
    VectorXd g = VectorXd::Zero(m + 1);
    std::vector<double> cs(m, 1.0), sn(m, 0.0);
    V.col(0) = r / beta;
    g(0) = beta;

    int j = 0;
    bool stop = false;
    for (; j < m; ++j) {
      VectorXd w = matvec(V.col(j));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(w);
        w -= H(i, j) * V.col(i);
      }
      const double hnext = w.norm();
      if (hnext > 0.0) V.col(j + 1) = w / hnext;
      H(j + 1, j) = hnext;

      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      if (denom > 0.0) {
        cs[j] = H(j, j) / denom;
        sn[j] = H(j + 1, j) / denom;
      }
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn[j] * g(j);
      g(j) = cs[j] * g(j);

      const bool lucky = hnext <= 1e-14 * beta;
      if (std::abs(g(j + 1)) <= target || lucky) {
        ++j;
        stop = true;
        break;
      }
    }

    VectorXd y = VectorXd::Zero(j);
    for (int i = j - 1; i >= 0; --i) {
      double acc = g(i);
      for (int l = i + 1; l < j; ++l) acc -= H(i, l) * y(l);
      y(i) = (std::abs(H(i, i)) > 0.0) ? acc / H(i, i) : 0.0;
    }
    x += V.leftCols(j) * y;
    if (stop && std::abs(g(j - 1 + 1)) <= target) return x;
  }
  return x;
}

void check_lu(const Eigen::PartialPivLU<MatrixXd>& lu, const char* what) {
  const VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  if (d.minCoeff() < 1e-14 * d.maxCoeff())
    throw SingularMatrixError(std::string(what) + ": singular linear system");
}

}  // namespace

VectorXd newton_krylov_solve(const Matvec& residual, VectorXd guess,
                             const NewtonSettings& settings,
                             NewtonDiagnostics* diag) {
  VectorXd x = std::move(guess);
  VectorXd G = residual(x);
  const double n0 = G.norm();
  const double target = settings.abs_tol + settings.rel_tol * n0;

  NewtonDiagnostics d;
  d.residual_history.push_back(n0);
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  for (int it = 0; it <= settings.max_newton; ++it) {
    if (G.norm() <= target) {
      if (diag) *diag = d;
      return x;
    }
    if (it == settings.max_newton) break;

    const double eps = sqrt_eps * (1.0 + x.norm());
    auto jac_matvec = [&](const VectorXd& v) -> VectorXd {
      const double nv = v.norm();
      if (nv == 0.0) return VectorXd::Zero(v.size());
      const VectorXd w = v / nv;
      const VectorXd gp = residual(x + eps * w);
      const VectorXd gm = residual(x - eps * w);
      return (gp - gm) * (nv / (2.0 * eps));
    };
    const VectorXd delta =
        gmres(jac_matvec, -G, settings.krylov_restart, settings.krylov_tol);

    // Backtracking on the residual norm keeps steep transients from throwing
    // the iteration out of the basin.
    const double gnorm = G.norm();
    double lambda = 1.0;
    bool accepted = false;
    VectorXd x_trial, G_trial;
    for (int ls = 0; ls < 12; ++ls) {
      x_trial = x + lambda * delta;
      G_trial = residual(x_trial);
      if (G_trial.norm() <= (1.0 - 1e-4 * lambda) * gnorm) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted && gnorm > 1e3 * target)
      throw NewtonError(
          "newton_krylov_solve: line search stalled at residual " +
              std::to_string(gnorm),
          d);
    x = accepted ? x_trial : x + delta;
    G = accepted ? G_trial : residual(x);
    d.iterations = it + 1;
    d.residual_history.push_back(G.norm());
  }
  if (diag) *diag = d;
  throw NewtonError("newton_krylov_solve: no convergence after " +
                        std::to_string(settings.max_newton) +
                        " iterations (residual " + std::to_string(G.norm()) +
                        ")",
                    d);
}

namespace {

// Stacked stage system y_i = u + dt sum_j A(i,j) F(y_j) + Atilde(i,j) Ft(y_j).
struct StageSystem {
  const DownwindTableau& t;
  const SemiDiscretization& semi;
  double dt;
  const VectorXd& u;
  std::vector<bool> needF, needFt;  // columns referenced by the stage rows

  StageSystem(const DownwindTableau& t_, const SemiDiscretization& semi_,
              double dt_, const VectorXd& u_)
      : t(t_), semi(semi_), dt(dt_), u(u_), needF(t_.s), needFt(t_.s) {
    for (int j = 0; j < t.s; ++j) {
      needF[j] = t.A.col(j).cwiseAbs().maxCoeff() != 0.0;
      needFt[j] = t.Atilde.col(j).cwiseAbs().maxCoeff() != 0.0;
    }
  }

  VectorXd operator()(const VectorXd& Y) const {
    const int n = semi.grid.n;
    const int s = t.s;
    std::vector<VectorXd> F(s), Ft(s);
    for (int j = 0; j < s; ++j) {
      if (needF[j]) F[j] = semi.apply_F(Y.segment(j * n, n));
      if (needFt[j]) Ft[j] = semi.apply_Ftilde(Y.segment(j * n, n));
    }
    VectorXd G(s * n);
    for (int i = 0; i < s; ++i) {
      VectorXd gi = Y.segment(i * n, n) - u;
      for (int j = 0; j < s; ++j) {
        if (needF[j] && t.A(i, j) != 0.0) gi -= dt * t.A(i, j) * F[j];
        if (needFt[j] && t.Atilde(i, j) != 0.0)
          gi -= dt * t.Atilde(i, j) * Ft[j];
      }
      G.segment(i * n, n) = gi;
    }
    return G;
  }
};

VectorXd combine_update(const DownwindTableau& t, const SemiDiscretization& semi,
                        double dt, const VectorXd& u, const VectorXd& Y) {
  const int n = semi.grid.n;
  // Stiffly accurate methods read the update off the last stage.
  if ((t.b.transpose() - t.A.row(t.s - 1)).cwiseAbs().maxCoeff() == 0.0 &&
      (t.btilde.transpose() - t.Atilde.row(t.s - 1)).cwiseAbs().maxCoeff() ==
          0.0) {
    return Y.segment((t.s - 1) * n, n);
  }
  VectorXd out = u;
  for (int j = 0; j < t.s; ++j) {
    if (t.b(j) != 0.0)
      out += dt * t.b(j) * semi.apply_F(Y.segment(j * n, n));
    if (t.btilde(j) != 0.0)
      out += dt * t.btilde(j) * semi.apply_Ftilde(Y.segment(j * n, n));
  }
  return out;
}

VectorXd solve_stages_assembled(const DownwindTableau& t,
                                const SemiDiscretization& semi, double dt,
                                const VectorXd& u) {
  const int n = semi.grid.n;
  const int s = t.s;
  MatrixXd M = MatrixXd::Identity(s * n, s * n);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      if (t.A(i, j) != 0.0)
        M.block(i * n, j * n, n, n) -= dt * t.A(i, j) * semi.matF;
      if (t.Atilde(i, j) != 0.0)
        M.block(i * n, j * n, n, n) -= dt * t.Atilde(i, j) * semi.matFtilde;
    }
  Eigen::PartialPivLU<MatrixXd> lu(M);
  check_lu(lu, "rk_step");
  VectorXd rhs(s * n);
  for (int i = 0; i < s; ++i) rhs.segment(i * n, n) = u;
  return lu.solve(rhs);
}

VectorXd solve_stages_explicit(const DownwindTableau& t,
                               const SemiDiscretization& semi, double dt,
                               const VectorXd& u) {
  const int n = semi.grid.n;
  const int s = t.s;
  VectorXd Y(s * n);
  std::vector<VectorXd> F(s), Ft(s);
  for (int i = 0; i < s; ++i) {
    VectorXd yi = u;
    for (int j = 0; j < i; ++j) {
      if (t.A(i, j) != 0.0) {
        if (F[j].size() == 0) F[j] = semi.apply_F(Y.segment(j * n, n));
        yi += dt * t.A(i, j) * F[j];
      }
      if (t.Atilde(i, j) != 0.0) {
        if (Ft[j].size() == 0) Ft[j] = semi.apply_Ftilde(Y.segment(j * n, n));
        yi += dt * t.Atilde(i, j) * Ft[j];
      }
    }
    Y.segment(i * n, n) = yi;
  }
  return Y;
}

JacobianMode resolve_mode(const NewtonSettings& settings,
                          const SemiDiscretization& semi) {
  if (settings.jacobian_mode == JacobianMode::AssembledLinear && !semi.linear)
    throw std::invalid_argument(
        "rk_step: assembled-linear mode requires a linear semi-discretization");
  return settings.jacobian_mode;
}

}  // namespace

GridFunction rk_step(const StepContext& ctx, const GridFunction& u,
                     StepStats* stats) {
  const auto* t = std::get_if<DownwindTableau>(&ctx.method);
  if (!t) throw std::invalid_argument("rk_step: method is not an RK tableau");
  if (!(ctx.dt > 0.0)) throw std::invalid_argument("rk_step: dt > 0 required");

  VectorXd Y;
  StepStats st;
  if (t->is_explicit()) {
    Y = solve_stages_explicit(*t, ctx.semi, ctx.dt, u.values);
  } else if (resolve_mode(ctx.newton, ctx.semi) == JacobianMode::AssembledLinear) {
    Y = solve_stages_assembled(*t, ctx.semi, ctx.dt, u.values);
    StageSystem sys(*t, ctx.semi, ctx.dt, u.values);
    st.residual = sys(Y).norm();
  } else {
    StageSystem sys(*t, ctx.semi, ctx.dt, u.values);
    VectorXd guess(t->s * u.values.size());
    for (int i = 0; i < t->s; ++i)
      guess.segment(i * u.values.size(), u.values.size()) = u.values;
    NewtonDiagnostics diag;
    Y = newton_krylov_solve(sys, guess, ctx.newton, &diag);
    st.newton_iterations = diag.iterations;
    st.residual = diag.residual_history.back();
  }
  if (stats) *stats = st;
  return GridFunction(u.grid, combine_update(*t, ctx.semi, ctx.dt, u.values, Y));
}

GridFunction lmm_step(const StepContext& ctx,
                      const std::vector<LmmHistoryEntry>& history,
                      StepStats* stats) {
  const auto* m = std::get_if<DownwindLmm>(&ctx.method);
  if (!m) throw std::invalid_argument("lmm_step: method is not a multistep set");
  if (!(ctx.dt > 0.0)) throw std::invalid_argument("lmm_step: dt > 0 required");
  if (static_cast<int>(history.size()) != m->k)
    throw std::invalid_argument("lmm_step: history length must equal k");

  const double dt = ctx.dt;
  VectorXd rhs = VectorXd::Zero(ctx.semi.grid.n);
  for (int j = 0; j < m->k; ++j) {
    const LmmHistoryEntry& h = history[j];
    if (m->alpha(j) != 0.0) rhs += m->alpha(j) * h.u;
    if (m->beta(j) != 0.0) rhs += dt * m->beta(j) * h.Fu;
    if (m->betatilde(j) != 0.0) rhs += dt * m->betatilde(j) * h.Ftu;
  }

  StepStats st;
  VectorXd un;
  if (m->is_explicit()) {
    un = rhs;
  } else if (resolve_mode(ctx.newton, ctx.semi) ==
             JacobianMode::AssembledLinear) {
    MatrixXd M = MatrixXd::Identity(ctx.semi.grid.n, ctx.semi.grid.n);
    if (m->beta(m->k) != 0.0) M -= dt * m->beta(m->k) * ctx.semi.matF;
    if (m->betatilde(m->k) != 0.0)
      M -= dt * m->betatilde(m->k) * ctx.semi.matFtilde;
    Eigen::PartialPivLU<MatrixXd> lu(M);
    check_lu(lu, "lmm_step");
    un = lu.solve(rhs);
    st.residual = (M * un - rhs).norm();
  } else {
    const double bk = m->beta(m->k);
    const double btk = m->betatilde(m->k);
    auto res = [&](const VectorXd& x) -> VectorXd {
      VectorXd g = x - rhs;
      if (bk != 0.0) g -= dt * bk * ctx.semi.apply_F(x);
      if (btk != 0.0) g -= dt * btk * ctx.semi.apply_Ftilde(x);
      return g;
    };
    NewtonDiagnostics diag;
    un = newton_krylov_solve(res, history.back().u, ctx.newton, &diag);
    st.newton_iterations = diag.iterations;
    st.residual = res(un).norm();
  }
  if (stats) *stats = st;
  return GridFunction(PeriodicGrid(ctx.semi.grid), std::move(un));
}

void MonitorTrace::append(const MonitorRecord& rec) {
  if (!records.empty() && rec.t <= records.back().t)
    throw std::logic_error("MonitorTrace: times must strictly increase");
  records.push_back(rec);
}

namespace {

// Reusable dense stepper for linear problems: one factorization per dt.
class AssembledRkStepper {
 public:
  AssembledRkStepper(const DownwindTableau& t, const SemiDiscretization& semi)
      : t_(t), semi_(semi) {}

  VectorXd step(const VectorXd& u, double dt, StepStats* stats) {
    if (dt != cached_dt_) {
      const int n = semi_.grid.n;
      MatrixXd M = MatrixXd::Identity(t_.s * n, t_.s * n);
      for (int i = 0; i < t_.s; ++i)
        for (int j = 0; j < t_.s; ++j) {
          if (t_.A(i, j) != 0.0)
            M.block(i * n, j * n, n, n) -= dt * t_.A(i, j) * semi_.matF;
          if (t_.Atilde(i, j) != 0.0)
            M.block(i * n, j * n, n, n) -=
                dt * t_.Atilde(i, j) * semi_.matFtilde;
        }
      lu_.compute(M);
      check_lu(lu_, "run");
      cached_dt_ = dt;
    }
    const int n = semi_.grid.n;
    VectorXd rhs(t_.s * n);
    for (int i = 0; i < t_.s; ++i) rhs.segment(i * n, n) = u;
    const VectorXd Y = lu_.solve(rhs);
    if (stats) {
      StageSystem sys(t_, semi_, dt, u);
      stats->newton_iterations = 0;
      stats->residual = sys(Y).norm();
    }
    return combine_update(t_, semi_, dt, u, Y);
  }

 private:
  DownwindTableau t_;
  const SemiDiscretization& semi_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  double cached_dt_ = -1.0;
};

}  // namespace

RunResult run(const RunConfig& config, const GridFunction& u0) {
  if (!(config.t_end > 0.0)) throw std::invalid_argument("run: t_end > 0");
  if (!(config.cfl > 0.0)) throw std::invalid_argument("run: cfl > 0");
  const double dt = config.cfl * config.semi.dt_fe;
  if (!(dt > 0.0)) throw std::invalid_argument("run: dt_fe must be positive");

  int nsteps = static_cast<int>(std::ceil(config.t_end / dt - 1e-12));
  nsteps = std::max(nsteps, 1);
  const double dt_last = config.t_end - (nsteps - 1) * dt;

  RunResult out{u0, {}};
  out.trace.append({0, 0.0, tv_seminorm(u0), max_norm(u0), 0, 0.0});

  auto record = [&](int step, double t, const GridFunction& u,
                    const StepStats& st) {
    out.trace.append(
        {step, t, tv_seminorm(u), max_norm(u), st.newton_iterations,
         st.residual});
  };

  if (const auto* tab = std::get_if<DownwindTableau>(&config.method)) {
    const bool assembled =
        config.semi.linear && !tab->is_explicit() &&
        config.newton.jacobian_mode == JacobianMode::AssembledLinear;
    AssembledRkStepper stepper(*tab, config.semi);
    StepContext ctx{*tab, config.semi, dt, config.newton};
    GridFunction u = u0;
    for (int step = 1; step <= nsteps; ++step) {
      const double step_dt = (step == nsteps) ? dt_last : dt;
      StepStats st;
      if (assembled) {
        u = GridFunction(u.grid, stepper.step(u.values, step_dt, &st));
      } else {
        ctx.dt = step_dt;
        u = rk_step(ctx, u, &st);
      }
      record(step, (step == nsteps) ? config.t_end : step * dt, u, st);
    }
    out.final_state = u;
    return out;
  }

  const auto& lmm = std::get<DownwindLmm>(config.method);
  const double fam_r = std::max(config.startup_family_r, config.cfl);
  const DownwindTableau startup = family_tableau(std::max(fam_r, 3.5));
  StepContext startup_ctx{startup, config.semi, dt, config.newton};
  StepContext lmm_ctx{lmm, config.semi, dt, config.newton};

  auto make_entry = [&](const GridFunction& u) {
    return LmmHistoryEntry{u.values, config.semi.apply_F(u.values),
                           config.semi.apply_Ftilde(u.values)};
  };

  std::vector<LmmHistoryEntry> history;
  history.push_back(make_entry(u0));
  GridFunction u = u0;
  int step = 1;
  for (; step <= std::min(lmm.k - 1, nsteps); ++step) {
    const double step_dt = (step == nsteps) ? dt_last : dt;
    startup_ctx.dt = step_dt;
    StepStats st;
    u = rk_step(startup_ctx, u, &st);
    record(step, (step == nsteps) ? config.t_end : step * dt, u, st);
    history.push_back(make_entry(u));
  }
  for (; step <= nsteps; ++step) {
    const double step_dt = (step == nsteps) ? dt_last : dt;
    StepStats st;
    if (std::abs(step_dt - dt) <= 1e-12 * dt) {
      u = lmm_step(lmm_ctx, history, &st);
      history.erase(history.begin());
      history.push_back(make_entry(u));
    } else {
      // A shortened final step breaks the uniform spacing the multistep
      // formula assumes; land on t_end with the startup integrator instead.
      startup_ctx.dt = step_dt;
      u = rk_step(startup_ctx, u, &st);
    }
    record(step, (step == nsteps) ? config.t_end : step * dt, u, st);
  }
  out.final_state = u;
  return out;
}

}  // namespace dwssp

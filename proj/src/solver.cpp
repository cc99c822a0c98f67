#include "impopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include <Eigen/QR>

namespace impopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using RawLambda = std::function<double(const double* y, double v, const double* w)>;

RawLambda raw_lambda(const LagrangianSpec& spec, int n, int k) {
  if (spec.auxiliary) return spec.auxiliary;
  return [&spec, n, k](const double* y, double v, const double* w) {
    Vec ym = Eigen::Map<const Vec>(y, n);
    Vec wm = Eigen::Map<const Vec>(w, k);
    return lambda_eval(spec, ym, v, wm).value();
  };
}

double fd_derivative(double l0, double lp, double lm, double h) {
  const bool fp = std::isfinite(lp), fm = std::isfinite(lm);
  if (fp && fm) return (lp - lm) / (2.0 * h);
  if (fp && std::isfinite(l0)) return (lp - l0) / h;
  if (fm && std::isfinite(l0)) return (l0 - lm) / h;
  return 0.0;
}

// Flat transcription: z holds (v_j, w_j) per cell, ys holds y_0..y_N.
class Transcriber {
 public:
  Transcriber(const RelaxedProblem& p, const SolverOptions& o)
      : n(p.sys.n),
        k(p.sys.k),
        m(1 + p.sys.k),
        N(o.N),
        ds(p.budget() / o.N),
        sub(o.substeps),
        target(p.time_target),
        slack(o.endpoint_slack),
        bound(o.blowup_bound),
        fd(o.fd_step),
        fd_lambda(o.lambda_fd_step),
        vel(p.sys.raw_velocity()),
        lam(raw_lambda(p.spec, p.sys.n, p.sys.k)),
        x0(p.x0),
        x1(p.x1),
        k1(n), k2(n), k3(n), k4(n), tmp(n), mid(n), yp(n), ym(n), op(n), om(n), zp(m) {
    mult_y.assign(n, 0.0);
  }

  const int n, k, m, N;
  const double ds;
  const int sub;
  const double target, slack, bound, fd, fd_lambda;

  // One cell of RK4 from y under control z; false on blow-up.
  bool step(const double* y, const double* z, double* out) {
    const double h = ds / sub;
    std::copy(y, y + n, out);
    for (int s = 0; s < sub; ++s) {
      vel(out, z[0], z + 1, k1.data());
      for (int i = 0; i < n; ++i) tmp[i] = out[i] + 0.5 * h * k1[i];
      vel(tmp.data(), z[0], z + 1, k2.data());
      for (int i = 0; i < n; ++i) tmp[i] = out[i] + 0.5 * h * k2[i];
      vel(tmp.data(), z[0], z + 1, k3.data());
      for (int i = 0; i < n; ++i) tmp[i] = out[i] + h * k3[i];
      vel(tmp.data(), z[0], z + 1, k4.data());
      double norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        out[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        norm2 += out[i] * out[i];
      }
      if (!(norm2 <= bound * bound)) return false;
    }
    return true;
  }

  double lambda(const double* y, double v, const double* w) {
    double r = lam(y, v, w);
    return std::isfinite(r) ? r : kInf;
  }

  struct Pieces {
    double cost = 0.0;
    double theta = 0.0;
    double residual = 0.0;
    double penalty = 0.0;
  };

  // Returns false when the state blows up or some cell has lambda = +infinity.
  bool forward(const double* z, double mu, std::vector<double>& ys, Pieces& out,
               std::vector<double>* running = nullptr) {
    ys.resize(static_cast<std::size_t>(N + 1) * n);
    std::copy(x0.data(), x0.data() + n, ys.begin());
    if (running) running->assign(1, 0.0);
    double cost = 0.0, theta = 0.0;
    for (int j = 0; j < N; ++j) {
      const double* zj = z + j * m;
      double* yj = ys.data() + j * n;
      if (!step(yj, zj, yj + n)) return false;
      for (int i = 0; i < n; ++i) mid[i] = 0.5 * (yj[i] + yj[n + i]);
      const double l = lambda(mid.data(), zj[0], zj + 1);
      if (!std::isfinite(l)) return false;
      cost += ds * l;
      theta += ds * zj[0];
      if (running) running->push_back(cost);
    }
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = ys[N * n + i] - x1[i];
      r2 += d * d;
    }
    out.cost = cost;
    out.theta = theta;
    out.residual = std::sqrt(r2);
    const double dt = theta - target;
    out.penalty = mu * dt * dt + mult_theta * dt;
    if (slack > 0.0) {
      const double shift = mult_r / (2.0 * mu);
      const double a = std::max(0.0, out.residual - slack + shift);
      out.penalty += mu * (a * a - shift * shift);
    } else {
      for (int i = 0; i < n; ++i) {
        const double d = ys[N * n + i] - x1[i];
        out.penalty += mu * d * d + mult_y[i] * d;
      }
    }
    return true;
  }

  // First-order multiplier update after a penalty stage.
  void update_multipliers(const double* z, double mu) {
    Pieces pc;
    if (!forward(z, mu, ys, pc)) return;
    mult_theta += 2.0 * mu * (pc.theta - target);
    if (slack > 0.0) {
      mult_r = std::max(0.0, mult_r + 2.0 * mu * (pc.residual - slack));
    } else {
      for (int i = 0; i < n; ++i) mult_y[i] += 2.0 * mu * (ys[N * n + i] - x1[i]);
    }
  }

  void reset_multipliers() {
    mult_theta = 0.0;
    mult_r = 0.0;
    std::fill(mult_y.begin(), mult_y.end(), 0.0);
  }

  double mult_theta = 0.0;
  double mult_r = 0.0;
  std::vector<double> mult_y;

  // Discrete adjoint with finite-difference local Jacobians.
  bool gradient(const double* z, double mu, std::vector<double>& grad, double& objective) {
    Pieces pc;
    if (!forward(z, mu, ys, pc)) return false;
    objective = pc.cost + pc.penalty;
    grad.assign(static_cast<std::size_t>(N) * m, 0.0);

    std::vector<double> p(n, 0.0), q(n), gy(n), next(n);
    if (slack > 0.0) {
      const double a = std::max(0.0, pc.residual - slack + mult_r / (2.0 * mu));
      if (a > 0.0 && pc.residual > 0.0) {
        for (int i = 0; i < n; ++i) p[i] = 2.0 * mu * a * (ys[N * n + i] - x1[i]) / pc.residual;
      }
    } else {
      for (int i = 0; i < n; ++i) p[i] = 2.0 * mu * (ys[N * n + i] - x1[i]) + mult_y[i];
    }
    const double dtheta = (2.0 * mu * (pc.theta - target) + mult_theta) * ds;

    for (int j = N - 1; j >= 0; --j) {
      const double* zj = z + j * m;
      const double* yj = ys.data() + j * n;
      for (int i = 0; i < n; ++i) mid[i] = 0.5 * (yj[i] + yj[n + i]);
      const double l0 = lambda(mid.data(), zj[0], zj + 1);

      for (int i = 0; i < n; ++i) {
        const double h = fd_lambda * std::max(1.0, std::abs(mid[i]));
        const double keep = mid[i];
        mid[i] = keep + h;
        const double lp = lambda(mid.data(), zj[0], zj + 1);
        mid[i] = keep - h;
        const double lm = lambda(mid.data(), zj[0], zj + 1);
        mid[i] = keep;
        gy[i] = fd_derivative(l0, lp, lm, h);
      }
      for (int i = 0; i < n; ++i) q[i] = p[i] + 0.5 * ds * gy[i];

      double* gj = grad.data() + j * m;
      std::copy(zj, zj + m, zp.begin());
      for (int c = 0; c < m; ++c) {
        // lambda, one-sided at v = 0
        const double hl = fd_lambda * std::max(1.0, std::abs(zj[c]));
        zp[c] = zj[c] + hl;
        const double lp = lambda(mid.data(), zp[0], zp.data() + 1);
        double lm = kInf;
        zp[c] = zj[c] - hl;
        if (!(c == 0 && zp[0] < 0.0)) lm = lambda(mid.data(), zp[0], zp.data() + 1);
        // one cell of the dynamics
        const double h = fd * std::max(1.0, std::abs(zj[c]));
        zp[c] = zj[c] + h;
        if (!step(yj, zp.data(), op.data())) return false;
        zp[c] = zj[c] - h;
        if (!step(yj, zp.data(), om.data())) return false;
        zp[c] = zj[c];
        double dstate = 0.0;
        for (int i = 0; i < n; ++i) dstate += (op[i] - om[i]) / (2.0 * h) * q[i];
        gj[c] = ds * fd_derivative(l0, lp, lm, hl) + dstate;
      }
      gj[0] += dtheta;

      for (int i = 0; i < n; ++i) {
        const double h = fd * std::max(1.0, std::abs(yj[i]));
        std::copy(yj, yj + n, yp.begin());
        std::copy(yj, yj + n, ym.begin());
        yp[i] += h;
        ym[i] -= h;
        if (!step(yp.data(), zj, op.data()) || !step(ym.data(), zj, om.data())) return false;
        double acc = 0.0;
        for (int r = 0; r < n; ++r) acc += (op[r] - om[r]) / (2.0 * h) * q[r];
        next[i] = 0.5 * ds * gy[i] + acc;
      }
      p = next;
    }
    return true;
  }

  std::vector<double> ys;

 private:
  RawVelocity vel;
  RawLambda lam;
  Vec x0, x1;
  std::vector<double> k1, k2, k3, k4, tmp, mid, yp, ym, op, om, zp;
};

// In-place projection of one cell onto {v >= eta} intersected with the unit ball.
void project_cell(double* zj, int k, double eta) {
  const double v = zj[0];
  double wn2 = 0.0;
  for (int i = 1; i <= k; ++i) wn2 += zj[i] * zj[i];
  if (v >= eta && v * v + wn2 <= 1.0) return;
  if (eta == 0.0) {
    // clamp, then rescale radially
    const double vp = std::max(v, 0.0);
    const double norm = std::sqrt(vp * vp + wn2);
    zj[0] = vp;
    if (norm > 1.0) {
      for (int i = 0; i <= k; ++i) zj[i] /= norm;
    }
    return;
  }
  const double norm = std::sqrt(v * v + wn2);
  if (norm > 1.0 && v / norm >= eta) {
    for (int i = 0; i <= k; ++i) zj[i] /= norm;
    return;
  }
  zj[0] = eta;
  const double room = 1.0 - eta * eta;
  if (wn2 > room) {
    const double scale = std::sqrt(room / wn2);
    for (int i = 1; i <= k; ++i) zj[i] *= scale;
  }
}

// Projection onto the cell constraints plus sum_j v_j ds = target. The
// multiplier tau of the linear constraint solves sum_j v_j(tau) ds = target,
// where cell j is projected from (v_j - tau, w_j); the sum decreases in tau.
void project_all(std::vector<double>& z, int m, double eta, double ds, double target) {
  const std::size_t cells = z.size() / m;
  std::vector<double> base = z;
  auto time_of = [&](double tau) {
    double total = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
      double* zj = z.data() + j * m;
      std::copy(base.begin() + j * m, base.begin() + (j + 1) * m, zj);
      zj[0] -= tau;
      project_cell(zj, m - 1, eta);
      total += zj[0] * ds;
    }
    return total;
  };
  double lo = -1.0, hi = 1.0;
  while (time_of(lo) < target && lo > -1e6) lo *= 2.0;
  while (time_of(hi) > target && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (time_of(mid) > target ? lo : hi) = mid;
  }
  time_of(0.5 * (lo + hi));
}

// Nonmonotone spectral projected gradient.
void spg(Transcriber& tr, std::vector<double>& z, double mu, double eta, int max_iter) {
  auto project = [&](std::vector<double>& x) { project_all(x, tr.m, eta, tr.ds, tr.target); };
  constexpr int kMemory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr double kAlphaMin = 1e-10, kAlphaMax = 1e6;
  const std::size_t size = z.size();

  std::vector<double> g, gnew, d(size), trial(size), ys;
  double obj = 0.0;
  if (!tr.gradient(z.data(), mu, g, obj)) return;
  std::deque<double> history{obj};

  // initial step from the unit projected gradient
  for (std::size_t i = 0; i < size; ++i) trial[i] = z[i] - g[i];
  project(trial);
  double pg = 0.0;
  for (std::size_t i = 0; i < size; ++i) pg = std::max(pg, std::abs(trial[i] - z[i]));
  if (pg < 1e-12) return;
  double alpha = std::clamp(1.0 / pg, kAlphaMin, kAlphaMax);

  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < size; ++i) trial[i] = z[i] - alpha * g[i];
    project(trial);
    double dnorm = 0.0, gd = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      d[i] = trial[i] - z[i];
      dnorm = std::max(dnorm, std::abs(d[i]));
      gd += g[i] * d[i];
    }
    if (dnorm < 1e-10 || gd >= 0.0) break;

    const double fref = *std::max_element(history.begin(), history.end());
    double step = 1.0, fnew = kInf;
    bool accepted = false;
    while (step > 1e-12) {
      for (std::size_t i = 0; i < size; ++i) trial[i] = z[i] + step * d[i];
      Transcriber::Pieces pc;
      if (tr.forward(trial.data(), mu, ys, pc)) {
        fnew = pc.cost + pc.penalty;
        if (fnew <= fref + kArmijo * step * gd) {
          accepted = true;
          break;
        }
        // safeguarded quadratic interpolation
        const double denom = 2.0 * (fnew - obj - step * gd);
        double next = denom > 0.0 ? -gd * step * step / denom : 0.5 * step;
        step = std::clamp(next, 0.1 * step, 0.5 * step);
      } else {
        step *= 0.25;
      }
    }
    if (!accepted) break;

    double newobj = 0.0;
    if (!tr.gradient(trial.data(), mu, gnew, newobj)) break;
    double sts = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double s = trial[i] - z[i];
      sts += s * s;
      sty += s * (gnew[i] - g[i]);
    }
    alpha = sty > 0.0 ? std::clamp(sts / sty, kAlphaMin, kAlphaMax) : kAlphaMax;
    z.swap(trial);
    g.swap(gnew);
    obj = newobj;
    history.push_back(obj);
    if (history.size() > kMemory) history.pop_front();
  }
}

std::vector<std::vector<double>> initial_guesses(const RelaxedProblem& p, const SolverOptions& o) {
  const int k = p.sys.k, m = 1 + k, N = o.N;
  const double S = p.budget();
  const double eta = o.v_min;
  std::vector<std::vector<double>> starts;

  for (const auto& [gv, gw] : o.initial_guesses) {
    if (gv.size() != static_cast<std::size_t>(N) || gw.size() != gv.size()) continue;
    std::vector<double> z(static_cast<std::size_t>(N) * m);
    for (int j = 0; j < N; ++j) {
      if (gw[j].size() != k) throw Error(ErrorKind::DimensionMismatch, "initial guess control dimension");
      z[j * m] = gv[j];
      for (int i = 0; i < k; ++i) z[j * m + 1 + i] = gw[j][i];
    }
    project_all(z, m, eta, S / N, p.time_target);
    starts.push_back(std::move(z));
  }

  if (o.warm_starts) {
    const Vec delta = p.x1 - p.x0;
    const Mat G0 = p.sys.G(p.x0);
    const Mat pinv = G0.completeOrthogonalDecomposition().pseudoInverse();
    const Vec w_straight = pinv * (delta - p.sys.f(p.x0)) / S;
    const Vec w_jump = pinv * delta / (0.5 * S);

    std::vector<double> z(static_cast<std::size_t>(N) * m, 0.0);
    for (int j = 0; j < N; ++j) {
      z[j * m] = p.time_target / S;
      for (int i = 0; i < k; ++i) z[j * m + 1 + i] = w_straight[i];
    }
    project_all(z, m, eta, S / N, p.time_target);
    starts.push_back(z);

    const double v_time = std::max(eta, (p.time_target - eta * 0.5 * S) / (0.5 * S));
    for (int order = 0; order < 2; ++order) {
      std::fill(z.begin(), z.end(), 0.0);
      for (int j = 0; j < N; ++j) {
        const bool jump_half = (order == 0) == (j < N / 2);
        if (jump_half) {
          z[j * m] = eta;
          for (int i = 0; i < k; ++i) z[j * m + 1 + i] = w_jump[i];
        } else {
          z[j * m] = v_time;
        }
      }
      project_all(z, m, eta, S / N, p.time_target);
      starts.push_back(z);
    }
  }

  for (int r = 0; r < o.random_starts; ++r) {
    std::mt19937_64 rng(o.seed + 7919ULL * static_cast<std::uint64_t>(r + 1));
    std::uniform_real_distribution<double> vdist(0.5, 1.5);
    std::normal_distribution<double> wdist(0.0, 0.2);
    std::vector<double> z(static_cast<std::size_t>(N) * m);
    for (int j = 0; j < N; ++j) {
      z[j * m] = vdist(rng) * p.time_target / S;
      for (int i = 0; i < k; ++i) z[j * m + 1 + i] = wdist(rng);
    }
    project_all(z, m, eta, S / N, p.time_target);
    starts.push_back(std::move(z));
  }
  return starts;
}

RelaxedSolution assemble(const RelaxedProblem& p, const SolverOptions& o, Transcriber& tr,
                         const std::vector<double>& z) {
  const int n = p.sys.n, k = p.sys.k, m = 1 + k, N = o.N;
  RelaxedSolution sol;
  std::vector<double> ys, running;
  Transcriber::Pieces pc;
  if (!tr.forward(z.data(), 0.0, ys, pc, &running)) {
    throw Error(ErrorKind::BlowUp, "final candidate could not be evaluated");
  }
  sol.grid.resize(N + 1);
  for (int j = 0; j <= N; ++j) sol.grid[j] = j * tr.ds;
  sol.theta.assign(1, 0.0);
  for (int j = 0; j < N; ++j) {
    sol.v.push_back(z[j * m]);
    sol.w.push_back(Eigen::Map<const Vec>(z.data() + j * m + 1, k));
    sol.theta.push_back(sol.theta.back() + tr.ds * z[j * m]);
  }
  for (int j = 0; j <= N; ++j) sol.y.push_back(Eigen::Map<const Vec>(ys.data() + j * n, n));
  sol.running_cost = std::move(running);
  sol.cost = pc.cost;
  sol.endpoint_residual = pc.residual;
  sol.time_residual = std::abs(pc.theta - p.time_target);

  for (int j = 0; j < N; ++j) {
    const bool jump = sol.v[j] < o.v_tol && sol.w[j].norm() >= o.v_tol;
    if (!jump) continue;
    if (!sol.impulse_arcs.empty() && sol.impulse_arcs.back().last + 1 == static_cast<std::size_t>(j)) {
      sol.impulse_arcs.back().last = j;
    } else {
      sol.impulse_arcs.push_back({static_cast<std::size_t>(j), static_cast<std::size_t>(j)});
    }
  }
  return sol;
}

}  // namespace

double RelaxedProblem::budget() const {
  if (S > 0.0) return S;
  return 2.0 * (1.0 + (x1 - x0).norm());
}

void RelaxedProblem::validate() const {
  if (sys.n < 1 || sys.k < 1) throw Error(ErrorKind::InvalidArgument, "system dimensions");
  if (x0.size() != sys.n || x1.size() != sys.n) {
    throw Error(ErrorKind::DimensionMismatch, "boundary states must have dimension n");
  }
  sys.check_dimensions(x0);
  if (!(time_target > 0.0)) throw Error(ErrorKind::InvalidArgument, "time target must be positive");
  if (!spec.L && !spec.auxiliary) throw Error(ErrorKind::InvalidArgument, "lagrangian is empty");
}

std::pair<double, Vec> project_half_ball(double v, const Vec& w) {
  double vp = std::max(v, 0.0);
  Vec wp = w;
  const double norm = std::sqrt(vp * vp + wp.squaredNorm());
  if (norm > 1.0) {
    vp /= norm;
    wp /= norm;
  }
  return {vp, wp};
}

std::pair<double, Vec> project_restricted(double v, const Vec& w, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw Error(ErrorKind::InvalidArgument, "eta must lie in [0, 1)");
  if (eta == 0.0) return project_half_ball(v, w);
  const double wn2 = w.squaredNorm();
  if (v >= eta && v * v + wn2 <= 1.0) return {v, w};

  // The projection lies on the sphere, on the plane v = eta, or on their intersection.
  double best = kInf;
  std::pair<double, Vec> result{eta, Vec::Zero(w.size())};
  auto consider = [&](double cv, const Vec& cw) {
    const double d = (cv - v) * (cv - v) + (cw - w).squaredNorm();
    if (d < best) {
      best = d;
      result = {cv, cw};
    }
  };
  const double norm = std::sqrt(v * v + wn2);
  if (norm > 1.0 && v / norm >= eta) consider(v / norm, w / norm);
  if (eta * eta + wn2 <= 1.0) consider(eta, w);
  const double rho = std::sqrt(1.0 - eta * eta);
  const double wn = std::sqrt(wn2);
  if (wn > 0.0) consider(eta, w * (rho / wn));
  return result;
}

TranscriptionValue evaluate_transcription(const RelaxedProblem& p, const std::vector<double>& v,
                                          const std::vector<Vec>& w, double mu,
                                          const SolverOptions& opts) {
  p.validate();
  SolverOptions o = opts;
  o.N = static_cast<int>(v.size());
  if (w.size() != v.size() || v.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "need one (v, w) per cell");
  }
  const int m = 1 + p.sys.k;
  std::vector<double> z(v.size() * m);
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (w[j].size() != p.sys.k) throw Error(ErrorKind::DimensionMismatch, "control dimension");
    z[j * m] = v[j];
    for (int i = 0; i < p.sys.k; ++i) z[j * m + 1 + i] = w[j][i];
  }
  Transcriber tr(p, o);
  std::vector<double> ys;
  Transcriber::Pieces pc;
  TranscriptionValue out;
  if (!tr.forward(z.data(), mu, ys, pc, &out.running_cost)) {
    out.cost = kInf;
    out.penalty = kInf;
    return out;
  }
  out.cost = pc.cost;
  out.penalty = pc.penalty;
  out.theta.assign(1, 0.0);
  for (std::size_t j = 0; j < v.size(); ++j) out.theta.push_back(out.theta.back() + tr.ds * v[j]);
  for (int j = 0; j <= o.N; ++j) out.y.push_back(Eigen::Map<const Vec>(ys.data() + j * p.sys.n, p.sys.n));
  return out;
}

bool transcription_gradient(const RelaxedProblem& p, const std::vector<double>& v,
                            const std::vector<Vec>& w, double mu, const SolverOptions& opts,
                            std::vector<double>& grad, double& objective) {
  p.validate();
  SolverOptions o = opts;
  o.N = static_cast<int>(v.size());
  const int m = 1 + p.sys.k;
  std::vector<double> z(v.size() * m);
  for (std::size_t j = 0; j < v.size(); ++j) {
    z[j * m] = v[j];
    for (int i = 0; i < p.sys.k; ++i) z[j * m + 1 + i] = w[j][i];
  }
  Transcriber tr(p, o);
  return tr.gradient(z.data(), mu, grad, objective);
}

RelaxedSolution solve_relaxed(const RelaxedProblem& p, const SolverOptions& opts) {
  p.validate();
  if (opts.N < 10) throw Error(ErrorKind::InvalidArgument, "N must be at least 10");
  if (opts.penalties.empty()) throw Error(ErrorKind::InvalidArgument, "empty penalty schedule");
  if (opts.substeps < 1) throw Error(ErrorKind::InvalidArgument, "substeps must be positive");
  if (opts.v_min * p.budget() > p.time_target) {
    throw Error(ErrorKind::Infeasible, "v >= eta over the whole budget overshoots the horizon");
  }

  Transcriber tr(p, opts);
  const auto starts = initial_guesses(p, opts);

  std::optional<RelaxedSolution> best;
  std::size_t feasible = 0;
  double best_residual = kInf;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::vector<double> z = starts[s];
    std::vector<double> ys;
    Transcriber::Pieces pc;
    if (!tr.forward(z.data(), opts.penalties.front(), ys, pc)) continue;
    tr.reset_multipliers();
    for (double mu : opts.penalties) {
      spg(tr, z, mu, opts.v_min, opts.max_iterations);
      tr.update_multipliers(z.data(), mu);
    }
    if (!tr.forward(z.data(), 0.0, ys, pc)) continue;
    const double excess = std::max(0.0, pc.residual - opts.endpoint_slack);
    best_residual = std::min(best_residual, excess);
    if (excess > opts.feas_tol || std::abs(pc.theta - p.time_target) > opts.feas_tol) continue;
    ++feasible;
    if (!best || pc.cost < best->cost) {
      best = assemble(p, opts, tr, z);
      best->start_index = static_cast<int>(s);
    }
  }
  if (!best) {
    throw Error(ErrorKind::Infeasible, "no start met the endpoint tolerance; best residual " +
                                           std::to_string(best_residual));
  }
  best->feasible_starts = feasible;
  return *best;
}

RelaxedSolution solve_restricted(const RelaxedProblem& p, double eta, const SolverOptions& opts) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorKind::InvalidArgument, "eta must lie in (0, 1)");
  SolverOptions o = opts;
  o.v_min = eta;
  return solve_relaxed(p, o);
}

GeneralizedControl to_generalized_control(const RelaxedSolution& sol) {
  if (sol.v.empty()) throw Error(ErrorKind::InvalidArgument, "empty solution");
  const int k = static_cast<int>(sol.w.front().size());
  std::vector<double> params;
  std::vector<Vec> points;
  Vec W = Vec::Zero(k);
  Vec p(1 + k);
  p.setZero();
  params.push_back(0.0);
  points.push_back(p);
  for (std::size_t j = 0; j < sol.v.size(); ++j) {
    const double ds = sol.grid[j + 1] - sol.grid[j];
    W += ds * sol.w[j];
    p[0] = sol.theta[j + 1];
    p.tail(k) = W;
    params.push_back(sol.grid[j + 1]);
    points.push_back(p);
  }
  const double horizon = 1.0;
  if (sol.theta.back() < horizon) {
    p[0] = horizon;
    params.push_back(params.back() + (horizon - sol.theta.back()));
    points.push_back(p);
  }
  return GeneralizedControl::from_curve(SampledCurve(std::move(params), std::move(points)), horizon);
}

OrdinaryControl to_ordinary(const RelaxedSolution& sol) {
  std::vector<double> times{0.0};
  std::vector<Vec> values;
  for (std::size_t j = 0; j < sol.v.size(); ++j) {
    if (!(sol.v[j] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "cell " + std::to_string(j) + " has v = 0");
    }
    times.push_back(sol.theta[j + 1]);
    values.push_back(sol.w[j] / sol.v[j]);
  }
  return OrdinaryControl(std::move(times), std::move(values));
}

ProfileReport analyze_profile(const RelaxedSolution& sol, double tolerance, double active_norm,
                              double v_tol) {
  ProfileReport r;
  r.min_vhat = kInf;
  double running_min = kInf;
  double last_v = 0.0;
  for (std::size_t j = 0; j < sol.v.size(); ++j) {
    const double norm = std::sqrt(sol.v[j] * sol.v[j] + sol.w[j].squaredNorm());
    if (norm < active_norm) continue;
    const double vhat = sol.v[j] / norm;
    r.vhat.push_back(vhat);
    r.min_vhat = std::min(r.min_vhat, vhat);
    if (running_min < kInf) r.max_increase = std::max(r.max_increase, vhat - running_min);
    running_min = std::min(running_min, vhat);
    last_v = sol.v[j];
  }
  r.active_cells = r.vhat.size();
  if (r.active_cells == 0) r.min_vhat = 0.0;
  r.nonincreasing = r.active_cells > 0 && r.max_increase <= tolerance;
  r.terminal_impulse = r.active_cells > 0 && last_v < v_tol;
  return r;
}

std::optional<double> GapReport::restricted_cost(std::size_t i) const {
  if (eps_values.empty()) return std::nullopt;
  return cells.at(i * eps_values.size() + eps_values.size() - 1).cost;
}

GapReport gap_probe(const RelaxedProblem& p, const std::vector<double>& eta_list,
                    const std::vector<double>& eps_list, const SolverOptions& opts,
                    double gap_tol) {
  if (eta_list.empty() || eps_list.empty()) {
    throw Error(ErrorKind::InvalidArgument, "eta and eps lists must be nonempty");
  }
  for (std::size_t i = 1; i < eta_list.size(); ++i) {
    if (!(eta_list[i] < eta_list[i - 1])) throw Error(ErrorKind::InvalidArgument, "eta list must decrease");
  }
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) throw Error(ErrorKind::InvalidArgument, "eps list must decrease");
  }

  GapReport report;
  report.eta_values = eta_list;
  report.eps_values = eps_list;
  report.gap_tol = gap_tol;
  SolverOptions base = opts;
  base.v_min = 0.0;
  base.endpoint_slack = 0.0;
  report.generalized_cost = solve_relaxed(p, base).cost;

  // Feasible sets nest as eta decreases, so each restricted optimum seeds the
  // next solve with the same eps.
  std::vector<std::optional<RelaxedSolution>> previous(eps_list.size());
  std::optional<double> best;
  for (double eta : eta_list) {
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
      const double eps = eps_list[e];
      GapCell cell{eta, eps, std::nullopt, 0.0, ""};
      SolverOptions o = opts;
      o.endpoint_slack = eps;
      if (previous[e]) o.initial_guesses.emplace_back(previous[e]->v, previous[e]->w);
      try {
        RelaxedSolution sol = solve_restricted(p, eta, o);
        cell.cost = sol.cost;
        cell.endpoint_residual = sol.endpoint_residual;
        previous[e] = std::move(sol);
      } catch (const Error& e) {
        cell.note = e.what();
      }
      if (eps == eps_list.back() && cell.cost) best = best ? std::min(*best, *cell.cost) : *cell.cost;
      report.cells.push_back(std::move(cell));
    }
  }
  if (best) {
    report.gap_estimate = *best - report.generalized_cost;
    report.gap_detected = *report.gap_estimate > gap_tol;
  }
  return report;
}

}  // namespace impopt

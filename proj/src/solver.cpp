#include "laa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace laa {

namespace {
constexpr double kLogFloor = 1e-300;
}

double SmoothFn::value(const Eigen::VectorXd& z) const {
  double v = constant;
  if (lin.size() > 0) v += lin.dot(z);
  if (quad_diag.size() > 0) v += quad_diag.cwiseProduct(z.cwiseProduct(z)).sum();
  for (const auto& t : logs) {
    double arg = t.a.dot(z) + t.b;
    v += t.coef * std::log(std::max(arg, kLogFloor));
  }
  return v;
}

void SmoothFn::add_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& g,
                            double scale) const {
  if (lin.size() > 0) g += scale * lin;
  if (quad_diag.size() > 0) g += 2.0 * scale * quad_diag.cwiseProduct(z);
  for (const auto& t : logs) {
    double arg = std::max(t.a.dot(z) + t.b, kLogFloor);
    double c = scale * t.coef / arg;
    for (std::size_t i = 0; i < t.a.idx.size(); ++i)
      g[t.a.idx[i]] += c * t.a.w[i];
  }
}

void SmoothFn::add_hessian(const Eigen::VectorXd& z, Eigen::MatrixXd& h,
                           double scale) const {
  if (quad_diag.size() > 0)
    h.diagonal() += 2.0 * scale * quad_diag;
  for (const auto& t : logs) {
    double arg = std::max(t.a.dot(z) + t.b, kLogFloor);
    double c = -scale * t.coef / (arg * arg);  // PSD for coef <= 0
    const auto& idx = t.a.idx;
    const auto& w = t.a.w;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        h(idx[i], idx[j]) += c * w[i] * w[j];
  }
}

bool SmoothFn::is_convex_form() const {
  for (const auto& t : logs)
    if (t.coef > 0.0) return false;
  if (quad_diag.size() > 0 && quad_diag.minCoeff() < 0.0) return false;
  return true;
}

void ConvexProblem::add_box(int i, double lo, double hi) {
  SparseRow below;
  below.add(i, -1.0);
  add_row(std::move(below), -lo);
  SparseRow above;
  above.add(i, 1.0);
  add_row(std::move(above), hi);
}

namespace {

struct BarrierEval {
  double phi = 0.0;  // F + mu * barrier
  bool in_domain = true;
};

BarrierEval eval_phi(const ConvexProblem& pb, const Eigen::VectorXd& z,
                     double mu) {
  BarrierEval e;
  double f = pb.objective.value(z);
  if (!std::isfinite(f)) throw std::runtime_error("solver: non-finite objective");
  e.phi = f;
  for (std::size_t i = 0; i < pb.rows.size(); ++i) {
    double s = pb.rhs[i] - pb.rows[i].dot(z);
    if (s <= 0.0) {
      e.in_domain = false;
      return e;
    }
    e.phi -= mu * std::log(s);
  }
  for (const auto& c : pb.nl_constraints) {
    double v = c.value(z);
    if (v >= 0.0) {
      e.in_domain = false;
      return e;
    }
    e.phi -= mu * std::log(-v);
  }
  return e;
}

}  // namespace

SolveResult solve(const ConvexProblem& pb, const Eigen::VectorXd& start,
                  double tol, int max_iter) {
  const int n = pb.n;
  Eigen::VectorXd z = start;

  // strict feasibility of the start
  for (std::size_t i = 0; i < pb.rows.size(); ++i)
    if (pb.rhs[i] - pb.rows[i].dot(z) <= 0.0)
      throw std::invalid_argument("solver: start not strictly feasible (row " +
                                  std::to_string(i) + ")");
  for (std::size_t j = 0; j < pb.nl_constraints.size(); ++j)
    if (pb.nl_constraints[j].value(z) >= 0.0)
      throw std::invalid_argument(
          "solver: start not strictly feasible (nl constraint " +
          std::to_string(j) + ")");

  SolveResult res;
  Eigen::VectorXd grad(n), d(n), zt(n);
  Eigen::MatrixXd hess(n, n);
  int iters = 0;
  bool hit_limit = false;

  // barrier floor tracks the requested accuracy (never below 1e-12)
  const double mu_floor = 0.99 * std::max(tol, 1e-12);
  for (double mu = 1.0; mu >= mu_floor && !hit_limit; mu *= 0.1) {
    for (int inner = 0; inner < 50; ++inner) {
      if (iters >= max_iter) {
        hit_limit = true;
        break;
      }
      ++iters;

      // gradient and Hessian of F + mu * barrier
      grad.setZero();
      pb.objective.add_gradient(z, grad);
      hess.setZero();
      pb.objective.add_hessian(z, hess);
      for (std::size_t i = 0; i < pb.rows.size(); ++i) {
        double s = pb.rhs[i] - pb.rows[i].dot(z);
        const auto& r = pb.rows[i];
        double gc = mu / s;
        double hc = mu / (s * s);
        for (std::size_t a = 0; a < r.idx.size(); ++a) {
          grad[r.idx[a]] += gc * r.w[a];
          for (std::size_t b = 0; b < r.idx.size(); ++b)
            hess(r.idx[a], r.idx[b]) += hc * r.w[a] * r.w[b];
        }
      }
      for (const auto& c : pb.nl_constraints) {
        double v = c.value(z);  // < 0 in the interior
        Eigen::VectorXd cg = Eigen::VectorXd::Zero(n);
        c.add_gradient(z, cg);
        grad += (-mu / v) * cg;
        hess += (mu / (v * v)) * (cg * cg.transpose());
        c.add_hessian(z, hess, -mu / v);
      }

      // Newton direction with gradient fallback
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      bool newton_ok = ldlt.info() == Eigen::Success;
      if (newton_ok) {
        d = ldlt.solve(-grad);
        double gd = grad.dot(d);
        if (!d.allFinite() || gd >= 0.0) newton_ok = false;
      }
      if (!newton_ok) d = -grad;
      double gd = grad.dot(d);
      double decrement = -0.5 * gd;

      BarrierEval cur = eval_phi(pb, z, mu);
      if (decrement <= 1e-13 * (1.0 + std::abs(cur.phi))) break;

      // ratio test against linear rows, then backtrack into the domain
      double alpha = 1.0;
      for (std::size_t i = 0; i < pb.rows.size(); ++i) {
        double delta = pb.rows[i].dot(d);
        if (delta > 0.0) {
          double s = pb.rhs[i] - pb.rows[i].dot(z);
          alpha = std::min(alpha, 0.99 * s / delta);
        }
      }
      bool stepped = false;
      for (int bt = 0; bt < 60; ++bt) {
        zt = z + alpha * d;
        BarrierEval e = eval_phi(pb, zt, mu);
        if (e.in_domain && e.phi <= cur.phi + 1e-4 * alpha * gd) {
          z = zt;
          stepped = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!stepped) break;  // step stalled at numerical precision
    }
  }

  res.z = z;
  res.converged = !hit_limit;
  res.newton_iters = iters;
  res.objective = pb.objective.value(z);
  return res;
}

SolutionReport validate_solution(const ConvexProblem& pb,
                                 const Eigen::VectorXd& z) {
  const int n = pb.n;
  SolutionReport rep;
  rep.objective = pb.objective.value(z);

  rep.slacks.reserve(pb.rows.size());
  std::vector<Eigen::VectorXd> active_normals;
  for (std::size_t i = 0; i < pb.rows.size(); ++i) {
    double s = pb.rhs[i] - pb.rows[i].dot(z);
    rep.slacks.push_back(s);
    if (s < 0.0) {
      rep.max_violation = std::max(rep.max_violation, -s);
      rep.violated.push_back("row " + std::to_string(i) + " violated by " +
                             std::to_string(-s));
    }
    if (s <= 1e-6 * (1.0 + std::abs(pb.rhs[i]))) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      for (std::size_t q = 0; q < pb.rows[i].idx.size(); ++q)
        a[pb.rows[i].idx[q]] = pb.rows[i].w[q];
      active_normals.push_back(std::move(a));
    }
  }
  for (std::size_t j = 0; j < pb.nl_constraints.size(); ++j) {
    double v = pb.nl_constraints[j].value(z);
    rep.nl_values.push_back(v);
    if (v > 0.0) {
      rep.max_violation = std::max(rep.max_violation, v);
      rep.violated.push_back("nl " + std::to_string(j) + " violated by " +
                             std::to_string(v));
    }
    if (v >= -1e-6) {
      Eigen::VectorXd cg = Eigen::VectorXd::Zero(n);
      pb.nl_constraints[j].add_gradient(z, cg);
      active_normals.push_back(std::move(cg));
    }
  }

  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  pb.objective.add_gradient(z, g);
  // KKT stationarity: min over nu >= 0 of ||g + A_act^T nu||, via least
  // squares with iterative removal of negative multipliers.
  std::vector<int> live(active_normals.size());
  for (std::size_t i = 0; i < live.size(); ++i) live[i] = static_cast<int>(i);
  Eigen::VectorXd resid = g;
  for (int pass = 0; pass < 32 && !live.empty(); ++pass) {
    Eigen::MatrixXd a(n, live.size());
    for (std::size_t c = 0; c < live.size(); ++c)
      a.col(c) = active_normals[live[c]];
    Eigen::VectorXd nu = a.colPivHouseholderQr().solve(-g);
    int worst = -1;
    double worst_v = -1e-12;
    for (int c = 0; c < nu.size(); ++c)
      if (nu[c] < worst_v) {
        worst_v = nu[c];
        worst = c;
      }
    if (worst < 0) {
      resid = g + a * nu;
      break;
    }
    live.erase(live.begin() + worst);
    resid = g;  // recomputed next pass (or stays = g if none left)
  }
  rep.pg_norm = resid.norm();
  return rep;
}

}  // namespace laa

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace laa {

/// Sparse linear form a.z (indices into the variable vector plus weights).
struct SparseRow {
  std::vector<int> idx;
  std::vector<double> w;

  void add(int i, double v) {
    idx.push_back(i);
    w.push_back(v);
  }
  double dot(const Eigen::VectorXd& z) const {
    double s = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) s += w[i] * z[idx[i]];
    return s;
  }
};

/// coef * ln(a.z + b); convex when coef <= 0.
struct LogTerm {
  double coef = 0.0;
  SparseRow a;
  double b = 0.0;
};

/// Smooth function of the form
///   constant + lin.z + sum_i quad_diag_i z_i^2 + sum_t coef_t ln(a_t.z + b_t).
/// Covers the objectives, the D.C. surrogate pieces, and the convexified
/// rate constraints. Convex iff all log coefs <= 0 and quad_diag >= 0.
struct SmoothFn {
  int n = 0;
  double constant = 0.0;
  Eigen::VectorXd lin;        // size n (or empty for zero)
  Eigen::VectorXd quad_diag;  // size n (or empty for none)
  std::vector<LogTerm> logs;

  explicit SmoothFn(int n_vars = 0) : n(n_vars) {}

  double value(const Eigen::VectorXd& z) const;
  void add_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& g,
                    double scale = 1.0) const;
  /// Adds scale * Hessian(z); only valid for convex instances (coef <= 0).
  void add_hessian(const Eigen::VectorXd& z, Eigen::MatrixXd& h,
                   double scale = 1.0) const;
  bool is_convex_form() const;
};

/// minimize objective(z)
///   s.t. rows_i . z <= rhs_i            (linear, includes boxes)
///        nl_constraints_j(z) <= 0       (smooth convex)
struct ConvexProblem {
  int n = 0;
  SmoothFn objective;
  std::vector<SparseRow> rows;
  std::vector<double> rhs;
  std::vector<SmoothFn> nl_constraints;

  void add_row(SparseRow row, double b) {
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
  void add_box(int i, double lo, double hi);
};

struct SolveResult {
  Eigen::VectorXd z;
  bool converged = false;
  int newton_iters = 0;
  double objective = 0.0;
};

/// Log-barrier interior-point solve. The start must be strictly feasible
/// (throws std::invalid_argument otherwise). Barrier parameter decreases
/// x10 per outer stage from 1 to 1e-8; inner Newton with Armijo
/// backtracking, gradient fallback on an ill-conditioned Newton system.
/// NaN/Inf in the objective is a hard error (std::runtime_error); hitting
/// max_iter returns the best iterate with converged = false.
SolveResult solve(const ConvexProblem& problem, const Eigen::VectorXd& start,
                  double tol = 1e-8, int max_iter = 200);

struct SolutionReport {
  double objective = 0.0;
  double max_violation = 0.0;  // positive = infeasible amount
  double pg_norm = 0.0;        // KKT residual from an NNLS multiplier fit
  std::vector<double> slacks;      // linear rows
  std::vector<double> nl_values;   // nonlinear constraints (should be <= 0)
  std::vector<std::string> violated;  // names "row i" / "nl j" with amounts
};

SolutionReport validate_solution(const ConvexProblem& problem,
                                 const Eigen::VectorXd& z);

}  // namespace laa

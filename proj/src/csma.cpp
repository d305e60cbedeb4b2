#include "laa/csma.hpp"

#include <algorithm>
#include <cmath>

namespace laa {

BackoffLadder BackoffLadder::binary_exponential(double cw_min, int stages) {
  BackoffLadder ladder;
  ladder.mean_backoffs.reserve(stages);
  double b = cw_min / 2.0;
  for (int j = 0; j < stages; ++j) {
    ladder.mean_backoffs.push_back(b);
    b *= 2.0;
  }
  return ladder;
}

double attempt_prob(double p, const BackoffLadder& ladder) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("attempt_prob: p outside [0,1]");
  double num = 0.0, den = 0.0, pj = 1.0;
  for (double b : ladder.mean_backoffs) {
    num += pj;
    den += pj * b;
    pj *= p;
  }
  return num / den;
}

CollisionProbs collision_probs(double tau_w, double tau_l, int n_wifi) {
  CollisionProbs out{};
  out.p_l = 1.0 - std::pow(1.0 - tau_w, n_wifi);
  if (n_wifi >= 1) {
    out.p_w = 1.0 - std::pow(1.0 - tau_w, n_wifi - 1) * (1.0 - tau_l);
    out.p_w_defined = true;
  } else {
    out.p_w = 0.0;
    out.p_w_defined = false;
  }
  return out;
}

namespace {
double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

double fixed_point_defect(const CoexistencePoint& pt, int n_wifi,
                          const BackoffLadder& wifi_ladder,
                          const BackoffLadder& sbs_ladder) {
  double d = std::abs(pt.tau_l - attempt_prob(pt.p_l, sbs_ladder));
  if (n_wifi >= 1) {
    d = std::max(d, std::abs(pt.tau_w - attempt_prob(pt.p_w, wifi_ladder)));
  } else {
    d = std::max(d, std::abs(pt.tau_w));
  }
  auto cp = collision_probs(pt.tau_w, pt.tau_l, n_wifi);
  d = std::max(d, std::abs(pt.p_l - cp.p_l));
  if (cp.p_w_defined) d = std::max(d, std::abs(pt.p_w - cp.p_w));
  return d;
}

CoexistencePoint solve_fixed_point(int n_wifi, const BackoffLadder& wifi_ladder,
                                   const BackoffLadder& sbs_ladder, double tol,
                                   int max_iter, double damping) {
  CoexistencePoint pt;
  if (n_wifi <= 0) {
    pt.tau_w = 0.0;
    pt.p_w = 0.0;
    pt.p_l = 0.0;
    pt.tau_l = attempt_prob(0.0, sbs_ladder);
    pt.residual = 0.0;
    pt.iterations = 0;
    return pt;
  }

  double pw = 0.5, pl = 0.5;
  for (int it = 1; it <= max_iter; ++it) {
    double tw = attempt_prob(pw, wifi_ladder);
    double tl = attempt_prob(pl, sbs_ladder);
    auto cp = collision_probs(tw, tl, n_wifi);
    double pw_new = clamp01((1.0 - damping) * pw + damping * cp.p_w);
    double pl_new = clamp01((1.0 - damping) * pl + damping * cp.p_l);
    pw = pw_new;
    pl = pl_new;

    pt.tau_w = attempt_prob(pw, wifi_ladder);
    pt.tau_l = attempt_prob(pl, sbs_ladder);
    pt.p_w = pw;
    pt.p_l = pl;
    pt.iterations = it;
    pt.residual = fixed_point_defect(pt, n_wifi, wifi_ladder, sbs_ladder);
    if (pt.residual <= tol) return pt;
  }
  throw FixedPointError("solve_fixed_point: no convergence after max_iter", pt);
}

double success_prob(const CoexistencePoint& point, int n_wifi) {
  return point.tau_l * std::pow(1.0 - point.tau_w, n_wifi);
}

}  // namespace laa

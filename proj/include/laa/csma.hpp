#pragma once

#include <stdexcept>
#include <vector>

namespace laa {

/// Mean backoff duration per retransmission stage (b_0..b_{K-1}) for the
/// Bianchi-style decoupled CSMA model.
struct BackoffLadder {
  std::vector<double> mean_backoffs;

  int max_retx() const { return static_cast<int>(mean_backoffs.size()); }

  /// 802.11 DCF binary-exponential default: b_j = 2^j * cw_min / 2.
  static BackoffLadder binary_exponential(double cw_min = 16.0, int stages = 5);
};

/// Solved attempt/collision probabilities on one unlicensed channel.
struct CoexistencePoint {
  double tau_w = 0.0;  // Wi-Fi attempt probability
  double tau_l = 0.0;  // SBS attempt probability
  double p_w = 0.0;    // Wi-Fi collision probability
  double p_l = 0.0;    // SBS collision probability
  double residual = 0.0;
  int iterations = 0;
};

struct FixedPointError : std::runtime_error {
  CoexistencePoint last;
  FixedPointError(const std::string& msg, CoexistencePoint pt)
      : std::runtime_error(msg), last(pt) {}
};

/// Attempt probability for a given collision probability p:
///   (1 + p + ... + p^{K-1}) / (b_0 + p b_1 + ... + p^{K-1} b_{K-1}).
/// Throws std::domain_error if p is outside [0,1].
double attempt_prob(double p, const BackoffLadder& ladder);

/// Collision probabilities seen by Wi-Fi nodes and the SBS given attempt
/// probabilities and N Wi-Fi nodes:
///   p_w = 1 - (1-tau_w)^{N-1} (1-tau_l),  p_l = 1 - (1-tau_w)^N.
/// With N = 0 p_w has no meaning; it is returned as 0 and callers apply the
/// N = 0 convention of solve_fixed_point.
struct CollisionProbs {
  double p_w;
  double p_l;
  bool p_w_defined;
};
CollisionProbs collision_probs(double tau_w, double tau_l, int n_wifi);

/// Solve the coupled fixed point by damped Picard iteration on (p_w, p_l),
/// new = (1-alpha) old + alpha map(old). Convention for N = 0: tau_w = 0,
/// p_w = 0, p_l = 0, tau_l = attempt_prob(0, sbs_ladder).
/// Throws FixedPointError when the defect is still above tol after max_iter.
CoexistencePoint solve_fixed_point(int n_wifi, const BackoffLadder& wifi_ladder,
                                   const BackoffLadder& sbs_ladder,
                                   double tol = 1e-10, int max_iter = 500,
                                   double damping = 0.5);

/// Airtime fraction won by the SBS: tau_l (1-tau_w)^N.
double success_prob(const CoexistencePoint& point, int n_wifi);

/// Max defect of the four fixed-point equations at the given point.
double fixed_point_defect(const CoexistencePoint& point, int n_wifi,
                          const BackoffLadder& wifi_ladder,
                          const BackoffLadder& sbs_ladder);

}  // namespace laa

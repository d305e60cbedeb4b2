#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "laa/csma.hpp"

using namespace laa;

namespace {

BackoffLadder ladder(std::initializer_list<double> b) {
  BackoffLadder l;
  l.mean_backoffs = b;
  return l;
}

}  // namespace

TEST_CASE("attempt_prob closed forms") {
  BackoffLadder b3 = ladder({8, 16, 32});
  CHECK(attempt_prob(0.0, b3) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(attempt_prob(1.0, b3) == doctest::Approx(3.0 / 56.0).epsilon(1e-12));
  // (1 + 0.3 + 0.09) / (8 + 0.3*16 + 0.09*32)
  CHECK(attempt_prob(0.3, b3) ==
        doctest::Approx(0.088647959184).epsilon(1e-9));
  CHECK_THROWS_AS(attempt_prob(-0.1, b3), std::domain_error);
  CHECK_THROWS_AS(attempt_prob(1.1, b3), std::domain_error);
}

TEST_CASE("binary exponential default ladder") {
  BackoffLadder d = BackoffLadder::binary_exponential();
  REQUIRE(d.max_retx() == 5);
  CHECK(d.mean_backoffs == std::vector<double>{8, 16, 32, 64, 128});
}

TEST_CASE("collision_probs closed forms") {
  auto c = collision_probs(0.0, 0.0, 5);
  CHECK(c.p_w == doctest::Approx(0.0));
  CHECK(c.p_l == doctest::Approx(0.0));

  c = collision_probs(0.5, 0.0, 2);
  CHECK(c.p_w == doctest::Approx(0.5));
  CHECK(c.p_l == doctest::Approx(0.75));

  c = collision_probs(0.1, 0.2, 3);
  CHECK(c.p_w == doctest::Approx(1.0 - 0.81 * 0.8).epsilon(1e-12));
  CHECK(c.p_l == doctest::Approx(1.0 - 0.729).epsilon(1e-12));

  c = collision_probs(0.3, 0.2, 0);
  CHECK(c.p_l == doctest::Approx(0.0));
  CHECK_FALSE(c.p_w_defined);
}

TEST_CASE("fixed point: N = 0 convention") {
  BackoffLadder b3 = ladder({8, 16, 32});
  CoexistencePoint pt = solve_fixed_point(0, b3, b3);
  CHECK(pt.tau_w == doctest::Approx(0.0));
  CHECK(pt.p_w == doctest::Approx(0.0));
  CHECK(pt.p_l == doctest::Approx(0.0));
  CHECK(pt.tau_l == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(success_prob(pt, 0) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("fixed point matches frozen independent-iteration oracle") {
  // Golden values from a separate fixed-point iteration (different damping,
  // different iteration variable ordering) run to 1e-14.
  BackoffLadder b5 = BackoffLadder::binary_exponential();
  struct Golden {
    int n;
    double tau, p;
  };
  const Golden golden[] = {
      {1, 0.109658358716, 0.109658358716},
      {2, 0.097266883195, 0.185072919824},
      {5, 0.074019143238, 0.319214899991},
      {10, 0.056024803198, 0.438168826679},
      {20, 0.041326667180, 0.570054965546},
  };
  for (const Golden& g : golden) {
    CAPTURE(g.n);
    CoexistencePoint pt = solve_fixed_point(g.n, b5, b5, 1e-10, 500);
    CHECK(pt.residual <= 1e-9);
    CHECK(pt.iterations <= 500);
    CHECK(std::abs(pt.tau_w - g.tau) <= 1e-8);
    CHECK(std::abs(pt.tau_l - g.tau) <= 1e-8);
    CHECK(std::abs(pt.p_w - g.p) <= 1e-8);
    CHECK(std::abs(pt.p_l - g.p) <= 1e-8);
  }
  // shorter ladder instance, same oracle
  BackoffLadder b3 = ladder({8, 16, 32});
  CoexistencePoint pt = solve_fixed_point(5, b3, b3, 1e-10, 500);
  CHECK(std::abs(pt.tau_w - 0.083695345188) <= 1e-8);
  CHECK(std::abs(pt.p_l - 0.354049165109) <= 1e-8);
}

TEST_CASE("success_prob closed forms and solved value") {
  CoexistencePoint pt;
  pt.tau_l = 0.2;
  pt.tau_w = 0.1;
  CHECK(success_prob(pt, 2) == doctest::Approx(0.162).epsilon(1e-12));
  pt.tau_w = 1.0;
  CHECK(success_prob(pt, 1) == doctest::Approx(0.0));

  BackoffLadder b5 = BackoffLadder::binary_exponential();
  CoexistencePoint solved = solve_fixed_point(5, b5, b5);
  CHECK(success_prob(solved, 5) ==
        doctest::Approx(0.050391129832).epsilon(1e-7));
}

TEST_CASE("fixed-point defect and probability ranges") {
  BackoffLadder b5 = BackoffLadder::binary_exponential();
  for (int n = 0; n <= 30; ++n) {
    CoexistencePoint pt = solve_fixed_point(n, b5, b5, 1e-10, 500);
    CHECK(fixed_point_defect(pt, n, b5, b5) <= 1e-9);
    for (double v : {pt.tau_w, pt.tau_l, pt.p_w, pt.p_l}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("success probability monotone non-increasing in N") {
  BackoffLadder b5 = BackoffLadder::binary_exponential();
  double prev = 2.0;
  for (int n = 0; n <= 30; ++n) {
    CoexistencePoint pt = solve_fixed_point(n, b5, b5);
    double p = success_prob(pt, n);
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
  CoexistencePoint p1 = solve_fixed_point(1, b5, b5);
  CoexistencePoint p10 = solve_fixed_point(10, b5, b5);
  CHECK(success_prob(p1, 1) > success_prob(p10, 10));
}

TEST_CASE("uniqueness probe: independent iterations agree from any start") {
  // The solver starts from p = 0.5; re-run the map by hand from p in
  // {0, 0.5, 0.99} and confirm all converge to the same point within 10*tol.
  BackoffLadder b5 = BackoffLadder::binary_exponential();
  const int n = 5;
  CoexistencePoint ref = solve_fixed_point(n, b5, b5, 1e-10, 500);
  for (double start : {0.0, 0.5, 0.99}) {
    double pw = start, pl = start;
    for (int it = 0; it < 20000; ++it) {
      double tw = attempt_prob(pw, b5);
      double tl = attempt_prob(pl, b5);
      CollisionProbs c = collision_probs(tw, tl, n);
      double npw = 0.5 * pw + 0.5 * c.p_w;
      double npl = 0.5 * pl + 0.5 * c.p_l;
      if (std::abs(npw - pw) < 1e-13 && std::abs(npl - pl) < 1e-13) {
        pw = npw;
        pl = npl;
        break;
      }
      pw = npw;
      pl = npl;
    }
    CHECK(std::abs(pw - ref.p_w) <= 1e-9);
    CHECK(std::abs(pl - ref.p_l) <= 1e-9);
  }
}

TEST_CASE("non-convergence carries the last iterate") {
  BackoffLadder b5 = BackoffLadder::binary_exponential();
  try {
    solve_fixed_point(5, b5, b5, 1e-10, 2);
    FAIL("expected FixedPointError");
  } catch (const FixedPointError& e) {
    CHECK(e.last.iterations >= 2);
    CHECK(e.last.residual > 1e-10);
  }
}

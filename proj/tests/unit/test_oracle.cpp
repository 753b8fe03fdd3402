#include <cmath>
#include <random>

#include "doctest.h"
#include "sepspec/oracle.hpp"
#include "sepspec/potential.hpp"

using namespace sepspec;

namespace {

PotentialModel harmonic() { return {Polynomial({0.0, 0.0, 0.5}), 8.0}; }

}  // namespace

TEST_CASE("discretization stencil") {
  PotentialModel zero{Polynomial({0.0}), 1.0};
  Grid g{1.0, 3};
  auto T = discretize(zero, 1.0, g);
  CHECK(g.step() == doctest::Approx(0.5));
  for (double d : T.diagonal) CHECK(d == doctest::Approx(4.0));
  for (double o : T.offdiagonal) CHECK(o == doctest::Approx(-2.0));

  auto Th = discretize(harmonic(), 1.0, g);
  for (int i = 0; i < 3; ++i)
    CHECK(Th.diagonal[i] - T.diagonal[i] == doctest::Approx(0.5 * g.x(i) * g.x(i)));
  CHECK(Th.offdiagonal == T.offdiagonal);  // multiplication operator is diagonal
}

TEST_CASE("sturm counts at the spectrum edges and monotonicity") {
  Grid g{6.0, 500};
  auto T = discretize(harmonic(), 0.3, g);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < T.size(); ++i) {
    double r = (i > 0 ? std::fabs(T.offdiagonal[i - 1]) : 0.0) +
               (i + 1 < T.size() ? std::fabs(T.offdiagonal[i]) : 0.0);
    lo = std::min(lo, T.diagonal[i] - r);
    hi = std::max(hi, T.diagonal[i] + r);
  }
  CHECK(sturm_count(T, lo - 1.0) == 0);
  CHECK(sturm_count(T, hi + 1.0) == T.size());

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> un(lo, hi);
  std::vector<double> shifts(1000);
  for (auto& s : shifts) s = un(rng);
  std::sort(shifts.begin(), shifts.end());
  int prev = 0;
  for (double s : shifts) {
    int c = sturm_count(T, s);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("harmonic spectrum h(n + 1/2)") {
  Grid g{8.0, 4000};
  auto T = discretize(harmonic(), 0.1, g);
  auto ev = eigen_window(T, 0.0, 0.6, 1e-10);
  REQUIRE(ev.size() >= 3);
  for (int n = 0; n < 3; ++n) CHECK(std::fabs(ev[n] - 0.1 * (n + 0.5)) < 1e-5);
  // window count consistency
  CHECK(static_cast<int>(ev.size()) == sturm_count(T, 0.6) - sturm_count(T, 0.0));
}

TEST_CASE("harmonic eigenvalues scale linearly in h") {
  Grid g{8.0, 6000};
  auto e1 = eigen_window(discretize(harmonic(), 0.1, g), 0.0, 0.4, 1e-11);
  auto e2 = eigen_window(discretize(harmonic(), 0.2, g), 0.0, 0.8, 1e-11);
  REQUIRE(e1.size() >= 3);
  for (int n = 0; n < 3; ++n) CHECK(e2[n] == doctest::Approx(2.0 * e1[n]).epsilon(1e-4));
}

TEST_CASE("second-order convergence: Richardson ratios near 4") {
  auto V = harmonic();
  auto ratios_at = [&](int n0) {
    Grid ga{8.0, n0}, gb{8.0, 2 * n0}, gc{8.0, 4 * n0};
    auto ea = eigen_window(discretize(V, 0.1, ga), 0.0, 0.5, 1e-12);
    auto eb = eigen_window(discretize(V, 0.1, gb), 0.0, 0.5, 1e-12);
    auto ec = eigen_window(discretize(V, 0.1, gc), 0.0, 0.5, 1e-12);
    REQUIRE(ea.size() == eb.size());
    REQUIRE(eb.size() == ec.size());
    for (size_t i = 0; i < ea.size(); ++i) {
      double r = (ea[i] - eb[i]) / (eb[i] - ec[i]);
      CHECK(r > 3.5);
      CHECK(r < 4.5);
    }
  };
  ratios_at(2000);
}

TEST_CASE("full solve on the double well: doublets, simplicity, parity") {
  auto V = parse_potential("x^4 - x^2");
  auto os = solve(V, 0.05, -0.3, 0.3, 1e-7);
  REQUIRE(os.converged);
  REQUIRE(os.eigenvalues.size() >= 8);
  for (size_t i = 0; i + 1 < os.eigenvalues.size(); ++i)
    CHECK(os.eigenvalues[i + 1] > os.eigenvalues[i]);  // all simple
  for (double e : os.richardson_error) CHECK(e < 1e-7);

  // below the barrier the spectrum pairs up; above it does not
  double tight_below = os.eigenvalues[1] - os.eigenvalues[0];
  CHECK(tight_below < 1e-4);

  auto T = discretize(V, 0.05, os.grid);
  double sign = eigenvector_parity(T, os.eigenvalues[0]);
  CHECK(sign > 0.9);  // ground state symmetric
  for (size_t i = 0; i + 1 < os.eigenvalues.size(); ++i) {
    double p0 = eigenvector_parity(T, os.eigenvalues[i]);
    double p1 = eigenvector_parity(T, os.eigenvalues[i + 1]);
    CHECK(p0 * p1 < -0.8);  // parity alternates with the index
  }
}

TEST_CASE("domain insensitivity past the turning points") {
  auto V = parse_potential("x^4 - x^2");
  const double h = 0.05;
  Grid g1{1.4, 40000}, g2{1.75, 50000};  // same step, 25% wider box
  auto e1 = eigen_window(discretize(V, h, g1), -0.22, 0.0, 1e-9);
  auto e2 = eigen_window(discretize(V, h, g2), -0.22, 0.0, 1e-9);
  REQUIRE(e1.size() == e2.size());
  for (size_t i = 0; i < e1.size(); ++i) CHECK(std::fabs(e1[i] - e2[i]) < 1e-6);
}

TEST_CASE("solve reports an honest convergence flag") {
  auto V = parse_potential("x^4 - x^2");
  auto os = solve(V, 0.05, -0.24, -0.2, 1e-16);  // unreachable tolerance
  CHECK_FALSE(os.converged);
}

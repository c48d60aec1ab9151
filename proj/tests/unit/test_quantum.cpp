#include <doctest.h>

#include "support.hpp"

#include "polarred/errors.hpp"
#include "polarred/quantum.hpp"

#include <Eigen/Eigenvalues>

using namespace test_support;

namespace {

// Eigenvalues of -1/2 D2 on N interior Dirichlet nodes of spacing h.
double discrete_dirichlet(int m, int n, double h) {
  return (1.0 - std::cos(m * kPi / (n + 1))) / (h * h);
}

// Midpoint rule for int_0^{2pi} f g 4 sin^2(q/2) dq / (4 pi).
double su2_midpoint(const std::function<double(double)>& f, const std::function<double(double)>& g) {
  const int n = 200000;
  const double h = 2 * kPi / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double q = (i + 0.5) * h;
    acc += f(q) * g(q) * 4 * std::pow(std::sin(q / 2), 2);
  }
  return acc * h / (4 * kPi);
}

}  // namespace

TEST_SUITE("quantum") {

TEST_CASE("su2 density is 4 sin^2(q/2) and scales with C") {
  const auto& m = model("su2-conj");
  for (double q : {0.2, 1.5, 3.0, 6.0}) {
    const RVector x = RVector::Constant(1, q);
    CHECK(density(m, x) == doctest::Approx(4 * std::pow(std::sin(q / 2), 2)).epsilon(1e-13));
    CHECK(density(m, x, 3.0) == doctest::Approx(3 * density(m, x)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(density(m, RVector::Constant(1, -1.0)), RegularityError);
}

TEST_CASE("su3 density is the product of root factors") {
  const auto& m = model("su3-conj");
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const RVector q = m.section.sample(rng, 0.05);
    const RVector th = m.roots->eigenphases(q);
    double prod = 1.0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) prod *= 4 * std::pow(std::sin((th(a) - th(b)) / 2), 2);
    CHECK(density(m, q) == doctest::Approx(prod).epsilon(1e-11));
  }
}

TEST_CASE("measure term: su2 constant and independent finite differences") {
  const auto& m2 = model("su2-conj");
  for (double q : {0.5, 2.0, 4.5}) {
    CHECK(measure_term(m2, RVector::Constant(1, q), DerivativeMethod::analytic) == doctest::Approx(-0.25).epsilon(1e-13));
    CHECK(std::abs(measure_term(m2, RVector::Constant(1, q), DerivativeMethod::finite_difference) + 0.25) < 1e-8);
  }
  // second-order central differences of sqrt(delta), written out here
  const auto& m3 = model("su3-conj");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    const RVector q = m3.section.sample(rng, 0.3);
    const double h = 1e-4;
    const double c = std::sqrt(density(m3, q));
    double lap = 0.0;
    for (int a = 0; a < 2; ++a) {
      const RVector e = RVector::Unit(2, a) * h;
      lap += (std::sqrt(density(m3, q + e)) - 2 * c + std::sqrt(density(m3, q - e))) / (h * h);
    }
    CHECK(std::abs(measure_term(m3, q, DerivativeMethod::analytic) - lap / c) < 1e-5);
    CHECK(std::abs(measure_term(m3, q, DerivativeMethod::analytic) - measure_term(m3, q, DerivativeMethod::finite_difference)) < 1e-7);
  }
  CHECK_THROWS_AS(measure_term(model("su3-twisted"), RVector::Constant(1, 1.0), DerivativeMethod::analytic), DimensionError);
}

TEST_CASE("measure term does not depend on the normalization") {
  const auto& m = model("su3-conj");
  std::mt19937_64 rng(7);
  const RVector q = m.section.sample(rng, 0.3);
  CHECK(measure_term(m, q, DerivativeMethod::analytic, 7.3) == doctest::Approx(measure_term(m, q)).epsilon(1e-12));
  CHECK(std::abs(measure_term(m, q, DerivativeMethod::finite_difference, 7.3) -
                 measure_term(m, q, DerivativeMethod::finite_difference)) < 1e-8);
}

TEST_CASE("representations") {
  const auto& m = model("su2-conj");
  const SpinRep t = make_rep(m, "trivial");
  CHECK(t.dim() == 1);
  CHECK(t.vk_dim() == 1);
  const SpinRep a = make_rep(m, "adjoint");
  CHECK(a.dim() == 3);
  CHECK(a.vk_dim() == 1);
  CHECK(a.homomorphism_defect(m.symmetry) < 1e-13);
  CHECK(a.invariance_defect(m.isotropy_split.k_basis) < 1e-13);
  const SpinRep a3 = make_rep(model("su3-conj"), "adjoint");
  CHECK(a3.vk_dim() == 2);
  CHECK(a3.homomorphism_defect(model("su3-conj").symmetry) < 1e-12);
  CHECK((a3.vk_projector * a3.vk_projector - a3.vk_projector).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(make_rep(m, "spinor"), ConfigError);
}

TEST_CASE("su2 adjoint spin matrix is -1 / (2 sin^2(q/2))") {
  const auto& m = model("su2-conj");
  const SpinRep a = make_rep(m, "adjoint");
  for (double q : {0.7, 3.0, 5.0}) {
    const CMatrix s = spin_potential_matrix(m, a, RVector::Constant(1, q));
    CHECK(std::abs(s(0, 0) - Complex(-0.5 / std::pow(std::sin(q / 2), 2))) < 1e-12);
  }
  CHECK(spin_potential_matrix(m, make_rep(m, "trivial"), RVector::Constant(1, 1.0)).norm() == 0.0);
}

TEST_CASE("grid layout") {
  const auto& m = model("su2-conj");
  const RadialGrid g = make_grid(m, 99);
  CHECK(g.size() == 99);
  CHECK(g.h(0) == doctest::Approx(2 * kPi / 100).epsilon(1e-14));
  CHECK(g.neighbor[0][0] == -1);
  CHECK(g.neighbor[0][1] == 1);
  CHECK(g.neighbor[98][1] == -1);
  const RadialGrid g3 = make_grid(model("su3-conj"), 10);
  for (const auto& x : g3.nodes) CHECK(model("su3-conj").section.in_alcove(x));
  CHECK(g3.size() < 100);
  CHECK_THROWS_AS(make_grid(m, 0), ConfigError);
}

TEST_CASE("su2 trivial operator matches the exact discrete Dirichlet spectrum") {
  const auto& m = model("su2-conj");
  const int n = 300;
  const RadialGrid g = make_grid(m, n);
  const ReducedOperator op = assemble_reduced_operator(m, make_rep(m, "trivial"), g);
  CHECK(op.real_tridiagonal());
  CHECK(op.hermiticity_residual() == 0.0);
  const std::vector<double> ev = spectrum(op, 6);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(ev[k] - (discrete_dirichlet(k + 1, n, g.h(0)) - 0.125)) < 1e-9);
  // the dense path agrees with the tridiagonal one
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op.dense());
  for (int k = 0; k < 6; ++k) CHECK(std::abs(es.eigenvalues()(k) - ev[k]) < 1e-9);
  CHECK_THROWS_AS(spectrum(op, n + 1), ConfigError);
}

TEST_CASE("su2 spectra approach j(j+1)/2 with second-order error") {
  const auto& m = model("su2-conj");
  const SpinRep t = make_rep(m, "trivial");
  const std::vector<double> exact = *reference_spectrum(m, "trivial", 5);
  for (int j2 = 0; j2 < 5; ++j2) CHECK(exact[j2] == doctest::Approx(0.5 * (j2 / 2.0) * (j2 / 2.0 + 1)));
  double prev = 0.0;
  for (int n : {200, 400}) {
    const std::vector<double> ev = spectrum(assemble_reduced_operator(m, t, make_grid(m, n)), 5);
    const double err = std::abs(ev[4] - exact[4]);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
  const SpinRep a = make_rep(m, "adjoint");
  const std::vector<double> ev = spectrum(assemble_reduced_operator(m, a, make_grid(m, 2000)), 3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(ev[k] - (std::pow(2.0 + k, 2) - 1) / 8) < 1e-4);
  CHECK_FALSE(reference_spectrum(model("su3-conj"), "trivial", 3).has_value());
}

TEST_CASE("normalization leaves the spectrum unchanged") {
  const auto& m = model("su2-conj");
  const SpinRep t = make_rep(m, "trivial");
  const RadialGrid g = make_grid(m, 200);
  AssemblyOptions c;
  c.normalization = 7.3;
  const std::vector<double> a = spectrum(assemble_reduced_operator(m, t, g), 4);
  const std::vector<double> b = spectrum(assemble_reduced_operator(m, t, g, c), 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-12);
}

TEST_CASE("su3 adjoint operator is hermitian") {
  const auto& m = model("su3-conj");
  const ReducedOperator op = assemble_reduced_operator(m, make_rep(m, "adjoint"), make_grid(m, 12));
  CHECK(op.block == 2);
  CHECK(op.hermiticity_residual() < 1e-12);
  CHECK_FALSE(op.real_tridiagonal());
  const std::vector<double> ev = spectrum(op, 3);
  CHECK(std::is_sorted(ev.begin(), ev.end()));
}

TEST_CASE("su2 characters are orthonormal for the radial measure") {
  const auto& m = model("su2-conj");
  for (double j : {0.0, 0.5, 1.0, 1.5})
    for (double k : {0.0, 0.5, 1.0}) {
      auto f = [j](const RVector& q) { return Complex(su2_character(j, q(0))); };
      auto g = [k](const RVector& q) { return Complex(su2_character(k, q(0))); };
      const Complex ip = radial_inner_product(m, f, g);
      CHECK(std::abs(ip - Complex(j == k ? 1.0 : 0.0)) < 1e-12);
      const double mid = su2_midpoint([j](double q) { return su2_character(j, q); },
                                      [k](double q) { return su2_character(k, q); });
      CHECK(std::abs(ip.real() - mid) < 1e-8);
    }
  CHECK(su2_character(1.0, 1.0) == doctest::Approx(1 + 2 * std::cos(1.0)));
}

TEST_CASE("su3 radial quadrature normalizes and integrates a character") {
  const auto& m = model("su3-conj");
  auto one = [](const RVector&) { return Complex(1.0); };
  CHECK(std::abs(radial_inner_product(m, one, one) - Complex(1.0)) < 1e-12);
  // fundamental character tr(y): unit norm and orthogonal to constants
  auto chi = [&m](const RVector& q) {
    const RVector th = m.roots->eigenphases(q);
    Complex s = 0.0;
    for (int i = 0; i < 3; ++i) s += std::polar(1.0, th(i));
    return s;
  };
  CHECK(std::abs(radial_inner_product(m, chi, chi) - Complex(1.0)) < 1e-10);
  CHECK(std::abs(radial_inner_product(m, one, chi)) < 1e-10);
}

TEST_CASE("Monte Carlo agrees with the radial quadrature") {
  const auto& m = model("su2-conj");
  auto f = [](const RVector& q) { return Complex(su2_character(1.0, q(0))); };
  const WeylQuadratureReport r = weyl_quadrature_check(m, f, f, 20000, 11);
  CHECK(r.samples == 20000);
  CHECK(std::abs(r.radial - Complex(1.0)) < 1e-12);
  CHECK(r.sigmas < 5.0);
  CHECK(r.standard_error > 0.0);
  const WeylQuadratureReport again = weyl_quadrature_check(m, f, f, 20000, 11);
  CHECK(again.monte_carlo == r.monte_carlo);
}

}  // TEST_SUITE

#include <doctest.h>

#include "support.hpp"

#include "polarred/errors.hpp"

using namespace test_support;

namespace {

// Squared B-norm of the off-diagonal (i, j) block of mu, from hand-built
// S_ij = (i/2)(E_ij + E_ji) and A_ij = (1/2)(E_ij - E_ji).
double plane_weight(const CMatrix& mu, int i, int j) {
  const int n = static_cast<int>(mu.rows());
  CMatrix s = CMatrix::Zero(n, n), a = CMatrix::Zero(n, n);
  s(i, j) = s(j, i) = Complex(0.0, 0.5);
  a(i, j) = 0.5;
  a(j, i) = -0.5;
  const double cs = -2.0 * (s * mu).trace().real();
  const double ca = -2.0 * (a * mu).trace().real();
  return cs * cs + ca * ca;
}

// Coefficient of the KKS orbit through i nu (v v^dagger - 1/n), v uniform:
// each root plane carries weight w, and V = sum w / (8 sin^2) gives c = w / 8.
double kks_oracle(int n, double nu) {
  CMatrix mu = CMatrix::Constant(n, n, Complex(0.0, nu / n));
  mu.diagonal() -= CMatrix::Constant(n, 1, Complex(0.0, nu / n));
  return plane_weight(mu, 0, 1) / 8.0;
}

}  // namespace

TEST_SUITE("catalog") {

TEST_CASE("catalog names build and validate with the expected isotropy") {
  for (const auto& name : catalog_names()) {
    const CatalogEntry e = build_model(name);
    INFO(name);
    CHECK(e.name == name);
    CHECK(e.validation.passed);
    CHECK(e.validation.samples == kCatalogValidationSamples);
    if (e.expected_k_dimension >= 0) CHECK(e.model.isotropy_split.k_dimension() == e.expected_k_dimension);
  }
  CHECK(build_model("su4-conj").model.isotropy_split.k_dimension() == 3);
  CHECK(build_model("su4-twisted").model.rank() == 2);
  CHECK(build_model("su3-hermann-so3").model.rank() == 2);
}

TEST_CASE("model names are parsed strictly") {
  CHECK_THROWS_AS(build_model("su3-conjugate"), ConfigError);
  CHECK_THROWS_AS(build_model("so3-conj"), ConfigError);
  CHECK_THROWS_AS(build_model("su3-hermann-so2"), ConfigError);
  CHECK_THROWS_AS(build_model("su2-twisted"), DimensionError);
  CHECK(build_model("su5-conj").model.group.dimension() == 24);
}

TEST_CASE("su2 equator orbit gives c = r^2 / 8") {
  for (double r : {0.5, 1.0, 3.0}) {
    const SutherlandFit fit = derive_sutherland(2, CoadjointOrbitSpec::su2_equator(r), 40, 1);
    CHECK(fit.coefficient == doctest::Approx(r * r / 8).epsilon(1e-12));
    CHECK(fit.max_relative_residual < kSutherlandTol);
    CHECK(fit.coefficient_spread < kSutherlandTol);
    CHECK_FALSE(fit.free_model);
  }
}

TEST_CASE("KKS orbits fit the Sutherland form with the plane-weight coefficient") {
  for (int n : {3, 4}) {
    for (double nu : {1.0, 2.5}) {
      const SutherlandFit fit = derive_sutherland(n, CoadjointOrbitSpec::kks(n, nu), 60, 7);
      INFO(n, " ", nu);
      CHECK(fit.coefficient == doctest::Approx(kks_oracle(n, nu)).epsilon(1e-11));
      CHECK(fit.coefficient == doctest::Approx(nu * nu / (2.0 * n * n)).epsilon(1e-11));
      CHECK(fit.max_relative_residual < kSutherlandTol);
      CHECK(fit.q_samples.size() == 60);
      // each sample: V(q) = c * sum 1/sin^2
      for (std::size_t i = 0; i < fit.q_samples.size(); ++i)
        CHECK(fit.potential[i] == doctest::Approx(fit.coefficient * fit.pair_sum[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("pair sum matches the eigenphase differences") {
  const SutherlandFit fit = derive_sutherland(3, CoadjointOrbitSpec::kks(3, 1.0), 10, 3);
  const auto& m = model("su3-conj");
  for (std::size_t i = 0; i < fit.q_samples.size(); ++i) {
    const RVector th = m.roots->eigenphases(fit.q_samples[i]);
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) s += 1.0 / std::pow(std::sin((th(a) - th(b)) / 2), 2);
    CHECK(fit.pair_sum[i] == doctest::Approx(s).epsilon(1e-12));
    CHECK(m.section.wall_distance(fit.q_samples[i]) >= 0.05);
  }
}

TEST_CASE("zero orbit is the free model") {
  const SutherlandFit fit = derive_sutherland(3, CoadjointOrbitSpec::zero(), 20, 5);
  CHECK(fit.free_model);
  CHECK(fit.coefficient == 0.0);
  for (double v : fit.potential) CHECK(v == 0.0);
}

TEST_CASE("a base point with a Cartan component is rejected") {
  // T3 of su(2) lies in K at every section point
  const CoadjointOrbitSpec h = CoadjointOrbitSpec::generic(RVector::Unit(3, 2));
  try {
    derive_sutherland(2, h, 10, 1);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("moment condition") != std::string::npos);
  }
  CHECK_THROWS_AS(derive_sutherland(2, CoadjointOrbitSpec::su2_equator(1.0), 0, 1), ConfigError);
}

TEST_CASE("Sutherland fits are deterministic per seed") {
  const SutherlandFit a = derive_sutherland(4, CoadjointOrbitSpec::kks(4, 1.0), 30, 99);
  const SutherlandFit b = derive_sutherland(4, CoadjointOrbitSpec::kks(4, 1.0), 30, 99);
  CHECK(a.coefficient == b.coefficient);
  for (std::size_t i = 0; i < a.q_samples.size(); ++i) CHECK((a.q_samples[i] - b.q_samples[i]).norm() == 0.0);
}

TEST_CASE("su2 Hermann model has trivial isotropy and a pi-periodic alcove") {
  const auto& m = model("su2-hermann-so2");
  CHECK(m.isotropy_split.k_dimension() == 0);
  CHECK(m.symmetry.dimension() == 2);
  CHECK(m.section.in_alcove(m.section.reference()));
  const double w = m.section.wall_distance(m.section.reference());
  CHECK(w > 0.0);
  CHECK(w <= kPi / 2 + 1e-12);
}

}  // TEST_SUITE

#include <doctest.h>

#include "support.hpp"

#include "polarred/errors.hpp"

#include <Eigen/Eigenvalues>

using namespace test_support;

namespace {

// Sorted eigenphases of a unitary matrix in (-pi, pi].
std::vector<double> phases(const CMatrix& u) {
  Eigen::ComplexEigenSolver<CMatrix> es(u);
  std::vector<double> out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::arg(es.eigenvalues()(i)));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("polar_action") {

TEST_CASE("su2 alcove is the open interval (0, 2 pi)") {
  const auto& m = model("su2-conj");
  CHECK(m.rank() == 1);
  CHECK(m.section.in_alcove(RVector::Constant(1, 1.0)));
  CHECK(m.section.in_alcove(RVector::Constant(1, 6.2)));
  CHECK_FALSE(m.section.in_alcove(RVector::Constant(1, -0.1)));
  CHECK_FALSE(m.section.in_alcove(RVector::Constant(1, 6.3)));
  CHECK_FALSE(m.section.in_alcove(RVector::Constant(1, 0.0)));
  CHECK(m.section.wall_distance(RVector::Constant(1, 1.0)) == doctest::Approx(1.0));
  CHECK(m.section.reference()(0) == doctest::Approx(kPi));
}

TEST_CASE("Ad of exp(q T3) rotates T1 into T2") {
  for (double q : {0.3, 1.7, 4.0}) {
    const CMatrix y = unitary_exp(pauli_t(2), q);
    const CMatrix rotated = y * pauli_t(0) * y.adjoint();
    CHECK((rotated - (std::cos(q) * pauli_t(0) + std::sin(q) * pauli_t(1))).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("generator matches the derivative of the action") {
  std::mt19937_64 rng(11);
  for (const auto& name : catalog_names()) {
    const auto& m = model(name);
    const GroupElement y = haar_sample_su(m.group_n(), 17);
    const RVector zeta = random_vector(rng, m.symmetry.dimension());
    const double h = 1e-5;
    const GroupElement gp = m.symmetry.exp_map(zeta, h), gm = m.symmetry.exp_map(zeta, -h);
    const CMatrix deriv = (act(m, gp, y).matrix - act(m, gm, y).matrix) / (2 * h);
    const RVector fd = m.group.coordinates(deriv * y.matrix.adjoint());
    CHECK((fd - generator(m, zeta, y)).norm() < 1e-8);
  }
}

TEST_CASE("su2 conjugation generator in closed form") {
  const auto& m = model("su2-conj");
  for (double q : {0.5, 2.0, 5.0}) {
    const GroupElement y = section_point(m, RVector::Constant(1, q));
    const RMatrix l = generator_matrix(m, y);
    RVector expect(3);
    expect << 1 - std::cos(q), -std::sin(q), 0;
    CHECK((l.col(0) - expect).norm() < 1e-14);
    CHECK(l.col(2).norm() < 1e-14);
  }
}

TEST_CASE("catalog sections pass validation") {
  for (const auto& name : catalog_names()) {
    const SectionReport r = validate_section(model(name), 100, 5);
    INFO(name);
    CHECK(r.passed);
    CHECK(r.max_orthogonality < kOrthogonalityTol);
    CHECK(r.max_flatness < kFlatnessTol);
    CHECK(r.max_isotropy_residual < kIsotropyTol);
    CHECK(r.max_isotropy_dim_mismatch == 0);
  }
}

TEST_CASE("validation reports a non-abelian candidate section") {
  // span of A_12 and A_13 inside su(3): not abelian, so not a section
  const int dim = 8;
  std::vector<RVector> bad = {RVector::Unit(dim, 1), RVector::Unit(dim, 3)};
  const CatalogEntry e = build_hermann(3, "so", "so", bad, false);
  CHECK_FALSE(e.validation.passed);
  CHECK_FALSE(e.validation.failures.empty());
  CHECK(e.validation.offending_q.has_value());
  CHECK_THROWS_AS(build_hermann(3, "so", "so", bad, true), ValidationFailure);
}

TEST_CASE("isotropy split dimensions") {
  CHECK(model("su2-conj").isotropy_split.k_dimension() == 1);
  CHECK(model("su2-conj").isotropy_split.kperp_dimension() == 2);
  CHECK(model("su3-conj").isotropy_split.k_dimension() == 2);
  CHECK(model("su3-conj").isotropy_split.kperp_dimension() == 6);
  CHECK(model("su3-twisted").rank() == 1);
  CHECK(model("su3-twisted").isotropy_split.k_dimension() == 1);
  CHECK(model("su2-hermann-so2").isotropy_split.k_dimension() == 0);
  for (const auto& name : catalog_names()) {
    const auto& s = model(name).isotropy_split;
    const int d = model(name).symmetry.dimension();
    RMatrix all(d, d);
    all << s.k_basis, s.kperp_basis;
    CHECK((all.transpose() * all - RMatrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("twisted isotropy at the identity is theta-fixed") {
  const auto& m = model("su3-twisted");
  const GroupElement e = GroupElement::identity(3);
  // real generators (A_ij) fix e, imaginary ones (S_ij, Cartan) move it
  for (int a = 0; a < m.symmetry.dimension(); ++a) {
    const CMatrix x = m.group.basis()[a];
    const bool real = x.imag().cwiseAbs().maxCoeff() == 0.0;
    const double moved = generator(m, RVector::Unit(m.symmetry.dimension(), a), e).norm();
    CHECK((real ? moved < 1e-15 : moved > 0.5));
  }
}

TEST_CASE("Hermann with equal factors acts on the diagonal as conjugation by K1") {
  const auto& h = model("su3-hermann-so3");
  const auto& c = model("su3-conj");
  const GroupElement y = haar_sample_su(3, 3);
  // (X, X) in the Hermann algebra versus X in the conjugation algebra, X in so(3)
  const int pairs = 3;
  for (int k = 0; k < pairs; ++k) {
    RVector zh = RVector::Zero(h.symmetry.dimension());
    zh(k) = zh(k + pairs) = 1.0;
    const CMatrix x = h.symmetry.basis()[k].topLeftCorner(3, 3);
    const RVector zc = c.group.coordinates(x);
    CHECK((generator(h, zh, y) - generator(c, zc, y)).norm() < 1e-13);
  }
}

TEST_CASE("tangent split is orthogonal and complete") {
  std::mt19937_64 rng(3);
  const auto& m = model("su3-conj");
  const RVector q = m.section.sample(rng, 0.1);
  const GroupElement y = section_point(m, q);
  const RVector v = random_vector(rng, 8);
  const TangentSplit t = split_tangent(m, y, v);
  CHECK((t.vertical + t.horizontal - v).norm() < 1e-13);
  CHECK(std::abs(m.group.pairing(t.vertical, t.horizontal)) < 1e-13);
  // horizontal part at a section point is tangent to the torus
  const RMatrix a = m.section.basis_matrix();
  CHECK((a * (a.transpose() * t.horizontal) - t.horizontal).norm() < 1e-12);
}

TEST_CASE("projection recovers the orbit and is invariant") {
  for (const auto& name : {"su2-conj", "su3-conj", "su4-conj", "su2-hermann-so2", "su3-hermann-so3"}) {
    const auto& m = model(name);
    INFO(name);
    for (int i = 0; i < 30; ++i) {
      const GroupElement y = haar_sample_su(m.group_n(), mix_seed(77, i));
      const SectionProjection p = project_to_section(m, y);
      CHECK(m.section.in_alcove(p.q));
      CHECK(p.residual < 1e-10);
      CHECK((act(m, p.g, section_point(m, p.q)).matrix - y.matrix).cwiseAbs().maxCoeff() < 1e-10);
      const GroupElement moved = act(m, sample_symmetry(m, mix_seed(78, i)), y);
      CHECK((project_to_section(m, moved).q - p.q).norm() < 1e-9);
    }
  }
}

TEST_CASE("conjugation projection reproduces the eigenphases") {
  const auto& m = model("su3-conj");
  for (int i = 0; i < 20; ++i) {
    const GroupElement y = haar_sample_su(3, mix_seed(5, i));
    const SectionProjection p = project_to_section(m, y);
    const std::vector<double> a = phases(y.matrix), b = phases(section_point(m, p.q).matrix);
    for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-10));
  }
}

TEST_CASE("twisted projection from a nearby hint") {
  const auto& m = model("su3-twisted");
  std::mt19937_64 rng(21);
  for (int i = 0; i < 10; ++i) {
    const RVector q = m.section.sample(rng, 0.2);
    const RVector zeta = 0.05 * random_vector(rng, m.symmetry.dimension());
    const GroupElement g = m.symmetry.exp_map(zeta);
    const GroupElement y = act(m, g, section_point(m, q));
    const SectionProjection hint{q, GroupElement::identity(6), 0.0};
    const SectionProjection p = project_to_section(m, y, hint);
    CHECK(p.residual < 1e-10);
    CHECK((p.q - q).norm() < 1e-9);
  }
  CHECK_THROWS(project_to_section(m, haar_sample_su(3, 1)));
}

TEST_CASE("reduce_to_alcove lands in the closed alcove on the same orbit") {
  const auto& m = model("su3-conj");
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    const RVector q = 4.0 * random_vector(rng, 2);
    const RVector r = m.section.reduce_to_alcove(q);
    CHECK((m.section.in_alcove(r) || m.section.wall_distance(r) < 1e-12));
    const std::vector<double> a = phases(section_point(m, q).matrix), b = phases(section_point(m, r).matrix);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(std::polar(1.0, a[k]) - std::polar(1.0, b[k])) < 1e-9);
  }
}

TEST_CASE("alcove samples respect the margin and are seeded") {
  const auto& m = model("su4-conj");
  std::mt19937_64 r1(4), r2(4);
  for (int i = 0; i < 50; ++i) {
    const RVector a = m.section.sample(r1, 0.1), b = m.section.sample(r2, 0.1);
    CHECK((a - b).norm() == 0.0);
    CHECK(m.section.wall_distance(a) >= 0.1);
  }
}

TEST_CASE("shape errors") {
  const auto& m = model("su2-conj");
  CHECK_THROWS_AS(section_point(m, RVector::Zero(2)), DimensionError);
  CHECK_THROWS_AS(generator(m, RVector::Zero(2), GroupElement::identity(2)), DimensionError);
  CHECK_THROWS_AS(act(m, GroupElement::identity(4), GroupElement::identity(3)), DimensionError);
  CHECK_THROWS_AS(build_conjugation(1), DimensionError);
  CHECK_THROWS_AS(build_twisted(2), DimensionError);
  CHECK_THROWS_AS(build_hermann(2, "su", "so"), DimensionError);
}

}  // TEST_SUITE

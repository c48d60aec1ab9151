#include <doctest.h>

#include "support.hpp"

#include <Eigen/Eigenvalues>

using namespace test_support;

TEST_SUITE("lie") {

TEST_CASE("su2 basis is the Pauli basis and brackets cyclically") {
  const LieAlgebraModel g = LieAlgebraModel::su(2);
  REQUIRE(g.dimension() == 3);
  for (int a = 0; a < 3; ++a) CHECK((g.basis()[a] - pauli_t(a)).cwiseAbs().maxCoeff() < 1e-15);
  // [T1, T2] = T3 from the hand-written matrices
  const CMatrix c = pauli_t(0) * pauli_t(1) - pauli_t(1) * pauli_t(0);
  CHECK((c - pauli_t(2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(g.structure_constant(2, 0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.structure_constant(2, 1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(g.structure_constant(0, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("su(n) basis is orthonormal for B = -2 tr") {
  for (int n : {2, 3, 4, 5}) {
    const LieAlgebraModel g = LieAlgebraModel::su(n);
    CHECK(g.dimension() == n * n - 1);
    for (int a = 0; a < g.dimension(); ++a) {
      CHECK(anti_hermiticity_defect(g.basis()[a]) < 1e-15);
      CHECK(std::abs(g.basis()[a].trace()) < 1e-15);
      for (int b = 0; b < g.dimension(); ++b)
        CHECK(su_bform(g.basis()[a], g.basis()[b]) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("structure constants satisfy Jacobi, ad-invariance and match commutators") {
  for (int n : {2, 3, 4}) {
    const LieAlgebraModel g = LieAlgebraModel::su(n);
    CHECK(g.jacobi_defect() < 1e-12);
    CHECK(g.invariance_defect() < 1e-12);
    CHECK(g.commutator_defect() < 1e-12);
  }
}

TEST_CASE("bracket is antisymmetric and B is ad-invariant on random elements") {
  std::mt19937_64 rng(101);
  const LieAlgebraModel g = LieAlgebraModel::su(3);
  for (int t = 0; t < 50; ++t) {
    const RVector x = random_vector(rng, 8), y = random_vector(rng, 8), z = random_vector(rng, 8);
    CHECK((g.bracket(x, y) + g.bracket(y, x)).norm() < 1e-13);
    CHECK(std::abs(g.pairing(g.bracket(x, y), z) + g.pairing(y, g.bracket(x, z))) < 1e-12);
    // matrix route
    const CMatrix xm = g.to_matrix(x), ym = g.to_matrix(y);
    CHECK((g.to_matrix(g.bracket(x, y)) - (xm * ym - ym * xm)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("unitary_exp agrees with a Taylor series and inverts unitary_log") {
  std::mt19937_64 rng(7);
  const LieAlgebraModel g = LieAlgebraModel::su(3);
  for (int t = 0; t < 20; ++t) {
    const RVector x = 0.5 * random_vector(rng, 8);
    const CMatrix xm = g.to_matrix(x);
    CMatrix series = CMatrix::Identity(3, 3), term = CMatrix::Identity(3, 3);
    for (int k = 1; k < 40; ++k) {
      term = term * xm / double(k);
      series += term;
    }
    const CMatrix u = unitary_exp(xm);
    CHECK((u - series).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(unitarity_defect(u) < 1e-13);
    CHECK(std::abs(u.determinant() - Complex(1.0)) < 1e-13);
    CHECK((unitary_log(u) - xm).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(unitary_exp(CMatrix::Identity(2, 2)), DimensionError);
}

TEST_CASE("Ad is a homomorphism and preserves B") {
  std::mt19937_64 rng(9);
  const LieAlgebraModel g = LieAlgebraModel::su(3);
  const GroupElement a = haar_sample_su(3, 1), b = haar_sample_su(3, 2);
  const RVector x = random_vector(rng, 8), y = random_vector(rng, 8);
  CHECK((g.adjoint(a * b, x) - g.adjoint(a, g.adjoint(b, x))).norm() < 1e-12);
  CHECK(std::abs(g.pairing(g.adjoint(a, x), g.adjoint(a, y)) - g.pairing(x, y)) < 1e-12);
  const RMatrix m = g.adjoint_matrix(a);
  CHECK((m.transpose() * m - RMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("root data: eigenphases of exp(q.H) and root values") {
  for (int n : {2, 3, 4}) {
    const LieAlgebraModel g = LieAlgebraModel::su(n);
    const RootData rd = RootData::su(n);
    std::mt19937_64 rng(n);
    const RVector q = random_vector(rng, n - 1);
    RVector x = RVector::Zero(g.dimension());
    for (int k = 0; k < n - 1; ++k) x(rd.cartan_basis[k]) = q(k);
    const CMatrix y = g.exp_map(x).matrix;
    const RVector theta = rd.eigenphases(q);
    CHECK(std::abs(theta.sum()) < 1e-14);
    for (int m = 0; m < n; ++m) CHECK(std::abs(y(m, m) - std::polar(1.0, theta(m))) < 1e-13);
    CHECK((rd.cartan_coordinates(theta) - q).norm() < 1e-13);
    for (std::size_t k = 0; k < rd.roots.size(); ++k) {
      const auto [i, j] = rd.root_pairs[k];
      CHECK(rd.roots[k].dot(q) == doctest::Approx(theta(j) - theta(i)).epsilon(1e-13));
    }
    // Weyl generators are involutions permuting the phases
    for (const auto& w : rd.weyl_generators) CHECK((w * w - RMatrix::Identity(n - 1, n - 1)).norm() < 1e-13);
  }
}

TEST_CASE("Haar samples are special unitary and deterministic per seed") {
  for (int n : {2, 3, 4}) {
    const GroupElement a = haar_sample_su(n, 42), b = haar_sample_su(n, 42), c = haar_sample_su(n, 43);
    CHECK(unitarity_defect(a.matrix) < 1e-13);
    CHECK(std::abs(a.matrix.determinant() - Complex(1.0)) < 1e-13);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.matrix - c.matrix).cwiseAbs().maxCoeff() > 1e-3);
    const GroupElement o = haar_sample_so(n, 5);
    CHECK(o.matrix.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK(o.matrix.real().determinant() == doctest::Approx(1.0));
  }
}

TEST_CASE("Haar moments: E|tr U|^2 = 1 on SU(2)") {
  double acc = 0.0;
  const int count = 20000;
  for (int i = 0; i < count; ++i) acc += std::norm(haar_sample_su(2, mix_seed(3, i)).matrix.trace());
  CHECK(acc / count == doctest::Approx(1.0).epsilon(0.05));
}

}  // TEST_SUITE

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace polarred {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Element of a compact matrix group, stored as its defining matrix.
struct GroupElement {
  CMatrix matrix;

  static GroupElement identity(int n) { return {CMatrix::Identity(n, n)}; }
  GroupElement inverse() const { return {matrix.adjoint()}; }
  int size() const { return static_cast<int>(matrix.rows()); }
};

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  return {a.matrix * b.matrix};
}

/// Unitarity defect ||U^dagger U - 1||_max.
double unitarity_defect(const CMatrix& u);

/// Max-norm of X + X^dagger.
double anti_hermiticity_defect(const CMatrix& x);

/// exp(t X) for anti-hermitian X, through the eigen-decomposition of the
/// hermitian matrix iX. Throws DimensionError for non-anti-hermitian input.
CMatrix unitary_exp(const CMatrix& x, double t = 1.0);

/// Principal logarithm of a unitary matrix (eigenphases in (-pi, pi]).
CMatrix unitary_log(const CMatrix& u);

/// Real matrix Lie algebra of anti-hermitian matrices.
///
/// Elements are handled either as matrices or as real coordinate vectors in
/// the model basis. The scalar product B is carried as its Gram matrix in
/// that basis; every model built by this library uses a B-orthonormal basis,
/// so bform() is the identity up to rounding.
class LieAlgebraModel {
 public:
  LieAlgebraModel() = default;

  /// Builds the model from basis matrices and the Gram matrix of B.
  /// Structure constants are computed from matrix commutators.
  LieAlgebraModel(std::vector<CMatrix> basis, RMatrix bform);

  /// su(n) with B(X, Y) = -2 tr(XY). Basis order: for each pair i < j the
  /// symmetric generator S_ij = -(i/2)(E_ij + E_ji) and the antisymmetric
  /// generator A_ij = (E_ji - E_ij)/2, then the diagonal Cartan generators.
  /// For n = 2 this is T_a = -(i/2) sigma_a.
  static LieAlgebraModel su(int n);

  int dimension() const { return static_cast<int>(basis_.size()); }
  int matrix_size() const { return basis_.empty() ? 0 : static_cast<int>(basis_.front().rows()); }
  const std::vector<CMatrix>& basis() const { return basis_; }
  const RMatrix& bform() const { return bform_; }

  /// c^k_{ij} with [X_i, X_j] = sum_k c^k_{ij} X_k.
  double structure_constant(int k, int i, int j) const;

  /// Matrix ad_X in coordinates: (ad_X)_{ki} = sum_j x_j c^k_{ji}.
  RMatrix ad_matrix(const RVector& x) const;

  CMatrix to_matrix(const RVector& x) const;
  /// Coordinates of an element of the span of the basis (least squares in
  /// the Frobenius inner product; components outside the span are dropped).
  RVector coordinates(const CMatrix& x) const;
  /// Distance of a matrix from the span of the basis.
  double span_residual(const CMatrix& x) const;

  RVector bracket(const RVector& x, const RVector& y) const;
  double pairing(const RVector& x, const RVector& y) const { return x.dot(bform_ * y); }
  double norm(const RVector& x) const;

  /// Ad_g X = g X g^{-1} in coordinates.
  RVector adjoint(const GroupElement& g, const RVector& x) const;
  /// Matrix of Ad_g in coordinates.
  RMatrix adjoint_matrix(const GroupElement& g) const;

  GroupElement exp_map(const RVector& x, double t = 1.0) const;

  /// Largest violation of the Jacobi identity over basis triples.
  double jacobi_defect() const;
  /// Largest violation of ad-invariance of B over basis triples.
  double invariance_defect() const;
  /// Largest mismatch between structure constants and matrix commutators.
  double commutator_defect() const;

 private:
  std::vector<CMatrix> basis_;
  RMatrix bform_;
  RMatrix frobenius_gram_inv_;
  std::vector<RMatrix> structure_;  // structure_[k](i, j) = c^k_{ij}
};

/// B(X, Y) = -2 Re tr(XY) for su(n) matrices.
double su_bform(const CMatrix& x, const CMatrix& y);

/// Root data of su(n) for the diagonal maximal torus.
///
/// Cartan coordinates q are the coefficients on the orthonormal Cartan
/// generators H_k = i diag(h_k); eigenphases are theta = M q with
/// M(m, k) = h_k[m]. The positive root of the pair i < j is
/// alpha_ij(q) = theta_j - theta_i.
struct RootData {
  std::vector<int> cartan_basis;
  std::vector<RVector> roots;
  std::vector<std::pair<int, int>> root_pairs;
  std::vector<std::array<int, 2>> root_planes;
  std::vector<RMatrix> weyl_generators;
  RMatrix phase_map;  // M: Cartan coordinates -> eigenphases

  static RootData su(int n);
  RVector eigenphases(const RVector& q) const { return phase_map * q; }
  RVector cartan_coordinates(const RVector& theta) const { return 2.0 * phase_map.transpose() * theta; }
};

/// Haar-distributed element of SU(n): QR of a complex Ginibre matrix with
/// the phases of diag(R) removed, then rescaled to unit determinant.
GroupElement haar_sample_su(int n, std::uint64_t seed);

/// Haar-distributed element of SO(n) (real Ginibre QR).
GroupElement haar_sample_so(int n, std::uint64_t seed);

}  // namespace polarred

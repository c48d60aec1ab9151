#include "polarred/lie.hpp"

#include "polarred/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <random>
#include <string>

namespace polarred {

namespace {

constexpr double kAntiHermitianTol = 1e-9;

CMatrix unit(int n, int i, int j) {
  CMatrix e = CMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

double unitarity_defect(const CMatrix& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

double anti_hermiticity_defect(const CMatrix& x) {
  if (x.size() == 0) return 0.0;
  return (x + x.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix unitary_exp(const CMatrix& x, double t) {
  if (x.rows() != x.cols()) throw DimensionError("unitary_exp: matrix is not square");
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if (anti_hermiticity_defect(x) > kAntiHermitianTol * scale)
    throw DimensionError("unitary_exp: input is not anti-hermitian");
  const CMatrix h = Complex(0.0, 1.0) * x;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (h + h.adjoint()));
  const auto& vals = eig.eigenvalues();
  CVector phases(vals.size());
  for (Eigen::Index k = 0; k < vals.size(); ++k) phases(k) = std::polar(1.0, -t * vals(k));
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

CMatrix unitary_log(const CMatrix& u) {
  Eigen::ComplexSchur<CMatrix> schur(u);
  const CMatrix& q = schur.matrixU();
  const CMatrix& t = schur.matrixT();
  CVector logs(t.rows());
  for (Eigen::Index k = 0; k < t.rows(); ++k) logs(k) = Complex(0.0, std::arg(t(k, k)));
  return q * logs.asDiagonal() * q.adjoint();
}

double su_bform(const CMatrix& x, const CMatrix& y) { return -2.0 * (x * y).trace().real(); }

LieAlgebraModel::LieAlgebraModel(std::vector<CMatrix> basis, RMatrix bform)
    : basis_(std::move(basis)), bform_(std::move(bform)) {
  const int d = dimension();
  if (bform_.rows() != d || bform_.cols() != d)
    throw DimensionError("LieAlgebraModel: bform size does not match the basis");
  RMatrix gram(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gram(i, j) = (basis_[i].adjoint() * basis_[j]).trace().real();
  frobenius_gram_inv_ = gram.inverse();

  structure_.assign(d, RMatrix::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const CMatrix c = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      const RVector coords = coordinates(c);
      for (int k = 0; k < d; ++k) structure_[k](i, j) = coords(k);
    }
  }
}

LieAlgebraModel LieAlgebraModel::su(int n) {
  if (n < 2) throw DimensionError("su(n) requires n >= 2");
  const Complex I(0.0, 1.0);
  std::vector<CMatrix> basis;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      basis.push_back(-0.5 * I * (unit(n, i, j) + unit(n, j, i)));
      basis.push_back(0.5 * (unit(n, j, i) - unit(n, i, j)));
    }
  }
  const RootData roots = RootData::su(n);
  for (int k = 0; k < n - 1; ++k) {
    CMatrix h = CMatrix::Zero(n, n);
    for (int m = 0; m < n; ++m) h(m, m) = I * roots.phase_map(m, k);
    basis.push_back(h);
  }
  const int d = static_cast<int>(basis.size());
  RMatrix bform(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) bform(i, j) = su_bform(basis[i], basis[j]);
  return LieAlgebraModel(std::move(basis), std::move(bform));
}

double LieAlgebraModel::structure_constant(int k, int i, int j) const { return structure_.at(k)(i, j); }

RMatrix LieAlgebraModel::ad_matrix(const RVector& x) const {
  if (x.size() != dimension()) throw DimensionError("ad_matrix: dimension mismatch");
  const int d = dimension();
  RMatrix ad = RMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) ad.row(k) = x.transpose() * structure_[k];
  return ad;
}

CMatrix LieAlgebraModel::to_matrix(const RVector& x) const {
  if (x.size() != dimension()) throw DimensionError("to_matrix: dimension mismatch");
  const int n = matrix_size();
  CMatrix m = CMatrix::Zero(n, n);
  for (int i = 0; i < dimension(); ++i) m += x(i) * basis_[i];
  return m;
}

RVector LieAlgebraModel::coordinates(const CMatrix& x) const {
  if (x.rows() != matrix_size() || x.cols() != matrix_size())
    throw DimensionError("coordinates: matrix size mismatch");
  RVector rhs(dimension());
  for (int i = 0; i < dimension(); ++i) rhs(i) = (basis_[i].adjoint() * x).trace().real();
  return frobenius_gram_inv_ * rhs;
}

double LieAlgebraModel::span_residual(const CMatrix& x) const {
  return (to_matrix(coordinates(x)) - x).cwiseAbs().maxCoeff();
}

RVector LieAlgebraModel::bracket(const RVector& x, const RVector& y) const {
  if (x.size() != dimension() || y.size() != dimension())
    throw DimensionError("bracket: dimension mismatch (expected " + std::to_string(dimension()) + ")");
  RVector out(dimension());
  for (int k = 0; k < dimension(); ++k) out(k) = x.dot(structure_[k] * y);
  return out;
}

double LieAlgebraModel::norm(const RVector& x) const { return std::sqrt(std::max(0.0, pairing(x, x))); }

RVector LieAlgebraModel::adjoint(const GroupElement& g, const RVector& x) const {
  if (g.size() != matrix_size()) throw DimensionError("adjoint: group element size mismatch");
  return coordinates(g.matrix * to_matrix(x) * g.matrix.adjoint());
}

RMatrix LieAlgebraModel::adjoint_matrix(const GroupElement& g) const {
  const int d = dimension();
  RMatrix ad(d, d);
  for (int i = 0; i < d; ++i) ad.col(i) = coordinates(g.matrix * basis_[i] * g.matrix.adjoint());
  return ad;
}

GroupElement LieAlgebraModel::exp_map(const RVector& x, double t) const { return {unitary_exp(to_matrix(x), t)}; }

double LieAlgebraModel::jacobi_defect() const {
  const int d = dimension();
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        const RVector ei = RVector::Unit(d, i), ej = RVector::Unit(d, j), ek = RVector::Unit(d, k);
        const RVector s = bracket(ei, bracket(ej, ek)) + bracket(ej, bracket(ek, ei)) + bracket(ek, bracket(ei, ej));
        worst = std::max(worst, s.cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

double LieAlgebraModel::invariance_defect() const {
  const int d = dimension();
  double worst = 0.0;
  for (int z = 0; z < d; ++z) {
    const RMatrix ad = ad_matrix(RVector::Unit(d, z));
    // B(ad_Z X, Y) + B(X, ad_Z Y) = 0 for all X, Y
    worst = std::max(worst, (ad.transpose() * bform_ + bform_ * ad).cwiseAbs().maxCoeff());
  }
  return worst;
}

double LieAlgebraModel::commutator_defect() const {
  const int d = dimension();
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const CMatrix direct = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      const CMatrix via = to_matrix(bracket(RVector::Unit(d, i), RVector::Unit(d, j)));
      worst = std::max(worst, (direct - via).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

RootData RootData::su(int n) {
  if (n < 2) throw DimensionError("RootData::su requires n >= 2");
  RootData rd;
  const int rank = n - 1;
  rd.phase_map = RMatrix::Zero(n, rank);
  for (int k = 1; k <= rank; ++k) {
    const double c = 1.0 / std::sqrt(2.0 * k * (k + 1));
    for (int m = 0; m < k; ++m) rd.phase_map(m, k - 1) = -c;
    rd.phase_map(k, k - 1) = k * c;
  }
  int index = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      rd.root_pairs.emplace_back(i, j);
      rd.root_planes.push_back({index, index + 1});
      rd.roots.push_back((rd.phase_map.row(j) - rd.phase_map.row(i)).transpose());
      index += 2;
    }
  }
  for (int k = 0; k < rank; ++k) rd.cartan_basis.push_back(index + k);
  // simple transpositions theta_i <-> theta_{i+1}, written on Cartan coordinates
  for (int i = 0; i + 1 < n; ++i) {
    RMatrix swap = RMatrix::Identity(n, n);
    swap(i, i) = swap(i + 1, i + 1) = 0.0;
    swap(i, i + 1) = swap(i + 1, i) = 1.0;
    rd.weyl_generators.push_back(2.0 * rd.phase_map.transpose() * swap * rd.phase_map);
  }
  return rd;
}

GroupElement haar_sample_su(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    q.col(k) *= (mag > 0.0 ? r(k, k) / mag : Complex(1.0));
  }
  const Complex det = q.determinant();
  q *= std::polar(1.0, -std::arg(det) / n);
  return {q};
}

GroupElement haar_sample_so(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RMatrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = normal(rng);
  Eigen::HouseholderQR<RMatrix> qr(z);
  RMatrix q = qr.householderQ();
  const RMatrix& r = qr.matrixQR();
  for (int k = 0; k < n; ++k)
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return {q.cast<Complex>()};
}

}  // namespace polarred

#pragma once

#include "polarred/polar_action.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace polarred {

using SparseCMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Finite-dimensional representation of the symmetry algebra together with
/// the subspace of K-invariant vectors.
struct SpinRep {
  std::string name;
  std::vector<CMatrix> rep_matrices;  // rho'(e_a) over the symmetry basis
  CMatrix vk_basis;                   // orthonormal columns spanning V^K
  CMatrix vk_projector;

  int dim() const { return static_cast<int>(vk_projector.rows()); }
  int vk_dim() const { return static_cast<int>(vk_basis.cols()); }
  /// max |rho'([e_a, e_b]) - [rho'(e_a), rho'(e_b)]|.
  double homomorphism_defect(const LieAlgebraModel& algebra) const;
  /// max |rho'(k) v| over K basis and V^K basis.
  double invariance_defect(const RMatrix& k_basis) const;
};

/// "trivial" (V = C, rho' = 0) or "adjoint" (complexified adjoint action on
/// the symmetry algebra). Throws DimensionError when V^K = 0.
SpinRep make_rep(const PolarActionModel& model, const std::string& name);

/// delta(q) = C |det b(q)|^{1/2}. Throws RegularityError at walls.
double density(const PolarActionModel& model, const RVector& q, double normalization = 1.0);

enum class DerivativeMethod { automatic, analytic, finite_difference };

/// delta^{-1/2} Delta_Sigma delta^{1/2}. The analytic path uses the root
/// product form of delta (conjugation models); the finite-difference path
/// applies a fourth-order five-point stencil with step 1e-3 per axis.
double measure_term(const PolarActionModel& model, const RVector& q,
                    DerivativeMethod method = DerivativeMethod::automatic, double normalization = 1.0);

/// W^dagger (sum b^{ab} rho'(T_a) rho'(T_b)) W in the V^K basis W.
CMatrix spin_potential_matrix(const PolarActionModel& model, const SpinRep& rep, const RVector& q);

/// Uniform grid over the bounding box of the alcove (from its vertices),
/// keeping the nodes in the open alcove. Axis spacing h = width / (N + 1).
struct RadialGrid {
  int rank = 0;
  int n_per_axis = 0;
  RVector lower;
  RVector h;
  std::vector<RVector> nodes;
  std::vector<std::vector<int>> multi_index;
  /// neighbor[i][2 * axis + side] = node index or -1 (Dirichlet).
  std::vector<std::vector<int>> neighbor;

  int size() const { return static_cast<int>(nodes.size()); }
};

RadialGrid make_grid(const PolarActionModel& model, int n_per_axis);

struct AssemblyOptions {
  double normalization = 1.0;
  DerivativeMethod measure_method = DerivativeMethod::automatic;
};

/// Matrix of -1/2 Delta_red = -1/2 Delta_Sigma + 1/2 measure - 1/2 spin on
/// the grid, with V^K-valued nodes (block size vk_dim).
struct ReducedOperator {
  SparseCMatrix matrix;
  SparseCMatrix kinetic;
  RVector measure;                // measure_term at each node
  std::vector<CMatrix> spin;      // spin_potential_matrix at each node
  int block = 1;

  int size() const { return static_cast<int>(matrix.rows()); }
  double hermiticity_residual() const;
  /// True when the matrix is real and tridiagonal (rank 1, scalar blocks).
  bool real_tridiagonal() const;
  CMatrix dense() const;
};

ReducedOperator assemble_reduced_operator(const PolarActionModel& model, const SpinRep& rep, const RadialGrid& grid,
                                          const AssemblyOptions& options = {});

/// Largest size handled by the dense hermitian eigensolver.
inline constexpr int kDenseSpectrumLimit = 6000;

/// k lowest eigenvalues, ascending.
std::vector<double> spectrum(const ReducedOperator& op, int k);

/// Closed-form low spectrum where known: su(2) conjugation with the trivial
/// rep (j(j+1)/2, j = 0, 1/2, 1, ...) and the adjoint rep (j >= 1/2).
std::optional<std::vector<double>> reference_spectrum(const PolarActionModel& model, const std::string& rep, int k);

using ClassFunction = std::function<Complex(const RVector& q)>;

/// su(2) character of spin j at alcove coordinate q: sin((2j+1)q/2)/sin(q/2).
double su2_character(double j, double q);

/// Normalized radial inner product int f^* g delta dq / int delta dq by
/// tensor Gauss-Legendre quadrature on the alcove simplex (collapsed
/// coordinates for rank > 1).
Complex radial_inner_product(const PolarActionModel& model, const ClassFunction& f, const ClassFunction& g);

struct WeylQuadratureReport {
  Complex radial;
  Complex monte_carlo;
  double standard_error = 0.0;  // max over real and imaginary parts
  double residual = 0.0;        // |monte_carlo - radial|
  double sigmas = 0.0;          // residual / standard_error (0 if both vanish)
  long samples = 0;
};

/// Haar Monte Carlo of <f, g> (integrand evaluated through
/// project_to_section) against the radial quadrature. Samples run across
/// worker threads with per-sample seeds.
WeylQuadratureReport weyl_quadrature_check(const PolarActionModel& model, const ClassFunction& f,
                                           const ClassFunction& g, long samples, std::uint64_t seed);

}  // namespace polarred

#pragma once

#include "polarred/lie.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace polarred {

/// Minimum Gram eigenvalue / eigenphase gap below which a point is treated
/// as singular.
inline constexpr double kRegularityThreshold = 1e-8;

enum class ActionKind { conjugation, twisted_conjugation, hermann };

std::string to_string(ActionKind kind);

/// Family of singular hyperplanes {q : normal . q = offset + period * k, k in Z}.
struct Wall {
  RVector normal;
  double offset = 0.0;
  double period = 2.0 * 3.141592653589793;
};

/// Affine reflection q -> q - 2 (normal . q - value) / |normal|^2 normal.
struct Reflection {
  RVector normal;
  double value = 0.0;

  RVector apply(const RVector& q) const;
};

/// Chart on a flat section Sigma = exp(span A_i) with alcove coordinates q.
///
/// The alcove is the cell of the wall arrangement that contains the
/// reference point. Walls are the q-values where the isotropy algebra jumps.
class SectionChart {
 public:
  SectionChart() = default;
  /// abelian_basis: coordinates (in the group algebra) of A_1..A_r, assumed
  /// B-orthonormal. vertices: corners of the closed alcove when it is a
  /// simplex (used for uniform sampling), may be empty.
  SectionChart(std::vector<RVector> abelian_basis, std::vector<Wall> walls, RVector reference,
               std::vector<RVector> vertices = {});

  int rank() const { return static_cast<int>(abelian_basis_.size()); }
  const std::vector<RVector>& abelian_basis() const { return abelian_basis_; }
  const std::vector<Wall>& walls() const { return walls_; }
  const RVector& reference() const { return reference_; }
  const std::vector<RVector>& vertices() const { return vertices_; }

  /// Open alcove membership.
  bool in_alcove(const RVector& q) const;
  /// Euclidean distance from q to the nearest singular hyperplane.
  double wall_distance(const RVector& q) const;
  /// Reflections in the hyperplanes that bound the alcove, one per side of
  /// every wall family.
  std::vector<Reflection> weyl_action() const;
  /// Representative of q in the closed alcove, reached by reflecting in
  /// separating hyperplanes.
  RVector reduce_to_alcove(const RVector& q) const;
  /// Uniform point of the alcove at distance >= margin from every wall.
  RVector sample(std::mt19937_64& rng, double margin) const;

  /// exp(sum q_i A_i) as a matrix of the given algebra.
  GroupElement section_point(const LieAlgebraModel& group, const RVector& q) const;
  /// Matrix whose columns are the A_i.
  RMatrix basis_matrix() const;

 private:
  long cell_index(std::size_t wall, const RVector& q) const;

  std::vector<RVector> abelian_basis_;
  std::vector<Wall> walls_;
  RVector reference_;
  std::vector<RVector> vertices_;
  std::vector<long> reference_cell_;
};

/// Orthogonal decomposition G = K + K^perp of the symmetry algebra at
/// section points, with dual bases of K^perp. All bases are columns of
/// coordinate matrices in the symmetry algebra.
struct IsotropySplit {
  RMatrix k_basis;
  RMatrix kperp_basis;
  RMatrix kperp_dual;

  int k_dimension() const { return static_cast<int>(k_basis.cols()); }
  int kperp_dimension() const { return static_cast<int>(kperp_basis.cols()); }
};

/// Isometric action phi_(a,b)(y) = a y b^{-1} of a subgroup G of Y x Y on a
/// compact matrix group Y with bi-invariant metric B.
///
/// The symmetry algebra is stored as block-diagonal matrices diag(L, R) of
/// size 2n whose blocks are the left and right components of the embedding
/// into Y x Y. Symmetry-group elements are block-diagonal diag(a, b).
struct PolarActionModel {
  ActionKind kind = ActionKind::conjugation;
  std::string name;
  LieAlgebraModel group;
  LieAlgebraModel symmetry;
  /// Entrywise complex conjugation implements the twisting automorphism.
  bool conjugation_automorphism = false;
  SectionChart section;
  IsotropySplit isotropy_split;
  std::optional<RootData> roots;

  int group_n() const { return group.matrix_size(); }
  int rank() const { return section.rank(); }
};

/// Assembles a model and computes its isotropy split at the chart's
/// reference point from the kernel of the generator map.
PolarActionModel make_polar_action(ActionKind kind, std::string name, LieAlgebraModel group,
                                   LieAlgebraModel symmetry, bool conjugation_automorphism, SectionChart section,
                                   std::optional<RootData> roots = std::nullopt);

/// Symmetry-group element from its blocks.
GroupElement symmetry_element(const CMatrix& left, const CMatrix& right);
CMatrix left_block(const GroupElement& g);
CMatrix right_block(const GroupElement& g);

/// Haar sample of the symmetry group of the model.
GroupElement sample_symmetry(const PolarActionModel& model, std::uint64_t seed);

GroupElement act(const PolarActionModel& model, const GroupElement& g, const GroupElement& y);

/// Right-trivialized generator L_y zeta: the U with d/dt act(exp(t zeta), y) = U y.
RVector generator(const PolarActionModel& model, const RVector& zeta, const GroupElement& y);

/// Matrix of L_y (rows: group algebra, columns: symmetry algebra).
RMatrix generator_matrix(const PolarActionModel& model, const GroupElement& y);

/// Columns L_y T_alpha for the K^perp basis.
RMatrix vertical_frame(const PolarActionModel& model, const GroupElement& y);

GroupElement section_point(const PolarActionModel& model, const RVector& q);

struct TangentSplit {
  RVector vertical;
  RVector horizontal;
};

/// v = v_V + v_H with v_V in the orbit tangent space and v_H orthogonal to it.
TangentSplit split_tangent(const PolarActionModel& model, const GroupElement& y, const RVector& v);

struct SectionReport {
  bool passed = true;
  double max_orthogonality = 0.0;   // |B(L_y zeta, A_i)|
  double max_isotropy_residual = 0.0;  // |L_y k| for k in K
  int max_isotropy_dim_mismatch = 0;
  double max_flatness = 0.0;        // |[A_i, A_j]|
  int samples = 0;
  std::optional<RVector> offending_q;
  std::vector<std::string> failures;

  /// Throws ValidationFailure naming the first failed check.
  void require() const;
};

inline constexpr double kOrthogonalityTol = 1e-10;
inline constexpr double kFlatnessTol = 1e-12;
inline constexpr double kIsotropyTol = 1e-10;

/// Checks the section axioms at `samples` seeded alcove points. Samples are
/// distributed over worker threads (POLARRED_THREADS caps the count); each
/// sample draws from its own seeded stream, so the report does not depend on
/// the thread count.
SectionReport validate_section(const PolarActionModel& model, int samples, std::uint64_t seed);

struct SectionProjection {
  RVector q;
  GroupElement g;
  double residual = 0.0;  // max |act(g, section_point(q)) - y|
};

/// Realizes Y -> Y/G by a point of the alcove and a group element carrying
/// it to y. Closed forms exist for conjugation (unitary diagonalization and
/// eigenphase sorting) and for the SO(n) x SO(n) Hermann action; other
/// actions are solved by Gauss-Newton from `hint`, which is then required.
SectionProjection project_to_section(const PolarActionModel& model, const GroupElement& y,
                                     const std::optional<SectionProjection>& hint = std::nullopt);

/// Gauss-Newton solve of act(g, section_point(q)) = y starting from start.
SectionProjection refine_projection(const PolarActionModel& model, const GroupElement& y,
                                    const SectionProjection& start);

/// Number of worker threads for batch operations (POLARRED_THREADS, default
/// hardware concurrency).
int worker_count();

}  // namespace polarred

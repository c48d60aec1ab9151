#pragma once

#include "polarred/polar_action.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polarred {

/// Point of the reduced phase space. xi is stored in K^perp coordinates, so
/// its K component vanishes by construction.
struct ReducedState {
  RVector q;
  RVector p;
  RVector xi;
};

/// Point of the extended phase space T*Y x O at the section: alpha is the
/// right-trivialized covector (group-algebra coordinates, B-dual), xi a full
/// symmetry-algebra vector.
struct ExtendedPoint {
  GroupElement y;
  RVector alpha;
  RVector xi;
};

struct InertiaEvaluation {
  RMatrix b;
  RMatrix b_inv;
  double delta = 0.0;       // |det b|^{1/2}
  double min_eigenvalue = 0.0;
};

/// Coadjoint orbit through base_point (symmetry-algebra coordinates).
struct CoadjointOrbitSpec {
  enum class Kind { zero, su2_equator, kks, generic };
  Kind kind = Kind::zero;
  double radius = 0.0;  // su2_equator
  int n = 0;            // kks
  double nu = 0.0;      // kks
  RVector mu;           // generic

  static CoadjointOrbitSpec zero() { return {}; }
  static CoadjointOrbitSpec su2_equator(double r);
  static CoadjointOrbitSpec kks(int n, double nu);
  static CoadjointOrbitSpec generic(RVector mu);
  /// Parses "zero", "su2:r=<x>", "kks:nu=<x>" (n taken from the model) or
  /// "generic:<c1>,<c2>,...".
  static CoadjointOrbitSpec parse(const std::string& text, int n);

  /// Base point as a symmetry-algebra vector of the model. For su2_equator
  /// it is r T1; for kks it is i nu (v v^dagger - 1/n) with v_i = 1/sqrt(n),
  /// which lies in the root-plane span.
  RVector base_point(const PolarActionModel& model) const;
  std::string describe() const;
};

/// b_{ab}(q) = B(L_y T_a, L_y T_b) at y = section_point(q). Throws
/// RegularityError when the smallest eigenvalue is below the threshold.
InertiaEvaluation inertia_gram(const PolarActionModel& model, const RVector& q);

/// psi(alpha)_a = B(alpha, L_y e_a) over the symmetry-algebra basis.
RVector momentum_map(const PolarActionModel& model, const ExtendedPoint& point);

/// Psi = psi(alpha) + xi.
RVector total_momentum(const PolarActionModel& model, const ExtendedPoint& point);

/// Full symmetry-algebra vector of a K^perp coordinate vector.
RVector embed_kperp(const PolarActionModel& model, const RVector& xi);

/// K^perp coordinates of a symmetry-algebra vector. Throws DimensionError if
/// the K component exceeds tol relative to |xi|.
RVector to_kperp(const PolarActionModel& model, const RVector& xi_full, double tol = 1e-10);

struct ConstraintOptions {
  /// Sign of the vertical part alpha^V = sign * L b^{-1} xi. The correct
  /// value is -1; +1 is a fault-injection hook for negative controls.
  double vertical_sign = -1.0;
};

/// Solves psi(alpha) + xi = 0 at y = section_point(q): alpha = alpha^H +
/// alpha^V with alpha^H = sum p_i A_i and alpha^V = -L_y b^{-1} xi.
ExtendedPoint solve_constraint(const PolarActionModel& model, const ReducedState& state,
                               const ConstraintOptions& options = {});

/// 1/2 |p|^2 + 1/2 xi^T b^{-1} xi.
double reduced_hamiltonian(const PolarActionModel& model, const ReducedState& state);

/// 1/2 B(alpha, alpha).
double extended_hamiltonian(const PolarActionModel& model, const ExtendedPoint& point);

/// Spin potential 1/2 xi^T b(q)^{-1} xi.
double spin_potential(const PolarActionModel& model, const RVector& q, const RVector& xi);

/// |eta(A*xi, A*xi) - xi^T b^{-1} xi|; the left side goes through a QR
/// factorization of the vertical frame, the right side through a Cholesky
/// factorization of b.
double inertia_identity_residual(const PolarActionModel& model, const RVector& q, const RVector& xi);

enum class ForceMethod { automatic, root_formula, matrix_derivative, finite_difference };

struct ReducedDerivative {
  RVector qdot;
  RVector pdot;
  RVector xidot;  // full symmetry-algebra coordinates
};

/// Equations of motion in terms of the full symmetry-algebra spin vector
/// xi_full: qdot = p, pdot = -dV/dq, xidot = [J^{-1} xi, xi_full].
ReducedDerivative reduced_vector_field(const PolarActionModel& model, const RVector& q, const RVector& p,
                                       const RVector& xi_full, ForceMethod method = ForceMethod::automatic);

/// Same, for a reduced state (xidot returned in K^perp coordinates).
ReducedDerivative reduced_vector_field(const PolarActionModel& model, const ReducedState& state,
                                       ForceMethod method = ForceMethod::automatic);

/// Force -dV/dq of the spin potential.
RVector spin_force(const PolarActionModel& model, const RVector& q, const RVector& xi_kperp,
                   ForceMethod method = ForceMethod::automatic);

enum class Scheme { rk4, strang_split };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct TrajectorySample {
  double t = 0.0;
  ReducedState state;
  double energy = 0.0;
  double casimir = 0.0;     // B(xi, xi) of the full spin vector
  double xi_k_norm = 0.0;   // |xi_K|
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  bool wall_collision = false;
  double collision_time = 0.0;
  int steps = 0;

  double energy_drift() const;
  double casimir_drift() const;
  double max_xi_k_norm() const;
};

/// Integrates from state0 to t_end with step dt, recording every
/// `sample_every` steps and the final state. Stops with wall_collision set
/// when the state leaves the regular part of the alcove.
Trajectory integrate_reduced(const PolarActionModel& model, const ReducedState& state0, double t_end, double dt,
                             Scheme scheme = Scheme::rk4, int sample_every = 100);

/// exp(t U) y0 for right-trivialized velocity U (group-algebra coordinates).
GroupElement geodesic(const PolarActionModel& model, const GroupElement& y0, const RVector& u, double t);

/// Reduced state of the tangent vector U y (U right-trivialized). The K
/// freedom is fixed by gauge_fix.
ReducedState pullback_state(const PolarActionModel& model, const GroupElement& y, const RVector& u,
                            const std::optional<SectionProjection>& hint = std::nullopt,
                            SectionProjection* projection_out = nullptr);

/// Deterministic K-representative of the spin. For conjugation models the
/// torus is used to make every simple-root component of xi real and
/// nonnegative (S component 0, A component >= 0); for other kinds the state
/// is returned unchanged.
ReducedState gauge_fix(const PolarActionModel& model, const ReducedState& state);

struct FlowComparison {
  double max_q_deviation = 0.0;
  double max_energy_deviation = 0.0;
  double max_casimir_deviation = 0.0;
  double max_potential_deviation = 0.0;
  double max_deviation = 0.0;
  double energy_drift = 0.0;
  double casimir_drift = 0.0;
  double max_xi_k_norm = 0.0;
  double compared_until = 0.0;
  bool wall_collision = false;
  int samples = 0;
};

/// Runs the reduced flow and the geodesic through solve_constraint(state0)
/// and compares gauge-invariant observables at the recorded samples.
FlowComparison compare_flows(const PolarActionModel& model, const ReducedState& state0, double t_end, double dt,
                             Scheme scheme = Scheme::rk4, int sample_every = 100);

}  // namespace polarred

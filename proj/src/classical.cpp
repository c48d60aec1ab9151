#include "polarred/classical.hpp"

#include "polarred/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace polarred {

namespace {

void check_q(const PolarActionModel& model, const RVector& q, const char* where) {
  if (q.size() != model.rank()) throw DimensionError(std::string(where) + ": q has the wrong dimension");
  if (!model.section.in_alcove(q)) throw RegularityError(std::string(where) + ": q is outside the open alcove");
}

void check_xi(const PolarActionModel& model, const RVector& xi, const char* where) {
  if (xi.size() != model.isotropy_split.kperp_dimension())
    throw DimensionError(std::string(where) + ": xi must have K^perp dimension");
}

// Coordinates of the left blocks of the K^perp basis in the group algebra.
RMatrix left_frame(const PolarActionModel& model) {
  const int n = model.group_n();
  const int dim_g = model.symmetry.dimension();
  RMatrix l(model.group.dimension(), dim_g);
  for (int a = 0; a < dim_g; ++a) l.col(a) = model.group.coordinates(model.symmetry.basis()[a].topLeftCorner(n, n));
  return l * model.isotropy_split.kperp_basis;
}

bool has_root_formula(const PolarActionModel& model) {
  return model.kind == ActionKind::conjugation && model.roots.has_value();
}

RVector force_root_formula(const PolarActionModel& model, const RVector& q, const RVector& xi) {
  const RootData& rd = *model.roots;
  const RVector full = embed_kperp(model, xi);
  RVector f = RVector::Zero(q.size());
  for (std::size_t k = 0; k < rd.roots.size(); ++k) {
    const double alpha = rd.roots[k].dot(q);
    const double s = std::sin(0.5 * alpha);
    const auto& plane = rd.root_planes[k];
    const double weight = full(plane[0]) * full(plane[0]) + full(plane[1]) * full(plane[1]);
    f += weight / 8.0 * std::cos(0.5 * alpha) / (s * s * s) * rd.roots[k];
  }
  return f;
}

RVector force_matrix_derivative(const PolarActionModel& model, const RVector& q, const RVector& xi) {
  const GroupElement y = section_point(model, q);
  const RMatrix l = vertical_frame(model, y);
  const RMatrix b = l.transpose() * l;
  const RVector eta = Eigen::LDLT<RMatrix>(b).solve(xi);
  const RMatrix rotated = left_frame(model) - l;  // Ad_y of the right blocks
  const RMatrix a = model.section.basis_matrix();
  RVector f(q.size());
  for (int i = 0; i < q.size(); ++i) {
    const RMatrix dl = -model.group.ad_matrix(a.col(i)) * rotated;
    const RMatrix db = dl.transpose() * l + l.transpose() * dl;
    f(i) = 0.5 * eta.dot(db * eta);
  }
  return f;
}

RVector force_finite_difference(const PolarActionModel& model, const RVector& q, const RVector& xi) {
  constexpr double h = 1e-6;
  RVector f(q.size());
  for (int i = 0; i < q.size(); ++i) {
    RVector qp = q, qm = q;
    qp(i) += h;
    qm(i) -= h;
    f(i) = -(spin_potential(model, qp, xi) - spin_potential(model, qm, xi)) / (2.0 * h);
  }
  return f;
}

struct FlowState {
  RVector q, p, xi;  // xi in full symmetry-algebra coordinates
};

FlowState rk4_step(const PolarActionModel& model, const FlowState& s, double dt) {
  const auto k1 = reduced_vector_field(model, s.q, s.p, s.xi);
  const auto k2 = reduced_vector_field(model, s.q + 0.5 * dt * k1.qdot, s.p + 0.5 * dt * k1.pdot, s.xi + 0.5 * dt * k1.xidot);
  const auto k3 = reduced_vector_field(model, s.q + 0.5 * dt * k2.qdot, s.p + 0.5 * dt * k2.pdot, s.xi + 0.5 * dt * k2.xidot);
  const auto k4 = reduced_vector_field(model, s.q + dt * k3.qdot, s.p + dt * k3.pdot, s.xi + dt * k3.xidot);
  FlowState out = s;
  out.q += dt / 6.0 * (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot);
  out.p += dt / 6.0 * (k1.pdot + 2.0 * k2.pdot + 2.0 * k3.pdot + k4.pdot);
  out.xi += dt / 6.0 * (k1.xidot + 2.0 * k2.xidot + 2.0 * k3.xidot + k4.xidot);
  return out;
}

// Kick at frozen q: pdot = F(q, xi), xidot = [J^{-1} xi, xi].
FlowState kick_step(const PolarActionModel& model, const FlowState& s, double dt) {
  const auto& split = model.isotropy_split;
  const RMatrix b_inv = inertia_gram(model, s.q).b_inv;
  auto rhs = [&](const RVector& xi) {
    const RVector xk = split.kperp_basis.transpose() * xi;
    ReducedDerivative d;
    d.pdot = spin_force(model, s.q, xk);
    d.xidot = model.symmetry.bracket(split.kperp_basis * (b_inv * xk), xi);
    return d;
  };
  const auto k1 = rhs(s.xi);
  const auto k2 = rhs(s.xi + 0.5 * dt * k1.xidot);
  const auto k3 = rhs(s.xi + 0.5 * dt * k2.xidot);
  const auto k4 = rhs(s.xi + dt * k3.xidot);
  FlowState out = s;
  out.p += dt / 6.0 * (k1.pdot + 2.0 * k2.pdot + 2.0 * k3.pdot + k4.pdot);
  out.xi += dt / 6.0 * (k1.xidot + 2.0 * k2.xidot + 2.0 * k3.xidot + k4.xidot);
  return out;
}

TrajectorySample make_sample(const PolarActionModel& model, double t, const FlowState& s) {
  const auto& split = model.isotropy_split;
  TrajectorySample out;
  out.t = t;
  out.state = {s.q, s.p, split.kperp_basis.transpose() * s.xi};
  out.energy = reduced_hamiltonian(model, out.state);
  out.casimir = model.symmetry.pairing(s.xi, s.xi);
  out.xi_k_norm = split.k_dimension() > 0 ? (split.k_basis.transpose() * s.xi).norm() : 0.0;
  return out;
}

bool regular(const PolarActionModel& model, const RVector& q) {
  return model.section.in_alcove(q) && model.section.wall_distance(q) > kRegularityThreshold;
}

}  // namespace

CoadjointOrbitSpec CoadjointOrbitSpec::su2_equator(double r) {
  CoadjointOrbitSpec s;
  s.kind = Kind::su2_equator;
  s.radius = r;
  return s;
}

CoadjointOrbitSpec CoadjointOrbitSpec::kks(int n, double nu) {
  if (n < 2) throw DimensionError("kks orbit requires n >= 2");
  CoadjointOrbitSpec s;
  s.kind = Kind::kks;
  s.n = n;
  s.nu = nu;
  return s;
}

CoadjointOrbitSpec CoadjointOrbitSpec::generic(RVector mu) {
  CoadjointOrbitSpec s;
  s.kind = Kind::generic;
  s.mu = std::move(mu);
  return s;
}

CoadjointOrbitSpec CoadjointOrbitSpec::parse(const std::string& text, int n) {
  auto value_after = [&](const std::string& prefix) {
    try {
      std::size_t used = 0;
      const std::string rest = text.substr(prefix.size());
      const double v = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("malformed orbit spec '" + text + "'");
    }
  };
  if (text == "zero") return zero();
  if (text.rfind("su2:r=", 0) == 0) return su2_equator(value_after("su2:r="));
  if (text.rfind("kks:nu=", 0) == 0) return kks(n, value_after("kks:nu="));
  if (text.rfind("generic:", 0) == 0) {
    std::vector<double> values;
    std::stringstream ss(text.substr(8));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError("malformed generic orbit component '" + item + "'");
      }
    }
    return generic(Eigen::Map<RVector>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  throw ConfigError("unknown orbit spec '" + text + "' (expected zero, su2:r=<x>, kks:nu=<x>, generic:<list>)");
}

RVector CoadjointOrbitSpec::base_point(const PolarActionModel& model) const {
  const int dim_g = model.symmetry.dimension();
  switch (kind) {
    case Kind::zero:
      return RVector::Zero(dim_g);
    case Kind::generic:
      if (mu.size() != dim_g) throw DimensionError("generic orbit: base point has the wrong dimension");
      return mu;
    case Kind::su2_equator:
    case Kind::kks:
      break;
  }
  // Both special orbits are written in the group algebra; their symmetry
  // coordinates coincide when the symmetry basis is paired with the group basis.
  if (dim_g != model.group.dimension())
    throw DimensionError("orbit '" + describe() + "' is only defined for (twisted) conjugation models");
  if (kind == Kind::su2_equator) return radius * RVector::Unit(dim_g, 0);
  const int size = model.group_n();
  if (n != size) throw DimensionError("kks orbit: n does not match the model");
  const CMatrix v = CMatrix::Constant(size, 1, 1.0 / std::sqrt(static_cast<double>(size)));
  const CMatrix mu_matrix = Complex(0.0, nu) * (v * v.adjoint() - CMatrix::Identity(size, size) / double(size));
  return model.group.coordinates(mu_matrix);
}

std::string CoadjointOrbitSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::zero:
      return "zero";
    case Kind::su2_equator:
      os << "su2:r=" << radius;
      return os.str();
    case Kind::kks:
      os << "kks:n=" << n << ",nu=" << nu;
      return os.str();
    case Kind::generic:
      os << "generic:";
      for (int i = 0; i < mu.size(); ++i) os << (i ? "," : "") << mu(i);
      return os.str();
  }
  return "unknown";
}

InertiaEvaluation inertia_gram(const PolarActionModel& model, const RVector& q) {
  if (q.size() != model.rank()) throw DimensionError("inertia_gram: q has the wrong dimension");
  const GroupElement y = section_point(model, q);
  const RMatrix l = vertical_frame(model, y);
  InertiaEvaluation out;
  out.b = l.transpose() * model.group.bform() * l;
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(out.b);
  out.min_eigenvalue = eig.eigenvalues().size() ? eig.eigenvalues()(0) : 1.0;
  if (out.min_eigenvalue < kRegularityThreshold)
    throw RegularityError("inertia_gram: Gram matrix is singular at this q (wall of the alcove)");
  out.b_inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  out.delta = std::sqrt(std::abs(eig.eigenvalues().prod()));
  return out;
}

RVector momentum_map(const PolarActionModel& model, const ExtendedPoint& point) {
  if (point.alpha.size() != model.group.dimension()) throw DimensionError("momentum_map: alpha has the wrong dimension");
  return generator_matrix(model, point.y).transpose() * (model.group.bform() * point.alpha);
}

RVector total_momentum(const PolarActionModel& model, const ExtendedPoint& point) {
  if (point.xi.size() != model.symmetry.dimension()) throw DimensionError("total_momentum: xi has the wrong dimension");
  return momentum_map(model, point) + point.xi;
}

RVector embed_kperp(const PolarActionModel& model, const RVector& xi) {
  check_xi(model, xi, "embed_kperp");
  return model.isotropy_split.kperp_basis * xi;
}

RVector to_kperp(const PolarActionModel& model, const RVector& xi_full, double tol) {
  if (xi_full.size() != model.symmetry.dimension()) throw DimensionError("to_kperp: xi has the wrong dimension");
  const auto& split = model.isotropy_split;
  if (split.k_dimension() > 0) {
    const double k_part = (split.k_basis.transpose() * xi_full).norm();
    if (k_part > tol * std::max(1.0, xi_full.norm()))
      throw DimensionError("xi has a nonzero component along the isotropy algebra K");
  }
  return split.kperp_basis.transpose() * xi_full;
}

ExtendedPoint solve_constraint(const PolarActionModel& model, const ReducedState& state,
                               const ConstraintOptions& options) {
  check_q(model, state.q, "solve_constraint");
  check_xi(model, state.xi, "solve_constraint");
  if (state.p.size() != model.rank()) throw DimensionError("solve_constraint: p has the wrong dimension");
  ExtendedPoint out;
  out.y = section_point(model, state.q);
  const InertiaEvaluation inertia = inertia_gram(model, state.q);
  const RMatrix l = vertical_frame(model, out.y);
  out.alpha = model.section.basis_matrix() * state.p + options.vertical_sign * (l * (inertia.b_inv * state.xi));
  out.xi = embed_kperp(model, state.xi);
  return out;
}

double reduced_hamiltonian(const PolarActionModel& model, const ReducedState& state) {
  return 0.5 * state.p.squaredNorm() + spin_potential(model, state.q, state.xi);
}

double extended_hamiltonian(const PolarActionModel& model, const ExtendedPoint& point) {
  return 0.5 * model.group.pairing(point.alpha, point.alpha);
}

double spin_potential(const PolarActionModel& model, const RVector& q, const RVector& xi) {
  check_xi(model, xi, "spin_potential");
  if (xi.squaredNorm() == 0.0) {
    check_q(model, q, "spin_potential");
    return 0.0;
  }
  return 0.5 * xi.dot(inertia_gram(model, q).b_inv * xi);
}

double inertia_identity_residual(const PolarActionModel& model, const RVector& q, const RVector& xi) {
  check_q(model, q, "inertia_identity_residual");
  check_xi(model, xi, "inertia_identity_residual");
  const GroupElement y = section_point(model, q);
  const RMatrix l = vertical_frame(model, y);
  const int m = static_cast<int>(l.cols());

  Eigen::HouseholderQR<RMatrix> qr(l);
  const RMatrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  if (m > 0 && r.diagonal().cwiseAbs().minCoeff() < std::sqrt(kRegularityThreshold))
    throw RegularityError("inertia_identity_residual: vertical frame is rank deficient");
  const RMatrix qthin = qr.householderQ() * RMatrix::Identity(l.rows(), m);
  const RVector w = qthin * r.transpose().triangularView<Eigen::Lower>().solve(xi);
  const double lhs = model.group.pairing(w, w);

  const RMatrix b = l.transpose() * model.group.bform() * l;
  Eigen::LLT<RMatrix> llt(b);
  if (llt.info() != Eigen::Success) throw RegularityError("inertia_identity_residual: Gram matrix not positive definite");
  const double rhs = xi.dot(llt.solve(xi));
  return std::abs(lhs - rhs);
}

RVector spin_force(const PolarActionModel& model, const RVector& q, const RVector& xi, ForceMethod method) {
  check_q(model, q, "spin_force");
  check_xi(model, xi, "spin_force");
  if (method == ForceMethod::automatic)
    method = has_root_formula(model) ? ForceMethod::root_formula : ForceMethod::matrix_derivative;
  switch (method) {
    case ForceMethod::root_formula:
      if (!has_root_formula(model)) throw DimensionError("spin_force: root formula needs a conjugation model");
      if (model.section.wall_distance(q) < kRegularityThreshold)
        throw RegularityError("spin_force: q is on a wall");
      return force_root_formula(model, q, xi);
    case ForceMethod::matrix_derivative:
      return force_matrix_derivative(model, q, xi);
    case ForceMethod::finite_difference:
      return force_finite_difference(model, q, xi);
    case ForceMethod::automatic:
      break;
  }
  throw DimensionError("spin_force: unknown method");
}

ReducedDerivative reduced_vector_field(const PolarActionModel& model, const RVector& q, const RVector& p,
                                       const RVector& xi_full, ForceMethod method) {
  if (xi_full.size() != model.symmetry.dimension())
    throw DimensionError("reduced_vector_field: xi has the wrong dimension");
  const auto& split = model.isotropy_split;
  const RVector xi = split.kperp_basis.transpose() * xi_full;
  ReducedDerivative d;
  d.qdot = p;
  if (xi.squaredNorm() == 0.0) {
    check_q(model, q, "reduced_vector_field");
    d.pdot = RVector::Zero(q.size());
    d.xidot = RVector::Zero(xi_full.size());
    return d;
  }
  const InertiaEvaluation inertia = inertia_gram(model, q);
  d.pdot = spin_force(model, q, xi, method);
  d.xidot = model.symmetry.bracket(split.kperp_basis * (inertia.b_inv * xi), xi_full);
  return d;
}

ReducedDerivative reduced_vector_field(const PolarActionModel& model, const ReducedState& state, ForceMethod method) {
  check_xi(model, state.xi, "reduced_vector_field");
  ReducedDerivative d = reduced_vector_field(model, state.q, state.p, embed_kperp(model, state.xi), method);
  d.xidot = model.isotropy_split.kperp_basis.transpose() * d.xidot;
  return d;
}

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4") return Scheme::rk4;
  if (name == "strang_split") return Scheme::strang_split;
  throw ConfigError("unknown integration scheme '" + name + "' (expected rk4 or strang_split)");
}

std::string to_string(Scheme scheme) { return scheme == Scheme::rk4 ? "rk4" : "strang_split"; }

double Trajectory::energy_drift() const {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::abs(s.energy - samples.front().energy));
  return worst;
}

double Trajectory::casimir_drift() const {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::abs(s.casimir - samples.front().casimir));
  return worst;
}

double Trajectory::max_xi_k_norm() const {
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, s.xi_k_norm);
  return worst;
}

Trajectory integrate_reduced(const PolarActionModel& model, const ReducedState& state0, double t_end, double dt,
                             Scheme scheme, int sample_every) {
  if (!(dt > 0.0)) throw ConfigError("integrate_reduced: dt must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("integrate_reduced: t_end must be nonnegative");
  if (sample_every < 1) throw ConfigError("integrate_reduced: sample_every must be >= 1");
  check_q(model, state0.q, "integrate_reduced");
  FlowState s{state0.q, state0.p, embed_kperp(model, state0.xi)};
  Trajectory traj;
  traj.samples.push_back(make_sample(model, 0.0, s));
  const long steps = std::lround(t_end / dt);
  for (long k = 1; k <= steps; ++k) {
    const double t = std::min(t_end, k * dt);
    const double h = t - (k - 1) * dt;
    FlowState next;
    try {
      if (scheme == Scheme::rk4) {
        next = rk4_step(model, s, h);
      } else {
        FlowState half = s;
        half.q += 0.5 * h * s.p;
        if (!regular(model, half.q)) throw RegularityError("drift left the alcove");
        half = kick_step(model, half, h);
        half.q += 0.5 * h * half.p;
        next = half;
      }
      if (!regular(model, next.q)) throw RegularityError("step left the alcove");
      if (k % sample_every == 0 || k == steps) traj.samples.push_back(make_sample(model, t, next));
    } catch (const RegularityError&) {
      traj.wall_collision = true;
      traj.collision_time = (k - 1) * dt;
      if (traj.samples.back().t != traj.collision_time) traj.samples.push_back(make_sample(model, traj.collision_time, s));
      traj.steps = static_cast<int>(k - 1);
      return traj;
    }
    s = next;
    traj.steps = static_cast<int>(k);
  }
  return traj;
}

GroupElement geodesic(const PolarActionModel& model, const GroupElement& y0, const RVector& u, double t) {
  if (u.size() != model.group.dimension()) throw DimensionError("geodesic: velocity has the wrong dimension");
  if (y0.size() != model.group_n()) throw DimensionError("geodesic: y0 has the wrong size");
  return model.group.exp_map(u, t) * y0;
}

ReducedState gauge_fix(const PolarActionModel& model, const ReducedState& state) {
  if (model.kind != ActionKind::conjugation || !model.roots) return state;
  const RootData& rd = *model.roots;
  const int n = model.group_n();
  const RVector full = embed_kperp(model, state.xi);
  std::vector<double> chi(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    // simple root (i, i+1)
    std::size_t k = 0;
    while (rd.root_pairs[k] != std::make_pair(i, i + 1)) ++k;
    const double a = full(rd.root_planes[k][0]);
    const double b = full(rd.root_planes[k][1]);
    const double phase = std::hypot(a, b) > 1e-14 ? std::atan2(a, b) : 0.0;
    chi[i + 1] = chi[i] + phase;
  }
  CMatrix t = CMatrix::Zero(n, n);
  for (int m = 0; m < n; ++m) t(m, m) = std::polar(1.0, chi[m]);
  const RVector fixed = model.symmetry.adjoint(symmetry_element(t, t), full);
  ReducedState out = state;
  out.xi = model.isotropy_split.kperp_basis.transpose() * fixed;
  return out;
}

ReducedState pullback_state(const PolarActionModel& model, const GroupElement& y, const RVector& u,
                            const std::optional<SectionProjection>& hint, SectionProjection* projection_out) {
  if (u.size() != model.group.dimension()) throw DimensionError("pullback_state: velocity has the wrong dimension");
  const SectionProjection proj = project_to_section(model, y, hint);
  if (projection_out) *projection_out = proj;
  const CMatrix a = left_block(proj.g);
  const RVector us = model.group.coordinates(a.adjoint() * model.group.to_matrix(u) * a);
  const GroupElement s = section_point(model, proj.q);
  ReducedState out;
  out.q = proj.q;
  out.p = model.section.basis_matrix().transpose() * (model.group.bform() * us);
  if (!regular(model, out.q)) throw RegularityError("pullback_state: y is not a regular point");
  const RVector xi_full = -(generator_matrix(model, s).transpose() * (model.group.bform() * us));
  out.xi = model.isotropy_split.kperp_basis.transpose() * xi_full;
  return gauge_fix(model, out);
}

FlowComparison compare_flows(const PolarActionModel& model, const ReducedState& state0, double t_end, double dt,
                             Scheme scheme, int sample_every) {
  const Trajectory traj = integrate_reduced(model, state0, t_end, dt, scheme, sample_every);
  const ExtendedPoint start = solve_constraint(model, state0);
  FlowComparison out;
  out.wall_collision = traj.wall_collision;
  out.energy_drift = traj.energy_drift();
  out.casimir_drift = traj.casimir_drift();
  out.max_xi_k_norm = traj.max_xi_k_norm();
  std::optional<SectionProjection> hint = SectionProjection{state0.q, GroupElement::identity(2 * model.group_n()), 0.0};
  for (const auto& sample : traj.samples) {
    ReducedState pulled;
    SectionProjection proj;
    try {
      pulled = pullback_state(model, geodesic(model, start.y, start.alpha, sample.t), start.alpha, hint, &proj);
    } catch (const RegularityError&) {
      out.wall_collision = true;
      break;
    }
    hint = proj;
    const RVector xi_full = embed_kperp(model, pulled.xi);
    const double dq = (pulled.q - sample.state.q).cwiseAbs().maxCoeff();
    const double de = std::abs(reduced_hamiltonian(model, pulled) - sample.energy);
    const double dc = std::abs(model.symmetry.pairing(xi_full, xi_full) - sample.casimir);
    const double dv = std::abs(spin_potential(model, pulled.q, pulled.xi) -
                               spin_potential(model, sample.state.q, sample.state.xi));
    out.max_q_deviation = std::max(out.max_q_deviation, dq);
    out.max_energy_deviation = std::max(out.max_energy_deviation, de);
    out.max_casimir_deviation = std::max(out.max_casimir_deviation, dc);
    out.max_potential_deviation = std::max(out.max_potential_deviation, dv);
    out.compared_until = sample.t;
    ++out.samples;
  }
  out.max_deviation =
      std::max({out.max_q_deviation, out.max_energy_deviation, out.max_casimir_deviation, out.max_potential_deviation});
  return out;
}

}  // namespace polarred

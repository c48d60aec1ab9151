#include "polarred/quantum.hpp"

#include "polarred/errors.hpp"
#include "polarred/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace polarred {

namespace {

constexpr double kPi = 3.141592653589793;

RMatrix gram_at(const PolarActionModel& model, const RVector& q) {
  const RMatrix l = vertical_frame(model, section_point(model, q));
  return l.transpose() * model.group.bform() * l;
}

double unchecked_density(const PolarActionModel& model, const RVector& q) {
  return std::sqrt(std::abs(gram_at(model, q).determinant()));
}

bool has_root_product(const PolarActionModel& model) {
  return model.kind == ActionKind::conjugation && model.roots.has_value();
}

void check_interior(const PolarActionModel& model, const RVector& q, const char* where) {
  if (q.size() != model.rank()) throw DimensionError(std::string(where) + ": q has the wrong dimension");
  if (!model.section.in_alcove(q) || model.section.wall_distance(q) < kRegularityThreshold)
    throw RegularityError(std::string(where) + ": q is not in the open alcove");
}

double measure_analytic(const PolarActionModel& model, const RVector& q, double normalization) {
  // delta^{1/2} = sqrt(C) prod_alpha 2 sin(alpha/2)
  const RootData& rd = *model.roots;
  const double scale = std::sqrt(normalization);
  double u = scale;
  RVector grad_log = RVector::Zero(q.size());
  double lap_log = 0.0;
  for (const auto& a : rd.roots) {
    const double half = 0.5 * a.dot(q);
    const double s = std::sin(half);
    u *= 2.0 * s;
    grad_log += 0.5 * std::cos(half) / s * a;
    lap_log -= 0.25 / (s * s) * a.squaredNorm();
  }
  const double lap_u = u * (grad_log.squaredNorm() + lap_log);
  return lap_u / u;
}

double measure_fd(const PolarActionModel& model, const RVector& q, double normalization) {
  constexpr double h = 1e-3;
  auto u = [&](const RVector& x) { return std::sqrt(normalization * unchecked_density(model, x)); };
  const double u0 = u(q);
  double lap = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    RVector x = q;
    double acc = -30.0 * u0;
    for (int s : {-2, -1, 1, 2}) {
      x(i) = q(i) + s * h;
      acc += (std::abs(s) == 1 ? 16.0 : -1.0) * u(x);
    }
    lap += acc / (12.0 * h * h);
  }
  return lap / u0;
}

CMatrix nullspace(const CMatrix& stacked, int columns) {
  if (stacked.rows() == 0) return CMatrix::Identity(columns, columns);
  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-10 * scale) ++rank;
  return svd.matrixV().rightCols(columns - rank);
}

}  // namespace

double SpinRep::homomorphism_defect(const LieAlgebraModel& algebra) const {
  double worst = 0.0;
  const int d = algebra.dimension();
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const RVector c = algebra.bracket(RVector::Unit(d, a), RVector::Unit(d, b));
      CMatrix lhs = CMatrix::Zero(dim(), dim());
      for (int k = 0; k < d; ++k) lhs += c(k) * rep_matrices[k];
      const CMatrix rhs = rep_matrices[a] * rep_matrices[b] - rep_matrices[b] * rep_matrices[a];
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double SpinRep::invariance_defect(const RMatrix& k_basis) const {
  double worst = 0.0;
  for (int i = 0; i < k_basis.cols(); ++i) {
    CMatrix rk = CMatrix::Zero(dim(), dim());
    for (int a = 0; a < k_basis.rows(); ++a) rk += k_basis(a, i) * rep_matrices[a];
    if (vk_dim() > 0) worst = std::max(worst, (rk * vk_basis).cwiseAbs().maxCoeff());
  }
  return worst;
}

SpinRep make_rep(const PolarActionModel& model, const std::string& name) {
  const int d = model.symmetry.dimension();
  SpinRep rep;
  rep.name = name;
  if (name == "trivial") {
    rep.rep_matrices.assign(d, CMatrix::Zero(1, 1));
  } else if (name == "adjoint") {
    for (int a = 0; a < d; ++a) rep.rep_matrices.push_back(model.symmetry.ad_matrix(RVector::Unit(d, a)).cast<Complex>());
  } else {
    throw ConfigError("unknown representation '" + name + "' (expected trivial or adjoint)");
  }
  const int dim_v = static_cast<int>(rep.rep_matrices.front().rows());
  const auto& kb = model.isotropy_split.k_basis;
  CMatrix stacked(dim_v * kb.cols(), dim_v);
  for (int i = 0; i < kb.cols(); ++i) {
    CMatrix rk = CMatrix::Zero(dim_v, dim_v);
    for (int a = 0; a < d; ++a) rk += kb(a, i) * rep.rep_matrices[a];
    stacked.middleRows(i * dim_v, dim_v) = rk;
  }
  CMatrix basis = nullspace(stacked, dim_v);
  if (basis.cols() == 0) throw DimensionError("representation '" + name + "' has no K-invariant vectors (dim V^K = 0)");
  // Fix the column phases so that the largest entry of each column is real
  // positive; the spin matrix is then reproducible across runs.
  for (int c = 0; c < basis.cols(); ++c) {
    Eigen::Index r = 0;
    basis.col(c).cwiseAbs().maxCoeff(&r);
    basis.col(c) *= std::polar(1.0, -std::arg(basis(r, c)));
  }
  rep.vk_basis = basis;
  rep.vk_projector = basis * basis.adjoint();
  return rep;
}

double density(const PolarActionModel& model, const RVector& q, double normalization) {
  check_interior(model, q, "density");
  const RMatrix b = gram_at(model, q);
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(b, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().size() && eig.eigenvalues()(0) < kRegularityThreshold)
    throw RegularityError("density: Gram matrix is singular at this q");
  return normalization * std::sqrt(std::abs(eig.eigenvalues().prod()));
}

double measure_term(const PolarActionModel& model, const RVector& q, DerivativeMethod method, double normalization) {
  check_interior(model, q, "measure_term");
  if (!(normalization > 0.0)) throw DimensionError("measure_term: normalization must be positive");
  if (method == DerivativeMethod::automatic)
    method = has_root_product(model) ? DerivativeMethod::analytic : DerivativeMethod::finite_difference;
  if (method == DerivativeMethod::analytic) {
    if (!has_root_product(model)) throw DimensionError("measure_term: analytic path needs a conjugation model");
    return measure_analytic(model, q, normalization);
  }
  if (model.section.wall_distance(q) < 4e-3) throw RegularityError("measure_term: stencil reaches a wall");
  return measure_fd(model, q, normalization);
}

CMatrix spin_potential_matrix(const PolarActionModel& model, const SpinRep& rep, const RVector& q) {
  check_interior(model, q, "spin_potential_matrix");
  const auto& split = model.isotropy_split;
  const int m = split.kperp_dimension();
  const int dim_v = rep.dim();
  if (static_cast<int>(rep.rep_matrices.size()) != model.symmetry.dimension())
    throw DimensionError("spin_potential_matrix: representation does not match the model");
  const RMatrix b = gram_at(model, q);
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(b);
  if (m > 0 && eig.eigenvalues()(0) < kRegularityThreshold)
    throw RegularityError("spin_potential_matrix: Gram matrix is singular at this q");
  const RMatrix b_inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  std::vector<CMatrix> rt(m, CMatrix::Zero(dim_v, dim_v));
  for (int alpha = 0; alpha < m; ++alpha)
    for (int a = 0; a < model.symmetry.dimension(); ++a)
      if (split.kperp_basis(a, alpha) != 0.0) rt[alpha] += split.kperp_basis(a, alpha) * rep.rep_matrices[a];
  CMatrix sum = CMatrix::Zero(dim_v, dim_v);
  for (int alpha = 0; alpha < m; ++alpha)
    for (int beta = 0; beta < m; ++beta)
      if (b_inv(alpha, beta) != 0.0) sum += b_inv(alpha, beta) * (rt[alpha] * rt[beta]);
  return rep.vk_basis.adjoint() * sum * rep.vk_basis;
}

RadialGrid make_grid(const PolarActionModel& model, int n_per_axis) {
  if (n_per_axis < 1) throw ConfigError("make_grid: N must be positive");
  const auto& vertices = model.section.vertices();
  if (vertices.empty()) throw DimensionError("make_grid: the alcove of this model has no vertex data");
  const int r = model.rank();
  RadialGrid grid;
  grid.rank = r;
  grid.n_per_axis = n_per_axis;
  RVector lo = vertices.front(), hi = vertices.front();
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  grid.lower = lo;
  grid.h = (hi - lo) / double(n_per_axis + 1);

  long total = 1;
  for (int i = 0; i < r; ++i) total *= n_per_axis;
  if (total > 50'000'000L) throw ConfigError("make_grid: grid too large");
  std::vector<int> lookup(static_cast<std::size_t>(total), -1);
  std::vector<int> idx(r, 0);
  for (long flat = 0; flat < total; ++flat) {
    long rest = flat;
    RVector x(r);
    for (int i = 0; i < r; ++i) {
      idx[i] = static_cast<int>(rest % n_per_axis);
      rest /= n_per_axis;
      x(i) = lo(i) + grid.h(i) * (idx[i] + 1);
    }
    if (model.section.in_alcove(x) && model.section.wall_distance(x) > kRegularityThreshold) {
      lookup[flat] = static_cast<int>(grid.nodes.size());
      grid.nodes.push_back(x);
      grid.multi_index.push_back(idx);
    }
  }
  grid.neighbor.resize(grid.nodes.size());
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    auto& nb = grid.neighbor[k];
    nb.assign(2 * r, -1);
    for (int axis = 0; axis < r; ++axis) {
      for (int side = 0; side < 2; ++side) {
        std::vector<int> j = grid.multi_index[k];
        j[axis] += side == 0 ? -1 : 1;
        if (j[axis] < 0 || j[axis] >= n_per_axis) continue;
        long flat = 0, stride = 1;
        for (int i = 0; i < r; ++i, stride *= n_per_axis) flat += j[i] * stride;
        nb[2 * axis + side] = lookup[flat];
      }
    }
  }
  if (grid.nodes.empty()) throw ConfigError("make_grid: no grid nodes inside the alcove");
  return grid;
}

double ReducedOperator::hermiticity_residual() const {
  const SparseCMatrix diff = SparseCMatrix(matrix.adjoint()) - matrix;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

bool ReducedOperator::real_tridiagonal() const {
  if (block != 1) return false;
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(matrix, k); it; ++it)
      if (std::abs(it.row() - it.col()) > 1 || it.value().imag() != 0.0) return false;
  return true;
}

CMatrix ReducedOperator::dense() const { return CMatrix(matrix); }

ReducedOperator assemble_reduced_operator(const PolarActionModel& model, const SpinRep& rep, const RadialGrid& grid,
                                          const AssemblyOptions& options) {
  if (grid.rank != model.rank()) throw DimensionError("assemble_reduced_operator: grid rank does not match the model");
  const int nodes = grid.size();
  const int d = rep.vk_dim();
  ReducedOperator op;
  op.block = d;
  op.measure.resize(nodes);
  op.spin.assign(nodes, CMatrix());
  const bool trivial = rep.name == "trivial";
  parallel_for(static_cast<std::size_t>(nodes), [&](std::size_t k) {
    op.measure(k) = measure_term(model, grid.nodes[k], options.measure_method, options.normalization);
    op.spin[k] = trivial ? CMatrix::Zero(d, d) : spin_potential_matrix(model, rep, grid.nodes[k]);
  });

  std::vector<Eigen::Triplet<Complex>> kin, full;
  for (int k = 0; k < nodes; ++k) {
    double diag = 0.0;
    for (int axis = 0; axis < grid.rank; ++axis) {
      const double w = 0.5 / (grid.h(axis) * grid.h(axis));
      diag += 2.0 * w;
      for (int side = 0; side < 2; ++side) {
        const int nb = grid.neighbor[k][2 * axis + side];
        if (nb < 0) continue;
        for (int c = 0; c < d; ++c) kin.emplace_back(k * d + c, nb * d + c, -w);
      }
    }
    for (int c = 0; c < d; ++c) kin.emplace_back(k * d + c, k * d + c, diag);
    const CMatrix local = 0.5 * op.measure(k) * CMatrix::Identity(d, d) - 0.5 * op.spin[k];
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        if (local(a, b) != Complex(0.0)) full.emplace_back(k * d + a, k * d + b, local(a, b));
  }
  const int size = nodes * d;
  op.kinetic.resize(size, size);
  op.kinetic.setFromTriplets(kin.begin(), kin.end());
  full.insert(full.end(), kin.begin(), kin.end());
  op.matrix.resize(size, size);
  op.matrix.setFromTriplets(full.begin(), full.end());
  return op;
}

std::vector<double> spectrum(const ReducedOperator& op, int k) {
  const int size = op.size();
  if (k < 1 || k > size) throw ConfigError("spectrum: k must be between 1 and the matrix size");
  RVector values;
  if (op.real_tridiagonal()) {
    RVector diag(size), sub(std::max(size - 1, 0));
    for (int i = 0; i < size; ++i) diag(i) = op.matrix.coeff(i, i).real();
    for (int i = 0; i + 1 < size; ++i) sub(i) = op.matrix.coeff(i + 1, i).real();
    Eigen::SelfAdjointEigenSolver<RMatrix> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    values = eig.eigenvalues();
  } else {
    if (size > kDenseSpectrumLimit) throw ConfigError("spectrum: operator too large for the dense eigensolver");
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(op.dense(), Eigen::EigenvaluesOnly);
    values = eig.eigenvalues();
  }
  return std::vector<double>(values.data(), values.data() + k);
}

std::optional<std::vector<double>> reference_spectrum(const PolarActionModel& model, const std::string& rep, int k) {
  if (model.kind != ActionKind::conjugation || model.group_n() != 2) return std::nullopt;
  std::vector<double> out;
  for (int m = 0; m < k; ++m) {
    if (rep == "trivial") {
      const double j = 0.5 * m;
      out.push_back(0.5 * j * (j + 1.0));
    } else if (rep == "adjoint") {
      out.push_back(((2.0 + m) * (2.0 + m) - 1.0) / 8.0);
    } else {
      return std::nullopt;
    }
  }
  return out;
}

double su2_character(double j, double q) { return std::sin((2.0 * j + 1.0) * 0.5 * q) / std::sin(0.5 * q); }

Complex radial_inner_product(const PolarActionModel& model, const ClassFunction& f, const ClassFunction& g) {
  const auto& vertices = model.section.vertices();
  const int r = model.rank();
  if (static_cast<int>(vertices.size()) != r + 1)
    throw DimensionError("radial_inner_product: alcove is not a simplex with known vertices");
  using Rule = boost::math::quadrature::gauss<double, 64>;
  std::vector<double> t, w;
  for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
    const double x = Rule::abscissa()[i];
    const double wt = Rule::weights()[i];
    t.push_back(0.5 * (1.0 + x));
    w.push_back(0.5 * wt);
    if (x != 0.0) {
      t.push_back(0.5 * (1.0 - x));
      w.push_back(0.5 * wt);
    }
  }
  RMatrix edges(r, r);
  for (int k = 0; k < r; ++k) edges.col(k) = vertices[k + 1] - vertices[0];
  const int m = static_cast<int>(t.size());
  long total = 1;
  for (int i = 0; i < r; ++i) total *= m;
  std::vector<Complex> num(static_cast<std::size_t>(total));
  std::vector<double> den(static_cast<std::size_t>(total));
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t flat) {
    std::size_t rest = flat;
    double weight = 1.0, mass = 1.0, jac = 1.0;
    RVector lambda(r);
    for (int k = 0; k < r; ++k) {
      const int i = static_cast<int>(rest % m);
      rest /= m;
      jac *= mass;
      lambda(k) = mass * (1.0 - t[i]);
      mass *= t[i];
      weight *= w[i];
    }
    const RVector q = vertices[0] + edges * lambda;
    const double delta = unchecked_density(model, q);
    num[flat] = std::conj(f(q)) * g(q) * delta * weight * jac;
    den[flat] = delta * weight * jac;
  });
  Complex sn = 0.0;
  double sd = 0.0;
  for (long i = 0; i < total; ++i) {
    sn += num[i];
    sd += den[i];
  }
  return sn / sd;
}

WeylQuadratureReport weyl_quadrature_check(const PolarActionModel& model, const ClassFunction& f,
                                           const ClassFunction& g, long samples, std::uint64_t seed) {
  if (model.kind == ActionKind::twisted_conjugation)
    throw DimensionError("weyl_quadrature_check: needs a closed-form projection (conjugation or Hermann)");
  if (samples < 2) throw ConfigError("weyl_quadrature_check: need at least two samples");
  WeylQuadratureReport report;
  report.samples = samples;
  report.radial = radial_inner_product(model, f, g);
  std::vector<Complex> values(static_cast<std::size_t>(samples));
  const int n = model.group_n();
  parallel_for(values.size(), [&](std::size_t i) {
    const GroupElement y = haar_sample_su(n, mix_seed(seed, i));
    const RVector q = project_to_section(model, y).q;
    values[i] = std::conj(f(q)) * g(q);
  });
  Complex mean = 0.0;
  for (const auto& v : values) mean += v;
  mean /= double(samples);
  double var_re = 0.0, var_im = 0.0;
  for (const auto& v : values) {
    var_re += (v.real() - mean.real()) * (v.real() - mean.real());
    var_im += (v.imag() - mean.imag()) * (v.imag() - mean.imag());
  }
  const double denom = double(samples) * double(samples - 1);
  report.monte_carlo = mean;
  report.standard_error = std::sqrt(std::max(var_re, var_im) / denom);
  report.residual = std::abs(mean - report.radial);
  report.sigmas = report.standard_error > 0.0 ? report.residual / report.standard_error : (report.residual > 1e-12 ? 1e300 : 0.0);
  return report;
}

}  // namespace polarred

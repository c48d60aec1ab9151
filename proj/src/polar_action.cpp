#include "polarred/polar_action.hpp"

#include "polarred/errors.hpp"
#include "polarred/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <thread>

namespace polarred {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kKernelTol = 1e-8;

RMatrix orthonormal_from_projector(const RMatrix& projector, int target_dim) {
  const int d = static_cast<int>(projector.rows());
  RMatrix basis(d, 0);
  for (int i = 0; i < d && basis.cols() < target_dim; ++i) {
    RVector v = projector.col(i);
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < basis.cols(); ++c) v -= basis.col(c).dot(v) * basis.col(c);
    const double nrm = v.norm();
    if (nrm < 1e-6) continue;
    v /= nrm;
    for (int k = 0; k < d; ++k)
      if (std::abs(v(k)) < 1e-13) v(k) = 0.0;
    v.normalize();
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v;
  }
  return basis;
}

int kernel_dimension(const Eigen::VectorXd& singular_values, int columns) {
  int rank = 0;
  for (Eigen::Index k = 0; k < singular_values.size(); ++k)
    if (singular_values(k) > kKernelTol) ++rank;
  return columns - rank;
}

std::string describe(const RVector& q) {
  std::ostringstream os;
  os.precision(17);
  os << "q = (";
  for (Eigen::Index i = 0; i < q.size(); ++i) os << (i ? ", " : "") << q(i);
  os << ")";
  return os.str();
}

// Alcove representative of a multiset of phases: sorted ascending, shifted
// by multiples of `period` so that the sum vanishes and the spread stays
// below `period`. `order` receives the source index of each output slot and
// `shift` the number of periods added to it.
RVector phases_to_alcove(const RVector& phases, double period, std::vector<int>& order, std::vector<int>& shift) {
  const int n = static_cast<int>(phases.size());
  order.resize(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return phases(a) < phases(b); });
  RVector sorted(n);
  for (int i = 0; i < n; ++i) sorted(i) = phases(order[i]);
  const long k = std::lround(sorted.sum() / period);
  shift.assign(n, 0);
  RVector theta(n);
  std::vector<int> src(n), sh(n, 0);
  if (k > 0) {
    // the k largest move down by one period and become the smallest
    int pos = 0;
    for (int i = n - static_cast<int>(k); i < n; ++i, ++pos) {
      src[pos] = i;
      sh[pos] = -1;
    }
    for (int i = 0; i < n - static_cast<int>(k); ++i, ++pos) src[pos] = i;
  } else if (k < 0) {
    int pos = 0;
    for (int i = static_cast<int>(-k); i < n; ++i, ++pos) src[pos] = i;
    for (int i = 0; i < static_cast<int>(-k); ++i, ++pos) {
      src[pos] = i;
      sh[pos] = 1;
    }
  } else {
    std::iota(src.begin(), src.end(), 0);
  }
  std::vector<int> final_order(n);
  for (int i = 0; i < n; ++i) {
    theta(i) = sorted(src[i]) + sh[i] * period;
    final_order[i] = order[src[i]];
    shift[i] = sh[i];
  }
  order = final_order;
  return theta;
}

double alcove_gap(const RVector& theta, double period) {
  double gap = period - (theta(theta.size() - 1) - theta(0));
  for (Eigen::Index i = 0; i + 1 < theta.size(); ++i) gap = std::min(gap, theta(i + 1) - theta(i));
  return gap;
}

SectionProjection project_conjugation(const PolarActionModel& model, const GroupElement& y) {
  const int n = model.group_n();
  Eigen::ComplexSchur<CMatrix> schur(y.matrix);
  const CMatrix& t = schur.matrixT();
  RVector phases(n);
  for (int k = 0; k < n; ++k) phases(k) = std::arg(t(k, k));
  std::vector<int> order, shift;
  const RVector theta = phases_to_alcove(phases, 2.0 * kPi, order, shift);
  if (alcove_gap(theta, 2.0 * kPi) < kRegularityThreshold)
    throw RegularityError("project_to_section: coincident eigenphases (singular element)");
  CMatrix v(n, n);
  for (int i = 0; i < n; ++i) v.col(i) = schur.matrixU().col(order[i]);
  const Complex det = v.determinant();
  v.col(0) *= std::conj(det) / std::abs(det);
  SectionProjection out;
  out.q = model.roots->cartan_coordinates(theta);
  out.g = symmetry_element(v, v);
  return out;
}

SectionProjection project_hermann(const PolarActionModel& model, const GroupElement& y) {
  const int n = model.group_n();
  const CMatrix z = y.matrix.transpose() * y.matrix;
  RMatrix o;
  CVector d2;
  bool diagonal = false;
  for (double gamma : {0.7548776662466927, 1.3247179572447460, -0.5698402909980532}) {
    const RMatrix c = z.real() + gamma * z.imag();
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(0.5 * (c + c.transpose()));
    o = eig.eigenvectors();
    const CMatrix zd = o.transpose().cast<Complex>() * z * o.cast<Complex>();
    d2 = zd.diagonal();
    const CMatrix off = zd - CMatrix(d2.asDiagonal());
    if (off.cwiseAbs().maxCoeff() < 1e-9) {
      diagonal = true;
      break;
    }
  }
  if (!diagonal) throw RegularityError("project_to_section: degenerate spectrum of y^T y");
  RVector phases(n);
  for (int k = 0; k < n; ++k) phases(k) = 0.5 * std::arg(d2(k));
  CVector dinv(n);
  for (int k = 0; k < n; ++k) dinv(k) = std::polar(1.0, -phases(k));
  const CMatrix mc = y.matrix * o.cast<Complex>() * dinv.asDiagonal();
  RMatrix m = mc.real();
  std::vector<int> order, shift;
  const RVector theta = phases_to_alcove(phases, kPi, order, shift);
  if (alcove_gap(theta, kPi) < kRegularityThreshold)
    throw RegularityError("project_to_section: singular point of the Hermann action");
  RMatrix a(n, n), b(n, n);
  for (int i = 0; i < n; ++i) {
    // shifting a phase by pi flips the sign of the matching column of a
    a.col(i) = m.col(order[i]) * (shift[i] % 2 == 0 ? 1.0 : -1.0);
    b.col(i) = o.col(order[i]);
  }
  if (a.determinant() < 0.0) {
    a.col(0) *= -1.0;
    b.col(0) *= -1.0;
  }
  SectionProjection out;
  out.q = model.roots->cartan_coordinates(theta);
  out.g = symmetry_element(a.cast<Complex>(), b.cast<Complex>());
  return out;
}

double projection_residual(const PolarActionModel& model, const GroupElement& y, const SectionProjection& p) {
  return (act(model, p.g, section_point(model, p.q)).matrix - y.matrix).cwiseAbs().maxCoeff();
}

}  // namespace

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::conjugation: return "conjugation";
    case ActionKind::twisted_conjugation: return "twisted_conjugation";
    case ActionKind::hermann: return "hermann";
  }
  return "unknown";
}

int worker_count() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("POLARRED_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) cap = requested;
  }
  return cap;
}

RVector Reflection::apply(const RVector& q) const {
  return q - 2.0 * (normal.dot(q) - value) / normal.squaredNorm() * normal;
}

SectionChart::SectionChart(std::vector<RVector> abelian_basis, std::vector<Wall> walls, RVector reference,
                           std::vector<RVector> vertices)
    : abelian_basis_(std::move(abelian_basis)),
      walls_(std::move(walls)),
      reference_(std::move(reference)),
      vertices_(std::move(vertices)) {
  if (reference_.size() != rank()) throw DimensionError("SectionChart: reference point has wrong dimension");
  for (const auto& w : walls_)
    if (w.normal.size() != rank()) throw DimensionError("SectionChart: wall normal has wrong dimension");
  for (std::size_t w = 0; w < walls_.size(); ++w) reference_cell_.push_back(cell_index(w, reference_));
  if (wall_distance(reference_) <= 0.0) throw DimensionError("SectionChart: reference point lies on a wall");
}

long SectionChart::cell_index(std::size_t w, const RVector& q) const {
  const Wall& wall = walls_[w];
  return static_cast<long>(std::floor((wall.normal.dot(q) - wall.offset) / wall.period));
}

bool SectionChart::in_alcove(const RVector& q) const {
  if (q.size() != rank()) throw DimensionError("in_alcove: dimension mismatch");
  for (std::size_t w = 0; w < walls_.size(); ++w)
    if (cell_index(w, q) != reference_cell_[w]) return false;
  return wall_distance(q) > 0.0;
}

double SectionChart::wall_distance(const RVector& q) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& wall : walls_) {
    const double x = (wall.normal.dot(q) - wall.offset) / wall.period;
    best = std::min(best, wall.period * std::abs(x - std::round(x)) / wall.normal.norm());
  }
  return best;
}

std::vector<Reflection> SectionChart::weyl_action() const {
  std::vector<Reflection> out;
  for (std::size_t w = 0; w < walls_.size(); ++w) {
    const Wall& wall = walls_[w];
    for (long side : {0L, 1L})
      out.push_back({wall.normal, wall.offset + wall.period * static_cast<double>(reference_cell_[w] + side)});
  }
  return out;
}

RVector SectionChart::reduce_to_alcove(const RVector& q) const {
  RVector x = q;
  for (int iter = 0; iter < 10000; ++iter) {
    bool moved = false;
    for (std::size_t w = 0; w < walls_.size(); ++w) {
      const long cell = cell_index(w, x);
      if (cell == reference_cell_[w]) continue;
      const Wall& wall = walls_[w];
      const long boundary = cell > reference_cell_[w] ? reference_cell_[w] + 1 : reference_cell_[w];
      x = Reflection{wall.normal, wall.offset + wall.period * static_cast<double>(boundary)}.apply(x);
      moved = true;
    }
    if (!moved) return x;
  }
  throw RegularityError("reduce_to_alcove: reflection sequence did not terminate");
}

RVector SectionChart::sample(std::mt19937_64& rng, double margin) const {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    RVector q;
    if (!vertices_.empty()) {
      RVector w(static_cast<Eigen::Index>(vertices_.size()));
      for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log(1.0 - uniform(rng));
      w /= w.sum();
      q = RVector::Zero(rank());
      for (std::size_t i = 0; i < vertices_.size(); ++i) q += w(static_cast<Eigen::Index>(i)) * vertices_[i];
    } else {
      q = reference_;
      for (int i = 0; i < rank(); ++i) q(i) += 4.0 * kPi * (2.0 * uniform(rng) - 1.0);
    }
    if (in_alcove(q) && wall_distance(q) >= margin) return q;
  }
  throw RegularityError("SectionChart::sample: no alcove point found");
}

RMatrix SectionChart::basis_matrix() const {
  RMatrix m(abelian_basis_.empty() ? 0 : abelian_basis_.front().size(), rank());
  for (int i = 0; i < rank(); ++i) m.col(i) = abelian_basis_[i];
  return m;
}

GroupElement SectionChart::section_point(const LieAlgebraModel& group, const RVector& q) const {
  if (q.size() != rank()) throw DimensionError("section_point: q has wrong dimension");
  return group.exp_map(basis_matrix() * q);
}

GroupElement symmetry_element(const CMatrix& left, const CMatrix& right) {
  const auto n = left.rows();
  CMatrix m = CMatrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = left;
  m.bottomRightCorner(n, n) = right;
  return {m};
}

CMatrix left_block(const GroupElement& g) {
  const auto n = g.matrix.rows() / 2;
  return g.matrix.topLeftCorner(n, n);
}

CMatrix right_block(const GroupElement& g) {
  const auto n = g.matrix.rows() / 2;
  return g.matrix.bottomRightCorner(n, n);
}

PolarActionModel make_polar_action(ActionKind kind, std::string name, LieAlgebraModel group,
                                   LieAlgebraModel symmetry, bool conjugation_automorphism, SectionChart section,
                                   std::optional<RootData> roots) {
  if (symmetry.matrix_size() != 2 * group.matrix_size())
    throw DimensionError("make_polar_action: symmetry algebra must embed block-diagonally in Y x Y");
  PolarActionModel model;
  model.kind = kind;
  model.name = std::move(name);
  model.group = std::move(group);
  model.symmetry = std::move(symmetry);
  model.conjugation_automorphism = conjugation_automorphism;
  model.section = std::move(section);
  model.roots = std::move(roots);

  const GroupElement y = section_point(model, model.section.reference());
  const RMatrix l = generator_matrix(model, y);
  Eigen::JacobiSVD<RMatrix> svd(l, Eigen::ComputeFullV);
  const int dim_g = model.symmetry.dimension();
  const int kdim = kernel_dimension(svd.singularValues(), dim_g);
  const RMatrix kernel = svd.matrixV().rightCols(kdim);
  const RMatrix pk = kernel * kernel.transpose();
  auto& split = model.isotropy_split;
  split.k_basis = orthonormal_from_projector(pk, kdim);
  split.kperp_basis = orthonormal_from_projector(RMatrix::Identity(dim_g, dim_g) - split.k_basis * split.k_basis.transpose(),
                                                 dim_g - kdim);
  split.kperp_dual = model.symmetry.bform().inverse() * split.kperp_basis *
                     (split.kperp_basis.transpose() * split.kperp_basis).inverse();
  return model;
}

GroupElement sample_symmetry(const PolarActionModel& model, std::uint64_t seed) {
  const int n = model.group_n();
  switch (model.kind) {
    case ActionKind::conjugation: {
      const GroupElement a = haar_sample_su(n, seed);
      return symmetry_element(a.matrix, a.matrix);
    }
    case ActionKind::twisted_conjugation: {
      const GroupElement a = haar_sample_su(n, seed);
      return symmetry_element(a.matrix.conjugate(), a.matrix);
    }
    case ActionKind::hermann:
      return symmetry_element(haar_sample_so(n, seed).matrix, haar_sample_so(n, mix_seed(seed, 1)).matrix);
  }
  throw DimensionError("sample_symmetry: unknown action kind");
}

GroupElement act(const PolarActionModel& model, const GroupElement& g, const GroupElement& y) {
  const int n = model.group_n();
  if (y.size() != n) throw DimensionError("act: y has the wrong size");
  if (g.size() != 2 * n) throw DimensionError("act: g is not an element of the symmetry group");
  return {left_block(g) * y.matrix * right_block(g).adjoint()};
}

RMatrix generator_matrix(const PolarActionModel& model, const GroupElement& y) {
  const int n = model.group_n();
  if (y.size() != n) throw DimensionError("generator: y has the wrong size");
  const int dim_g = model.symmetry.dimension();
  RMatrix l(model.group.dimension(), dim_g);
  for (int a = 0; a < dim_g; ++a) {
    const CMatrix& e = model.symmetry.basis()[a];
    const CMatrix u = e.topLeftCorner(n, n) - y.matrix * e.bottomRightCorner(n, n) * y.matrix.adjoint();
    l.col(a) = model.group.coordinates(u);
  }
  return l;
}

RVector generator(const PolarActionModel& model, const RVector& zeta, const GroupElement& y) {
  if (zeta.size() != model.symmetry.dimension()) throw DimensionError("generator: zeta has the wrong dimension");
  return generator_matrix(model, y) * zeta;
}

RMatrix vertical_frame(const PolarActionModel& model, const GroupElement& y) {
  return generator_matrix(model, y) * model.isotropy_split.kperp_basis;
}

GroupElement section_point(const PolarActionModel& model, const RVector& q) {
  return model.section.section_point(model.group, q);
}

TangentSplit split_tangent(const PolarActionModel& model, const GroupElement& y, const RVector& v) {
  if (v.size() != model.group.dimension()) throw DimensionError("split_tangent: v has the wrong dimension");
  const RMatrix l = generator_matrix(model, y);
  Eigen::JacobiSVD<RMatrix> svd(l, Eigen::ComputeThinU);
  const int m = model.isotropy_split.kperp_dimension();
  const auto& s = svd.singularValues();
  if (m > 0 && s(m - 1) * s(m - 1) < kRegularityThreshold)
    throw RegularityError("split_tangent: orbit Gram matrix is ill-conditioned (singular point)");
  const RMatrix frame = svd.matrixU().leftCols(m);
  TangentSplit out;
  out.vertical = frame * (frame.transpose() * v);
  out.horizontal = v - out.vertical;
  return out;
}

void SectionReport::require() const {
  if (passed) return;
  std::string msg = "section validation failed";
  if (!failures.empty()) msg += ": " + failures.front();
  if (offending_q) msg += " at " + describe(*offending_q);
  throw ValidationFailure(msg);
}

SectionReport validate_section(const PolarActionModel& model, int samples, std::uint64_t seed) {
  SectionReport report;
  report.samples = samples;
  const auto& chart = model.section;
  const int r = chart.rank();
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      report.max_flatness = std::max(
          report.max_flatness, model.group.bracket(chart.abelian_basis()[i], chart.abelian_basis()[j]).cwiseAbs().maxCoeff());

  struct SampleResult {
    RVector q;
    double orthogonality = 0.0;
    double isotropy = 0.0;
    int dim_mismatch = 0;
  };
  std::vector<SampleResult> results(static_cast<std::size_t>(std::max(samples, 0)));
  const RMatrix a = chart.basis_matrix();
  const int kdim = model.isotropy_split.k_dimension();
  parallel_for(results.size(), [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    SampleResult& res = results[i];
    res.q = chart.sample(rng, 1e-2);
    const GroupElement y = section_point(model, res.q);
    const RMatrix l = generator_matrix(model, y);
    res.orthogonality = (a.transpose() * model.group.bform() * l).cwiseAbs().maxCoeff();
    if (kdim > 0) res.isotropy = (l * model.isotropy_split.k_basis).cwiseAbs().maxCoeff();
    Eigen::JacobiSVD<RMatrix> svd(l);
    res.dim_mismatch = std::abs(kernel_dimension(svd.singularValues(), static_cast<int>(l.cols())) - kdim);
  });

  auto fail = [&](const std::string& what, const std::optional<RVector>& q) {
    if (report.passed) report.offending_q = q;
    report.passed = false;
    report.failures.push_back(what);
  };
  if (report.max_flatness > kFlatnessTol) fail("flatness: abelian basis does not commute", chart.reference());
  for (const auto& res : results) {
    report.max_orthogonality = std::max(report.max_orthogonality, res.orthogonality);
    report.max_isotropy_residual = std::max(report.max_isotropy_residual, res.isotropy);
    report.max_isotropy_dim_mismatch = std::max(report.max_isotropy_dim_mismatch, res.dim_mismatch);
  }
  for (const auto& res : results) {
    if (res.orthogonality > kOrthogonalityTol) {
      fail("orthogonality: section tangent is not orthogonal to the orbit", res.q);
      break;
    }
  }
  for (const auto& res : results) {
    if (res.isotropy > kIsotropyTol || res.dim_mismatch != 0) {
      fail("isotropy: isotropy algebra is not constant on the alcove", res.q);
      break;
    }
  }
  return report;
}

SectionProjection refine_projection(const PolarActionModel& model, const GroupElement& y,
                                    const SectionProjection& start) {
  const int dim_g = model.symmetry.dimension();
  const int r = model.rank();
  const RMatrix a = model.section.basis_matrix();
  SectionProjection cur = start;
  for (int iter = 0; iter < 100; ++iter) {
    const GroupElement yc = act(model, cur.g, section_point(model, cur.q));
    const RVector res = model.group.coordinates(unitary_log(y.matrix * yc.matrix.adjoint()));
    if (res.cwiseAbs().maxCoeff() < 1e-14) break;
    RMatrix jac(model.group.dimension(), dim_g + r);
    jac.leftCols(dim_g) = generator_matrix(model, yc);
    const CMatrix left = left_block(cur.g);
    for (int i = 0; i < r; ++i)
      jac.col(dim_g + i) = model.group.coordinates(left * model.group.to_matrix(a.col(i)) * left.adjoint());
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(jac);
    cod.setThreshold(1e-10);
    const RVector step = cod.solve(res);
    cur.g = GroupElement{unitary_exp(model.symmetry.to_matrix(step.head(dim_g)))} * cur.g;
    cur.q += step.tail(r);
  }
  cur.residual = projection_residual(model, y, cur);
  if (cur.residual > 1e-9) throw RegularityError("project_to_section: Gauss-Newton solve did not converge");
  return cur;
}

SectionProjection project_to_section(const PolarActionModel& model, const GroupElement& y,
                                     const std::optional<SectionProjection>& hint) {
  if (y.size() != model.group_n()) throw DimensionError("project_to_section: y has the wrong size");
  SectionProjection out;
  const bool diagonal_section = model.roots.has_value();
  if (model.kind == ActionKind::conjugation && diagonal_section) {
    out = project_conjugation(model, y);
  } else if (model.kind == ActionKind::hermann && diagonal_section) {
    out = project_hermann(model, y);
  } else if (hint) {
    out = refine_projection(model, y, *hint);
    if (!model.section.in_alcove(out.q))
      throw RegularityError("project_to_section: continuation left the alcove");
  } else {
    throw RegularityError("project_to_section: no closed form for " + to_string(model.kind) +
                          " actions on this section; supply a hint");
  }
  out.residual = projection_residual(model, y, out);
  if (model.section.wall_distance(out.q) < kRegularityThreshold)
    throw RegularityError("project_to_section: point is within the regularity threshold of a wall");
  return out;
}

}  // namespace polarred

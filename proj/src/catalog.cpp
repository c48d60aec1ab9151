#include "polarred/catalog.hpp"

#include "polarred/errors.hpp"
#include "polarred/parallel.hpp"

#include <cmath>
#include <regex>

namespace polarred {

namespace {

constexpr double kPi = 3.141592653589793;

int pair_index(int n, int i, int j) {
  int idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b, ++idx)
      if (a == i && b == j) return idx;
  throw DimensionError("pair_index: invalid pair");
}

// Symmetry algebra spanned by diag(left(X), right(X)) over a list of
// B-orthonormal group-algebra elements.
LieAlgebraModel paired_algebra(const std::vector<std::pair<CMatrix, CMatrix>>& pairs) {
  std::vector<CMatrix> basis;
  const auto n = pairs.front().first.rows();
  for (const auto& [l, r] : pairs) {
    CMatrix m = CMatrix::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = l;
    m.bottomRightCorner(n, n) = r;
    basis.push_back(m);
  }
  const auto d = static_cast<Eigen::Index>(basis.size());
  return LieAlgebraModel(std::move(basis), RMatrix::Identity(d, d));
}

// Cartan chart of the diagonal torus whose walls are theta_j - theta_i in
// period * Z; the alcove is theta_1 < ... < theta_n, theta_n - theta_1 < period.
SectionChart torus_chart(const LieAlgebraModel& group, const RootData& roots, double period) {
  const int n = group.matrix_size();
  std::vector<RVector> basis;
  for (int idx : roots.cartan_basis) basis.push_back(RVector::Unit(group.dimension(), idx));
  std::vector<Wall> walls;
  for (const auto& a : roots.roots) walls.push_back({a, 0.0, period});
  RVector theta(n);
  for (int m = 0; m < n; ++m) theta(m) = period / n * (m - 0.5 * (n - 1));
  std::vector<RVector> vertices;
  for (int k = 0; k < n; ++k) {
    RVector v(n);
    for (int m = 0; m < n; ++m) v(m) = m < k ? -period * (n - k) / n : period * k / n;
    if (k == 0) v.setZero();
    vertices.push_back(roots.cartan_coordinates(v));
  }
  return SectionChart(std::move(basis), std::move(walls), roots.cartan_coordinates(theta), std::move(vertices));
}

CatalogEntry finish(PolarActionModel model, int expected_k, bool strict) {
  CatalogEntry entry;
  entry.name = model.name;
  entry.validation = validate_section(model, kCatalogValidationSamples, kCatalogValidationSeed);
  entry.expected_k_dimension = expected_k;
  if (expected_k >= 0 && model.isotropy_split.k_dimension() != expected_k) {
    entry.validation.passed = false;
    entry.validation.failures.push_back("isotropy: unexpected dimension of K");
  }
  entry.model = std::move(model);
  if (strict) entry.validation.require();
  return entry;
}

}  // namespace

CatalogEntry build_conjugation(int n) {
  if (n < 2) throw DimensionError("build_conjugation requires n >= 2");
  LieAlgebraModel group = LieAlgebraModel::su(n);
  RootData roots = RootData::su(n);
  std::vector<std::pair<CMatrix, CMatrix>> pairs;
  for (const auto& x : group.basis()) pairs.emplace_back(x, x);
  SectionChart chart = torus_chart(group, roots, 2.0 * kPi);
  auto model = make_polar_action(ActionKind::conjugation, "su" + std::to_string(n) + "-conj", group,
                                 paired_algebra(pairs), false, std::move(chart), std::move(roots));
  return finish(std::move(model), n - 1, true);
}

CatalogEntry build_twisted(int n) {
  if (n < 3) throw DimensionError("build_twisted requires n >= 3 (no outer automorphism below)");
  LieAlgebraModel group = LieAlgebraModel::su(n);
  std::vector<std::pair<CMatrix, CMatrix>> pairs;
  for (const auto& x : group.basis()) pairs.emplace_back(x.conjugate(), x);

  // exp(q A_{2k,2k+1}) rotates the plane (2k, 2k+1) by q/2. In these
  // coordinates the isotropy jumps on q_k +- q_l in 2 pi Z, q_k in pi + 2 pi Z
  // and, for odd n, q_k in 2 pi Z.
  const int m = n / 2;
  std::vector<RVector> basis;
  for (int k = 0; k < m; ++k) basis.push_back(RVector::Unit(group.dimension(), 2 * pair_index(n, 2 * k, 2 * k + 1) + 1));
  std::vector<Wall> walls;
  for (int k = 0; k < m; ++k) {
    walls.push_back({RVector::Unit(m, k), kPi, 2.0 * kPi});
    if (n % 2 == 1) walls.push_back({RVector::Unit(m, k), 0.0, 2.0 * kPi});
    for (int l = k + 1; l < m; ++l) {
      walls.push_back({RVector::Unit(m, k) + RVector::Unit(m, l), 0.0, 2.0 * kPi});
      walls.push_back({RVector::Unit(m, k) - RVector::Unit(m, l), 0.0, 2.0 * kPi});
    }
  }
  RVector reference(m);
  for (int k = 0; k < m; ++k) reference(k) = kPi * (m - k) / (m + 1);
  std::vector<RVector> vertices;
  vertices.push_back(RVector::Zero(m));
  if (n % 2 == 1) {
    for (int k = 1; k <= m; ++k) {
      RVector v = RVector::Zero(m);
      v.head(k).setConstant(kPi);
      vertices.push_back(v);
    }
  } else {
    for (int k = 1; k <= m - 2; ++k) {
      RVector v = RVector::Zero(m);
      v.head(k).setConstant(kPi);
      vertices.push_back(v);
    }
    RVector v = RVector::Constant(m, kPi);
    vertices.push_back(v);
    v(m - 1) = -kPi;
    vertices.push_back(v);
  }
  SectionChart chart(std::move(basis), std::move(walls), std::move(reference), std::move(vertices));
  auto model = make_polar_action(ActionKind::twisted_conjugation, "su" + std::to_string(n) + "-twisted", group,
                                 paired_algebra(pairs), true, std::move(chart));
  return finish(std::move(model), -1, true);
}

CatalogEntry build_hermann(int n, const std::string& k1_kind, const std::string& k2_kind,
                           const std::optional<std::vector<RVector>>& custom_section, bool strict) {
  if (n < 2) throw DimensionError("build_hermann requires n >= 2");
  if (k1_kind != "so" || k2_kind != "so")
    throw DimensionError("build_hermann: only K1 = K2 = SO(n) is supported (got " + k1_kind + ", " + k2_kind + ")");
  LieAlgebraModel group = LieAlgebraModel::su(n);
  const CMatrix zero = CMatrix::Zero(n, n);
  std::vector<std::pair<CMatrix, CMatrix>> pairs;
  std::vector<CMatrix> so_basis;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) so_basis.push_back(group.basis()[2 * pair_index(n, i, j) + 1]);
  for (const auto& x : so_basis) pairs.emplace_back(x, zero);
  for (const auto& x : so_basis) pairs.emplace_back(zero, x);
  const std::string name = "su" + std::to_string(n) + "-hermann-so" + std::to_string(n);

  if (!custom_section) {
    RootData roots = RootData::su(n);
    SectionChart chart = torus_chart(group, roots, kPi);
    auto model = make_polar_action(ActionKind::hermann, name, group, paired_algebra(pairs), false, std::move(chart),
                                   std::move(roots));
    return finish(std::move(model), 0, strict);
  }
  // A user-supplied section carries no wall data; the chart is the
  // coordinate box around a reference point well inside (0, pi)^r.
  const auto& basis = *custom_section;
  const int r = static_cast<int>(basis.size());
  if (r == 0) throw DimensionError("build_hermann: empty custom section");
  std::vector<Wall> walls;
  for (int k = 0; k < r; ++k) walls.push_back({RVector::Unit(r, k), 0.0, kPi});
  SectionChart chart(basis, std::move(walls), RVector::Constant(r, 0.5 * kPi));
  auto model = make_polar_action(ActionKind::hermann, name, group, paired_algebra(pairs), false, std::move(chart));
  return finish(std::move(model), -1, strict);
}

CatalogEntry build_model(const std::string& name) {
  static const std::regex conj(R"(su(\d+)-conj)");
  static const std::regex twisted(R"(su(\d+)-twisted)");
  static const std::regex hermann(R"(su(\d+)-hermann-so(\d+))");
  std::smatch m;
  if (std::regex_match(name, m, conj)) return build_conjugation(std::stoi(m[1]));
  if (std::regex_match(name, m, twisted)) return build_twisted(std::stoi(m[1]));
  if (std::regex_match(name, m, hermann)) {
    if (m[1] != m[2]) throw ConfigError("hermann model needs matching n: " + name);
    return build_hermann(std::stoi(m[1]));
  }
  throw ConfigError("unknown model '" + name + "'");
}

SutherlandFit derive_sutherland(int n, const CoadjointOrbitSpec& orbit, int q_samples, std::uint64_t seed) {
  if (q_samples < 1) throw ConfigError("derive_sutherland: need at least one sample");
  const CatalogEntry entry = build_conjugation(n);
  const PolarActionModel& model = entry.model;
  const RVector mu = orbit.base_point(model);
  RVector xi;
  try {
    xi = to_kperp(model, mu);
  } catch (const DimensionError&) {
    throw DimensionError("derive_sutherland: moment condition B(xi, H) = 0 fails for all Cartan H; orbit '" +
                         orbit.describe() + "' does not meet K^perp at its base point");
  }
  SutherlandFit fit;
  fit.n = n;
  fit.orbit = orbit.describe();
  fit.q_samples.resize(q_samples);
  fit.potential.resize(q_samples);
  fit.pair_sum.resize(q_samples);
  parallel_for(static_cast<std::size_t>(q_samples), [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    const RVector q = model.section.sample(rng, 0.05);
    const RVector theta = model.roots->eigenphases(q);
    double f = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const double s = std::sin(0.5 * (theta(a) - theta(b)));
        f += 1.0 / (s * s);
      }
    fit.q_samples[i] = q;
    fit.potential[i] = spin_potential(model, q, xi);
    fit.pair_sum[i] = f;
  });
  double vf = 0.0, ff = 0.0, vmax = 0.0;
  for (int i = 0; i < q_samples; ++i) {
    vf += fit.potential[i] * fit.pair_sum[i];
    ff += fit.pair_sum[i] * fit.pair_sum[i];
    vmax = std::max(vmax, std::abs(fit.potential[i]));
  }
  fit.residuals.assign(q_samples, 0.0);
  if (vmax == 0.0) {
    fit.free_model = true;
    return fit;
  }
  fit.coefficient = vf / ff;
  for (int i = 0; i < q_samples; ++i) {
    fit.residuals[i] = std::abs(fit.potential[i] - fit.coefficient * fit.pair_sum[i]) / std::abs(fit.potential[i]);
    fit.max_relative_residual = std::max(fit.max_relative_residual, fit.residuals[i]);
    fit.coefficient_spread = std::max(fit.coefficient_spread, std::abs(fit.potential[i] / fit.pair_sum[i] - fit.coefficient) /
                                                                  std::abs(fit.coefficient));
  }
  return fit;
}

std::vector<std::string> catalog_names() {
  return {"su2-conj", "su3-conj", "su4-conj", "su3-twisted", "su4-twisted", "su2-hermann-so2", "su3-hermann-so3"};
}

}  // namespace polarred

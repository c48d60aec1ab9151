#include "polarred/verify.hpp"

#include "polarred/catalog.hpp"
#include "polarred/errors.hpp"
#include "polarred/parallel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>

namespace polarred {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Suite {
  std::vector<CheckResult> results;

  void run(const std::string& name, double tolerance, const std::function<double(std::string&)>& body) {
    CheckResult r;
    r.name = name;
    r.tolerance = tolerance;
    try {
      r.value = body(r.detail);
      r.passed = std::isfinite(r.value) && r.value <= tolerance;
    } catch (const std::exception& e) {
      r.passed = false;
      r.value = std::nan("");
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
};

const PolarActionModel& cached(const std::string& name) {
  static std::map<std::string, PolarActionModel> models;
  auto it = models.find(name);
  if (it == models.end()) it = models.emplace(name, build_model(name).model).first;
  return it->second;
}

ReducedState random_state(const PolarActionModel& model, std::mt19937_64& rng, double margin) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ReducedState s;
  s.q = model.section.sample(rng, margin);
  s.p = RVector(model.rank());
  for (Eigen::Index i = 0; i < s.p.size(); ++i) s.p(i) = normal(rng);
  s.xi = RVector(model.isotropy_split.kperp_dimension());
  for (Eigen::Index i = 0; i < s.xi.size(); ++i) s.xi(i) = normal(rng);
  return s;
}

GroupElement random_torus(const PolarActionModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const int n = model.group_n();
  CMatrix t = CMatrix::Zero(n, n);
  for (int m = 0; m < n; ++m) t(m, m) = std::polar(1.0, angle(rng));
  return symmetry_element(t, t);
}

double state_distance(const ReducedState& a, const ReducedState& b) {
  return std::max({(a.q - b.q).cwiseAbs().maxCoeff(), (a.p - b.p).cwiseAbs().maxCoeff(),
                   (a.xi - b.xi).cwiseAbs().maxCoeff()});
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const VerifyOptions& options) {
  Suite suite;
  const std::uint64_t seed = options.seed;
  ConstraintOptions constraint;
  constraint.vertical_sign = options.inject_fault ? 1.0 : -1.0;

  // lie-core
  for (int n : {2, 3, 4}) {
    suite.run("lie.structure.su" + std::to_string(n), 1e-12, [&](std::string&) {
      const LieAlgebraModel g = LieAlgebraModel::su(n);
      return std::max({g.jacobi_defect(), g.invariance_defect(), g.commutator_defect()});
    });
  }

  // polar-action
  for (const auto& name : catalog_names()) {
    suite.run("section." + name, kOrthogonalityTol, [&](std::string& detail) {
      const SectionReport rep = validate_section(cached(name), kCatalogValidationSamples, seed);
      detail = rep.passed ? "ok" : rep.failures.front();
      return rep.passed ? std::max(rep.max_orthogonality, rep.max_isotropy_residual) : kInf;
    });
  }
  for (const auto& name : {"su2-conj", "su3-conj", "su2-hermann-so2"}) {
    suite.run(std::string("projection.haar.") + name, 1e-10, [&](std::string&) {
      const PolarActionModel& model = cached(name);
      double worst = 0.0;
      for (int i = 0; i < 200; ++i) {
        const GroupElement y = haar_sample_su(model.group_n(), mix_seed(seed, 1000 + i));
        const SectionProjection p = project_to_section(model, y);
        if (!model.section.in_alcove(p.q)) return kInf;
        worst = std::max(worst, p.residual);
      }
      return worst;
    });
  }

  // classical-reduction
  for (const auto& name : {"su2-conj", "su3-conj", "su3-twisted", "su2-hermann-so2"}) {
    const std::string tag(name);
    suite.run("constraint.residual." + tag, 1e-10, [&](std::string&) {
      const PolarActionModel& model = cached(tag);
      std::mt19937_64 rng(mix_seed(seed, 11));
      double worst = 0.0;
      for (int i = 0; i < 200; ++i) {
        const ReducedState s = random_state(model, rng, 0.05);
        worst = std::max(worst, total_momentum(model, solve_constraint(model, s, constraint)).norm());
      }
      return worst;
    });
    suite.run("hamiltonian.extended_match." + tag, 1e-12, [&](std::string&) {
      const PolarActionModel& model = cached(tag);
      std::mt19937_64 rng(mix_seed(seed, 12));
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const ReducedState s = random_state(model, rng, 0.2);
        worst = std::max(worst, std::abs(reduced_hamiltonian(model, s) -
                                         extended_hamiltonian(model, solve_constraint(model, s, constraint))));
      }
      return worst;
    });
    suite.run("inertia_identity." + tag, 1e-12, [&](std::string&) {
      const PolarActionModel& model = cached(tag);
      std::mt19937_64 rng(mix_seed(seed, 13));
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const ReducedState s = random_state(model, rng, 0.2);
        worst = std::max(worst, inertia_identity_residual(model, s.q, s.xi));
      }
      return worst;
    });
    suite.run("pullback.round_trip." + tag, 1e-10, [&](std::string&) {
      const PolarActionModel& model = cached(tag);
      std::mt19937_64 rng(mix_seed(seed, 14));
      double worst = 0.0;
      for (int i = 0; i < 50; ++i) {
        const ReducedState s = random_state(model, rng, 0.1);
        const ExtendedPoint e = solve_constraint(model, s, constraint);
        const SectionProjection hint{s.q, GroupElement::identity(2 * model.group_n()), 0.0};
        worst = std::max(worst, state_distance(pullback_state(model, e.y, e.alpha, hint), gauge_fix(model, s)));
      }
      return worst;
    });
  }
  suite.run("force.matrix_vs_root.su3-conj", 1e-10, [&](std::string&) {
    const PolarActionModel& model = cached("su3-conj");
    std::mt19937_64 rng(mix_seed(seed, 15));
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const ReducedState s = random_state(model, rng, 0.2);
      const RVector a = spin_force(model, s.q, s.xi, ForceMethod::root_formula);
      const RVector b = spin_force(model, s.q, s.xi, ForceMethod::matrix_derivative);
      worst = std::max(worst, (a - b).norm() / std::max(1.0, a.norm()));
    }
    return worst;
  });
  suite.run("force.fd_vs_root.su3-conj", 1e-6, [&](std::string&) {
    const PolarActionModel& model = cached("su3-conj");
    std::mt19937_64 rng(mix_seed(seed, 16));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const ReducedState s = random_state(model, rng, 0.2);
      const RVector a = spin_force(model, s.q, s.xi, ForceMethod::root_formula);
      const RVector b = spin_force(model, s.q, s.xi, ForceMethod::finite_difference);
      worst = std::max(worst, (a - b).norm() / std::max(1.0, a.norm()));
    }
    return worst;
  });
  suite.run("force.su2_closed_form", 1e-12, [&](std::string&) {
    const PolarActionModel& model = cached("su2-conj");
    double worst = 0.0;
    for (double q : {0.3, 1.0, 2.0, 3.5, 5.9}) {
      const RVector f = reduced_vector_field(model, {RVector::Constant(1, q), RVector::Zero(1), RVector::Unit(2, 0)}).pdot;
      worst = std::max(worst, std::abs(f(0) - std::cos(q / 2) / (8.0 * std::pow(std::sin(q / 2), 3))));
    }
    return worst;
  });
  suite.run("flow.free_motion.su3-conj", 1e-10, [&](std::string&) {
    const PolarActionModel& model = cached("su3-conj");
    ReducedState s{model.section.reference(), RVector::Zero(2), RVector::Zero(6)};
    s.p << 0.3, -0.2;
    const Trajectory t = integrate_reduced(model, s, 1.0, 1e-3, Scheme::rk4, 100);
    const auto& last = t.samples.back();
    return (last.state.q - (s.q + last.t * s.p)).cwiseAbs().maxCoeff() + (t.wall_collision ? 1.0 : 0.0);
  });

  struct FlowCase {
    std::string name, model, orbit;
    RVector p;
  };
  const std::vector<FlowCase> flows = {{"su2-r1", "su2-conj", "su2:r=1", RVector::Constant(1, 0.4)},
                                       {"su3-kks", "su3-conj", "kks:nu=1", (RVector(2) << 0.3, -0.2).finished()}};
  for (const auto& fc : flows) {
    FlowComparison cmp;
    bool ran = false;
    auto ensure = [&] {
      if (ran) return;
      const PolarActionModel& model = cached(fc.model);
      ReducedState s{model.section.reference(), fc.p, RVector()};
      s.xi = to_kperp(model, CoadjointOrbitSpec::parse(fc.orbit, model.group_n()).base_point(model));
      cmp = compare_flows(model, s, 1.0, 1e-4, Scheme::rk4, 100);
      ran = true;
    };
    suite.run("flow.compare." + fc.name, 1e-6, [&](std::string& detail) {
      ensure();
      detail = "samples=" + std::to_string(cmp.samples) + (cmp.wall_collision ? " wall collision" : "");
      return cmp.wall_collision ? kInf : cmp.max_deviation;
    });
    suite.run("flow.energy_drift." + fc.name, 1e-8, [&](std::string&) {
      ensure();
      return cmp.energy_drift;
    });
    suite.run("flow.casimir_drift." + fc.name, 1e-8, [&](std::string&) {
      ensure();
      return cmp.casimir_drift;
    });
  }
  suite.run("flow.compare.su3-generic-strang", 1e-6, [&](std::string&) {
    const PolarActionModel& model = cached("su3-conj");
    std::mt19937_64 rng(mix_seed(seed, 17));
    ReducedState s = random_state(model, rng, 0.5);
    s.p *= 0.2;
    s.xi *= 0.3;
    const FlowComparison cmp = compare_flows(model, s, 0.5, 1e-3, Scheme::strang_split, 50);
    return cmp.wall_collision ? kInf : cmp.max_deviation;
  });
  suite.run("flow.xi_k_norm.su3-conj", 1e-9, [&](std::string&) {
    const PolarActionModel& model = cached("su3-conj");
    std::mt19937_64 rng(mix_seed(seed, 18));
    ReducedState s = random_state(model, rng, 0.5);
    s.p *= 0.2;
    s.xi *= 0.3;
    return integrate_reduced(model, s, 1.0, 1e-3, Scheme::rk4, 10).max_xi_k_norm();
  });
  suite.run("invariance.weyl.su3-conj", 1e-10, [&](std::string&) {
    const PolarActionModel& model = cached("su3-conj");
    const RootData& rd = *model.roots;
    std::mt19937_64 rng(mix_seed(seed, 19));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const ReducedState s = random_state(model, rng, 0.2);
      const RVector full = embed_kperp(model, s.xi);
      const InertiaEvaluation base = inertia_gram(model, s.q);
      const double v0 = 0.5 * s.xi.dot(base.b_inv * s.xi);
      for (std::size_t i = 0; i < rd.weyl_generators.size(); ++i) {
        CMatrix w = CMatrix::Zero(3, 3);
        for (int m = 0; m < 3; ++m) w(m, m) = 1.0;
        w(i, i) = w(i + 1, i + 1) = 0.0;
        w(i, i + 1) = 1.0;
        w(i + 1, i) = -1.0;
        const RVector xi_w = to_kperp(model, model.symmetry.adjoint(symmetry_element(w, w), full));
        const InertiaEvaluation img = inertia_gram(model, rd.weyl_generators[i] * s.q);
        worst = std::max({worst, std::abs(img.delta - base.delta),
                          std::abs(0.5 * xi_w.dot(img.b_inv * xi_w) - v0) / std::max(1.0, v0)});
      }
    }
    return worst;
  });
  suite.run("invariance.gauge.su3-conj", 1e-10, [&](std::string&) {
    const PolarActionModel& model = cached("su3-conj");
    std::mt19937_64 rng(mix_seed(seed, 20));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const ReducedState s = random_state(model, rng, 0.2);
      ReducedState t = s;
      t.xi = to_kperp(model, model.symmetry.adjoint(random_torus(model, rng), embed_kperp(model, s.xi)));
      const double h = reduced_hamiltonian(model, s);
      worst = std::max({worst, std::abs(reduced_hamiltonian(model, t) - h) / std::max(1.0, h),
                        std::abs(t.xi.squaredNorm() - s.xi.squaredNorm()),
                        inertia_identity_residual(model, t.q, t.xi), state_distance(gauge_fix(model, s), gauge_fix(model, t))});
    }
    return worst;
  });

  // model-catalog
  for (int n : {2, 3, 4}) {
    suite.run("sutherland.su" + std::to_string(n), kSutherlandTol, [&](std::string& detail) {
      const CoadjointOrbitSpec orbit = n == 2 ? CoadjointOrbitSpec::su2_equator(1.0) : CoadjointOrbitSpec::kks(n, 1.0);
      const SutherlandFit fit = derive_sutherland(n, orbit, 50, seed);
      const double expected = n == 2 ? 1.0 / 8.0 : 1.0 / (2.0 * n * n);
      detail = "c=" + std::to_string(fit.coefficient);
      return std::max({fit.max_relative_residual, fit.coefficient_spread, std::abs(fit.coefficient - expected)});
    });
  }
  suite.run("sutherland.zero_orbit_is_free", 0.0, [&](std::string&) {
    const SutherlandFit fit = derive_sutherland(3, CoadjointOrbitSpec::zero(), 10, seed);
    return fit.free_model ? 0.0 : 1.0;
  });

  // quantum-reduction
  suite.run("quantum.density.su2", 1e-12, [&](std::string&) {
    const PolarActionModel& model = cached("su2-conj");
    double worst = 0.0;
    for (double q = 0.1; q < 2 * kPi; q += 0.37)
      worst = std::max(worst, std::abs(density(model, RVector::Constant(1, q)) - 4.0 * std::pow(std::sin(q / 2), 2)));
    return worst;
  });
  suite.run("quantum.measure.su2_constant", 1e-10, [&](std::string&) {
    const PolarActionModel& model = cached("su2-conj");
    double worst = 0.0;
    for (double q = 0.05; q < 2 * kPi; q += 0.05)
      worst = std::max(worst, std::abs(measure_term(model, RVector::Constant(1, q)) + 0.25));
    return worst;
  });
  for (const auto& name : {"su2-conj", "su3-conj"}) {
    const std::string tag(name);
    suite.run("quantum.measure.analytic_vs_fd." + tag, 1e-8, [&](std::string&) {
      const PolarActionModel& model = cached(tag);
      std::mt19937_64 rng(mix_seed(seed, 21));
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) {
        const RVector q = model.section.sample(rng, 0.3);
        worst = std::max(worst, std::abs(measure_term(model, q, DerivativeMethod::analytic) -
                                         measure_term(model, q, DerivativeMethod::finite_difference)));
      }
      return worst;
    });
  }
  suite.run("quantum.rep.adjoint_invariants", 1e-12, [&](std::string&) {
    double worst = 0.0;
    for (const auto& name : {"su2-conj", "su3-conj"}) {
      const PolarActionModel& model = cached(name);
      const SpinRep rep = make_rep(model, "adjoint");
      worst = std::max({worst, rep.homomorphism_defect(model.symmetry), rep.invariance_defect(model.isotropy_split.k_basis)});
    }
    return worst;
  });
  suite.run("quantum.spin.su2_adjoint", 1e-12, [&](std::string&) {
    const PolarActionModel& model = cached("su2-conj");
    const SpinRep rep = make_rep(model, "adjoint");
    double worst = 0.0;
    for (double q = 0.2; q < 2 * kPi; q += 0.5) {
      const CMatrix m = spin_potential_matrix(model, rep, RVector::Constant(1, q));
      worst = std::max(worst, std::abs(m(0, 0) - (-0.5 / std::pow(std::sin(q / 2), 2))));
    }
    return worst;
  });

  std::map<int, std::vector<double>> trivial_spectra;
  auto trivial_spectrum = [&](int n_grid) -> const std::vector<double>& {
    auto it = trivial_spectra.find(n_grid);
    if (it == trivial_spectra.end()) {
      const PolarActionModel& model = cached("su2-conj");
      const auto op = assemble_reduced_operator(model, make_rep(model, "trivial"), make_grid(model, n_grid));
      it = trivial_spectra.emplace(n_grid, spectrum(op, 5)).first;
    }
    return it->second;
  };
  suite.run("quantum.spectrum.su2_trivial", 1e-4, [&](std::string&) {
    const auto& ev = trivial_spectrum(2000);
    const auto ref = *reference_spectrum(cached("su2-conj"), "trivial", 5);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(ev[i] - ref[i]));
    return worst;
  });
  suite.run("quantum.convergence_slope.su2_trivial", 0.1, [&](std::string& detail) {
    const auto ref = *reference_spectrum(cached("su2-conj"), "trivial", 5);
    std::vector<double> lx, ly;
    for (int n_grid : {500, 1000, 2000, 4000}) {
      lx.push_back(std::log(2 * kPi / (n_grid + 1)));
      ly.push_back(std::log(std::abs(trivial_spectrum(n_grid)[4] - ref[4])));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    const double slope = sxy / sxx;
    detail = "slope=" + std::to_string(slope);
    return std::abs(slope - 2.0);
  });
  suite.run("quantum.spectrum.su2_adjoint", 1e-4, [&](std::string&) {
    const PolarActionModel& model = cached("su2-conj");
    const auto op = assemble_reduced_operator(model, make_rep(model, "adjoint"), make_grid(model, 2000));
    const auto ev = spectrum(op, 4);
    const auto ref = *reference_spectrum(model, "adjoint", 4);
    double worst = op.hermiticity_residual();
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(ev[i] - ref[i]));
    return worst;
  });
  suite.run("quantum.hermiticity.su3_adjoint", 1e-12, [&](std::string&) {
    const PolarActionModel& model = cached("su3-conj");
    return assemble_reduced_operator(model, make_rep(model, "adjoint"), make_grid(model, 12)).hermiticity_residual();
  });
  suite.run("quantum.c_invariance.su2", 1e-12, [&](std::string&) {
    const PolarActionModel& model = cached("su2-conj");
    const SpinRep rep = make_rep(model, "adjoint");
    const RadialGrid grid = make_grid(model, 400);
    const auto a = assemble_reduced_operator(model, rep, grid, {1.0, DerivativeMethod::automatic});
    const auto b = assemble_reduced_operator(model, rep, grid, {7.3, DerivativeMethod::automatic});
    return (a.dense() - b.dense()).cwiseAbs().maxCoeff();
  });
  suite.run("quantum.weyl.character_orthonormality", 1e-10, [&](std::string&) {
    const PolarActionModel& model = cached("su2-conj");
    double worst = 0.0;
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 4; ++b) {
        const ClassFunction f = [a](const RVector& q) { return Complex(su2_character(0.5 * a, q(0))); };
        const ClassFunction g = [b](const RVector& q) { return Complex(su2_character(0.5 * b, q(0))); };
        worst = std::max(worst, std::abs(radial_inner_product(model, f, g) - (a == b ? 1.0 : 0.0)));
      }
    return worst;
  });
  suite.run("quantum.weyl.monte_carlo_sigmas", 3.0, [&](std::string& detail) {
    const PolarActionModel& model = cached("su2-conj");
    const ClassFunction chi1 = [](const RVector& q) { return Complex(su2_character(1.0, q(0))); };
    const WeylQuadratureReport r = weyl_quadrature_check(model, chi1, chi1, 1000000, seed);
    detail = "mc=" + std::to_string(r.monte_carlo.real()) + " se=" + std::to_string(r.standard_error);
    return r.sigmas;
  });
  return suite.results;
}

Json verify_report(const VerifyOptions& options, const std::vector<CheckResult>& checks) {
  Json j;
  j["seed"] = options.seed;
  j["inject_fault"] = options.inject_fault;
  bool all = true;
  Json list = Json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}});
  }
  j["passed"] = all;
  j["checks"] = list;
  return j;
}

}  // namespace polarred

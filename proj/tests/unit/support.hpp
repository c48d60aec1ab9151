#pragma once

#include "polarred/catalog.hpp"
#include "polarred/errors.hpp"
#include "polarred/parallel.hpp"

#include <map>
#include <random>
#include <string>

namespace test_support {

using namespace polarred;

inline constexpr double kPi = 3.141592653589793;

inline const PolarActionModel& model(const std::string& name) {
  static std::map<std::string, PolarActionModel> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, build_model(name).model).first;
  return it->second;
}

inline ReducedState random_state(const PolarActionModel& m, std::mt19937_64& rng, double margin = 0.1) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ReducedState s;
  s.q = m.section.sample(rng, margin);
  s.p = RVector(m.rank());
  for (Eigen::Index i = 0; i < s.p.size(); ++i) s.p(i) = normal(rng);
  s.xi = RVector(m.isotropy_split.kperp_dimension());
  for (Eigen::Index i = 0; i < s.xi.size(); ++i) s.xi(i) = normal(rng);
  return s;
}

inline RVector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RVector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Pauli-based su(2) generators T_a = -(i/2) sigma_a, written out by hand.
inline CMatrix pauli_t(int a) {
  const Complex i(0.0, 1.0);
  CMatrix s(2, 2);
  if (a == 0) s << 0, 1, 1, 0;
  if (a == 1) s << 0, -i, i, 0;
  if (a == 2) s << 1, 0, 0, -1;
  return -0.5 * i * s;
}

}  // namespace test_support

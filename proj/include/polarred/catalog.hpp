#pragma once

#include "polarred/classical.hpp"
#include "polarred/polar_action.hpp"

#include <optional>
#include <string>
#include <vector>

namespace polarred {

/// A built model together with the outcome of its section validation.
struct CatalogEntry {
  std::string name;
  PolarActionModel model;
  SectionReport validation;
  int expected_k_dimension = -1;  // -1 when only known numerically
};

/// SU(n) acting on itself by conjugation; section = diagonal maximal torus,
/// K = Cartan subalgebra, K^perp = span of the root planes.
CatalogEntry build_conjugation(int n);

/// theta-twisted conjugation y -> theta(a) y a^{-1} on SU(n), n >= 3, with
/// theta = entrywise complex conjugation. The section is generated by the
/// rotation generators of the planes (1,2), (3,4), ... inside so(n); K is
/// computed numerically. Throws ValidationFailure if the section fails.
CatalogEntry build_twisted(int n);

/// Hermann action of K1 x K2 on SU(n), y -> a y b^{-1}. Only K1 = K2 = SO(n)
/// is supported. The default section is the diagonal torus; a custom set of
/// abelian generators (group-algebra coordinates) may be supplied. With
/// strict = true a failed validation throws, otherwise the report is
/// returned in the entry.
CatalogEntry build_hermann(int n, const std::string& k1_kind = "so", const std::string& k2_kind = "so",
                           const std::optional<std::vector<RVector>>& custom_section = std::nullopt,
                           bool strict = true);

/// Builds a model from its catalog name: su<n>-conj, su<n>-twisted,
/// su<n>-hermann-so<n>.
CatalogEntry build_model(const std::string& name);

/// Names of the models that ship enabled.
std::vector<std::string> catalog_names();

/// Fit of the spin potential to c * sum_{i<j} 1/sin^2((theta_i - theta_j)/2).
struct SutherlandFit {
  int n = 0;
  std::string orbit;
  double coefficient = 0.0;
  double max_relative_residual = 0.0;  // |V - c F| / |V| over samples
  double coefficient_spread = 0.0;     // max |V/F - c| / |c|
  bool free_model = false;             // spin potential vanishes identically
  std::vector<RVector> q_samples;
  std::vector<double> potential;
  std::vector<double> pair_sum;
  std::vector<double> residuals;
};

inline constexpr double kSutherlandTol = 1e-10;

/// Evaluates the spin potential of the SU(n) conjugation model on the orbit
/// base point at seeded alcove samples and fits the pairwise 1/sin^2 form.
/// Throws DimensionError when the base point has a component along K
/// (the orbit does not meet K^perp at it).
SutherlandFit derive_sutherland(int n, const CoadjointOrbitSpec& orbit, int q_samples, std::uint64_t seed);

/// Number of validation samples used by the builders.
inline constexpr int kCatalogValidationSamples = 100;
inline constexpr std::uint64_t kCatalogValidationSeed = 20240601;

}  // namespace polarred

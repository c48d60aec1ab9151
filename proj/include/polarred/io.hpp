#pragma once

#include "polarred/classical.hpp"
#include "polarred/quantum.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polarred {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string model = "su2-conj";
  std::string orbit = "su2:r=1";
  std::string rep = "trivial";
  // integrator
  double t_end = 1.0;
  double dt = 1e-4;
  std::string scheme = "rk4";
  int sample_every = 100;
  std::vector<double> q0;  // empty: alcove reference point
  std::vector<double> p0;  // empty: zero momentum
  bool oracle = false;
  // grid
  int grid_n = 2000;
  int k = 5;
  // derive
  int samples = 50;
  std::uint64_t seed = 20240601;
  // outputs (empty: stdout)
  std::string output;
  std::string summary;
  std::string dump_operator;
  // verify negative control: flips the sign of the vertical constraint
  bool inject_fault = false;
};

/// Reads a config object. Unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const Json& j);
RunConfig load_config_file(const std::string& path);
Json config_to_json(const RunConfig& config);

/// Positivity and consistency checks; throws ConfigError.
void validate_config(const RunConfig& config);

/// Reduced-model report: dimensions, b(q) and delta at sample points, and
/// the Sutherland fit for conjugation models.
Json cmd_derive(const RunConfig& config);

/// Writes the trajectory CSV to `csv` and returns the summary.
Json cmd_simulate(const RunConfig& config, std::ostream& csv);

Json cmd_spectrum(const RunConfig& config);

/// Header line of the trajectory CSV for the given dimensions.
std::string trajectory_header(int rank, int kperp_dim);
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// Binary dump: 8-byte magic "POLRDOP1", uint32 rows, uint32 cols (little
/// endian), then rows * cols complex128 values in row-major order.
void write_operator_dump(const std::string& path, const ReducedOperator& op);
CMatrix read_operator_dump(const std::string& path);

/// Serializes with the shortest representation that round-trips exactly.
std::string dump_json(const Json& j);

Json to_json(const RVector& v);
Json to_json(const RMatrix& m);

}  // namespace polarred

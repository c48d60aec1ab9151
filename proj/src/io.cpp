#include "polarred/io.hpp"

#include "polarred/catalog.hpp"
#include "polarred/errors.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace polarred {

namespace {

template <class T>
T get_field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ReducedState initial_state(const RunConfig& config, const PolarActionModel& model) {
  ReducedState s;
  const int r = model.rank();
  if (config.q0.empty()) {
    s.q = model.section.reference();
  } else {
    if (static_cast<int>(config.q0.size()) != r) throw ConfigError("q0 must have " + std::to_string(r) + " entries");
    s.q = Eigen::Map<const RVector>(config.q0.data(), r);
  }
  if (config.p0.empty()) {
    s.p = RVector::Zero(r);
  } else {
    if (static_cast<int>(config.p0.size()) != r) throw ConfigError("p0 must have " + std::to_string(r) + " entries");
    s.p = Eigen::Map<const RVector>(config.p0.data(), r);
  }
  if (!model.section.in_alcove(s.q)) throw ConfigError("q0 is not in the open alcove");
  const CoadjointOrbitSpec orbit = CoadjointOrbitSpec::parse(config.orbit, model.group_n());
  try {
    s.xi = to_kperp(model, orbit.base_point(model));
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("orbit base point: ") + e.what());
  }
  return s;
}

Json trajectory_summary(const PolarActionModel& model, const Trajectory& traj) {
  Json j;
  j["steps"] = traj.steps;
  j["samples"] = traj.samples.size();
  j["wall_collision"] = traj.wall_collision;
  j["collision_time"] = traj.collision_time;
  j["initial_energy"] = traj.samples.front().energy;
  j["energy_drift"] = traj.energy_drift();
  j["casimir_drift"] = traj.casimir_drift();
  j["max_xi_k_norm"] = traj.max_xi_k_norm();
  // K^perp preservation is only established for conjugation models
  j["xi_k_flag"] = model.kind != ActionKind::conjugation && traj.max_xi_k_norm() > 1e-9;
  const auto& last = traj.samples.back();
  j["final"] = {{"t", last.t}, {"q", to_json(last.state.q)}, {"p", to_json(last.state.p)}, {"H", last.energy}};
  return j;
}

}  // namespace

Json to_json(const RVector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Json to_json(const RMatrix& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(to_json(RVector(m.row(i).transpose())));
  return j;
}

std::string dump_json(const Json& j) { return j.dump(2); }

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"model",  "orbit",   "rep",          "t_end", "dt",     "scheme",
                                              "sample_every", "q0", "p0",          "oracle", "grid_n", "k",
                                              "samples", "seed",   "output",       "summary", "dump_operator",
                                              "inject_fault"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
  RunConfig c;
  if (j.contains("model")) c.model = get_field<std::string>(j, "model");
  if (j.contains("orbit")) c.orbit = get_field<std::string>(j, "orbit");
  if (j.contains("rep")) c.rep = get_field<std::string>(j, "rep");
  if (j.contains("t_end")) c.t_end = get_field<double>(j, "t_end");
  if (j.contains("dt")) c.dt = get_field<double>(j, "dt");
  if (j.contains("scheme")) c.scheme = get_field<std::string>(j, "scheme");
  if (j.contains("sample_every")) c.sample_every = get_field<int>(j, "sample_every");
  if (j.contains("q0")) c.q0 = get_field<std::vector<double>>(j, "q0");
  if (j.contains("p0")) c.p0 = get_field<std::vector<double>>(j, "p0");
  if (j.contains("oracle")) c.oracle = get_field<bool>(j, "oracle");
  if (j.contains("grid_n")) c.grid_n = get_field<int>(j, "grid_n");
  if (j.contains("k")) c.k = get_field<int>(j, "k");
  if (j.contains("samples")) c.samples = get_field<int>(j, "samples");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("config key 'seed' must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("output")) c.output = get_field<std::string>(j, "output");
  if (j.contains("summary")) c.summary = get_field<std::string>(j, "summary");
  if (j.contains("dump_operator")) c.dump_operator = get_field<std::string>(j, "dump_operator");
  if (j.contains("inject_fault")) c.inject_fault = get_field<bool>(j, "inject_fault");
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config file '" + path + "': " + e.what());
  }
  return parse_config(j);
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["model"] = c.model;
  j["orbit"] = c.orbit;
  j["rep"] = c.rep;
  j["t_end"] = c.t_end;
  j["dt"] = c.dt;
  j["scheme"] = c.scheme;
  j["sample_every"] = c.sample_every;
  j["q0"] = c.q0;
  j["p0"] = c.p0;
  j["oracle"] = c.oracle;
  j["grid_n"] = c.grid_n;
  j["k"] = c.k;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["summary"] = c.summary;
  j["dump_operator"] = c.dump_operator;
  j["inject_fault"] = c.inject_fault;
  return j;
}

void validate_config(const RunConfig& c) {
  if (!(c.t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (c.dt > c.t_end) throw ConfigError("dt must not exceed t_end");
  if (c.sample_every < 1) throw ConfigError("sample_every must be positive");
  if (c.grid_n < 1) throw ConfigError("grid_n must be positive");
  if (c.k < 1) throw ConfigError("k must be positive");
  if (c.samples < 1) throw ConfigError("samples must be positive");
  parse_scheme(c.scheme);
  if (c.rep != "trivial" && c.rep != "adjoint") throw ConfigError("rep must be trivial or adjoint");
}

Json cmd_derive(const RunConfig& config) {
  validate_config(config);
  const CatalogEntry entry = build_model(config.model);
  const PolarActionModel& model = entry.model;
  const CoadjointOrbitSpec orbit = CoadjointOrbitSpec::parse(config.orbit, model.group_n());
  RVector xi;
  try {
    xi = to_kperp(model, orbit.base_point(model));
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("orbit base point: ") + e.what());
  }
  Json j;
  j["model"] = model.name;
  j["kind"] = to_string(model.kind);
  j["rank"] = model.rank();
  j["dim_symmetry"] = model.symmetry.dimension();
  j["dim_k"] = model.isotropy_split.k_dimension();
  j["dim_kperp"] = model.isotropy_split.kperp_dimension();
  j["section_valid"] = entry.validation.passed;
  j["orbit"] = orbit.describe();
  j["zero_potential"] = xi.squaredNorm() == 0.0;
  try {
    const SpinRep rep = make_rep(model, config.rep);
    j["rep"] = rep.name;
    j["dim_v"] = rep.dim();
    j["dim_vk"] = rep.vk_dim();
  } catch (const DimensionError&) {
    j["rep"] = config.rep;
    j["dim_vk"] = 0;
  }
  Json points = Json::array();
  std::mt19937_64 rng(config.seed);
  const int shown = std::min(config.samples, 5);
  for (int i = 0; i < shown; ++i) {
    const RVector q = i == 0 ? model.section.reference() : model.section.sample(rng, 0.05);
    const InertiaEvaluation inertia = inertia_gram(model, q);
    points.push_back({{"q", to_json(q)},
                      {"b", to_json(inertia.b)},
                      {"delta", inertia.delta},
                      {"spin_potential", spin_potential(model, q, xi)}});
  }
  j["points"] = points;
  if (model.kind == ActionKind::conjugation) {
    const SutherlandFit fit = derive_sutherland(model.group_n(), orbit, config.samples, config.seed);
    j["sutherland"] = {{"coefficient", fit.coefficient},
                       {"max_relative_residual", fit.max_relative_residual},
                       {"coefficient_spread", fit.coefficient_spread},
                       {"free_model", fit.free_model},
                       {"samples", config.samples},
                       {"passed", fit.max_relative_residual < kSutherlandTol && fit.coefficient_spread < kSutherlandTol}};
  }
  return j;
}

std::string trajectory_header(int rank, int kperp_dim) {
  std::ostringstream os;
  os << "t";
  for (int i = 1; i <= rank; ++i) os << ",q_" << i;
  for (int i = 1; i <= rank; ++i) os << ",p_" << i;
  for (int i = 1; i <= kperp_dim; ++i) os << ",xi_" << i;
  os << ",H,casimir,xi_k_norm";
  return os.str();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  if (trajectory.samples.empty()) return;
  const auto& first = trajectory.samples.front().state;
  os << trajectory_header(static_cast<int>(first.q.size()), static_cast<int>(first.xi.size())) << "\n";
  for (const auto& s : trajectory.samples) {
    os << format_double(s.t);
    for (Eigen::Index i = 0; i < s.state.q.size(); ++i) os << ',' << format_double(s.state.q(i));
    for (Eigen::Index i = 0; i < s.state.p.size(); ++i) os << ',' << format_double(s.state.p(i));
    for (Eigen::Index i = 0; i < s.state.xi.size(); ++i) os << ',' << format_double(s.state.xi(i));
    os << ',' << format_double(s.energy) << ',' << format_double(s.casimir) << ',' << format_double(s.xi_k_norm) << "\n";
  }
}

Json cmd_simulate(const RunConfig& config, std::ostream& csv) {
  validate_config(config);
  const CatalogEntry entry = build_model(config.model);
  const PolarActionModel& model = entry.model;
  const ReducedState s0 = initial_state(config, model);
  const Scheme scheme = parse_scheme(config.scheme);
  const Trajectory traj = integrate_reduced(model, s0, config.t_end, config.dt, scheme, config.sample_every);
  write_trajectory_csv(csv, traj);
  Json j;
  j["model"] = model.name;
  j["orbit"] = config.orbit;
  j["scheme"] = to_string(scheme);
  j["t_end"] = config.t_end;
  j["dt"] = config.dt;
  j.update(trajectory_summary(model, traj));
  if (config.oracle) {
    const FlowComparison cmp = compare_flows(model, s0, config.t_end, config.dt, scheme, config.sample_every);
    j["oracle"] = {{"max_deviation", cmp.max_deviation},
                   {"max_q_deviation", cmp.max_q_deviation},
                   {"max_energy_deviation", cmp.max_energy_deviation},
                   {"max_casimir_deviation", cmp.max_casimir_deviation},
                   {"max_potential_deviation", cmp.max_potential_deviation},
                   {"compared_until", cmp.compared_until},
                   {"samples", cmp.samples},
                   {"wall_collision", cmp.wall_collision}};
  }
  return j;
}

Json cmd_spectrum(const RunConfig& config) {
  validate_config(config);
  const CatalogEntry entry = build_model(config.model);
  const PolarActionModel& model = entry.model;
  SpinRep rep;
  try {
    rep = make_rep(model, config.rep);
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }
  const RadialGrid grid = make_grid(model, config.grid_n);
  if (config.k > grid.size() * rep.vk_dim()) throw ConfigError("k exceeds the operator size");
  const ReducedOperator op = assemble_reduced_operator(model, rep, grid);
  const std::vector<double> values = spectrum(op, config.k);
  if (!config.dump_operator.empty()) write_operator_dump(config.dump_operator, op);
  Json j;
  j["model"] = model.name;
  j["rep"] = rep.name;
  j["grid_n"] = config.grid_n;
  j["nodes"] = grid.size();
  j["matrix_size"] = op.size();
  j["hermiticity_residual"] = op.hermiticity_residual();
  j["eigenvalues"] = values;
  if (const auto ladder = reference_spectrum(model, rep.name, config.k)) {
    std::vector<double> dev;
    double worst = 0.0;
    for (int i = 0; i < config.k; ++i) {
      dev.push_back(values[i] - (*ladder)[i]);
      worst = std::max(worst, std::abs(dev.back()));
    }
    j["oracle"] = {{"ladder", *ladder}, {"deviations", dev}, {"max_deviation", worst}};
  }
  return j;
}

void write_operator_dump(const std::string& path, const ReducedOperator& op) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write operator dump '" + path + "'");
  const char magic[8] = {'P', 'O', 'L', 'R', 'D', 'O', 'P', '1'};
  out.write(magic, 8);
  auto put_u32 = [&](std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  const auto rows = static_cast<std::uint32_t>(op.size());
  put_u32(rows);
  put_u32(rows);
  const CMatrix dense = op.dense();
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t k = 0; k < rows; ++k) {
      const double parts[2] = {dense(i, k).real(), dense(i, k).imag()};
      out.write(reinterpret_cast<const char*>(parts), sizeof parts);
    }
}

CMatrix read_operator_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open operator dump '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "POLRDOP1", 8) != 0) throw ConfigError("not an operator dump: '" + path + "'");
  auto get_u32 = [&] {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
  };
  const std::uint32_t rows = get_u32(), cols = get_u32();
  CMatrix m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t k = 0; k < cols; ++k) {
      double parts[2];
      in.read(reinterpret_cast<char*>(parts), sizeof parts);
      m(i, k) = Complex(parts[0], parts[1]);
    }
  if (!in) throw ConfigError("truncated operator dump '" + path + "'");
  return m;
}

}  // namespace polarred

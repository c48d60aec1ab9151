// polarred: command-line front end (derive, simulate, spectrum, verify).

#include "polarred/errors.hpp"
#include "polarred/io.hpp"
#include "polarred/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using polarred::RunConfig;

struct Overrides {
  std::string config_path;
  std::optional<std::string> model, orbit, rep, scheme, output, summary, dump_operator;
  std::optional<double> t_end, dt;
  std::optional<int> sample_every, grid_n, k, samples;
  std::optional<std::uint64_t> seed;
  std::vector<double> q0, p0;
  bool oracle = false;
  bool inject_fault = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
  cmd->add_option("--model", o.model, "catalog model (su2-conj, su3-conj, su3-twisted, su2-hermann-so2, ...)");
  cmd->add_option("--seed", o.seed, "base seed");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : polarred::load_config_file(o.config_path);
  if (o.model) c.model = *o.model;
  if (o.orbit) c.orbit = *o.orbit;
  if (o.rep) c.rep = *o.rep;
  if (o.scheme) c.scheme = *o.scheme;
  if (o.output) c.output = *o.output;
  if (o.summary) c.summary = *o.summary;
  if (o.dump_operator) c.dump_operator = *o.dump_operator;
  if (o.t_end) c.t_end = *o.t_end;
  if (o.dt) c.dt = *o.dt;
  if (o.sample_every) c.sample_every = *o.sample_every;
  if (o.grid_n) c.grid_n = *o.grid_n;
  if (o.k) c.k = *o.k;
  if (o.samples) c.samples = *o.samples;
  if (o.seed) c.seed = *o.seed;
  if (!o.q0.empty()) c.q0 = o.q0;
  if (!o.p0.empty()) c.p0 = o.p0;
  if (o.oracle) c.oracle = true;
  if (o.inject_fault) c.inject_fault = true;
  return c;
}

void emit(const polarred::Json& j, const std::string& path) {
  const std::string text = polarred::dump_json(j) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw polarred::ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduction of geodesic systems under hyperpolar actions"};
  app.require_subcommand(1);
  Overrides o;

  auto* derive = app.add_subcommand("derive", "reduced-model report: dimensions, inertia, Sutherland fit");
  add_common(derive, o);
  derive->add_option("--orbit", o.orbit, "orbit spec: zero, su2:r=<x>, kks:nu=<x>, generic:<c1,...>");
  derive->add_option("--rep", o.rep, "spin representation: trivial or adjoint");
  derive->add_option("--samples", o.samples, "alcove samples for the fit");
  derive->add_option("--output", o.output, "JSON output path");

  auto* simulate = app.add_subcommand("simulate", "integrate the reduced flow; CSV trajectory and JSON summary");
  add_common(simulate, o);
  simulate->add_option("--orbit", o.orbit, "orbit spec");
  simulate->add_option("--t-end", o.t_end, "final time");
  simulate->add_option("--dt", o.dt, "time step");
  simulate->add_option("--scheme", o.scheme, "rk4 or strang_split");
  simulate->add_option("--sample-every", o.sample_every, "record every n-th step");
  simulate->add_option("--q0", o.q0, "initial alcove coordinates")->expected(1, -1);
  simulate->add_option("--p0", o.p0, "initial momenta")->expected(1, -1);
  simulate->add_flag("--oracle", o.oracle, "compare against the unreduced geodesic flow");
  simulate->add_option("--output", o.output, "CSV output path (default stdout)");
  simulate->add_option("--summary", o.summary, "summary JSON path (default stdout, stderr when CSV goes to stdout)");

  auto* spec = app.add_subcommand("spectrum", "lowest eigenvalues of the reduced Hamilton operator");
  add_common(spec, o);
  spec->add_option("--rep", o.rep, "trivial or adjoint");
  spec->add_option("--grid-n", o.grid_n, "grid points per axis");
  spec->add_option("-k,--k", o.k, "number of eigenvalues");
  spec->add_option("--dump-operator", o.dump_operator, "binary dump of the assembled matrix");
  spec->add_option("--output", o.output, "JSON output path");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  add_common(verify, o);
  verify->add_flag("--inject-fault", o.inject_fault, "negative control: wrong sign in the vertical constraint");
  verify->add_option("--output", o.output, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig config = resolve(o);
    if (derive->parsed()) {
      emit(polarred::cmd_derive(config), config.output);
    } else if (simulate->parsed()) {
      polarred::Json summary;
      if (config.output.empty()) {
        summary = polarred::cmd_simulate(config, std::cout);
      } else {
        std::ofstream csv(config.output);
        if (!csv) throw polarred::ConfigError("cannot write '" + config.output + "'");
        summary = polarred::cmd_simulate(config, csv);
      }
      if (config.summary.empty() && config.output.empty())
        std::cerr << polarred::dump_json(summary) << "\n";
      else
        emit(summary, config.summary);
    } else if (spec->parsed()) {
      emit(polarred::cmd_spectrum(config), config.output);
    } else if (verify->parsed()) {
      polarred::VerifyOptions options;
      options.seed = config.seed;
      options.inject_fault = config.inject_fault;
      const auto checks = polarred::run_verify_suite(options);
      emit(polarred::verify_report(options, checks), config.output);
      bool ok = true;
      for (const auto& c : checks) {
        if (!c.passed) {
          std::cerr << "FAILED " << c.name << ": value " << c.value << " > tolerance " << c.tolerance
                    << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
          ok = false;
        }
      }
      return ok ? 0 : 1;
    }
  } catch (const polarred::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const polarred::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const polarred::ValidationFailure& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 1;
  } catch (const polarred::RegularityError& e) {
    std::cerr << "regularity error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

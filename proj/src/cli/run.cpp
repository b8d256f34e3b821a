#include "cli/run.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "wavebound/errors.hpp"

namespace wavebound::cli {

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct Flags {
  std::string config;
  std::string op, side, lambda_s;
  double lambda = 0.0, width = 0.0, boundary = 1.0, delta = 0.1, tol = 0.0, tail_tol = 0.0;
  long seed = 0, size = 0, atoms = 0, extent = 0, lanczos_size = 0, trials = 0;
  int bands = 0, dim = 0, threads = 0;
  std::string E, eps, T, L;
  std::string route, kind, exponent, suite, quantiles;
  std::vector<std::string> S;
  std::string out, summary;
};

int emit_error(ErrorKind kind, const std::string& message, int code) {
  json e = {{"error", {{"kind", to_string(kind)}, {"message", message}, {"exit_code", code}}}};
  std::cerr << e.dump() << "\n";
  return code;
}

std::pair<double, double> parse_interval(const std::string& s) {
  const std::size_t c = s.find(':');
  if (c == std::string::npos) throw ValidationError("interval must be 'lo:hi'");
  const Grid lo = parse_grid_flag(s.substr(0, c));
  const Grid hi = parse_grid_flag(s.substr(c + 1));
  return {lo.start, hi.start};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_grid_flag(item).start);
  return out;
}

void add_flags(CLI::App* sc, Flags& f) {
  sc->add_option("--config", f.config, "JSON configuration file");
  sc->add_option("--op", f.op, "operator family: free, random, fibonacci, explicit");
  sc->add_option("--side", f.side, "half or whole");
  sc->add_option("--lambda", f.lambda, "Fibonacci coupling");
  sc->add_option("--width", f.width, "random potential width");
  sc->add_option("--seed", f.seed, "random seed");
  sc->add_option("--size", f.size, "restrict to sites 1..size");
  sc->add_option("--boundary-coupling", f.boundary, "a(0) on the half line");
  sc->add_option("--E", f.E, "energy grid: v or start:stop:count[:log]");
  sc->add_option("--eps", f.eps, "epsilon grid");
  sc->add_option("--T", f.T, "time grid");
  sc->add_option("--L", f.L, "length grid");
  sc->add_option("--tol", f.tol, "absolute quadrature tolerance");
  sc->add_option("--tail-tol", f.tail_tol, "resolvent column truncation tolerance");
  sc->add_option("--route", f.route, "profile route: resolvent or propagation");
  sc->add_option("--kind", f.kind, "scale kind: solution or transfer");
  sc->add_option("--exponent", f.exponent, "beta, lambda or pb");
  sc->add_option("--suite", f.suite, "verification suite");
  sc->add_option("--delta", f.delta, "spreading threshold");
  sc->add_option("--quantiles", f.quantiles, "comma-separated spectral quantiles");
  sc->add_option("--S", f.S, "spectral interval lo:hi (repeatable)");
  sc->add_option("--atoms", f.atoms, "spectral atom truncation");
  sc->add_option("--bands", f.bands, "band-tree level");
  sc->add_option("--trials", f.trials, "random trials");
  sc->add_option("--dim", f.dim, "lattice dimension");
  sc->add_option("--extent", f.extent, "lattice half-width");
  sc->add_option("--lanczos-size", f.lanczos_size, "Lanczos steps");
  sc->add_option("--out", f.out, "CSV output path (stdout when absent)");
  sc->add_option("--summary", f.summary, "JSON summary path; '-' for stdout");
  sc->add_option("--threads", f.threads, "worker threads (default: all cores)");
}

RunConfig resolve(const std::string& command, const CLI::App* sc, const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ValidationError("cannot read config file '" + f.config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    c = parse_config(j);
    if (!c.command.empty() && c.command != command)
      throw ValidationError("config command '" + c.command + "' does not match '" + command + "'");
  }
  c.command = command;
  c.threads = default_thread_count();
  auto given = [&](const char* name) { return sc->get_option(name)->count() > 0; };
  if (given("--op")) c.op.family = f.op;
  if (given("--lambda")) {
    c.op.lambda = f.lambda;
    if (!given("--op")) c.op.family = "fibonacci";
  }
  if (given("--side")) c.op.side = f.side;
  if (given("--width")) c.op.width = f.width;
  if (given("--seed")) {
    if (f.seed < 0) throw ValidationError("seed must be >= 0");
    c.op.seed = static_cast<std::uint64_t>(f.seed);
  }
  if (given("--size")) c.op.size = f.size;
  if (given("--boundary-coupling")) c.op.boundary_coupling = f.boundary;
  if (given("--E")) c.E = parse_grid_flag(f.E);
  if (given("--eps")) c.eps = parse_grid_flag(f.eps);
  if (given("--T")) c.T = parse_grid_flag(f.T);
  if (given("--L")) c.L = parse_grid_flag(f.L);
  if (given("--tol")) c.abs_tol = f.tol;
  if (given("--tail-tol")) c.tail_tol = f.tail_tol;
  if (given("--route")) c.params.route = f.route;
  if (given("--kind")) c.params.kind = f.kind;
  if (given("--exponent")) c.params.exponent = f.exponent;
  if (given("--suite")) c.params.suite = f.suite;
  if (given("--delta")) c.params.delta = f.delta;
  if (given("--quantiles")) c.params.quantiles = parse_list(f.quantiles);
  if (given("--S")) {
    c.params.S.clear();
    for (const auto& s : f.S) c.params.S.push_back(parse_interval(s));
  }
  if (given("--atoms")) c.params.atoms = f.atoms;
  if (given("--bands")) c.params.bands = f.bands;
  if (given("--trials")) {
    if (f.trials < 1) throw ValidationError("trials must be positive");
    c.params.trials = static_cast<std::uint64_t>(f.trials);
  }
  if (given("--dim")) c.lattice.dim = f.dim;
  if (given("--extent")) c.lattice.extent = f.extent;
  if (given("--lanczos-size")) c.lattice.lanczos_size = f.lanczos_size;
  if (given("--out")) c.out_csv = f.out;
  if (given("--summary")) c.out_json = f.summary;
  if (given("--threads")) c.threads = f.threads;
  validate(c);
  return c;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Dynamical bounds on wavepacket spreading for Jacobi operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Flags f;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : commands()) {
    CLI::App* sc = app.add_subcommand(name);
    add_flags(sc, f);
    subs.push_back({name, sc});
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error(ErrorKind::validation, e.what(), kExitValidation);
  }

  try {
    std::string command;
    const CLI::App* sc = nullptr;
    for (const auto& [name, s] : subs)
      if (s->parsed()) {
        command = name;
        sc = s;
      }
    const RunConfig c = resolve(command, sc, f);
    const std::uint64_t hash = config_hash(c);
    const CommandResult res = run_command(c);
    const int code = res.verification_failed ? kExitVerification : kExitOk;
    const std::string csv = render_csv(res.table, hash);
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    json summary = {{"command", c.command}, {"version", kVersion},     {"config_hash", hex},
                    {"config", to_json(c)}, {"results", res.summary}, {"exit_code", code}};
    if (c.out_csv.empty())
      std::cout << csv;
    else
      write_file(c.out_csv, csv);
    std::string summary_path = c.out_json;
    if (summary_path.empty() && !c.out_csv.empty()) summary_path = c.out_csv + ".json";
    if (summary_path == "-")
      std::cout << summary.dump(2) << "\n";
    else if (!summary_path.empty())
      write_file(summary_path, summary.dump(2) + "\n");
    std::cout.flush();
    return code;
  } catch (const ValidationError& e) {
    return emit_error(e.kind(), e.what(), kExitValidation);
  } catch (const RangeError& e) {
    return emit_error(e.kind(), e.what(), kExitValidation);
  } catch (const DomainError& e) {
    return emit_error(e.kind(), e.what(), kExitValidation);
  } catch (const VerificationFailure& e) {
    return emit_error(e.kind(), e.what(), kExitVerification);
  } catch (const Error& e) {
    return emit_error(e.kind(), e.what(), kExitNumerical);
  } catch (const std::exception& e) {
    return emit_error(ErrorKind::convergence, e.what(), kExitNumerical);
  }
}

}  // namespace wavebound::cli

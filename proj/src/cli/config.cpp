#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wavebound/errors.hpp"

namespace wavebound::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
  return v.get<double>();
}

long get_integer(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
  return v.get<long>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ValidationError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ValidationError(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError(where + "." + key + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

Grid parse_grid(const json& j) {
  reject_unknown(j, {"start", "stop", "count", "spacing"}, "grid");
  if (!j.contains("start")) throw ValidationError("grid needs 'start'");
  Grid g;
  g.start = get_number(j, "start", "grid");
  g.stop = j.contains("stop") ? get_number(j, "stop", "grid") : g.start;
  g.count = j.contains("count") ? static_cast<int>(get_integer(j, "count", "grid")) : 1;
  if (j.contains("spacing")) {
    const std::string s = get_string(j, "spacing", "grid");
    if (s == "log")
      g.spacing = Grid::Spacing::log;
    else if (s == "linear")
      g.spacing = Grid::Spacing::linear;
    else
      throw ValidationError("grid spacing must be 'linear' or 'log'");
  }
  if (g.count < 1) throw ValidationError("grid count must be at least 1");
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw ValidationError("grid bounds must be finite");
  if (g.spacing == Grid::Spacing::log && !(g.start > 0.0 && g.stop > 0.0))
    throw ValidationError("log grid bounds must be positive");
  return g;
}

json grid_json(const Grid& g) {
  return {{"start", g.start},
          {"stop", g.stop},
          {"count", g.count},
          {"spacing", g.spacing == Grid::Spacing::log ? "log" : "linear"}};
}

Grid parse_grid_flag(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t c = text.find(':', pos);
    parts.push_back(text.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse grid value '" + s + "'");
    }
    if (used != s.size()) throw ValidationError("cannot parse grid value '" + s + "'");
    return v;
  };
  json j;
  if (parts.size() == 1) {
    j = {{"start", num(parts[0])}};
  } else if (parts.size() == 3 || parts.size() == 4) {
    const double count = num(parts[2]);
    if (count != std::floor(count)) throw ValidationError("grid count must be an integer");
    j = {{"start", num(parts[0])}, {"stop", num(parts[1])}, {"count", static_cast<long>(count)}};
    if (parts.size() == 4) j["spacing"] = parts[3];
  } else {
    throw ValidationError("grid flag must be 'v' or 'start:stop:count[:spacing]'");
  }
  return parse_grid(j);
}

RunConfig parse_config(const json& j) {
  reject_unknown(j, {"command", "operator", "lattice", "grids", "tolerances", "params", "output", "threads"}, "config");
  RunConfig c;
  if (j.contains("command")) c.command = get_string(j, "command", "config");
  if (j.contains("threads")) c.threads = static_cast<int>(get_integer(j, "threads", "config"));
  if (j.contains("operator")) {
    const json& o = j.at("operator");
    const std::string w = "operator";
    reject_unknown(o, {"family", "side", "lambda", "width", "seed", "size", "a", "b", "boundary_coupling"}, w);
    if (o.contains("family")) c.op.family = get_string(o, "family", w);
    if (o.contains("side")) c.op.side = get_string(o, "side", w);
    if (o.contains("lambda")) c.op.lambda = get_number(o, "lambda", w);
    if (o.contains("width")) c.op.width = get_number(o, "width", w);
    if (o.contains("seed")) {
      const long s = get_integer(o, "seed", w);
      if (s < 0) throw ValidationError("operator.seed must be >= 0");
      c.op.seed = static_cast<std::uint64_t>(s);
    }
    if (o.contains("size")) c.op.size = get_integer(o, "size", w);
    if (o.contains("a")) c.op.a = get_numbers(o, "a", w);
    if (o.contains("b")) c.op.b = get_numbers(o, "b", w);
    if (o.contains("boundary_coupling")) c.op.boundary_coupling = get_number(o, "boundary_coupling", w);
  }
  if (j.contains("lattice")) {
    const json& o = j.at("lattice");
    reject_unknown(o, {"dim", "extent", "lanczos_size"}, "lattice");
    if (o.contains("dim")) c.lattice.dim = static_cast<int>(get_integer(o, "dim", "lattice"));
    if (o.contains("extent")) c.lattice.extent = get_integer(o, "extent", "lattice");
    if (o.contains("lanczos_size")) c.lattice.lanczos_size = get_integer(o, "lanczos_size", "lattice");
  }
  if (j.contains("grids")) {
    const json& g = j.at("grids");
    reject_unknown(g, {"E", "eps", "T", "L"}, "grids");
    if (g.contains("E")) c.E = parse_grid(g.at("E"));
    if (g.contains("eps")) c.eps = parse_grid(g.at("eps"));
    if (g.contains("T")) c.T = parse_grid(g.at("T"));
    if (g.contains("L")) c.L = parse_grid(g.at("L"));
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, {"abs_tol", "tail_tol"}, "tolerances");
    if (t.contains("abs_tol")) c.abs_tol = get_number(t, "abs_tol", "tolerances");
    if (t.contains("tail_tol")) c.tail_tol = get_number(t, "tail_tol", "tolerances");
  }
  if (j.contains("params")) {
    const json& p = j.at("params");
    const std::string w = "params";
    reject_unknown(p, {"route", "kind", "exponent", "suite", "delta", "quantiles", "S", "atoms", "bands", "pb_b", "pb_g",
                       "trials"},
                   w);
    if (p.contains("route")) c.params.route = get_string(p, "route", w);
    if (p.contains("kind")) c.params.kind = get_string(p, "kind", w);
    if (p.contains("exponent")) c.params.exponent = get_string(p, "exponent", w);
    if (p.contains("suite")) c.params.suite = get_string(p, "suite", w);
    if (p.contains("delta")) c.params.delta = get_number(p, "delta", w);
    if (p.contains("quantiles")) c.params.quantiles = get_numbers(p, "quantiles", w);
    if (p.contains("S")) {
      const json& s = p.at("S");
      if (!s.is_array()) throw ValidationError("params.S must be an array of [lo, hi] pairs");
      for (const auto& e : s) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
          throw ValidationError("params.S must be an array of [lo, hi] pairs");
        c.params.S.push_back({e[0].get<double>(), e[1].get<double>()});
      }
    }
    if (p.contains("atoms")) c.params.atoms = get_integer(p, "atoms", w);
    if (p.contains("bands")) c.params.bands = static_cast<int>(get_integer(p, "bands", w));
    if (p.contains("pb_b")) c.params.pb_b = get_number(p, "pb_b", w);
    if (p.contains("pb_g")) c.params.pb_g = get_number(p, "pb_g", w);
    if (p.contains("trials")) {
      const long t = get_integer(p, "trials", w);
      if (t < 1) throw ValidationError("params.trials must be positive");
      c.params.trials = static_cast<std::uint64_t>(t);
    }
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"csv", "json"}, "output");
    if (o.contains("csv")) c.out_csv = get_string(o, "csv", "output");
    if (o.contains("json")) c.out_json = get_string(o, "json", "output");
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  json op = {{"family", c.op.family}, {"side", c.op.side}, {"boundary_coupling", c.op.boundary_coupling}};
  if (c.op.family == "fibonacci") op["lambda"] = c.op.lambda;
  if (c.op.family == "random") {
    op["width"] = c.op.width;
    op["seed"] = c.op.seed;
  }
  if (c.op.size) op["size"] = *c.op.size;
  if (c.op.family == "explicit") {
    op["a"] = c.op.a;
    op["b"] = c.op.b;
  }
  j["operator"] = op;
  if (c.command == "lanczos" || c.command == "mdhld")
    j["lattice"] = {{"dim", c.lattice.dim}, {"extent", c.lattice.extent}, {"lanczos_size", c.lattice.lanczos_size}};
  json g = json::object();
  if (c.E) g["E"] = grid_json(*c.E);
  if (c.eps) g["eps"] = grid_json(*c.eps);
  if (c.T) g["T"] = grid_json(*c.T);
  if (c.L) g["L"] = grid_json(*c.L);
  j["grids"] = g;
  j["tolerances"] = {{"abs_tol", c.abs_tol}, {"tail_tol", c.tail_tol}};
  json s = json::array();
  for (const auto& [lo, hi] : c.params.S) s.push_back({lo, hi});
  j["params"] = {{"route", c.params.route},   {"kind", c.params.kind},   {"exponent", c.params.exponent},
                 {"suite", c.params.suite},   {"delta", c.params.delta}, {"quantiles", c.params.quantiles},
                 {"S", s},                    {"atoms", c.params.atoms}, {"bands", c.params.bands},
                 {"pb_b", c.params.pb_b},     {"pb_g", c.params.pb_g},   {"trials", c.params.trials}};
  return j;
}

void validate(const RunConfig& c) {
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), c.command) == names.end())
    throw ValidationError("unknown command '" + c.command + "'");
  if (c.threads < 1) throw ValidationError("threads must be at least 1");
  if (!(c.abs_tol > 0.0) || !(c.tail_tol > 0.0)) throw ValidationError("tolerances must be positive");
  static const std::set<std::string> families = {"free", "random", "fibonacci", "explicit"};
  if (!families.count(c.op.family)) throw ValidationError("operator.family must be free, random, fibonacci or explicit");
  if (c.op.side != "half" && c.op.side != "whole") throw ValidationError("operator.side must be 'half' or 'whole'");
  if (c.op.size && *c.op.size < 1) throw ValidationError("operator.size must be positive");
  if (c.op.family == "random" && !(c.op.width >= 0.0)) throw ValidationError("operator.width must be >= 0");
  if (c.op.family == "explicit" && c.op.b.empty()) throw ValidationError("explicit operator needs 'b'");
  if (c.T)
    for (double t : c.T->values())
      if (!(t > 0.0)) throw ValidationError("T must be positive");
  if (c.eps)
    for (double e : c.eps->values())
      if (!(e > 0.0)) throw ValidationError("eps must be positive");
  if (c.L)
    for (double l : c.L->values())
      if (!(l >= 0.0)) throw ValidationError("L must be >= 0");
  if (!(c.params.delta > 0.0 && c.params.delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  for (double q : c.params.quantiles)
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("quantiles must lie in (0, 1]");
  for (const auto& [lo, hi] : c.params.S)
    if (!(lo <= hi)) throw ValidationError("S intervals need lo <= hi");
  if (c.params.atoms < 1) throw ValidationError("atoms must be positive");
  if (c.params.bands < 0 || c.params.bands > 30) throw ValidationError("bands must lie in 0..30");
  if (c.params.route != "resolvent" && c.params.route != "propagation")
    throw ValidationError("route must be 'resolvent' or 'propagation'");
  if (c.params.kind != "solution" && c.params.kind != "transfer")
    throw ValidationError("kind must be 'solution' or 'transfer'");
  if (c.params.exponent != "beta" && c.params.exponent != "lambda" && c.params.exponent != "pb")
    throw ValidationError("exponent must be beta, lambda or pb");
  if (c.lattice.dim < 1 || c.lattice.dim > 4) throw ValidationError("lattice.dim must lie in 1..4");
  if (c.lattice.extent < 0 || c.lattice.lanczos_size < 1) throw ValidationError("invalid lattice sizes");
}

OperatorSpec operator_spec(const OperatorConfig& c) {
  const Side side = c.side == "whole" ? Side::whole_line : Side::half_line;
  OperatorSpec s;
  if (c.family == "free")
    s = free_spec(side);
  else if (c.family == "random")
    s = random_spec(c.width, c.seed, side);
  else if (c.family == "fibonacci")
    s = fibonacci_spec(c.lambda, side);
  else
    s = explicit_spec(c.a, c.b, side);
  s.size = c.size;
  s.boundary_coupling = c.boundary_coupling;
  return s;
}

std::uint64_t config_hash(const RunConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace wavebound::cli

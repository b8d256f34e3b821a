#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wavebound/numeric.hpp"
#include "wavebound/operator.hpp"

namespace wavebound::cli {

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"scales", "mfun", "profile", "hld", "ldb",
                                                  "exponents", "fib", "lanczos", "mdhld", "verify"};
  return names;
}

struct OperatorConfig {
  std::string family = "free";  // free | random | fibonacci | explicit
  std::string side = "half";    // half | whole
  double lambda = 0.0;
  double width = 0.0;
  std::uint64_t seed = 0;
  std::optional<long> size;
  std::vector<double> a;
  std::vector<double> b;
  double boundary_coupling = 1.0;
};

struct LatticeConfig {
  int dim = 2;
  long extent = 0;  // 0: smallest extent the command accepts
  long lanczos_size = 40;
};

struct Params {
  std::string route = "resolvent";     // profile: resolvent | propagation
  std::string kind = "solution";       // scale kind for hld
  std::string exponent = "beta";       // exponents: beta | lambda | pb
  std::string suite;                   // verify
  double delta = 0.1;
  std::vector<double> quantiles;       // hld: L from the atom-scale quantiles instead of the L grid
  std::vector<std::pair<double, double>> S;  // ldb spectral set
  long atoms = 2000;
  int bands = 8;                       // fib: band-tree level
  double pb_b = 0.5;
  double pb_g = 0.1;
  std::uint64_t trials = 10000;
};

struct RunConfig {
  std::string command;
  OperatorConfig op;
  LatticeConfig lattice;
  std::optional<Grid> E, eps, T, L;
  double abs_tol = 1e-6;
  double tail_tol = 1e-11;
  Params params;
  std::string out_csv;
  std::string out_json;
  int threads = 1;
};

// Strict parse: unknown keys and wrong types are validation errors.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

// Grid from "v" or "start:stop:count[:log|:linear]".
Grid parse_grid_flag(const std::string& text);
Grid parse_grid(const nlohmann::json& j);
nlohmann::json grid_json(const Grid& g);

void validate(const RunConfig& c);

OperatorSpec operator_spec(const OperatorConfig& c);

// FNV-1a over the canonical JSON of the numerical configuration
// (output paths and thread count excluded).
std::uint64_t config_hash(const RunConfig& c);

}  // namespace wavebound::cli

#pragma once

#include <json.hpp>

#include "cli/config.hpp"
#include "cli/output.hpp"

namespace wavebound::cli {

struct CommandResult {
  Table table;
  nlohmann::json summary = nlohmann::json::object();
  bool verification_failed = false;
};

CommandResult run_command(const RunConfig& config);

CommandResult cmd_scales(const RunConfig& c);
CommandResult cmd_mfun(const RunConfig& c);
CommandResult cmd_profile(const RunConfig& c);
CommandResult cmd_hld(const RunConfig& c);
CommandResult cmd_ldb(const RunConfig& c);
CommandResult cmd_exponents(const RunConfig& c);
CommandResult cmd_fib(const RunConfig& c);
CommandResult cmd_lanczos(const RunConfig& c);
CommandResult cmd_mdhld(const RunConfig& c);
// suites: mainm, parseval, trans, fib, lanczos
CommandResult cmd_verify(const RunConfig& c);

}  // namespace wavebound::cli

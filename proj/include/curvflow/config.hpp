#pragma once

// JSON run configuration: one document drives either a flow run or a
// stationary solve.  Parsing is strict -- unknown keys anywhere in the
// document are rejected, wrong types name the offending path -- and the
// resolved configuration (all defaults filled) serializes back to JSON that
// parses to the same configuration, so every summary artifact embeds a
// config that reproduces it.

#include <cstdint>
#include <string>

#include "curvflow/flow.hpp"
#include "curvflow/minkowski.hpp"

namespace curvflow {

enum class RunMode { flow, solve };
const char* to_string(RunMode m);

// Optional two-start comparison attached to a solve config.
struct UniquenessProbeSpec {
  bool enabled = false;
  ShapeSpec start_a;
  ShapeSpec start_b;
};

struct RunConfig {
  RunMode mode = RunMode::flow;

  // mode == flow
  FlowParams flow;

  // mode == solve
  MinkowskiProblem problem;
  SolveOptions solve;
  UniquenessProbeSpec probe;

  // artifact plumbing (both modes)
  std::string output_dir = ".";
  int snapshot_stride = 0;        // shape CSV every k-th recorded history row
                                  // (0: final shape only)
  std::uint64_t random_seed = 0;  // recorded in the outputs for audit runs
};

// Parse a JSON document (text). `expected` is the subcommand the config is
// for; a "mode" key, if present, must agree. Throws ConfigError with the
// offending key path on any schema violation.
RunConfig parse_run_config(const std::string& text, RunMode expected);

// Same from a file path (missing/unreadable file is a ConfigError too).
RunConfig load_run_config(const std::string& path, RunMode expected);

// The fully-resolved configuration as pretty-printed JSON.
std::string resolved_config_json(const RunConfig& cfg);

}  // namespace curvflow

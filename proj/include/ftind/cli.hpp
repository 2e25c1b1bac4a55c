// Copyright 2026 The ftind Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FTIND__CLI_HPP_
#define FTIND__CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "ftind/synth.hpp"
#include "ftind/types.hpp"

namespace ftind::cli
{

/// Exit codes shared by every subcommand.
enum ExitCode : int
{
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitRuntime = 3,
};

struct RunConfig
{
  synth::SynthConfig synth = synth::default_config();
  AxisRanges ranges{};
  std::uint64_t seed = 1;
  double rate_hz = 1000.0;
  std::filesystem::path out_dir = "ftind_out";
  /// Schedule CSV; the built-in demo schedule when empty.
  std::optional<std::filesystem::path> schedule;

  /// Canonical description of everything that shapes the generated data,
  /// excluding the seed and output directory.
  nlohmann::json canonical() const;
  std::string config_hash() const;
  std::string geometry_hash() const;
};

/// Looks for `name` as given, then in each directory of FTIND_CONFIG_DIR
/// (colon separated), also trying a ".json" suffix. ConfigError if absent.
std::filesystem::path resolve_config_path(const std::string & name);

/// Keys: vertical_coil, horizontal_coil (preset name, file or object),
/// plate ("default", file or object), noise, ranges, coupling_law,
/// coupling_scale, seed, rate_hz, out, schedule. Relative file references are
/// resolved against `base_dir` first. ConfigError on any bad entry.
RunConfig run_config_from_json(const nlohmann::json & j, const std::filesystem::path & base_dir);
RunConfig load_run_config(const std::string & name_or_path);

/// Parses and runs one command line; never throws.
int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

}  // namespace ftind::cli

#endif  // FTIND__CLI_HPP_

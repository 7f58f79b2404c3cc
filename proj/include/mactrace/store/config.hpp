#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include "mactrace/core/json.hpp"
#include "mactrace/ingest/schedule.hpp"

namespace mactrace {

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kEnvPrefix = "MACTRACE_";

/// Tunables shared by the subcommands. Keys in the JSON config file match the field names;
/// each scalar key can be overridden by an environment variable MACTRACE_<KEY in upper case>
/// (e.g. MACTRACE_DAILY_QUOTA=2500). Precedence: defaults < file < environment < flags.
struct Config {
  std::int64_t daily_quota = 5000;
  int page_size = 200;
  std::int64_t cap = 10000;
  int image_size = 1600;
  ImageFormat image_format = ImageFormat::jpeg;
  double stationary_km = 1.0;
  std::uint32_t band_gap = 512;
  int poll_days = 30;
  int workers = 4;
  std::uint64_t seed = 1;
  Schedule schedule;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

// Throws ConfigError on unknown keys, wrong types or out-of-range values.
Config config_from_json(const Json& j);
Json config_to_json(const Config& config);
void apply_env(Config& config, const EnvLookup& env);
void validate(const Config& config);

// Defaults, then the file when given, then the environment.
Config load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env = process_env);

}  // namespace mactrace

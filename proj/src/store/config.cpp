#include "mactrace/store/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>

namespace mactrace {

namespace {

const std::set<std::string> kScalarKeys = {"daily_quota", "page_size",  "cap",       "image_size", "image_format",
                                           "stationary_km", "band_gap", "poll_days", "workers",    "seed"};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

template <typename T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("config key " + key + " has the wrong type");
  }
}

void set_scalar(Config& c, const std::string& key, const Json& v) {
  if (key == "daily_quota") c.daily_quota = get_as<std::int64_t>(v, key);
  else if (key == "page_size") c.page_size = get_as<int>(v, key);
  else if (key == "cap") c.cap = get_as<std::int64_t>(v, key);
  else if (key == "image_size") c.image_size = get_as<int>(v, key);
  else if (key == "image_format") {
    try {
      c.image_format = parse_image_format(get_as<std::string>(v, key));
    } catch (const InvalidRecord& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "stationary_km") c.stationary_km = get_as<double>(v, key);
  else if (key == "band_gap") c.band_gap = get_as<std::uint32_t>(v, key);
  else if (key == "poll_days") c.poll_days = get_as<int>(v, key);
  else if (key == "workers") c.workers = get_as<int>(v, key);
  else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
  else throw ConfigError("unknown config key: " + key);
}

// Environment values are text; numbers are parsed as JSON, anything else is taken as a string.
Json env_value(const std::string& text) {
  auto parsed = Json::parse(text, nullptr, false);
  if (parsed.is_discarded() || parsed.is_object() || parsed.is_array()) return Json(text);
  return parsed;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string{v};
}

Config config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Config c;
  for (const auto& [key, value] : j.items()) {
    if (key == "schedule") {
      if (!value.is_object()) throw ConfigError("schedule must be an object");
      for (const auto& [skey, svalue] : value.items()) {
        if (skey == "full_runs_per_day") c.schedule.full_runs_per_day = get_as<int>(svalue, skey);
        else if (skey == "incremental_interval_hours") c.schedule.incremental_interval_hours = get_as<int>(svalue, skey);
        else if (skey == "marketplace_groups") {
          c.schedule.marketplace_groups = get_as<std::vector<std::vector<std::string>>>(svalue, skey);
        } else {
          throw ConfigError("unknown schedule key: " + skey);
        }
      }
    } else {
      set_scalar(c, key, value);
    }
  }
  validate(c);
  return c;
}

Json config_to_json(const Config& c) {
  return {{"daily_quota", c.daily_quota},
          {"page_size", c.page_size},
          {"cap", c.cap},
          {"image_size", c.image_size},
          {"image_format", to_string(c.image_format)},
          {"stationary_km", c.stationary_km},
          {"band_gap", c.band_gap},
          {"poll_days", c.poll_days},
          {"workers", c.workers},
          {"seed", c.seed},
          {"schedule",
           {{"full_runs_per_day", c.schedule.full_runs_per_day},
            {"incremental_interval_hours", c.schedule.incremental_interval_hours},
            {"marketplace_groups", c.schedule.marketplace_groups}}}};
}

void apply_env(Config& config, const EnvLookup& env) {
  for (const auto& key : kScalarKeys) {
    if (auto v = env(kEnvPrefix + upper(key))) set_scalar(config, key, env_value(*v));
  }
  validate(config);
}

void validate(const Config& c) {
  if (c.daily_quota <= 0) throw ConfigError("daily_quota must be positive");
  if (c.page_size <= 0 || c.page_size > 200) throw ConfigError("page_size must be in 1..200");
  if (c.cap <= 0) throw ConfigError("cap must be positive");
  if (c.image_size < kMinImageSizePx || c.image_size > kMaxImageSizePx) {
    throw ConfigError("image_size must be in " + std::to_string(kMinImageSizePx) + ".." +
                      std::to_string(kMaxImageSizePx));
  }
  if (!(c.stationary_km > 0)) throw ConfigError("stationary_km must be positive");
  if (c.band_gap == 0 || c.band_gap > 0xFFFF) throw ConfigError("band_gap must be in 1..65535");
  if (c.poll_days <= 0) throw ConfigError("poll_days must be positive");
  if (c.workers <= 0) throw ConfigError("workers must be positive");
  if (c.schedule.full_runs_per_day <= 0 || c.schedule.incremental_interval_hours <= 0) {
    throw ConfigError("schedule intervals must be positive");
  }
  for (const auto& group : c.schedule.marketplace_groups) {
    if (group.empty()) throw ConfigError("schedule has an empty marketplace group");
  }
}

Config load_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
  Config c;
  if (file) {
    std::ifstream in{*file};
    if (!in) throw ConfigError("cannot open config file: " + file->string());
    auto j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + file->string());
    c = config_from_json(j);
  }
  apply_env(c, env);
  return c;
}

}  // namespace mactrace

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mactrace/core/json.hpp"

namespace mactrace {

struct StageTiming {
  std::string stage;
  double seconds = 0;
};

/// One record per pipeline invocation, written to <store>/manifests/<run_id>.json.
struct RunManifest {
  std::string run_id;
  std::string command;
  Json config = Json::object();
  Timestamp started_at{};
  Timestamp finished_at{};
  std::vector<StageTiming> stages;
  std::map<std::string, std::int64_t> inputs;
  std::map<std::string, std::int64_t> outputs;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<std::string> output_files;
  int exit_code = 0;
};

// "<command>-<YYYYMMDDTHHMMSSZ>-<nonce>"
std::string make_run_id(const std::string& command, Timestamp at, std::uint64_t nonce);

Json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const Json& j);

std::filesystem::path manifest_path(const std::filesystem::path& store_dir, const std::string& run_id);
// Written to a temporary name, then renamed. Returns the final path.
std::filesystem::path write_manifest(const std::filesystem::path& store_dir, const RunManifest& manifest);
std::vector<RunManifest> read_manifests(const std::filesystem::path& store_dir);

// Records the wall time of a stage into the manifest when it goes out of scope.
class StageTimer {
 public:
  StageTimer(RunManifest& manifest, std::string stage);
  ~StageTimer();
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  RunManifest& manifest_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace mactrace

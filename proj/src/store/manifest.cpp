#include "mactrace/store/manifest.hpp"

#include <algorithm>
#include <fstream>

#include "mactrace/store/journal.hpp"

namespace mactrace {

std::string make_run_id(const std::string& command, Timestamp at, std::uint64_t nonce) {
  std::string stamp = format_timestamp(at);
  std::erase(stamp, '-');
  std::erase(stamp, ':');
  return command + "-" + stamp + "-" + std::to_string(nonce);
}

Json manifest_to_json(const RunManifest& m) {
  Json stages = Json::array();
  for (const auto& s : m.stages) stages.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  return {{"run_id", m.run_id},
          {"command", m.command},
          {"config", m.config},
          {"started_at", timestamp_json(m.started_at)},
          {"finished_at", timestamp_json(m.finished_at)},
          {"stages", stages},
          {"inputs", m.inputs},
          {"outputs", m.outputs},
          {"seeds", m.seeds},
          {"output_files", m.output_files},
          {"exit_code", m.exit_code}};
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.config = j.value("config", Json::object());
  m.started_at = parse_timestamp(j.at("started_at").get<std::string>());
  m.finished_at = parse_timestamp(j.at("finished_at").get<std::string>());
  for (const auto& s : j.value("stages", Json::array())) {
    m.stages.push_back({s.at("stage").get<std::string>(), s.at("seconds").get<double>()});
  }
  m.inputs = j.value("inputs", std::map<std::string, std::int64_t>{});
  m.outputs = j.value("outputs", std::map<std::string, std::int64_t>{});
  m.seeds = j.value("seeds", std::map<std::string, std::uint64_t>{});
  m.output_files = j.value("output_files", std::vector<std::string>{});
  m.exit_code = j.value("exit_code", 0);
  return m;
}

std::filesystem::path manifest_path(const std::filesystem::path& store_dir, const std::string& run_id) {
  return store_dir / "manifests" / (run_id + ".json");
}

std::filesystem::path write_manifest(const std::filesystem::path& store_dir, const RunManifest& manifest) {
  const auto path = manifest_path(store_dir, manifest.run_id);
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
    if (!out) throw StoreError("cannot write manifest: " + tmp.string());
    out << manifest_to_json(manifest).dump(2) << '\n';
    if (!out.flush()) throw StoreError("cannot write manifest: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return path;
}

std::vector<RunManifest> read_manifests(const std::filesystem::path& store_dir) {
  std::vector<RunManifest> out;
  const auto dir = store_dir / "manifests";
  if (!std::filesystem::is_directory(dir)) return out;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in{f};
    out.push_back(manifest_from_json(Json::parse(in)));
  }
  return out;
}

StageTimer::StageTimer(RunManifest& manifest, std::string stage)
    : manifest_(manifest), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}

StageTimer::~StageTimer() {
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
  manifest_.stages.push_back({stage_, elapsed.count()});
}

}  // namespace mactrace

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "mactrace/core/json.hpp"

namespace mactrace {

class StoreError : public Error {
 public:
  using Error::Error;
};

/// Keyed records persisted as an append-only journal plus a compacted snapshot.
///
/// Files: <dir>/<name>.snapshot.jsonl and <dir>/<name>.journal.jsonl. Loading reads the
/// snapshot and replays the journal on top; a torn final journal line (interrupted
/// append) is ignored. A table constructed without a directory lives in memory only.
///
/// One writer at a time: put() is serialized internally, readers take the same lock.
class JournalTable {
 public:
  enum class PutResult { inserted, updated, unchanged };

  JournalTable() = default;
  JournalTable(std::filesystem::path dir, std::string name);

  JournalTable(const JournalTable&) = delete;
  JournalTable& operator=(const JournalTable&) = delete;

  PutResult put(const std::string& key, const Json& value);
  // Inserts only when the key is absent. Returns true on insert.
  bool insert_if_absent(const std::string& key, const Json& value);

  std::optional<Json> get(const std::string& key) const;
  bool contains(const std::string& key) const;
  std::size_t size() const;

  // Visits records in key order.
  void for_each(const std::function<void(const std::string& key, const Json& value)>& fn) const;

  // Snapshot rendering of the current state: one {"key","value"} record per line, key order.
  std::string snapshot_text() const;

  // Writes the snapshot atomically and truncates the journal.
  void compact();

  const std::string& name() const { return name_; }
  std::filesystem::path snapshot_path() const;
  std::filesystem::path journal_path() const;

  // Rebuilds state from a journal file alone, ignoring any snapshot.
  static std::map<std::string, std::string> replay(const std::filesystem::path& journal);

 private:
  void append_journal(const std::string& key, const std::string& value);
  PutResult put_locked(const std::string& key, std::string value);

  std::filesystem::path dir_;
  std::string name_;
  std::map<std::string, std::string> records_;  // value stored as compact JSON text
  std::ofstream journal_;
  mutable std::mutex mutex_;
};

std::string render_snapshot(const std::map<std::string, std::string>& records);

/// The set of tables binding the pipeline stages together.
class Store {
 public:
  // In-memory store.
  Store() = default;
  explicit Store(std::filesystem::path dir);

  JournalTable& table(const std::string& name);
  const std::filesystem::path& dir() const { return dir_; }
  bool persistent() const { return !dir_.empty(); }

  void compact_all();

  static constexpr const char* kListings = "listings";
  static constexpr const char* kCandidates = "candidates";
  static constexpr const char* kObservations = "observations";
  static constexpr const char* kAnnotations = "annotations";
  static constexpr const char* kExtractions = "extractions";

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::unique_ptr<JournalTable>> tables_;
  std::mutex mutex_;
};

}  // namespace mactrace

#include "mactrace/store/journal.hpp"

#include <iterator>
#include <sstream>

namespace mactrace {

std::string render_snapshot(const std::map<std::string, std::string>& records) {
  std::string out;
  for (const auto& [key, value] : records) {
    out += "{\"key\":";
    out += Json(key).dump();
    out += ",\"value\":";
    out += value;
    out += "}\n";
  }
  return out;
}

namespace {

// Makes an interrupted final append end on a line boundary so that new records start on a
// fresh line: a complete record only lacking its newline is kept, anything else is cut.
void repair_tail(const std::filesystem::path& journal) {
  std::ifstream in{journal, std::ios::binary};
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  in.close();
  if (text.empty() || text.back() == '\n') return;
  const auto last_newline = text.rfind('\n');
  const auto tail_start = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (Json::accept(text.substr(tail_start))) {
    std::ofstream(journal, std::ios::app | std::ios::binary) << '\n';
  } else {
    std::filesystem::resize_file(journal, tail_start);
  }
}

}  // namespace

JournalTable::JournalTable(std::filesystem::path dir, std::string name)
    : dir_(std::move(dir)), name_(std::move(name)) {
  std::filesystem::create_directories(dir_);
  if (std::filesystem::exists(snapshot_path())) {
    read_jsonl(snapshot_path(), [&](const Json& j) {
      records_[j.at("key").get<std::string>()] = j.at("value").dump();
    });
  }
  if (std::filesystem::exists(journal_path())) {
    for (auto& [key, value] : replay(journal_path())) records_[key] = std::move(value);
    repair_tail(journal_path());
  }
  journal_.open(journal_path(), std::ios::app | std::ios::binary);
  if (!journal_) throw StoreError("cannot open journal " + journal_path().string());
}

std::filesystem::path JournalTable::snapshot_path() const { return dir_ / (name_ + ".snapshot.jsonl"); }
std::filesystem::path JournalTable::journal_path() const { return dir_ / (name_ + ".journal.jsonl"); }

std::map<std::string, std::string> JournalTable::replay(const std::filesystem::path& journal) {
  std::map<std::string, std::string> records;
  std::ifstream in{journal, std::ios::binary};
  if (!in) throw StoreError("cannot open journal " + journal.string());
  read_jsonl(
      in,
      [&](const Json& j) {
        if (j.value("op", std::string{}) != "put") throw StoreError("unknown journal op in " + journal.string());
        records[j.at("key").get<std::string>()] = j.at("value").dump();
      },
      /*tolerate_torn_tail=*/true);
  return records;
}

void JournalTable::append_journal(const std::string& key, const std::string& value) {
  if (!journal_.is_open()) return;
  journal_ << "{\"op\":\"put\",\"key\":" << Json(key).dump() << ",\"value\":" << value << "}\n";
  journal_.flush();
  if (!journal_) throw StoreError("journal write failed for " + name_);
}

JournalTable::PutResult JournalTable::put_locked(const std::string& key, std::string value) {
  auto it = records_.find(key);
  if (it != records_.end() && it->second == value) return PutResult::unchanged;
  append_journal(key, value);
  const bool inserted = it == records_.end();
  records_[key] = std::move(value);
  return inserted ? PutResult::inserted : PutResult::updated;
}

JournalTable::PutResult JournalTable::put(const std::string& key, const Json& value) {
  std::lock_guard lock{mutex_};
  return put_locked(key, value.dump());
}

bool JournalTable::insert_if_absent(const std::string& key, const Json& value) {
  std::lock_guard lock{mutex_};
  if (records_.count(key) != 0) return false;
  put_locked(key, value.dump());
  return true;
}

std::optional<Json> JournalTable::get(const std::string& key) const {
  std::lock_guard lock{mutex_};
  auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return Json::parse(it->second);
}

bool JournalTable::contains(const std::string& key) const {
  std::lock_guard lock{mutex_};
  return records_.count(key) != 0;
}

std::size_t JournalTable::size() const {
  std::lock_guard lock{mutex_};
  return records_.size();
}

void JournalTable::for_each(
    const std::function<void(const std::string& key, const Json& value)>& fn) const {
  std::map<std::string, std::string> copy;
  {
    std::lock_guard lock{mutex_};
    copy = records_;
  }
  for (const auto& [key, value] : copy) fn(key, Json::parse(value));
}

std::string JournalTable::snapshot_text() const {
  std::lock_guard lock{mutex_};
  return render_snapshot(records_);
}

void JournalTable::compact() {
  std::lock_guard lock{mutex_};
  if (dir_.empty()) return;
  const auto tmp = dir_ / (name_ + ".snapshot.jsonl.tmp");
  {
    std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
    out << render_snapshot(records_);
    out.flush();
    if (!out) throw StoreError("snapshot write failed for " + name_);
  }
  std::filesystem::rename(tmp, snapshot_path());
  journal_.close();
  journal_.open(journal_path(), std::ios::trunc | std::ios::binary);
  journal_.close();
  journal_.open(journal_path(), std::ios::app | std::ios::binary);
}

Store::Store(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

JournalTable& Store::table(const std::string& name) {
  std::lock_guard lock{mutex_};
  auto& slot = tables_[name];
  if (!slot) slot = dir_.empty() ? std::make_unique<JournalTable>() : std::make_unique<JournalTable>(dir_, name);
  return *slot;
}

void Store::compact_all() {
  std::lock_guard lock{mutex_};
  for (auto& [name, table] : tables_) table->compact();
}

}  // namespace mactrace

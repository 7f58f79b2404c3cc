#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <map>
#include <mutex>

#include "mactrace/extraction/ocr_backend.hpp"

extern char** environ;

namespace mactrace {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::vector<SegmentResult> unwrap(BackendMessage message, std::int64_t expected_id) {
  if (auto* error = std::get_if<OcrErrorReply>(&message)) {
    throw BackendImageError("backend error for request " + std::to_string(expected_id) + ": " + error->error);
  }
  return std::move(std::get<OcrReply>(message).segments);
}

std::int64_t message_id(const BackendMessage& message) {
  return std::visit([](const auto& m) { return m.id; }, message);
}

}  // namespace

ProcessBackend::ProcessBackend(std::vector<std::string> argv, std::chrono::milliseconds reply_timeout)
    : argv_(std::move(argv)), timeout_(reply_timeout) {
  if (argv_.empty()) throw BackendUnavailable("empty backend command");
  ignore_sigpipe();

  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw BackendUnavailable(std::strerror(errno));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw BackendUnavailable(std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw BackendUnavailable("cannot start OCR backend " + argv_[0] + ": " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ProcessBackend::~ProcessBackend() { shutdown(); }

void ProcessBackend::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  to_child_ = -1;
  if (from_child_ >= 0) ::close(from_child_);
  from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    // Closing stdin asks the backend to exit; give it a moment before killing it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      ::usleep(10'000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void ProcessBackend::write_line(const std::string& line) {
  if (to_child_ < 0) throw BackendUnavailable("OCR backend is not running");
  std::string data = line + "\n";
  std::size_t written = 0;
  while (written < data.size()) {
    const auto n = ::write(to_child_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendUnavailable(std::string("write to OCR backend failed: ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::string ProcessBackend::read_line() {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (from_child_ < 0) throw BackendUnavailable("OCR backend is not running");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw BackendUnavailable(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) throw BackendUnavailable("OCR backend timed out");
    char chunk[65536];
    const auto n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendUnavailable(std::string("read from OCR backend failed: ") + std::strerror(errno));
    }
    if (n == 0) throw BackendUnavailable("OCR backend closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<SegmentResult> ProcessBackend::run(const std::filesystem::path& image, const RunOptions& options) {
  auto results = run_many({{image, options}}, 1);
  if (results.front().error) std::rethrow_exception(results.front().error);
  return std::move(results.front().segments);
}

std::vector<ProcessBackend::BatchResult> ProcessBackend::run_many(const std::vector<BatchItem>& items,
                                                                  std::size_t max_in_flight) {
  std::lock_guard lock{mutex_};
  std::vector<BatchResult> results(items.size());
  std::map<std::int64_t, std::size_t> pending;  // id -> item index
  std::size_t sent = 0;
  std::size_t received = 0;
  max_in_flight = std::max<std::size_t>(1, max_in_flight);
  const std::int64_t first_id = next_id_;

  while (received < items.size()) {
    while (sent < items.size() && pending.size() < max_in_flight) {
      OcrRequest request;
      request.id = next_id_++;
      request.image = std::filesystem::absolute(items[sent].image).string();
      request.segment = items[sent].options.segment;
      request.rotations = items[sent].options.rotations;
      write_line(encode_request(request));
      pending.emplace(request.id, sent++);
    }
    const std::string line = read_line();
    auto message = decode_reply(line);
    if (message_id(message) < first_id) continue;  // late reply from an abandoned batch
    auto it = pending.find(message_id(message));
    if (it == pending.end()) throw BackendMalformedReply("reply for unknown request id", line);
    const auto index = it->second;
    const auto id = it->first;
    pending.erase(it);
    ++received;
    try {
      results[index].segments = unwrap(std::move(message), id);
    } catch (const BackendImageError&) {
      results[index].error = std::current_exception();
    }
  }
  return results;
}

}  // namespace mactrace

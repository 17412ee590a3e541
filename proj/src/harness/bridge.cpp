/* Copyright 2026 The tastream Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "tastream/harness/bridge.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "tastream/errors.hpp"

namespace tastream::harness {
namespace {

std::string Errno(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

// -inf travels as JSON null (what nlohmann emits for it) or the string
// "-inf".
double ParseLogValue(const nlohmann::json& v, const std::string& raw) {
  if (v.is_null()) return kNegInf;
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "-inf") return kNegInf;
  throw ScorerError("non-numeric log-probability in response", raw);
}

std::vector<double> ParseLogVector(const nlohmann::json& v, std::size_t expected,
                                   const std::string& raw) {
  if (!v.is_array()) throw ScorerError("logp is not an array", raw);
  if (v.size() != expected)
    throw ScorerError("logp has " + std::to_string(v.size()) + " entries, expected " +
                          std::to_string(expected),
                      raw);
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(ParseLogValue(x, raw));
  try {
    CheckLogDistribution(out, "remote distribution");
  } catch (const InputError& e) {
    throw ScorerError(std::string("normalization violation: ") + e.what(), raw);
  }
  return out;
}

}  // namespace

BridgeSession::BridgeSession(const std::string& command, int vocab_size,
                             const std::string& utt_id, std::chrono::milliseconds timeout)
    : vocab_size_(vocab_size), timeout_(timeout) {
  // The child only calls async-signal-safe functions, so everything it
  // needs is prepared here.
  std::vector<std::string> env_strings;
  for (char** e = environ; *e; ++e)
    if (std::strncmp(*e, "TASTREAM_UTT=", 13) != 0) env_strings.emplace_back(*e);
  if (!utt_id.empty()) env_strings.push_back("TASTREAM_UTT=" + utt_id);
  std::vector<char*> envp;
  for (auto& e : env_strings) envp.push_back(e.data());
  envp.push_back(nullptr);

  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
    throw ScorerError(Errno("socketpair"));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw ScorerError(Errno("fork"));
  }
  if (pid == 0) {
    ::close(fds[0]);
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    ::execle("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr), envp.data());
    ::_exit(127);
  }
  ::close(fds[1]);
  fd_ = fds[0];
  pid_ = pid;

  try {
    const nlohmann::json reply = Call({{"op", "hello"}, {"vocab_size", vocab_size_}});
    if (!reply.contains("ok") || reply["ok"] != true)
      throw ScorerError("handshake rejected", reply.dump());
  } catch (...) {
    Close();
    throw;
  }
}

BridgeSession::~BridgeSession() { Close(); }

void BridgeSession::Close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 100 && !reaped; ++i) {
      reaped = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
}

void BridgeSession::WriteLine(const std::string& line) {
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + off, line.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(Errno("write to scorer"));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string BridgeSession::ReadLine() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw ScorerError("scorer timed out", buffer_);
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(Errno("poll scorer"));
    }
    if (r == 0) throw ScorerError("scorer timed out", buffer_);
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(Errno("read from scorer"));
    }
    if (n == 0) throw ScorerError("scorer closed the connection", buffer_);
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

nlohmann::json BridgeSession::Call(nlohmann::json request) {
  const std::uint64_t id = next_id_++;
  request["id"] = id;
  WriteLine(request.dump() + "\n");
  const std::string raw = ReadLine();
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    throw ScorerError("malformed response", raw);
  }
  if (!reply.is_object()) throw ScorerError("response is not an object", raw);
  if (reply.contains("id") && (!reply["id"].is_number_unsigned() ||
                               reply["id"].get<std::uint64_t>() != id))
    throw ScorerError("response id does not match request " + std::to_string(id), raw);
  if (reply.contains("error")) throw ScorerError("scorer reported an error", raw);
  return reply;
}

BridgeAttentionScorer::BridgeAttentionScorer(std::shared_ptr<BridgeSession> session)
    : session_(std::move(session)) {}

std::vector<double> BridgeAttentionScorer::ScoreNext(const Transcript& prefix, int frame_limit) {
  const nlohmann::json reply = session_->Call(
      {{"op", "score_next"}, {"prefix", prefix.labels}, {"frame_limit", frame_limit}});
  const std::string raw = reply.dump();
  if (!reply.contains("logp")) throw ScorerError("response lacks logp", raw);
  return ParseLogVector(reply["logp"], static_cast<std::size_t>(num_tokens()) + 1, raw);
}

BridgeCmlmScorer::BridgeCmlmScorer(std::shared_ptr<BridgeSession> session)
    : session_(std::move(session)) {}

std::vector<std::vector<double>> BridgeCmlmScorer::Predict(const MaskedTranscript& slots) {
  const nlohmann::json reply = session_->Call({{"op", "cmlm_predict"}, {"slots", slots.slots}});
  const std::string raw = reply.dump();
  if (!reply.contains("logp") || !reply["logp"].is_array())
    throw ScorerError("response lacks logp", raw);
  const std::size_t masks = slots.masked_positions().size();
  if (reply["logp"].size() != masks)
    throw ScorerError("expected " + std::to_string(masks) + " distributions", raw);
  std::vector<std::vector<double>> out;
  for (const auto& row : reply["logp"])
    out.push_back(ParseLogVector(row, static_cast<std::size_t>(num_tokens()), raw));
  return out;
}

}  // namespace tastream::harness

/*
 * Copyright 2026 The Glocal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "glocal/wire_protocol.h"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <sstream>
#include <thread>

namespace glocal {
namespace {

void IgnoreSigpipeOnce() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string Escape(const std::string& value) {
  std::string out;
  for (char c : value) {
    if (c == ',') {
      out += "%2C";
    } else {
      out += c;
    }
  }
  return out;
}

std::string Unescape(const std::string& value) {
  std::string out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value.compare(i, 3, "%2C") == 0) {
      out += ',';
      i += 2;
    } else {
      out += value[i];
    }
  }
  return out;
}

class ProcessChannel : public FdChannel {
 public:
  ProcessChannel(int read_fd, int write_fd, pid_t pid)
      : FdChannel(read_fd, write_fd), pid_(pid) {}
  ~ProcessChannel() override {
    CloseWrite();
    for (int i = 0; i < 200; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

 private:
  pid_t pid_;
};

std::vector<std::string> SplitArgv(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  bool in_token = false;
  char quote = 0;
  for (char c : text) {
    if (quote != 0) {
      if (c == quote) {
        quote = 0;
      } else {
        current += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t') {
      if (in_token) out.push_back(current);
      current.clear();
      in_token = false;
    } else {
      current += c;
      in_token = true;
    }
  }
  if (in_token) out.push_back(current);
  return out;
}

Label ParseLabelLine(const std::optional<std::string>& line) {
  if (!line) throw OracleError("oracle closed the connection");
  if (*line == "0") return 0;
  if (*line == "1") return 1;
  if (line->rfind("ERR", 0) == 0) throw OracleError("oracle error: " + *line);
  throw OracleError("label out of domain: '" + *line + "'");
}

}  // namespace

FdChannel::FdChannel(int read_fd, int write_fd)
    : read_fd_(read_fd), write_fd_(write_fd) {
  IgnoreSigpipeOnce();
}

FdChannel::~FdChannel() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
}

void FdChannel::CloseWrite() {
  if (write_fd_ < 0) return;
  if (write_fd_ == read_fd_) {
    ::shutdown(write_fd_, SHUT_WR);
  } else {
    ::close(write_fd_);
  }
  write_fd_ = -1;
}

void FdChannel::WriteLine(const std::string& line) {
  if (write_fd_ < 0) throw OracleError("channel closed for writing");
  const std::string data = line + "\n";
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(write_fd_, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> FdChannel::ReadLine(
    std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    const std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw OracleError("timeout waiting for oracle");
    pollfd pfd{read_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw OracleError(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (buffer_.empty()) return std::nullopt;
      std::string line = std::move(buffer_);
      buffer_.clear();
      return line;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::pair<std::unique_ptr<FdChannel>, std::unique_ptr<FdChannel>>
MakeChannelPair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
    throw OracleError(std::string("socketpair failed: ") +
                      std::strerror(errno));
  }
  return {std::make_unique<FdChannel>(fds[0], fds[0]),
          std::make_unique<FdChannel>(fds[1], fds[1])};
}

std::unique_ptr<LineChannel> ConnectTcp(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints,
                                   &result);
      rc != 0) {
    throw OracleError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) {
    throw OracleError("cannot connect to " + host + ":" + service);
  }
  return std::make_unique<FdChannel>(fd, fd);
}

std::unique_ptr<LineChannel> SpawnProcess(
    const std::vector<std::string>& argv) {
  if (argv.empty()) throw OracleError("empty command");
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) throw OracleError("pipe failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw OracleError("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw OracleError("fork failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    std::vector<char*> args;
    for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
  return std::make_unique<ProcessChannel>(from_child[0], to_child[1], pid);
}

std::string EncodeRecord(const FeatureSchema& schema, const Record& record) {
  std::string out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i > 0) out += ',';
    out += schema.feature(i).is_categorical()
               ? Escape(FormatValue(schema, record, i))
               : FormatNumber(record[i]);
  }
  return out;
}

Record DecodeRecord(const FeatureSchema& schema, const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    tokens.push_back(Unescape(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ParseRecord(schema, tokens);
}

ExternalOracle::ExternalOracle(std::unique_ptr<LineChannel> channel,
                               FeatureSchema schema,
                               std::chrono::milliseconds timeout)
    : channel_(std::move(channel)),
      schema_(std::move(schema)),
      timeout_(timeout) {}

ExternalOracle::~ExternalOracle() {
  try {
    std::lock_guard<std::mutex> lock(mu_);
    channel_->WriteLine("BYE");
  } catch (const OracleError&) {
    // Peer already gone.
  }
}

Label ExternalOracle::ReadLabel() const {
  return ParseLabelLine(channel_->ReadLine(timeout_));
}

Label ExternalOracle::DoPredict(const Record& record) const {
  std::lock_guard<std::mutex> lock(mu_);
  channel_->WriteLine("PREDICT " + EncodeRecord(schema_, record));
  return ReadLabel();
}

std::vector<Label> ExternalOracle::DoPredictBatch(
    std::span<const Record> records) const {
  std::vector<Label> out;
  if (records.empty()) return out;
  out.reserve(records.size());
  // Chunked so that neither side can fill its peer's socket buffer while the
  // peer is still writing.
  constexpr std::size_t kChunk = 1024;
  std::lock_guard<std::mutex> lock(mu_);
  for (std::size_t begin = 0; begin < records.size(); begin += kChunk) {
    const std::size_t end = std::min(records.size(), begin + kChunk);
    std::string request = "BATCH " + std::to_string(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      request += "\nPREDICT " + EncodeRecord(schema_, records[i]);
    }
    channel_->WriteLine(request);
    for (std::size_t i = begin; i < end; ++i) out.push_back(ReadLabel());
  }
  return out;
}

std::unique_ptr<ExternalOracle> ConnectExternal(
    std::unique_ptr<LineChannel> channel, const FeatureSchema& schema,
    std::chrono::milliseconds timeout) {
  channel->WriteLine("HELLO " + std::to_string(schema.size()) + " " +
                     schema.KindSignature());
  const auto reply = channel->ReadLine(timeout);
  if (!reply) throw OracleError("oracle closed the connection during handshake");
  if (*reply != "OK") {
    throw OracleError("schema mismatch: " + *reply);
  }
  return std::make_unique<ExternalOracle>(std::move(channel), schema, timeout);
}

std::unique_ptr<ExternalOracle> ConnectEndpoint(
    const std::string& endpoint, const FeatureSchema& schema,
    std::chrono::milliseconds timeout) {
  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string rest = endpoint.substr(4);
    const std::size_t colon = rest.rfind(':');
    if (colon == std::string::npos) {
      throw OracleError("expected tcp:<host>:<port>, got " + endpoint);
    }
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw OracleError("bad port in " + endpoint);
    }
    return ConnectExternal(ConnectTcp(rest.substr(0, colon), port), schema,
                           timeout);
  }
  if (endpoint.rfind("cmd:", 0) == 0) {
    return ConnectExternal(SpawnProcess(SplitArgv(endpoint.substr(4))), schema,
                           timeout);
  }
  throw OracleError("unknown oracle endpoint: " + endpoint);
}

void ServeOracle(const Oracle& oracle, const FeatureSchema& schema,
                 LineChannel& channel) {
  constexpr std::chrono::hours kIdle{24};
  bool greeted = false;
  auto predict_line = [&](const std::string& line) -> std::string {
    if (line.rfind("PREDICT ", 0) != 0) return "ERR expected PREDICT";
    try {
      return std::to_string(oracle.Predict(DecodeRecord(schema, line.substr(8))));
    } catch (const std::exception& e) {
      return std::string("ERR ") + e.what();
    }
  };
  while (auto line = channel.ReadLine(kIdle)) {
    std::istringstream in(*line);
    std::string command;
    in >> command;
    if (command == "BYE") return;
    if (command == "HELLO") {
      std::size_t n = 0;
      std::string kinds;
      in >> n >> kinds;
      if (!in || n != schema.size() || kinds != schema.KindSignature()) {
        channel.WriteLine("ERR schema mismatch: expected " +
                          std::to_string(schema.size()) + " " +
                          schema.KindSignature());
      } else {
        greeted = true;
        channel.WriteLine("OK");
      }
      continue;
    }
    if (!greeted) {
      channel.WriteLine("ERR handshake required");
      continue;
    }
    if (command == "PREDICT") {
      channel.WriteLine(predict_line(*line));
    } else if (command == "BATCH") {
      long k = -1;
      in >> k;
      if (!in || k < 0) {
        channel.WriteLine("ERR malformed BATCH");
        continue;
      }
      for (long i = 0; i < k; ++i) {
        auto item = channel.ReadLine(kIdle);
        if (!item) return;
        channel.WriteLine(predict_line(*item));
      }
    } else {
      channel.WriteLine("ERR unknown command");
    }
  }
}

}  // namespace glocal

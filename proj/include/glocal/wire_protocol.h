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

// Line-delimited text protocol for external black boxes.
//
//   client: HELLO <n_features> <kinds>     server: OK | ERR <msg>
//   client: PREDICT <v1>,...,<vm>          server: 0 | 1
//   client: BATCH <k> + k PREDICT lines    server: k label lines
//   client: BYE                            server closes
//
// Numbers use the shortest round-trip decimal form (at most 17 significant
// digits). Categorical values are sent verbatim with "," escaped as "%2C".

#ifndef GLOCAL_WIRE_PROTOCOL_H_
#define GLOCAL_WIRE_PROTOCOL_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "glocal/oracle.h"
#include "glocal/schema.h"

namespace glocal {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bidirectional stream of "\n"-terminated lines.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void WriteLine(const std::string& line) = 0;
  // nullopt on end of stream. Throws OracleError on timeout.
  virtual std::optional<std::string> ReadLine(
      std::chrono::milliseconds timeout) = 0;
};

// Channel over a pair of file descriptors (a socket uses the same fd twice).
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd);
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void WriteLine(const std::string& line) override;
  std::optional<std::string> ReadLine(
      std::chrono::milliseconds timeout) override;
  // Closes the write side so the peer sees end of stream.
  void CloseWrite();

 private:
  int read_fd_;
  int write_fd_;
  std::string buffer_;
};

// Connected pair of in-process channels, used for loopback serving.
std::pair<std::unique_ptr<FdChannel>, std::unique_ptr<FdChannel>>
MakeChannelPair();
std::unique_ptr<LineChannel> ConnectTcp(const std::string& host, int port);
// Starts `argv` with its standard streams attached to the returned channel.
// The child is reaped when the channel is destroyed.
std::unique_ptr<LineChannel> SpawnProcess(const std::vector<std::string>& argv);

std::string EncodeRecord(const FeatureSchema& schema, const Record& record);
Record DecodeRecord(const FeatureSchema& schema, const std::string& text);

// Client side. Requests are serialized through an internal mutex, so the
// oracle may be shared by several threads but is not concurrency_safe.
class ExternalOracle : public Oracle {
 public:
  ExternalOracle(std::unique_ptr<LineChannel> channel, FeatureSchema schema,
                 std::chrono::milliseconds timeout);
  ~ExternalOracle() override;

  bool concurrency_safe() const override { return false; }

 protected:
  Label DoPredict(const Record& record) const override;
  std::vector<Label> DoPredictBatch(
      std::span<const Record> records) const override;

 private:
  Label ReadLabel() const;

  std::unique_ptr<LineChannel> channel_;
  FeatureSchema schema_;
  std::chrono::milliseconds timeout_;
  mutable std::mutex mu_;
};

inline constexpr std::chrono::milliseconds kDefaultOracleTimeout{30000};

// Performs the HELLO handshake. Throws OracleError("schema mismatch: ...")
// when the server rejects the schema.
std::unique_ptr<ExternalOracle> ConnectExternal(
    std::unique_ptr<LineChannel> channel, const FeatureSchema& schema,
    std::chrono::milliseconds timeout = kDefaultOracleTimeout);

// Parses "tcp:<host>:<port>" or "cmd:<argv>" and connects.
std::unique_ptr<ExternalOracle> ConnectEndpoint(
    const std::string& endpoint, const FeatureSchema& schema,
    std::chrono::milliseconds timeout = kDefaultOracleTimeout);

// Server side: answers requests with `oracle` until BYE or end of stream.
// Malformed requests are answered with "ERR <msg>".
void ServeOracle(const Oracle& oracle, const FeatureSchema& schema,
                 LineChannel& channel);

}  // namespace glocal

#endif  // GLOCAL_WIRE_PROTOCOL_H_

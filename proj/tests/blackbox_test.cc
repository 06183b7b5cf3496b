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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <random>
#include <thread>

#include "glocal/decision_tree.h"
#include "glocal/forest.h"
#include "glocal/oracle.h"
#include "glocal/synthetic.h"
#include "glocal/wire_protocol.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace glocal {
namespace {

FeatureSchema TwoFeatureSchema() {
  return FeatureSchema({{"x1", FeatureKind::kContinuous, {}, 0.0, 1.0},
                        {"x2", FeatureKind::kContinuous, {}, 0.0, 1.0}});
}

LabeledDataset StepDataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabeledDataset d;
  d.schema = TwoFeatureSchema();
  for (std::size_t i = 0; i < n; ++i) {
    d.records.push_back(Record({u(rng), u(rng)}));
    d.labels.push_back(d.records.back()[0] > 0.5 ? 1 : 0);
  }
  return d;
}

std::vector<int> AllRows(std::size_t n) {
  std::vector<int> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<int>(i);
  return rows;
}

TEST(Cart, StumpFindsStep) {
  const LabeledDataset d = StepDataset(500, 1);
  CartParams params;
  params.max_depth = 1;
  const DecisionTree t = GrowCart(d.schema, d.records, d.labels,
                                  AllRows(d.size()), params);
  ASSERT_EQ(t.num_leaves(), 2);
  EXPECT_EQ(t.node(0).feature, 0);
  EXPECT_NEAR(t.node(0).threshold, 0.5, 0.05);
}

TEST(Cart, PureDataIsOneLeaf) {
  LabeledDataset d = StepDataset(50, 2);
  std::fill(d.labels.begin(), d.labels.end(), 1);
  const DecisionTree t = GrowCart(d.schema, d.records, d.labels,
                                  AllRows(d.size()), CartParams{});
  EXPECT_EQ(t.num_leaves(), 1);
  EXPECT_EQ(t.node(0).label, 1);
}

TEST(Cart, DumpRoundTrip) {
  const LabeledDataset d = MakeSyntheticDataset(300, 3);
  const DecisionTree t = GrowCart(d.schema, d.records, d.labels,
                                  AllRows(d.size()), CartParams{});
  std::vector<std::string> lines;
  std::istringstream in(DumpTree(t));
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  std::size_t pos = 0;
  EXPECT_EQ(LoadTree(lines, &pos), t);
  EXPECT_EQ(pos, lines.size());
}

TEST(Forest, LearnsStep) {
  ForestParams params;
  params.n_trees = 50;
  params.seed = 4;
  const ForestModel forest = TrainForest(StepDataset(500, 4), params);
  const LabeledDataset test = StepDataset(2000, 5);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    correct += forest.Predict(test.records[i]) == test.labels[i];
  }
  EXPECT_GE(static_cast<double>(correct) / test.size(), 0.99);
  EXPECT_EQ(forest.features_per_split(), 2);
}

TEST(Forest, DeterministicPerSeed) {
  const LabeledDataset d = MakeSyntheticDataset(400, 6);
  ForestParams params;
  params.n_trees = 20;
  params.seed = 9;
  const ForestModel a = TrainForest(d, params);
  const ForestModel b = TrainForest(d, params);
  EXPECT_EQ(a.Dump(), b.Dump());
  std::mt19937_64 rng(10);
  const LabeledDataset probes = testing::RandomDataset(d.schema, 1000, rng);
  EXPECT_EQ(a.PredictBatch(probes.records), b.PredictBatch(probes.records));
  params.seed = 10;
  EXPECT_NE(TrainForest(d, params).Dump(), a.Dump());
}

TEST(Forest, SingleTreeVotesAlone) {
  const LabeledDataset d = MakeSyntheticDataset(300, 7);
  ForestParams params;
  params.n_trees = 1;
  params.seed = 1;
  const ForestModel forest = TrainForest(d, params);
  ASSERT_EQ(forest.trees().size(), 1u);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Record x = testing::RandomRecord(d.schema, rng);
    EXPECT_EQ(forest.Predict(x), forest.trees()[0].Predict(x));
  }
}

TEST(Forest, DumpLoadRoundTrip) {
  const LabeledDataset d = MakeSyntheticDataset(300, 8);
  ForestParams params;
  params.n_trees = 15;
  params.seed = 2;
  const ForestModel forest = TrainForest(d, params);
  const ForestModel back = LoadForest(forest.Dump(), d.schema);
  EXPECT_EQ(back.Dump(), forest.Dump());
  EXPECT_EQ(back.PredictBatch(d.records), forest.PredictBatch(d.records));
  EXPECT_THROW(LoadForest("garbage\n", d.schema), std::exception);
}

TEST(Forest, RejectsDegenerateTrainingSets) {
  LabeledDataset d = StepDataset(10, 3);
  std::fill(d.labels.begin(), d.labels.end(), 0);
  EXPECT_THROW(TrainForest(d, ForestParams{}), std::invalid_argument);
  d.records.resize(1);
  d.labels.resize(1);
  EXPECT_THROW(TrainForest(d, ForestParams{}), std::invalid_argument);
}

TEST(Oracle, CountsQueriesAndRelabels) {
  const ThresholdOracle oracle(0, 0.5);
  LabeledDataset d = StepDataset(30, 12);
  std::fill(d.labels.begin(), d.labels.end(), 0);
  const LabeledDataset r = Relabel(oracle, d);
  EXPECT_EQ(r.records, d.records);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r.labels[i], r.records[i][0] > 0.5 ? 1 : 0);
  }
  EXPECT_EQ(oracle.query_count(), 30u);
  oracle.Predict(d.records[0]);
  EXPECT_EQ(oracle.query_count(), 31u);
}

// Reads requests from `channel` and answers each PREDICT line with `reply`,
// recording everything it sees.
struct ScriptedServer {
  std::vector<std::string> seen;
  std::thread thread;

  void Start(LineChannel* channel, std::string hello_reply, std::string reply) {
    thread = std::thread([this, channel, hello_reply, reply] {
      while (auto line = channel->ReadLine(std::chrono::seconds(10))) {
        seen.push_back(*line);
        if (*line == "BYE") return;
        if (line->rfind("HELLO", 0) == 0) {
          channel->WriteLine(hello_reply);
        } else if (line->rfind("PREDICT", 0) == 0) {
          channel->WriteLine(reply);
        }
      }
    });
  }
  void Join() {
    if (thread.joinable()) thread.join();
  }
};

TEST(Wire, EncodeDecodeRoundTrip) {
  const FeatureSchema s = testing::MixedSchema();
  const Record x({0.1, 1.0 / 3.0, 1e-300, 2, 0});
  EXPECT_EQ(EncodeRecord(s, x), "0.1,0.3333333333333333,1e-300,r,big red");
  EXPECT_EQ(DecodeRecord(s, EncodeRecord(s, x)), x);
  EXPECT_THROW(DecodeRecord(s, "0.1,0.2"), std::exception);
  const FeatureSchema comma({{"c", FeatureKind::kCategorical, {"a,b", "c"}}});
  EXPECT_EQ(EncodeRecord(comma, Record({0})), "a%2Cb");
  EXPECT_EQ(DecodeRecord(comma, "a%2Cb"), Record({0}));
}

TEST(Wire, ByteLevelTranscript) {
  const FeatureSchema s = testing::MixedSchema();
  auto [client, server] = MakeChannelPair();
  ScriptedServer fake;
  fake.Start(server.get(), "OK", "1");
  {
    auto oracle = ConnectExternal(std::move(client), s, std::chrono::seconds(5));
    EXPECT_EQ(oracle->Predict(Record({0.5, 0.25, 1, 1, 0})), 1);
    const std::vector<Record> batch = {Record({0, 0, 0, 0, 1}),
                                       Record({1, 1, 1, 2, 2})};
    EXPECT_EQ(oracle->PredictBatch(batch), (std::vector<Label>{1, 1}));
  }
  fake.Join();
  EXPECT_EQ(fake.seen,
            (std::vector<std::string>{"HELLO 5 n,n,n,c,c",
                                      "PREDICT 0.5,0.25,1,q,big red",
                                      "BATCH 2", "PREDICT 0,0,0,p,small",
                                      "PREDICT 1,1,1,r,x-1", "BYE"}));
}

TEST(Wire, HandshakeMismatch) {
  const FeatureSchema s = testing::MixedSchema();
  auto [client, server] = MakeChannelPair();
  const FeatureSchema other = TwoFeatureSchema();
  const ConstantOracle zero(0);
  std::thread t([&] { ServeOracle(zero, other, *server); });
  try {
    ConnectExternal(std::move(client), s, std::chrono::seconds(5));
    ADD_FAILURE() << "handshake should fail";
  } catch (const OracleError& e) {
    EXPECT_NE(std::string(e.what()).find("schema mismatch"), std::string::npos);
  }
  t.join();
}

TEST(Wire, LabelOutOfDomain) {
  const FeatureSchema s = TwoFeatureSchema();
  auto [client, server] = MakeChannelPair();
  ScriptedServer fake;
  fake.Start(server.get(), "OK", "2");
  {
    auto oracle = ConnectExternal(std::move(client), s, std::chrono::seconds(5));
    try {
      oracle->Predict(Record({0.1, 0.2}));
      ADD_FAILURE() << "label 2 should be rejected";
    } catch (const OracleError& e) {
      EXPECT_NE(std::string(e.what()).find("label out of domain"),
                std::string::npos);
    }
  }
  fake.Join();
}

TEST(Wire, ServerErrorsSurfaceAsOracleErrors) {
  const FeatureSchema s = TwoFeatureSchema();
  auto [client, server] = MakeChannelPair();
  ScriptedServer fake;
  fake.Start(server.get(), "OK", "ERR model crashed");
  {
    auto oracle = ConnectExternal(std::move(client), s, std::chrono::seconds(5));
    EXPECT_THROW(oracle->Predict(Record({0.1, 0.2})), OracleError);
  }
  fake.Join();
}

TEST(Wire, ServerRejectsMalformedRequests) {
  const FeatureSchema s = TwoFeatureSchema();
  auto [client, server] = MakeChannelPair();
  const ThresholdOracle oracle(0, 0.5);
  std::thread t([&] { ServeOracle(oracle, s, *server); });
  const auto timeout = std::chrono::seconds(5);
  client->WriteLine("PREDICT 0.1,0.2");
  EXPECT_EQ(client->ReadLine(timeout), "ERR handshake required");
  client->WriteLine("HELLO 2 n,n");
  EXPECT_EQ(client->ReadLine(timeout), "OK");
  client->WriteLine("PREDICT 0.1");
  EXPECT_EQ(client->ReadLine(timeout)->rfind("ERR", 0), 0u);
  client->WriteLine("PREDICT 0.1,abc");
  EXPECT_EQ(client->ReadLine(timeout)->rfind("ERR", 0), 0u);
  client->WriteLine("FROB");
  EXPECT_EQ(client->ReadLine(timeout), "ERR unknown command");
  client->WriteLine("BATCH x");
  EXPECT_EQ(client->ReadLine(timeout), "ERR malformed BATCH");
  client->WriteLine("PREDICT 0.9,0.2");
  EXPECT_EQ(client->ReadLine(timeout), "1");
  client->WriteLine("BYE");
  t.join();
}

TEST(Wire, LoopbackForestMatchesInProcess) {
  const LabeledDataset d = MakeSyntheticDataset(300, 13);
  ForestParams params;
  params.n_trees = 10;
  params.seed = 3;
  const ForestModel forest = TrainForest(d, params);
  auto [client, server] = MakeChannelPair();
  std::thread t([&] { ServeOracle(forest, d.schema, *server); });
  {
    auto remote = ConnectExternal(std::move(client), d.schema);
    // 3000 records forces several BATCH chunks.
    std::mt19937_64 rng(14);
    const LabeledDataset probes = testing::RandomDataset(d.schema, 3000, rng);
    EXPECT_EQ(remote->PredictBatch(probes.records),
              forest.PredictBatch(probes.records));
    for (std::size_t i = 0; i < 50; ++i) {
      EXPECT_EQ(remote->Predict(d.records[i]), forest.Predict(d.records[i]));
    }
    EXPECT_EQ(Relabel(*remote, d).labels, Relabel(forest, d).labels);
    EXPECT_FALSE(remote->concurrency_safe());
  }
  t.join();
}

TEST(Wire, CommandEndpointRelabels) {
  const FeatureSchema s = TwoFeatureSchema();
  auto oracle = ConnectEndpoint(
      "cmd:sh -c 'read h; echo OK; while read l; do case \"$l\" in BYE) exit "
      "0;; PREDICT*) echo 1;; esac; done'",
      s, std::chrono::seconds(10));
  LabeledDataset d = StepDataset(3, 15);
  std::fill(d.labels.begin(), d.labels.end(), 0);
  EXPECT_EQ(Relabel(*oracle, d).labels, (std::vector<Label>{1, 1, 1}));
}

TEST(Wire, TcpEndpoint) {
  const FeatureSchema s = TwoFeatureSchema();
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(listener, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  ASSERT_EQ(::listen(listener, 1), 0);
  socklen_t len = sizeof(addr);
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);
  const ThresholdOracle truth(1, 0.5);
  std::thread t([&] {
    const int fd = ::accept(listener, nullptr, nullptr);
    FdChannel channel(fd, fd);
    ServeOracle(truth, s, channel);
  });
  {
    auto oracle = ConnectEndpoint("tcp:127.0.0.1:" + std::to_string(port), s);
    EXPECT_EQ(oracle->Predict(Record({0.0, 0.9})), 1);
    EXPECT_EQ(oracle->Predict(Record({0.9, 0.1})), 0);
  }
  t.join();
  ::close(listener);
  EXPECT_THROW(ConnectEndpoint("udp:1", s), OracleError);
}

}  // namespace
}  // namespace glocal

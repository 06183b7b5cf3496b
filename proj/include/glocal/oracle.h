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

// The black box under explanation: anything mapping a record to a label.

#ifndef GLOCAL_ORACLE_H_
#define GLOCAL_ORACLE_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "glocal/schema.h"

namespace glocal {

// Predictions must be deterministic for the lifetime of the oracle. Every
// predicted record is counted in query_count().
class Oracle {
 public:
  virtual ~Oracle() = default;

  Label Predict(const Record& record) const {
    queries_.fetch_add(1, std::memory_order_relaxed);
    return DoPredict(record);
  }
  std::vector<Label> PredictBatch(std::span<const Record> records) const {
    queries_.fetch_add(records.size(), std::memory_order_relaxed);
    return DoPredictBatch(records);
  }

  // True when Predict may be called from several threads at once without
  // any external serialization.
  virtual bool concurrency_safe() const = 0;

  std::uint64_t query_count() const {
    return queries_.load(std::memory_order_relaxed);
  }

 protected:
  virtual Label DoPredict(const Record& record) const = 0;
  virtual std::vector<Label> DoPredictBatch(
      std::span<const Record> records) const;

 private:
  mutable std::atomic<std::uint64_t> queries_{0};
};

class ConstantOracle : public Oracle {
 public:
  explicit ConstantOracle(Label label) : label_(label) {}
  bool concurrency_safe() const override { return true; }

 protected:
  Label DoPredict(const Record&) const override { return label_; }

 private:
  Label label_;
};

// 1 iff record[feature] > threshold.
class ThresholdOracle : public Oracle {
 public:
  ThresholdOracle(int feature, double threshold)
      : feature_(feature), threshold_(threshold) {}
  bool concurrency_safe() const override { return true; }

 protected:
  Label DoPredict(const Record& record) const override {
    return record[feature_] > threshold_ ? 1 : 0;
  }

 private:
  int feature_;
  double threshold_;
};

// Wraps a pure function. The function must be thread-safe.
class FunctionOracle : public Oracle {
 public:
  explicit FunctionOracle(std::function<Label(const Record&)> fn)
      : fn_(std::move(fn)) {}
  bool concurrency_safe() const override { return true; }

 protected:
  Label DoPredict(const Record& record) const override { return fn_(record); }

 private:
  std::function<Label(const Record&)> fn_;
};

// Same records, labels replaced by the oracle's predictions.
LabeledDataset Relabel(const Oracle& oracle, const LabeledDataset& data);

}  // namespace glocal

#endif  // GLOCAL_ORACLE_H_

// Copyright 2026 The Tripart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace tripart {

struct PartyCost {
  std::uint64_t bytes = 0;     // payload plus frame headers
  std::uint64_t payload = 0;   // payload only
  std::uint64_t messages = 0;
  std::uint64_t rounds = 0;

  PartyCost& operator+=(const PartyCost& o) {
    bytes += o.bytes;
    payload += o.payload;
    messages += o.messages;
    rounds += o.rounds;
    return *this;
  }
  bool operator==(const PartyCost&) const = default;
};

using LabelCosts = std::map<std::string, PartyCost>;

// Per-party traffic meter. Traffic is attributed to the '/'-joined stack of
// active protocol labels, or to "other" when the stack is empty.
//
// A round starts with the first send after a receive: all messages a party
// emits without waiting on a peer in between belong to the same round.
class CostMeter {
 public:
  class Scope {
   public:
    Scope(CostMeter& meter, std::string label) : meter_(&meter) {
      meter_->push(std::move(label));
    }
    ~Scope() {
      if (meter_) meter_->pop();
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    CostMeter* meter_;
  };

  void on_send(std::uint64_t payload_bytes, std::uint64_t framed_bytes);
  void on_recv() { round_open_ = false; }
  void reset();

  std::string current_label() const;
  const LabelCosts& by_label() const { return labels_; }
  PartyCost total() const;

 private:
  void push(std::string label) { stack_.push_back(std::move(label)); }
  void pop() { stack_.pop_back(); }

  std::vector<std::string> stack_;
  LabelCosts labels_;
  bool round_open_ = false;
};

// Merged three-party view. `rounds` is the round count of the critical
// party (the one with the most rounds); per-protocol rounds are taken from
// that same party so that per-protocol entries always sum to the totals.
struct CostReport {
  struct Entry {
    std::array<std::uint64_t, 3> bytes{};
    std::array<std::uint64_t, 3> payload{};
    std::array<std::uint64_t, 3> messages{};
    std::uint64_t rounds = 0;

    std::uint64_t total_bytes() const { return bytes[0] + bytes[1] + bytes[2]; }
    std::uint64_t total_payload() const {
      return payload[0] + payload[1] + payload[2];
    }
  };

  std::array<std::uint64_t, 3> bytes_sent{};
  std::array<std::uint64_t, 3> payload_bytes{};
  std::array<std::uint64_t, 3> messages_sent{};
  std::uint64_t rounds = 0;
  std::map<std::string, Entry> per_protocol;

  static CostReport merge(const std::array<LabelCosts, 3>& parties);

  std::uint64_t total_bytes() const;
  std::uint64_t total_payload() const;
  std::uint64_t total_messages() const;
  // Sum over all labels starting with `prefix` (a label or a label path).
  Entry sum_prefix(const std::string& prefix) const;
  // True when the totals equal the sum of the per-protocol entries.
  bool consistent() const;

  std::string to_text() const;
  nlohmann::json to_json() const;
};

nlohmann::json label_costs_to_json(const LabelCosts& costs);
LabelCosts label_costs_from_json(const nlohmann::json& j);

}  // namespace tripart

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

#include "tripart/cost.hpp"

#include <sstream>

namespace tripart {

void CostMeter::on_send(std::uint64_t payload_bytes,
                        std::uint64_t framed_bytes) {
  PartyCost& c = labels_[current_label()];
  c.bytes += framed_bytes;
  c.payload += payload_bytes;
  c.messages += 1;
  if (!round_open_) {
    c.rounds += 1;
    round_open_ = true;
  }
}

void CostMeter::reset() {
  labels_.clear();
  round_open_ = false;
}

std::string CostMeter::current_label() const {
  if (stack_.empty()) return "other";
  std::string s = stack_.front();
  for (std::size_t i = 1; i < stack_.size(); ++i) s += "/" + stack_[i];
  return s;
}

PartyCost CostMeter::total() const {
  PartyCost t;
  for (const auto& [_, c] : labels_) t += c;
  return t;
}

CostReport CostReport::merge(const std::array<LabelCosts, 3>& parties) {
  CostReport r;
  std::array<std::uint64_t, 3> rounds{};
  for (int p = 0; p < 3; ++p) {
    for (const auto& [label, c] : parties[p]) {
      auto& e = r.per_protocol[label];
      e.bytes[p] += c.bytes;
      e.payload[p] += c.payload;
      e.messages[p] += c.messages;
      r.bytes_sent[p] += c.bytes;
      r.payload_bytes[p] += c.payload;
      r.messages_sent[p] += c.messages;
      rounds[p] += c.rounds;
    }
  }
  int critical = 0;
  for (int p = 1; p < 3; ++p) {
    if (rounds[p] > rounds[critical]) critical = p;
  }
  r.rounds = rounds[critical];
  for (auto& [label, e] : r.per_protocol) {
    auto it = parties[critical].find(label);
    e.rounds = it == parties[critical].end() ? 0 : it->second.rounds;
  }
  return r;
}

std::uint64_t CostReport::total_bytes() const {
  return bytes_sent[0] + bytes_sent[1] + bytes_sent[2];
}
std::uint64_t CostReport::total_payload() const {
  return payload_bytes[0] + payload_bytes[1] + payload_bytes[2];
}
std::uint64_t CostReport::total_messages() const {
  return messages_sent[0] + messages_sent[1] + messages_sent[2];
}

CostReport::Entry CostReport::sum_prefix(const std::string& prefix) const {
  Entry s;
  for (const auto& [label, e] : per_protocol) {
    const bool match =
        label == prefix || (label.size() > prefix.size() &&
                            label.compare(0, prefix.size(), prefix) == 0 &&
                            label[prefix.size()] == '/');
    if (!match) continue;
    for (int p = 0; p < 3; ++p) {
      s.bytes[p] += e.bytes[p];
      s.payload[p] += e.payload[p];
      s.messages[p] += e.messages[p];
    }
    s.rounds += e.rounds;
  }
  return s;
}

bool CostReport::consistent() const {
  std::array<std::uint64_t, 3> b{}, pl{}, m{};
  std::uint64_t rs = 0;
  for (const auto& [_, e] : per_protocol) {
    for (int p = 0; p < 3; ++p) {
      b[p] += e.bytes[p];
      pl[p] += e.payload[p];
      m[p] += e.messages[p];
    }
    rs += e.rounds;
  }
  return b == bytes_sent && pl == payload_bytes && m == messages_sent &&
         rs == rounds;
}

std::string CostReport::to_text() const {
  std::ostringstream os;
  os << "bytes_total=" << total_bytes() << "\n";
  os << "payload_total=" << total_payload() << "\n";
  os << "messages_total=" << total_messages() << "\n";
  os << "rounds=" << rounds << "\n";
  for (int p = 0; p < 3; ++p) {
    os << "party" << p << ".bytes=" << bytes_sent[p] << "\n";
    os << "party" << p << ".payload=" << payload_bytes[p] << "\n";
    os << "party" << p << ".messages=" << messages_sent[p] << "\n";
  }
  for (const auto& [label, e] : per_protocol) {
    os << "protocol." << label << ".bytes=" << e.total_bytes() << "\n";
    os << "protocol." << label << ".payload=" << e.total_payload() << "\n";
    os << "protocol." << label
       << ".messages=" << e.messages[0] + e.messages[1] + e.messages[2]
       << "\n";
    os << "protocol." << label << ".rounds=" << e.rounds << "\n";
  }
  return os.str();
}

nlohmann::json CostReport::to_json() const {
  nlohmann::json j;
  j["bytes_total"] = total_bytes();
  j["payload_total"] = total_payload();
  j["messages_total"] = total_messages();
  j["rounds"] = rounds;
  j["bytes_sent"] = bytes_sent;
  j["payload_bytes"] = payload_bytes;
  j["messages_sent"] = messages_sent;
  auto& pp = j["per_protocol"];
  pp = nlohmann::json::object();
  for (const auto& [label, e] : per_protocol) {
    pp[label] = {{"bytes", e.bytes},
                 {"payload", e.payload},
                 {"messages", e.messages},
                 {"rounds", e.rounds}};
  }
  return j;
}

nlohmann::json label_costs_to_json(const LabelCosts& costs) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [label, c] : costs) {
    j[label] = {c.bytes, c.payload, c.messages, c.rounds};
  }
  return j;
}

LabelCosts label_costs_from_json(const nlohmann::json& j) {
  LabelCosts costs;
  for (const auto& [label, v] : j.items()) {
    costs[label] = PartyCost{v.at(0).get<std::uint64_t>(),
                             v.at(1).get<std::uint64_t>(),
                             v.at(2).get<std::uint64_t>(),
                             v.at(3).get<std::uint64_t>()};
  }
  return costs;
}

}  // namespace tripart

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

#include "tripart/transport.hpp"

#include <string>

#include "tripart/error.hpp"

namespace tripart {

void put_u32_le(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{p[i]} << (8 * i);
  return v;
}

void put_u64_le(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_u64_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

Bytes pack_words(std::span<const std::uint64_t> words) {
  Bytes out(words.size() * 8);
  for (std::size_t i = 0; i < words.size(); ++i) put_u64_le(&out[8 * i], words[i]);
  return out;
}

std::vector<std::uint64_t> unpack_words(const Bytes& bytes) {
  if (bytes.size() % 8 != 0) {
    throw TransportError("payload of " + std::to_string(bytes.size()) +
                         " bytes is not a whole number of ring elements");
  }
  std::vector<std::uint64_t> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = get_u64_le(&bytes[8 * i]);
  return out;
}

class LocalHub::LocalChannel : public Channel {
 public:
  LocalChannel(LocalHub& hub, int self) : hub_(hub), self_(self) {}

  int self() const override { return self_; }

  void send(int to, Bytes payload) override {
    check_peer(to);
    written_ += payload.size() + kFrameHeaderBytes;
    hub_.push(Message{self_, to, send_seq_[to]++, std::move(payload)});
  }

  Bytes recv(int from) override {
    check_peer(from);
    Message m = hub_.pop(from, self_);
    if (m.sequence != recv_seq_[from]) {
      throw TransportError("out-of-order message", self_, from, m.sequence);
    }
    ++recv_seq_[from];
    return std::move(m.payload);
  }

  std::uint64_t bytes_written() const override { return written_; }

  std::uint64_t next_recv_seq(int from) const { return recv_seq_[from]; }

 private:
  void check_peer(int peer) const {
    if (peer < 0 || peer > 2 || peer == self_) {
      throw ArgumentError("party " + std::to_string(self_) +
                          " has no link to " + std::to_string(peer));
    }
  }

  LocalHub& hub_;
  int self_;
  std::array<std::uint64_t, 3> send_seq_{};
  std::array<std::uint64_t, 3> recv_seq_{};
  std::uint64_t written_ = 0;
};

LocalHub::LocalHub(std::chrono::milliseconds timeout) : timeout_(timeout) {
  for (int i = 0; i < 3; ++i) {
    channels_[i] = std::make_unique<LocalChannel>(*this, i);
  }
}

LocalHub::~LocalHub() = default;

Channel& LocalHub::channel(int party) {
  if (party < 0 || party > 2) {
    throw ArgumentError("party id " + std::to_string(party) +
                        " outside {0, 1, 2}");
  }
  return *channels_[party];
}

void LocalHub::close() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

void LocalHub::push(Message m) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) {
      throw TransportError("send on closed channel", m.sender, m.receiver,
                           m.sequence);
    }
    queues_[m.sender][m.receiver].push_back(std::move(m));
  }
  cv_.notify_all();
}

Message LocalHub::pop(int from, int to) {
  std::unique_lock<std::mutex> lock(mu_);
  auto& q = queues_[from][to];
  const bool ready = cv_.wait_for(
      lock, timeout_, [&] { return !q.empty() || closed_; });
  const std::uint64_t seq = channels_[to]->next_recv_seq(from);
  if (!q.empty()) {
    Message m = std::move(q.front());
    q.pop_front();
    return m;
  }
  if (!ready) throw TransportError("receive timed out", to, from, seq);
  throw TransportError("peer closed", to, from, seq);
}

}  // namespace tripart

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
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace tripart {

using Bytes = std::vector<std::uint8_t>;

// Every message on the wire is prefixed by a u32 little-endian length.
inline constexpr std::uint64_t kFrameHeaderBytes = 4;
inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};

struct Message {
  int sender = 0;
  int receiver = 0;
  std::uint64_t sequence = 0;
  Bytes payload;
};

// Point-to-point links from one party to the two others. Delivery is
// reliable and in order per direction. Not thread-safe: one party program
// drives one channel.
class Channel {
 public:
  virtual ~Channel() = default;

  virtual int self() const = 0;
  virtual void send(int to, Bytes payload) = 0;
  virtual Bytes recv(int from) = 0;
  // Bytes handed to the underlying medium, frame headers included.
  virtual std::uint64_t bytes_written() const = 0;
};

void put_u32_le(std::uint8_t* p, std::uint32_t v);
std::uint32_t get_u32_le(const std::uint8_t* p);
void put_u64_le(std::uint8_t* p, std::uint64_t v);
std::uint64_t get_u64_le(const std::uint8_t* p);

Bytes pack_words(std::span<const std::uint64_t> words);
std::vector<std::uint64_t> unpack_words(const Bytes& bytes);

// In-process backend: nine directed queues (three unused self-loops) behind
// one mutex. close() fails every pending and future receive.
class LocalHub {
 public:
  explicit LocalHub(std::chrono::milliseconds timeout = kDefaultTimeout);
  ~LocalHub();
  LocalHub(const LocalHub&) = delete;
  LocalHub& operator=(const LocalHub&) = delete;

  Channel& channel(int party);
  void close();

 private:
  class LocalChannel;
  friend class LocalChannel;

  void push(Message m);
  Message pop(int from, int to);

  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool closed_ = false;
  std::array<std::array<std::deque<Message>, 3>, 3> queues_;
  std::array<std::unique_ptr<LocalChannel>, 3> channels_;
};

}  // namespace tripart

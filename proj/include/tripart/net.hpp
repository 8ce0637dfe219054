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

// TCP backend.
//
// Wire format, all integers little-endian:
//   handshake: "RSS3" | u8 version | u8 role | u32 config_crc32
//              | u32 text_len | canonical config text
//   frame:     u32 payload_len | payload
// Role 0..2 is a party, kClientRole the job client. The connecting side
// speaks first; the accepting side validates and answers with its own
// handshake.

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "tripart/transport.hpp"

namespace tripart {

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::uint8_t kClientRole = 255;
inline constexpr std::array<char, 4> kHandshakeMagic{'R', 'S', 'S', '3'};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  // "host:port"; throws ArgumentError.
  static Endpoint parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

struct Handshake {
  std::uint8_t version = kProtocolVersion;
  std::uint8_t role = 0;
  std::string config_text;

  std::uint32_t config_hash() const;
  Bytes encode() const;
};

// Name of the first key=value line on which two canonical config texts
// differ, or "" when they are identical.
std::string first_config_difference(const std::string& a,
                                    const std::string& b);

using Clock = std::chrono::steady_clock;

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }
  void close();

  // Both throw TransportError on failure or when `deadline` passes.
  void write_all(const std::uint8_t* data, std::size_t n,
                 Clock::time_point deadline);
  void read_all(std::uint8_t* data, std::size_t n, Clock::time_point deadline);

  void write_frame(const Bytes& payload, Clock::time_point deadline);
  Bytes read_frame(Clock::time_point deadline);

 private:
  int fd_ = -1;
};

class Listener {
 public:
  explicit Listener(const Endpoint& ep);
  Socket accept(Clock::time_point deadline);
  std::uint16_t port() const { return port_; }

 private:
  Socket sock_;
  std::uint16_t port_ = 0;
};

// Retries until the deadline; throws TransportError("connect timeout").
Socket connect_with_retry(const Endpoint& ep, Clock::time_point deadline);

// Sends `mine` and validates the peer's reply (connecting side).
Handshake handshake_as_connector(Socket& s, const Handshake& mine,
                                 std::optional<std::uint8_t> expected_role,
                                 Clock::time_point deadline);
// Validates the peer's greeting and replies with `mine` (accepting side).
// The reply is sent before validation fails so both ends see the mismatch.
Handshake handshake_as_acceptor(Socket& s, const Handshake& mine,
                                Clock::time_point deadline);

class TcpChannel : public Channel {
 public:
  TcpChannel(int self, std::array<Socket, 3> peers,
             std::chrono::milliseconds timeout);

  int self() const override { return self_; }
  void send(int to, Bytes payload) override;
  Bytes recv(int from) override;
  std::uint64_t bytes_written() const override { return written_; }

 private:
  struct Inbox {
    Bytes data;
    std::size_t head = 0;
    bool eof = false;
  };

  void pump_until(int to, std::size_t total, const Bytes* payload,
                  std::uint64_t seq);
  void poll_once(int write_to, const Bytes* frame, std::size_t* off,
                 Clock::time_point deadline, int peer, std::uint64_t seq);

  int self_;
  std::array<Socket, 3> peers_;
  std::array<Inbox, 3> inbox_;
  std::chrono::milliseconds timeout_;
  std::array<std::uint64_t, 3> send_seq_{};
  std::array<std::uint64_t, 3> recv_seq_{};
  std::uint64_t written_ = 0;
};

struct PartyLinks {
  std::unique_ptr<TcpChannel> channel;
  Socket client;  // invalid unless a client was expected
};

// Party `id` listens on endpoints[id], connects to every lower id and
// accepts every higher id (and the client when `expect_client`).
PartyLinks establish_party_links(int id, const std::array<Endpoint, 3>& eps,
                                 const Handshake& mine, bool expect_client,
                                 std::chrono::milliseconds timeout,
                                 Listener* listener = nullptr);

// Client side: one connection per party, in id order.
std::array<Socket, 3> connect_client(const std::array<Endpoint, 3>& eps,
                                     const Handshake& mine,
                                     std::chrono::milliseconds timeout);

}  // namespace tripart

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

#include "tripart/party.hpp"

#include <algorithm>

#include "tripart/error.hpp"

namespace tripart {

std::vector<RingElement> ZeroShareGenerator::arith(std::size_t n, Ring ring) {
  std::vector<RingElement> a(n), b(n);
  next_.fill(kDomainZeroShare, counter_, a);
  prev_.fill(kDomainZeroShare, counter_, b);
  counter_ += n;
  const RingElement mask = ring.mask();
  for (std::size_t i = 0; i < n; ++i) a[i] = (a[i] - b[i]) & mask;
  return a;
}

std::vector<std::uint64_t> ZeroShareGenerator::boolean(std::size_t n) {
  std::vector<std::uint64_t> a(n), b(n);
  next_.fill(kDomainZeroShare, counter_, a);
  prev_.fill(kDomainZeroShare, counter_, b);
  counter_ += n;
  for (std::size_t i = 0; i < n; ++i) a[i] ^= b[i];
  return a;
}

std::vector<std::uint64_t> ZeroShareGenerator::common_with_next(std::size_t n) {
  std::vector<std::uint64_t> a(n);
  next_.fill(kDomainPairCommon, next_common_ctr_, a);
  next_common_ctr_ += n;
  return a;
}

std::vector<std::uint64_t> ZeroShareGenerator::common_with_prev(std::size_t n) {
  std::vector<std::uint64_t> a(n);
  prev_.fill(kDomainPairCommon, prev_common_ctr_, a);
  prev_common_ctr_ += n;
  return a;
}

Party::Party(PartyId id, FixedEncoding enc, Channel& channel,
             std::uint64_t master_seed)
    : id_(id),
      enc_(enc),
      channel_(channel),
      master_seed_(master_seed),
      prg_(derive_key(master_seed, "party-private",
                      static_cast<std::uint64_t>(id.index))) {
  if (id.index < 0 || id.index > 2) {
    throw ArgumentError("party id " + std::to_string(id.index) +
                        " outside {0, 1, 2}");
  }
  if (channel.self() != id.index) {
    throw ArgumentError("channel belongs to party " +
                        std::to_string(channel.self()));
  }
  enc_.validate();
}

void Party::setup() {
  auto s = scope("setup");
  const Key128 mine = prg_.next_key();
  send_bytes(id_.next(), Bytes(mine.begin(), mine.end()));
  const Bytes theirs = recv_bytes(id_.prev());
  if (theirs.size() != 16) {
    throw TransportError("key exchange carried " +
                             std::to_string(theirs.size()) + " bytes",
                         id_.index, id_.prev().index, 0);
  }
  Key128 prev_key;
  std::copy(theirs.begin(), theirs.end(), prev_key.begin());
  zsg_.emplace(mine, prev_key);
}

ZeroShareGenerator& Party::zsg() {
  if (!zsg_) {
    throw ArgumentError("party " + std::to_string(id_.index) +
                        " used correlated randomness before setup()");
  }
  return *zsg_;
}

void Party::send_bytes(PartyId to, Bytes payload) {
  const std::uint64_t n = payload.size();
  channel_.send(to.index, std::move(payload));
  meter_.on_send(n, n + kFrameHeaderBytes);
}

Bytes Party::recv_bytes(PartyId from) {
  Bytes b = channel_.recv(from.index);
  meter_.on_recv();
  return b;
}

void Party::send_words(PartyId to, std::span<const std::uint64_t> words) {
  send_bytes(to, pack_words(words));
}

std::vector<std::uint64_t> Party::recv_words(PartyId from, std::size_t n) {
  std::vector<std::uint64_t> w = unpack_words(recv_bytes(from));
  if (w.size() != n) {
    throw TransportError("expected " + std::to_string(n) + " ring elements, got " +
                             std::to_string(w.size()),
                         id_.index, from.index, 0);
  }
  return w;
}

}  // namespace tripart

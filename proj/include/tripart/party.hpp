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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tripart/cost.hpp"
#include "tripart/prf.hpp"
#include "tripart/ring.hpp"
#include "tripart/transport.hpp"

namespace tripart {

struct PartyId {
  int index = 0;

  constexpr PartyId next() const { return PartyId{(index + 1) % 3}; }
  constexpr PartyId prev() const { return PartyId{(index + 2) % 3}; }
  constexpr bool operator==(const PartyId&) const = default;
};

// PRF domains. Zero shares and pairwise common randomness never share a
// (key, domain, counter) triple.
inline constexpr std::uint64_t kDomainZeroShare = 1;
inline constexpr std::uint64_t kDomainPairCommon = 2;

// Correlated randomness held by P_i: k_i (shared with P_{i+1}) and k_{i-1}
// (shared with P_{i-1}).
class ZeroShareGenerator {
 public:
  ZeroShareGenerator(const Key128& with_next, const Key128& with_prev)
      : next_(with_next), prev_(with_prev) {}

  // alpha_i = F(k_i, ctr) - F(k_{i-1}, ctr); the three parties' values sum
  // to zero for every counter.
  std::vector<RingElement> arith(std::size_t n, Ring ring);
  // F(k_i, ctr) xor F(k_{i-1}, ctr); XOR-sums to zero, 64 lanes per word.
  std::vector<std::uint64_t> boolean(std::size_t n);
  // Values known to exactly this party and its next / previous neighbour.
  std::vector<std::uint64_t> common_with_next(std::size_t n);
  std::vector<std::uint64_t> common_with_prev(std::size_t n);

  std::uint64_t counter() const { return counter_; }

 private:
  Prf next_;
  Prf prev_;
  std::uint64_t counter_ = 0;
  std::uint64_t next_common_ctr_ = 0;
  std::uint64_t prev_common_ctr_ = 0;
};

// One party's execution context: identity, fixed-point encoding, channel,
// traffic meter and correlated randomness. All protocol functions take a
// Party& and must be invoked by the three parties in lockstep.
class Party {
 public:
  Party(PartyId id, FixedEncoding enc, Channel& channel,
        std::uint64_t master_seed);

  // Distributes the pairwise PRF keys: P_i draws k_i from its private
  // generator and hands it to P_{i+1}.
  void setup();

  PartyId id() const { return id_; }
  int index() const { return id_.index; }
  const FixedEncoding& enc() const { return enc_; }
  Ring ring() const { return enc_.ring(); }
  std::uint64_t master_seed() const { return master_seed_; }

  CostMeter& meter() { return meter_; }
  CostMeter::Scope scope(std::string label) {
    return CostMeter::Scope(meter_, std::move(label));
  }

  ZeroShareGenerator& zsg();
  Prg& private_prg() { return prg_; }

  void send_bytes(PartyId to, Bytes payload);
  Bytes recv_bytes(PartyId from);
  void send_words(PartyId to, std::span<const std::uint64_t> words);
  // Throws TransportError unless exactly `n` words arrive.
  std::vector<std::uint64_t> recv_words(PartyId from, std::size_t n);

 private:
  PartyId id_;
  FixedEncoding enc_;
  Channel& channel_;
  std::uint64_t master_seed_;
  Prg prg_;
  CostMeter meter_;
  std::optional<ZeroShareGenerator> zsg_;
};

}  // namespace tripart

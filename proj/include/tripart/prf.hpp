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
#include <memory>
#include <span>
#include <string_view>

namespace tripart {

using Key128 = std::array<std::uint8_t, 16>;

// Keyed PRF F_k(domain, counter) -> 64 bits, realised as the low half of
// AES-128_k(counter || domain).
class Prf {
 public:
  explicit Prf(const Key128& key);
  ~Prf();
  Prf(Prf&&) noexcept;
  Prf& operator=(Prf&&) noexcept;

  std::uint64_t eval(std::uint64_t domain, std::uint64_t counter) const;
  // out[i] = eval(domain, counter + i)
  void fill(std::uint64_t domain, std::uint64_t counter,
            std::span<std::uint64_t> out) const;

  const Key128& key() const { return key_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Key128 key_;
};

// Counter-mode generator over Prf; deterministic for a fixed key.
class Prg {
 public:
  explicit Prg(const Key128& key) : prf_(key) {}

  std::uint64_t next() {
    std::uint64_t v;
    fill(std::span<std::uint64_t>(&v, 1));
    return v;
  }
  void fill(std::span<std::uint64_t> out) {
    prf_.fill(0, counter_, out);
    counter_ += out.size();
  }
  Key128 next_key();

 private:
  Prf prf_;
  std::uint64_t counter_ = 0;
};

// SHA-256(master_seed || purpose || index) truncated to 128 bits.
Key128 derive_key(std::uint64_t master_seed, std::string_view purpose,
                  std::uint64_t index = 0);

}  // namespace tripart

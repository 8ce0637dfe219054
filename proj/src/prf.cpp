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

#include "tripart/prf.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace tripart {

namespace {

void put_le64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

}  // namespace

struct Prf::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Impl() { EVP_CIPHER_CTX_free(ctx); }
};

Prf::Prf(const Key128& key) : impl_(std::make_unique<Impl>()), key_(key) {
  impl_->ctx = EVP_CIPHER_CTX_new();
  if (impl_->ctx == nullptr ||
      EVP_EncryptInit_ex(impl_->ctx, EVP_aes_128_ecb(), nullptr, key.data(),
                         nullptr) != 1) {
    throw std::runtime_error("AES-128 initialisation failed");
  }
  EVP_CIPHER_CTX_set_padding(impl_->ctx, 0);
}

Prf::~Prf() = default;
Prf::Prf(Prf&&) noexcept = default;
Prf& Prf::operator=(Prf&&) noexcept = default;

std::uint64_t Prf::eval(std::uint64_t domain, std::uint64_t counter) const {
  std::uint64_t v;
  fill(domain, counter, std::span<std::uint64_t>(&v, 1));
  return v;
}

void Prf::fill(std::uint64_t domain, std::uint64_t counter,
               std::span<std::uint64_t> out) const {
  if (out.empty()) return;
  constexpr std::size_t kChunk = 4096;
  std::vector<std::uint8_t> in(std::min(out.size(), kChunk) * 16);
  std::vector<std::uint8_t> enc(in.size());
  for (std::size_t base = 0; base < out.size(); base += kChunk) {
    const std::size_t n = std::min(kChunk, out.size() - base);
    for (std::size_t i = 0; i < n; ++i) {
      put_le64(&in[16 * i], counter + base + i);
      put_le64(&in[16 * i + 8], domain);
    }
    int len = 0;
    if (EVP_EncryptUpdate(impl_->ctx, enc.data(), &len, in.data(),
                          static_cast<int>(16 * n)) != 1 ||
        len != static_cast<int>(16 * n)) {
      throw std::runtime_error("AES-128 evaluation failed");
    }
    for (std::size_t i = 0; i < n; ++i) out[base + i] = get_le64(&enc[16 * i]);
  }
}

Key128 Prg::next_key() {
  std::uint64_t w[2];
  fill(std::span<std::uint64_t>(w, 2));
  Key128 k;
  put_le64(k.data(), w[0]);
  put_le64(k.data() + 8, w[1]);
  return k;
}

Key128 derive_key(std::uint64_t master_seed, std::string_view purpose,
                  std::uint64_t index) {
  std::vector<std::uint8_t> msg(16 + purpose.size());
  put_le64(msg.data(), master_seed);
  std::memcpy(msg.data() + 8, purpose.data(), purpose.size());
  put_le64(msg.data() + 8 + purpose.size(), index);
  std::uint8_t digest[SHA256_DIGEST_LENGTH];
  SHA256(msg.data(), msg.size(), digest);
  Key128 k;
  std::memcpy(k.data(), digest, k.size());
  return k;
}

}  // namespace tripart

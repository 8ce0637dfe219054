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
#include <stdexcept>
#include <string>

namespace tripart {

// Process exit codes used by the command line tool. Each error class maps to
// exactly one code.
enum class ExitCode : int {
  kOk = 0,
  kArgument = 2,
  kIo = 3,
  kChecksum = 4,
  kHandshake = 5,
  kTransport = 6,
  kProtocolAbort = 7,
  kIntegrity = 8,
  kRange = 9,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode code() const noexcept = 0;
};

#define TRIPART_DEFINE_ERROR(Name, Code)                 \
  class Name : public Error {                            \
   public:                                               \
    using Error::Error;                                  \
    ExitCode code() const noexcept override { return Code; } \
  };

TRIPART_DEFINE_ERROR(ArgumentError, ExitCode::kArgument)
TRIPART_DEFINE_ERROR(RangeError, ExitCode::kRange)
TRIPART_DEFINE_ERROR(IoError, ExitCode::kIo)
TRIPART_DEFINE_ERROR(ChecksumError, ExitCode::kChecksum)
TRIPART_DEFINE_ERROR(IntegrityError, ExitCode::kIntegrity)
TRIPART_DEFINE_ERROR(HandshakeError, ExitCode::kHandshake)

#undef TRIPART_DEFINE_ERROR

// A channel failure. Carries the local party, the peer and the per-direction
// message sequence number at which the failure was observed.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int party, int peer,
                 std::uint64_t sequence)
      : Error(what + " (party " + std::to_string(party) + ", peer " +
              std::to_string(peer) + ", seq " + std::to_string(sequence) +
              ")"),
        party_(party),
        peer_(peer),
        sequence_(sequence) {}
  explicit TransportError(const std::string& what)
      : Error(what), party_(-1), peer_(-1), sequence_(0) {}

  ExitCode code() const noexcept override { return ExitCode::kTransport; }
  int party() const noexcept { return party_; }
  int peer() const noexcept { return peer_; }
  std::uint64_t sequence() const noexcept { return sequence_; }

 private:
  int party_;
  int peer_;
  std::uint64_t sequence_;
};

// Raised by the harnesses when a party program fails. `party()` is the party
// whose program raised first; `step()` is the sampler step, or -1.
class ProtocolAbort : public Error {
 public:
  ProtocolAbort(int party, const std::string& what, int step = -1)
      : Error("party " + std::to_string(party) + " aborted" +
              (step >= 0 ? " at step " + std::to_string(step) : "") + ": " +
              what),
        party_(party),
        step_(step) {}

  ExitCode code() const noexcept override { return ExitCode::kProtocolAbort; }
  int party() const noexcept { return party_; }
  int step() const noexcept { return step_; }

 private:
  int party_;
  int step_;
};

}  // namespace tripart

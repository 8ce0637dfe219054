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
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>

#include "tripart/cost.hpp"
#include "tripart/error.hpp"
#include "tripart/party.hpp"
#include "tripart/transport.hpp"

namespace tripart {

struct RunOptions {
  FixedEncoding enc;
  std::uint64_t master_seed = 1;
  std::chrono::milliseconds timeout = kDefaultTimeout;
};

template <class R>
struct LocalRun {
  std::array<R, 3> results;
  CostReport cost;
};

// Collects the first failure among concurrently running parties.
class AbortLatch {
 public:
  // Returns true for the first caller.
  bool record(int party, std::exception_ptr e) {
    std::lock_guard<std::mutex> lock(mu_);
    if (error_) return false;
    party_ = party;
    error_ = e;
    return true;
  }

  // Rethrows the first failure as a ProtocolAbort naming its party.
  void rethrow() const {
    if (!error_) return;
    try {
      std::rethrow_exception(error_);
    } catch (const ProtocolAbort&) {
      throw;
    } catch (const std::exception& e) {
      throw ProtocolAbort(party_, e.what());
    }
  }

  bool failed() const { return static_cast<bool>(error_); }

 private:
  std::mutex mu_;
  int party_ = -1;
  std::exception_ptr error_;
};

// Runs `f(Party&)` for the three parties on in-process channels. Each party
// completes key setup before `f` starts; setup traffic is not reported.
template <class F>
auto spawn_local_parties(F&& f, const RunOptions& opt = {})
    -> LocalRun<std::invoke_result_t<F&, Party&>> {
  using R = std::invoke_result_t<F&, Party&>;
  LocalHub hub(opt.timeout);
  LocalRun<R> run;
  std::array<LabelCosts, 3> costs;
  AbortLatch latch;
  std::array<std::thread, 3> threads;
  for (int i = 0; i < 3; ++i) {
    threads[i] = std::thread([&, i] {
      try {
        Party party(PartyId{i}, opt.enc, hub.channel(i), opt.master_seed);
        party.setup();
        party.meter().reset();
        run.results[i] = f(party);
        costs[i] = party.meter().by_label();
      } catch (...) {
        if (latch.record(i, std::current_exception())) hub.close();
      }
    });
  }
  for (auto& t : threads) t.join();
  latch.rethrow();
  run.cost = CostReport::merge(costs);
  return run;
}

}  // namespace tripart

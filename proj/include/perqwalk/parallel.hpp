// Copyright 2026 The perqwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace perqwalk {

/// Trajectories are grouped into fixed blocks of this size regardless of the
/// thread count; block partials are merged strictly in block order.
inline constexpr std::size_t kReductionBlock = 8;

/// Number of workers for a requested count (0 = hardware concurrency).
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Deterministic parallel map-reduce over item indices [0, count).
///
/// `make_state()` builds per-worker scratch (e.g. a Propagator),
/// `make_acc()` an empty accumulator, `work(state, acc, i)` folds item i into
/// a block accumulator and `merge(total, block)` folds a block into the
/// total. Items inside a block are processed in index order and blocks are
/// merged in block order, so floating-point results are bitwise identical
/// for any thread count.
template <class MakeState, class MakeAcc, class Work, class Merge>
auto ordered_reduce(std::size_t count, std::size_t threads, MakeState make_state,
                    MakeAcc make_acc, Work work, Merge merge) {
  using Acc = decltype(make_acc());
  Acc total = make_acc();
  const std::size_t blocks = (count + kReductionBlock - 1) / kReductionBlock;
  const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(blocks, 1));

  auto run_block = [&](auto& state, std::size_t b) {
    Acc acc = make_acc();
    const std::size_t end = std::min(count, (b + 1) * kReductionBlock);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) work(state, acc, i);
    return acc;
  };

  if (workers <= 1) {
    auto state = make_state();
    for (std::size_t b = 0; b < blocks; ++b) merge(total, run_block(state, b));
    return total;
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::map<std::size_t, Acc> ready;
  std::size_t merged = 0;
  std::exception_ptr failure;
  std::atomic<bool> stop{false};

  auto worker = [&] {
    try {
      auto state = make_state();
      for (;;) {
        if (stop.load()) return;
        const std::size_t b = next.fetch_add(1);
        if (b >= blocks) return;
        Acc acc = run_block(state, b);
        std::lock_guard<std::mutex> lock(mu);
        ready.emplace(b, std::move(acc));
        for (auto it = ready.find(merged); it != ready.end(); it = ready.find(merged)) {
          merge(total, it->second);
          ready.erase(it);
          ++merged;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
      stop.store(true);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return total;
}

}  // namespace perqwalk

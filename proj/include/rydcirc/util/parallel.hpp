// Copyright 2026 The rydcirc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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
#include <mutex>
#include <thread>
#include <vector>

namespace rydcirc {

/// Evaluates fn(k) for k in [0, count) on up to `workers` threads; results keep index order.
/// The first exception thrown by any task is rethrown after all workers join.
template <class Fn>
auto parallel_map(std::size_t count, unsigned workers, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        out[k] = fn(k);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(count));
  for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace rydcirc

// Copyright 2026 The ctpf Authors.
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

#ifndef CTPF_THREAD_POOL_HPP
#define CTPF_THREAD_POOL_HPP

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ctpf {

/// Fixed-size worker pool with a blocking parallel_for.
///
/// Work items must write disjoint outputs. If several items throw, the
/// exception of the lowest index is rethrown, so failures are reported the
/// same way for any thread count. parallel_for called from inside a worker
/// runs inline.
class ThreadPool {
 public:
  /// `threads` == 0 or 1 runs everything on the calling thread.
  explicit ThreadPool(std::size_t threads = 1);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  std::size_t size() const noexcept { return workers_.size() + 1; }

  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

 private:
  struct Job;

  void worker_loop();
  static void run_items(Job& job);

  std::vector<std::jthread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  Job* job_ = nullptr;
  std::size_t generation_ = 0;
  std::size_t active_ = 0;
  bool stopping_ = false;
};

/// Thread count from the CTPF_THREADS environment variable, or `fallback`.
std::size_t threads_from_environment(std::size_t fallback = 1);

}  // namespace ctpf

#endif  // CTPF_THREAD_POOL_HPP

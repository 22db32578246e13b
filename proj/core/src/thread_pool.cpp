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

#include "ctpf/thread_pool.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>

#include "ctpf/errors.hpp"

namespace ctpf {

namespace {
thread_local bool inside_worker = false;
}  // namespace

struct ThreadPool::Job {
  std::size_t count = 0;
  const std::function<void(std::size_t)>* body = nullptr;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;
};

ThreadPool::ThreadPool(std::size_t threads) {
  for (std::size_t i = 1; i < threads; ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
}

void ThreadPool::run_items(Job& job) {
  for (std::size_t i = job.next.fetch_add(1); i < job.count; i = job.next.fetch_add(1)) {
    try {
      (*job.body)(i);
    } catch (...) {
      std::lock_guard lock(job.error_mutex);
      if (i < job.error_index) {
        job.error_index = i;
        job.error = std::current_exception();
      }
    }
  }
}

void ThreadPool::worker_loop() {
  inside_worker = true;
  std::size_t seen = 0;
  while (true) {
    Job* job = nullptr;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) {
        return;
      }
      seen = generation_;
      job = job_;
      if (job == nullptr) {
        continue;
      }
      ++active_;
    }
    run_items(*job);
    {
      std::lock_guard lock(mutex_);
      --active_;
    }
    done_.notify_all();
  }
}

void ThreadPool::parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) {
    return;
  }
  Job job;
  job.count = count;
  job.body = &body;
  if (workers_.empty() || inside_worker || count == 1) {
    run_items(job);
  } else {
    std::unique_lock outer(mutex_);
    // One job at a time; concurrent callers from outside the pool queue up.
    done_.wait(outer, [&] { return job_ == nullptr; });
    job_ = &job;
    ++generation_;
    outer.unlock();
    wake_.notify_all();
    inside_worker = true;
    run_items(job);
    inside_worker = false;
    outer.lock();
    done_.wait(outer, [&] { return active_ == 0; });
    job_ = nullptr;
    outer.unlock();
    done_.notify_all();
  }
  if (job.error) {
    std::rethrow_exception(job.error);
  }
}

std::size_t threads_from_environment(std::size_t fallback) {
  const char* value = std::getenv("CTPF_THREADS");
  if (value == nullptr || *value == '\0') {
    return fallback;
  }
  try {
    std::size_t used = 0;
    const long parsed = std::stol(value, &used);
    if (used != std::string(value).size() || parsed < 1) {
      throw ArgumentError("");
    }
    return static_cast<std::size_t>(parsed);
  } catch (...) {
    throw ArgumentError(std::string("CTPF_THREADS must be a positive integer, got '") + value + "'");
  }
}

}  // namespace ctpf

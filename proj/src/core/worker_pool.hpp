// SPDX-License-Identifier: Apache-2.0

#ifndef SPLITEQ_CORE_WORKER_POOL_HPP
#define SPLITEQ_CORE_WORKER_POOL_HPP

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spliteq {

// Fixed set of threads running index-parallel loops. parallel_for returns
// after every index has been processed; the calling thread takes part.
class WorkerPool {
 public:
  // workers == 0 selects std::thread::hardware_concurrency().
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return threads_.size() + 1; }

  // Rethrows the first exception raised by any task.
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

 private:
  void run_worker();
  void drain(std::unique_lock<std::mutex>& lock);

  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t count_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
  // Last member: joined before the synchronization state above is destroyed.
  std::vector<std::jthread> threads_;
};

}  // namespace spliteq

#endif  // SPLITEQ_CORE_WORKER_POOL_HPP

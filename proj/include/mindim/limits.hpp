#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace mindim {

// Process-wide resource budgets, set once by the CLI before any work starts.
struct Limits {
  std::size_t max_degree = 200000;
  std::uint64_t max_elements = 2000000;
  std::uint64_t max_enumeration = 10000000;
  double budget_seconds = 0.0;  // 0 means unlimited
  unsigned threads = 1;
};

Limits& limits();

// Wall-clock deadline derived from Limits::budget_seconds.
class Deadline {
 public:
  Deadline();
  explicit Deadline(double seconds);
  bool expired() const;
  // Throws ResourceError naming `what` once the deadline has passed.
  void check(const char* what) const;

 private:
  std::chrono::steady_clock::time_point end_;
  bool unlimited_;
};

// Runs f(0), ..., f(n-1) on up to limits().threads workers. Tasks are taken in
// index order; the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace mindim

#include "mindim/limits.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "mindim/errors.hpp"

namespace mindim {

Limits& limits() {
  static Limits instance;
  return instance;
}

Deadline::Deadline() : Deadline(limits().budget_seconds) {}

Deadline::Deadline(double seconds) : unlimited_(seconds <= 0.0) {
  auto now = std::chrono::steady_clock::now();
  end_ = now + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(unlimited_ ? 0.0 : seconds));
}

bool Deadline::expired() const {
  return !unlimited_ && std::chrono::steady_clock::now() > end_;
}

void Deadline::check(const char* what) const {
  if (expired()) throw ResourceError(std::string("time budget exceeded during ") + what);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  std::size_t workers = std::min<std::size_t>(std::max(1u, limits().threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mindim

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace eulerstat {

using complex = std::complex<double>;

namespace detail {

/// Process-wide cache of in-place 2D FFTW plans. Plan creation is serialized
/// (FFTW's planner is not reentrant); execution through fftw_execute_dft is
/// thread-safe. FFTW_ESTIMATE keeps plan selection independent of timing, so
/// every worker executes the same code path and results are bit-identical.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t m, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(m, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<complex> scratch(m * m);
    auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(m), static_cast<int>(m),
                                      data, data, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

}  // namespace detail

/// In-place unnormalized 2D transform of an m x m row-major array.
/// backward: a(j) <- sum_k a(k) exp(+i k.x_j); forward: exp(-i k.x_j).
inline void fft2d(std::vector<complex>& a, std::size_t m, bool backward) {
  fftw_plan plan = detail::PlanCache::instance().get(
      m, backward ? FFTW_BACKWARD : FFTW_FORWARD);
  auto* data = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(plan, data, data);
}

/// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
inline std::size_t next_fast_size(std::size_t n) {
  for (;; ++n) {
    std::size_t r = n;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return n;
  }
}

}  // namespace eulerstat

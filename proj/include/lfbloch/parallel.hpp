#pragma once

// Deterministic fan-out helpers.  Results never depend on the worker count:
// parallel_map keeps input order and pairwise_sum fixes the reduction tree.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace lfbloch {

/// Applies f to every input on up to `jobs` threads (0 = hardware
/// concurrency).  The first exception by input index is rethrown.
template <class In, class F>
auto parallel_map(const std::vector<In>& inputs, F f, unsigned jobs = 1)
    -> std::vector<std::invoke_result_t<F&, const In&>> {
  using Out = std::invoke_result_t<F&, const In&>;
  const std::size_t n = inputs.size();
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(jobs, n);

  std::vector<std::optional<Out>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      try {
        slots[i].emplace(f(inputs[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Out> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Pairwise (tree) summation over [first, last).
template <class T>
T pairwise_sum(const T* first, const T* last) {
  const auto n = last - first;
  if (n <= 8) {
    T s{};
    for (const T* p = first; p != last; ++p) s += *p;
    return s;
  }
  const T* mid = first + n / 2;
  return pairwise_sum(first, mid) + pairwise_sum(mid, last);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.data() + v.size());
}

}  // namespace lfbloch

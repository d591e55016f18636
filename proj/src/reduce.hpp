// Index-range reductions honouring SumOptions.
#ifndef CASCADE_SRC_REDUCE_HPP
#define CASCADE_SRC_REDUCE_HPP

#include "cascade/discrete.hpp"
#include "cascade/quadrature.hpp"

#include <algorithm>
#include <future>
#include <vector>

namespace cascade::detail {

template <typename T, typename Term>
T reduce(std::size_t n, const Term& term, const T& zero, const SumOptions& opts) {
  if (opts.reproducible) {
    KahanSum<T> acc(zero);
    for (std::size_t i = 0; i < n; ++i) acc.add(term(i));
    return acc.value();
  }
  const auto parts = static_cast<std::size_t>(std::max(1, opts.threads));
  if (parts == 1 || n < 2 * parts) return pairwise_sum<T>(term, 0, n, zero);
  std::vector<std::future<T>> futures;
  const std::size_t chunk = (n + parts - 1) / parts;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    const std::size_t hi = std::min(n, lo + chunk);
    futures.push_back(std::async(std::launch::async, [&term, lo, hi, &zero] {
      return pairwise_sum<T>(term, lo, hi, zero);
    }));
  }
  T total = zero;
  for (auto& f : futures) total += f.get();
  return total;
}

}  // namespace cascade::detail

#endif  // CASCADE_SRC_REDUCE_HPP

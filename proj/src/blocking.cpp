#include "evt/blocking.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>

#include "evt/errors.hpp"

namespace evt {

namespace {

void check_block_size(std::size_t n, std::size_t r) {
  if (r < 1) throw invalid_argument("block size r must be >= 1");
  if (r > n)
    throw empty_sample("block size " + std::to_string(r) +
                       " exceeds series length " + std::to_string(n));
}

}  // namespace

BlockMaximaSample disjoint_block_maxima(std::span<const double> series,
                                        std::size_t r) {
  const std::size_t n = series.size();
  check_block_size(n, r);
  const std::size_t m = n / r;
  BlockMaximaSample out{{}, r, BlockScheme::disjoint, n};
  out.maxima.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto block = series.subspan(j * r, r);
    out.maxima.push_back(*std::max_element(block.begin(), block.end()));
  }
  return out;
}

BlockMaximaSample sliding_block_maxima(std::span<const double> series,
                                       std::size_t r) {
  const std::size_t n = series.size();
  check_block_size(n, r);
  BlockMaximaSample out{{}, r, BlockScheme::sliding, n};
  out.maxima.reserve(n - r + 1);
  // Monotone deque of indices with decreasing values; front is the window max.
  std::deque<std::size_t> q;
  for (std::size_t i = 0; i < n; ++i) {
    while (!q.empty() && series[q.back()] <= series[i]) q.pop_back();
    q.push_back(i);
    if (q.front() + r <= i) q.pop_front();
    if (i + 1 >= r) out.maxima.push_back(series[q.front()]);
  }
  return out;
}

BlockMaximaSample block_maxima(std::span<const double> series, std::size_t r,
                               BlockScheme scheme) {
  return scheme == BlockScheme::disjoint ? disjoint_block_maxima(series, r)
                                         : sliding_block_maxima(series, r);
}

ExcessSample threshold_excesses(std::span<const double> series, std::size_t k) {
  const std::size_t n = series.size();
  if (k < 1 || k >= n)
    throw invalid_argument("threshold_excesses: need 1 <= k < n");

  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const double threshold = sorted[n - k - 1];  // X_{n-k:n}

  ExcessSample out;
  out.threshold = threshold;
  out.k = k;
  out.n = n;
  out.excesses.reserve(k);
  for (std::size_t j = n - k; j < n; ++j)
    out.excesses.push_back(sorted[j] - threshold);

  // Strict exceedances first; remaining slots filled from ties at the
  // threshold, latest time index first. Then restore time order.
  std::vector<std::size_t> times;
  times.reserve(k);
  for (std::size_t i = 0; i < n; ++i)
    if (series[i] > threshold) times.push_back(i);
  for (std::size_t i = n; i-- > 0 && times.size() < k;)
    if (series[i] == threshold) times.push_back(i);
  std::sort(times.begin(), times.end());
  out.exceedance_times = std::move(times);
  return out;
}

BlockMaximaSample disjoint_block_maxima(const Series& series, std::size_t r) {
  return disjoint_block_maxima(series.view(), r);
}
BlockMaximaSample sliding_block_maxima(const Series& series, std::size_t r) {
  return sliding_block_maxima(series.view(), r);
}
ExcessSample threshold_excesses(const Series& series, std::size_t k) {
  return threshold_excesses(series.view(), k);
}

}  // namespace evt

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evt/series.hpp"

namespace evt {

enum class BlockScheme { disjoint, sliding };

struct BlockMaximaSample {
  std::vector<double> maxima;
  std::size_t block_size = 0;
  BlockScheme scheme = BlockScheme::disjoint;
  std::size_t source_length = 0;
};

// The k upper order statistics of a series, shifted by the threshold
// X_{n-k:n}. `excesses` is sorted ascending and contains exactly k entries
// (ties at the threshold contribute zeros). `exceedance_times` holds the
// 0-based time indices of the k selected observations, sorted by time.
struct ExcessSample {
  double threshold = 0.0;
  std::vector<double> excesses;
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<std::size_t> exceedance_times;
};

// Maxima of the floor(n/r) disjoint blocks of length r; a trailing partial
// block is discarded.
BlockMaximaSample disjoint_block_maxima(std::span<const double> series, std::size_t r);
BlockMaximaSample disjoint_block_maxima(const Series& series, std::size_t r);

// Maxima of all n-r+1 length-r windows, computed in O(n) with a monotone
// deque.
BlockMaximaSample sliding_block_maxima(std::span<const double> series, std::size_t r);
BlockMaximaSample sliding_block_maxima(const Series& series, std::size_t r);

BlockMaximaSample block_maxima(std::span<const double> series, std::size_t r,
                               BlockScheme scheme);

// Threshold at the (n-k)-th order statistic. When values tie with the
// threshold, the k exceedance times are filled from the latest tied indices,
// so the selection is deterministic.
ExcessSample threshold_excesses(std::span<const double> series, std::size_t k);
ExcessSample threshold_excesses(const Series& series, std::size_t k);

}  // namespace evt

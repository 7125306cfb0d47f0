#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace evt {

enum class SeriesKind { iid, stationary };

// An ordered sample of observations plus the metadata needed to regenerate
// it: the seed and a compact description of the generating model.
struct Series {
  std::vector<double> values;
  SeriesKind kind = SeriesKind::iid;
  std::uint64_t seed = 0;
  std::string model;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }
};

}  // namespace evt

#pragma once

#include <cstdint>
#include <vector>

namespace v2r {

// Fixed-dimension embedding with an id; the currency between the model
// server and the matching index.
struct FeatureVector {
  uint64_t id = 0;
  std::vector<float> values;

  uint32_t dim() const { return static_cast<uint32_t>(values.size()); }

  bool operator==(const FeatureVector&) const = default;
};

}  // namespace v2r

#include "sigkit/subset.hpp"

#include "sigkit/errors.hpp"

namespace sigkit {

Subset subset_from_labels(std::span<const int> labels, int n) {
  Subset s = 0;
  for (int label : labels) {
    if (label < 1 || label > n) {
      throw SubsetOutOfRange("component " + std::to_string(label) + " outside [1, " + std::to_string(n) + "]");
    }
    s |= Subset{1} << (label - 1);
  }
  return s;
}

std::vector<int> labels_of(Subset s) {
  std::vector<int> out;
  for (int i = 0; s != 0; ++i, s >>= 1) {
    if (s & 1u) out.push_back(i + 1);
  }
  return out;
}

std::string format_subset(Subset s) {
  std::string out = "{";
  bool first = true;
  for (int label : labels_of(s)) {
    if (!first) out += ",";
    out += std::to_string(label);
    first = false;
  }
  return out + "}";
}

}  // namespace sigkit

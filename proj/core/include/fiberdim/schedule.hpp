#pragma once

#include <optional>
#include <vector>

#include "fiberdim/rational.hpp"

namespace fiberdim {

// Per-level branching counts. `a` is the full branching, `b` the selected
// branching when present (b_n <= a_n).
struct Schedule {
  std::vector<BigInt> a;
  std::optional<std::vector<BigInt>> b;

  int levels() const { return static_cast<int>(a.size()); }
  void validate() const;

  BigInt a_product(int upto) const;  // a_1 * ... * a_upto
  BigInt b_product(int upto) const;
};

struct RatioConditionLevel {
  int n = 0;
  bool holds = false;
};

// Exact big-integer check of a_n >= (a_1..a_{n+1} / b_1..b_{n+1})^{n+1}
// for n = 1 .. depth-1. Requires b present and entries through level n+1.
std::vector<RatioConditionLevel> check_ratio_condition(const Schedule& s, int depth);

}  // namespace fiberdim

#include "fiberdim/schedule.hpp"

#include <stdexcept>

namespace fiberdim {

void Schedule::validate() const {
  for (const auto& v : a) {
    if (v < 1) throw std::invalid_argument("Schedule: branching entries must be >= 1");
  }
  if (b) {
    if (b->size() != a.size()) {
      throw std::invalid_argument("Schedule: b must have the same length as a");
    }
    for (size_t i = 0; i < a.size(); ++i) {
      if ((*b)[i] < 1) throw std::invalid_argument("Schedule: b entries must be >= 1");
      if ((*b)[i] > a[i]) throw std::invalid_argument("Schedule: b_n must satisfy b_n <= a_n");
    }
  }
}

BigInt Schedule::a_product(int upto) const {
  BigInt p(1);
  for (int i = 0; i < upto; ++i) p *= a[static_cast<size_t>(i)];
  return p;
}

BigInt Schedule::b_product(int upto) const {
  if (!b) throw std::logic_error("Schedule: b not present");
  BigInt p(1);
  for (int i = 0; i < upto; ++i) p *= (*b)[static_cast<size_t>(i)];
  return p;
}

std::vector<RatioConditionLevel> check_ratio_condition(const Schedule& s, int depth) {
  s.validate();
  if (!s.b) throw std::invalid_argument("check_ratio_condition: schedule has no b");
  std::vector<RatioConditionLevel> out;
  int max_n = std::min(depth - 1, s.levels() - 1);
  for (int n = 1; n <= max_n; ++n) {
    // a_n * (b_1..b_{n+1})^{n+1} >= (a_1..a_{n+1})^{n+1}, all exact
    BigInt lhs = s.a[static_cast<size_t>(n - 1)] *
                 pow_big(s.b_product(n + 1), static_cast<unsigned long>(n + 1));
    BigInt rhs = pow_big(s.a_product(n + 1), static_cast<unsigned long>(n + 1));
    out.push_back({n, lhs >= rhs});
  }
  return out;
}

}  // namespace fiberdim

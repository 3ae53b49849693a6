#pragma once

#include <vector>

#include "fiberdim/rational.hpp"

namespace fiberdim {

// Closed interval [lo, hi] with exact rational endpoints.
struct RInterval {
  Rational lo, hi;

  RInterval() = default;
  RInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw std::invalid_argument("RInterval: lo > hi");
  }

  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool operator==(const RInterval& o) const { return lo == o.lo && hi == o.hi; }
};

// Sorted union of pairwise-disjoint closed intervals. Touching intervals are
// merged on construction.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<RInterval> parts);

  static IntervalUnion unit() { return IntervalUnion({RInterval(Rational(0), Rational(1))}); }

  const std::vector<RInterval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  Rational total_length() const;
  RInterval hull() const;
  bool contains(const Rational& x) const;

  IntervalUnion intersect(const RInterval& window) const;
  // Removes the open ball U(center, radius).
  IntervalUnion subtract_open(const Rational& center, const Rational& radius) const;

  bool operator==(const IntervalUnion& o) const { return parts_ == o.parts_; }

 private:
  std::vector<RInterval> parts_;
};

}  // namespace fiberdim

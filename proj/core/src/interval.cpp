#include "fiberdim/interval.hpp"

#include <algorithm>

namespace fiberdim {

IntervalUnion::IntervalUnion(std::vector<RInterval> parts) {
  std::sort(parts.begin(), parts.end(),
            [](const RInterval& a, const RInterval& b) { return a.lo < b.lo; });
  for (auto& p : parts) {
    if (!parts_.empty() && p.lo <= parts_.back().hi) {
      if (p.hi > parts_.back().hi) parts_.back().hi = p.hi;
    } else {
      parts_.push_back(p);
    }
  }
}

Rational IntervalUnion::total_length() const {
  Rational sum(0);
  for (const auto& p : parts_) sum += p.length();
  return sum;
}

RInterval IntervalUnion::hull() const {
  if (parts_.empty()) throw std::logic_error("IntervalUnion::hull: empty union");
  return RInterval(parts_.front().lo, parts_.back().hi);
}

bool IntervalUnion::contains(const Rational& x) const {
  for (const auto& p : parts_) {
    if (p.contains(x)) return true;
    if (p.lo > x) break;
  }
  return false;
}

IntervalUnion IntervalUnion::intersect(const RInterval& w) const {
  std::vector<RInterval> out;
  for (const auto& p : parts_) {
    Rational lo = std::max(p.lo, w.lo);
    Rational hi = std::min(p.hi, w.hi);
    if (lo <= hi) out.push_back(RInterval(lo, hi));
  }
  IntervalUnion u;
  u.parts_ = std::move(out);
  return u;
}

IntervalUnion IntervalUnion::subtract_open(const Rational& center, const Rational& radius) const {
  if (radius <= 0) return *this;
  Rational lo = center - radius;
  Rational hi = center + radius;
  std::vector<RInterval> out;
  for (const auto& p : parts_) {
    if (p.hi <= lo || p.lo >= hi) {
      out.push_back(p);
      continue;
    }
    // left remainder, closed at the ball boundary
    if (p.lo <= lo) out.push_back(RInterval(p.lo, lo));
    if (p.hi >= hi) out.push_back(RInterval(hi, p.hi));
  }
  IntervalUnion u;
  u.parts_ = std::move(out);
  return u;
}

}  // namespace fiberdim

#include "fiberdim/grid_function.hpp"

#include <algorithm>
#include <stdexcept>

namespace fiberdim {

GridFunction::GridFunction(std::vector<Rational> xs, std::vector<std::vector<Rational>> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() < 2) throw std::invalid_argument("GridFunction: need >= 2 breakpoints");
  if (ys_.size() != xs_.size()) throw std::invalid_argument("GridFunction: xs/ys size mismatch");
  dim_ = static_cast<int>(ys_.front().size());
  if (dim_ < 1) throw std::invalid_argument("GridFunction: dim must be >= 1");
  for (size_t i = 0; i < xs_.size(); ++i) {
    if (i > 0 && xs_[i] <= xs_[i - 1]) {
      throw std::invalid_argument("GridFunction: breakpoints must strictly increase");
    }
    if (ys_[i].size() != static_cast<size_t>(dim_)) {
      throw std::invalid_argument("GridFunction: inconsistent value dimension");
    }
  }
}

GridFunction GridFunction::zero(int dim) {
  std::vector<Rational> v(static_cast<size_t>(dim), Rational(0));
  return GridFunction({Rational(0), Rational(1)}, {v, v});
}

GridFunction GridFunction::constant(const Rational& value) {
  return GridFunction({Rational(0), Rational(1)}, {{value}, {value}});
}

size_t GridFunction::segment_of(const Rational& x) const {
  if (x < xs_.front() || x > xs_.back()) {
    throw std::out_of_range("GridFunction: evaluation outside domain");
  }
  size_t lo = 0, hi = xs_.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (xs_[mid] <= x) lo = mid; else hi = mid;
  }
  return lo;
}

std::vector<Rational> GridFunction::eval(const Rational& x) const {
  size_t i = segment_of(x);
  if (x == xs_[i]) return ys_[i];
  Rational w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  std::vector<Rational> out(static_cast<size_t>(dim_));
  for (int c = 0; c < dim_; ++c) {
    out[static_cast<size_t>(c)] = ys_[i][static_cast<size_t>(c)] +
                                  w * (ys_[i + 1][static_cast<size_t>(c)] - ys_[i][static_cast<size_t>(c)]);
  }
  return out;
}

Rational GridFunction::eval1(const Rational& x) const {
  if (dim_ != 1) throw std::logic_error("GridFunction::eval1: dim != 1");
  return eval(x)[0];
}

Rational GridFunction::total_variation() const {
  if (dim_ != 1) throw std::logic_error("total_variation: dim != 1");
  Rational tv(0);
  for (size_t i = 1; i < xs_.size(); ++i) tv += abs(ys_[i][0] - ys_[i - 1][0]);
  return tv;
}

Rational GridFunction::lipschitz() const {
  if (dim_ != 1) throw std::logic_error("lipschitz: dim != 1");
  Rational lip(0);
  for (size_t i = 1; i < xs_.size(); ++i) {
    Rational slope = abs((ys_[i][0] - ys_[i - 1][0]) / (xs_[i] - xs_[i - 1]));
    if (slope > lip) lip = slope;
  }
  return lip;
}

std::pair<Rational, Rational> GridFunction::range1() const {
  if (dim_ != 1) throw std::logic_error("range1: dim != 1");
  Rational lo = ys_[0][0], hi = ys_[0][0];
  for (const auto& y : ys_) {
    if (y[0] < lo) lo = y[0];
    if (y[0] > hi) hi = y[0];
  }
  return {lo, hi};
}

GridFunction GridFunction::plus(const GridFunction& other) const {
  if (dim_ != other.dim_) throw std::invalid_argument("GridFunction::plus: dimension mismatch");
  if (xs_.front() != other.xs_.front() || xs_.back() != other.xs_.back()) {
    throw std::invalid_argument("GridFunction::plus: domain mismatch");
  }
  std::vector<Rational> merged;
  merged.reserve(xs_.size() + other.xs_.size());
  std::merge(xs_.begin(), xs_.end(), other.xs_.begin(), other.xs_.end(),
             std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  std::vector<std::vector<Rational>> ys;
  ys.reserve(merged.size());
  for (const auto& x : merged) {
    std::vector<Rational> a = eval(x);
    std::vector<Rational> b = other.eval(x);
    for (int c = 0; c < dim_; ++c) a[static_cast<size_t>(c)] += b[static_cast<size_t>(c)];
    ys.push_back(std::move(a));
  }
  return GridFunction(std::move(merged), std::move(ys));
}

}  // namespace fiberdim

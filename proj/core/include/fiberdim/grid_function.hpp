#pragma once

#include <vector>

#include "fiberdim/rational.hpp"

namespace fiberdim {

// Continuous piecewise-linear map [x_0, x_N] -> R^dim with exact rational
// breakpoints and values.
class GridFunction {
 public:
  GridFunction(std::vector<Rational> xs, std::vector<std::vector<Rational>> ys);

  static GridFunction zero(int dim = 1);
  static GridFunction constant(const Rational& value);

  int dim() const { return dim_; }
  size_t breakpoints() const { return xs_.size(); }
  const std::vector<Rational>& xs() const { return xs_; }
  const std::vector<std::vector<Rational>>& ys() const { return ys_; }
  const Rational& domain_lo() const { return xs_.front(); }
  const Rational& domain_hi() const { return xs_.back(); }

  std::vector<Rational> eval(const Rational& x) const;
  Rational eval1(const Rational& x) const;  // dim-1 shortcut

  // dim-1 helpers, all exact
  Rational total_variation() const;
  Rational lipschitz() const;
  std::pair<Rational, Rational> range1() const;

  GridFunction plus(const GridFunction& other) const;

  bool operator==(const GridFunction& o) const { return xs_ == o.xs_ && ys_ == o.ys_; }

 private:
  size_t segment_of(const Rational& x) const;
  std::vector<Rational> xs_;
  std::vector<std::vector<Rational>> ys_;
  int dim_ = 1;
};

}  // namespace fiberdim

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fiberdim/cantor.hpp"
#include "fiberdim/grid_function.hpp"
#include "fiberdim/interval.hpp"
#include "fiberdim/rational.hpp"

namespace fiberdim {

// Bounded subset of R^d given either as an exact interval union (d = 1) or a
// finite point cloud.
struct PointSet {
  int ambient_dim = 1;
  std::optional<IntervalUnion> intervals;
  std::vector<std::vector<double>> cloud;

  bool empty() const;
  static PointSet from_intervals(IntervalUnion u);
  static PointSet from_cloud(int dim, std::vector<std::vector<double>> points);
};

// Number of grid cells of side 2*delta (anchored at 0) meeting the set.
// Exact rational cell arithmetic for interval unions (a cell counts when its
// interior meets the set); half-open cell assignment for clouds.
uint64_t box_count(const PointSet& set, const Rational& delta);

struct DimensionFit {
  std::vector<double> inv_scales;  // 1/delta
  std::vector<uint64_t> counts;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool empty_set = false;  // convention: slope = -1
};

// OLS of log N against log(1/delta) over the declared scale window.
DimensionFit fit_dimension(const PointSet& set, const std::vector<Rational>& scales);

// Largest s from the grid with sup_B mu(B)/(diam B)^s <= c over the
// boundary-aligned window family (max_windows caps the enumeration).
double hausdorff_lower_bound(const MassDistribution& mass, const std::vector<double>& s_grid,
                             uint64_t max_windows = 2000000, double c = 4.0);

// Breakpoint-resolution cloud {(x, f(x))} in R^{1+dim}.
PointSet graph_points(const GridFunction& f);

struct IndicatrixReport {
  Rational total_variation;
  Rational lip;
  bool pass = false;  // TV(f) <= Lip(f) * |domain|, exact
};

// Banach indicatrix inequality at d = t = 1: for piecewise-linear f the
// integral of the level-counting function equals the total variation, and the
// coarea bound reads TV(f) <= Lip(f) * lambda(domain).
IndicatrixReport banach_indicatrix_check(const GridFunction& f);

}  // namespace fiberdim

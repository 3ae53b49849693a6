#include "fiberdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace fiberdim {

bool PointSet::empty() const {
  if (intervals) return intervals->empty();
  return cloud.empty();
}

PointSet PointSet::from_intervals(IntervalUnion u) {
  PointSet s;
  s.ambient_dim = 1;
  s.intervals = std::move(u);
  return s;
}

PointSet PointSet::from_cloud(int dim, std::vector<std::vector<double>> points) {
  if (dim < 1) throw std::invalid_argument("PointSet: dim must be >= 1");
  for (const auto& p : points) {
    if (p.size() != static_cast<size_t>(dim)) {
      throw std::invalid_argument("PointSet: point dimension mismatch");
    }
  }
  PointSet s;
  s.ambient_dim = dim;
  s.cloud = std::move(points);
  return s;
}

namespace {

uint64_t box_count_intervals(const IntervalUnion& u, const Rational& w) {
  // cells [j w, (j+1) w]; a cell counts when its open interior meets the set,
  // so [0,1] at w = 2^-k yields exactly 2^k cells
  std::vector<std::pair<BigInt, BigInt>> ranges;
  for (const auto& p : u.parts()) {
    if (p.length() == 0) {
      BigInt j = floor_rat(p.lo / w);
      ranges.emplace_back(j, j);
      continue;
    }
    // smallest j with (j+1) w > lo, largest j with j w < hi
    BigInt jmin = floor_rat(p.lo / w - 1) + 1;
    BigInt jmax = ceil_rat(p.hi / w) - 1;
    if (jmin > jmax) continue;
    ranges.emplace_back(jmin, jmax);
  }
  if (ranges.empty()) return 0;
  std::sort(ranges.begin(), ranges.end());
  uint64_t count = 0;
  BigInt cur_lo = ranges[0].first, cur_hi = ranges[0].second;
  for (size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first <= cur_hi + 1) {
      if (ranges[i].second > cur_hi) cur_hi = ranges[i].second;
    } else {
      count += to_u64_checked(BigInt(cur_hi - cur_lo + 1), "box_count");
      cur_lo = ranges[i].first;
      cur_hi = ranges[i].second;
    }
  }
  count += to_u64_checked(BigInt(cur_hi - cur_lo + 1), "box_count");
  return count;
}

struct CellHash {
  size_t operator()(const std::vector<long>& v) const {
    size_t h = 1469598103934665603ULL;
    for (long x : v) {
      h ^= static_cast<size_t>(x);
      h *= 1099511628211ULL;
    }
    return h;
  }
};

uint64_t box_count_cloud(const std::vector<std::vector<double>>& cloud, double w) {
  std::unordered_set<std::vector<long>, CellHash> cells;
  std::vector<long> idx;
  for (const auto& p : cloud) {
    idx.clear();
    for (double x : p) idx.push_back(static_cast<long>(std::floor(x / w)));
    cells.insert(idx);
  }
  return cells.size();
}

}  // namespace

uint64_t box_count(const PointSet& set, const Rational& delta) {
  if (delta <= 0) throw std::invalid_argument("box_count: delta must be > 0");
  if (set.empty()) return 0;
  Rational w = 2 * delta;
  if (set.intervals) return box_count_intervals(*set.intervals, w);
  return box_count_cloud(set.cloud, to_double(w));
}

DimensionFit fit_dimension(const PointSet& set, const std::vector<Rational>& scales) {
  DimensionFit fit;
  if (set.empty()) {
    fit.empty_set = true;
    fit.slope = -1.0;
    fit.r2 = 1.0;
    return fit;
  }
  if (scales.size() < 3) throw std::invalid_argument("fit_dimension: need >= 3 scales");
  std::vector<double> xs, ys;
  for (const auto& delta : scales) {
    uint64_t n = box_count(set, delta);
    if (n == 0) throw std::domain_error("fit_dimension: zero count at some scale");
    fit.inv_scales.push_back(1.0 / to_double(delta));
    fit.counts.push_back(n);
    xs.push_back(std::log(1.0 / to_double(delta)));
    ys.push_back(std::log(static_cast<double>(n)));
  }
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::domain_error("fit_dimension: degenerate scale list");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean = sy / n;
  for (size_t i = 0; i < xs.size(); ++i) {
    double pred = fit.slope * xs[i] + fit.intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.r2 = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : (ss_res == 0 ? 1.0 : 0.0);
  return fit;
}

double hausdorff_lower_bound(const MassDistribution& mass, const std::vector<double>& s_grid,
                             uint64_t max_windows, double c) {
  if (s_grid.empty()) throw std::invalid_argument("hausdorff_lower_bound: empty s grid");
  const SubsetTree& st = mass.subset();
  std::vector<RInterval> leaves = st.leaf_hulls();
  Rational w = mass.weight(st.depth());
  auto candidates = window_candidates(leaves, Rational(0), max_windows);
  double best = -1.0;
  double logc = std::log(c);
  for (double s : s_grid) {
    bool certified = true;
    for (const auto& cand : candidates) {
      double log_mu = std::log(static_cast<double>(cand.leaf_count)) + std::log(to_double(w));
      double log_d = std::log(to_double(cand.diam));
      if (log_mu - s * log_d > logc) {
        certified = false;
        break;
      }
    }
    if (certified && s > best) best = s;
  }
  return best;
}

PointSet graph_points(const GridFunction& f) {
  std::vector<std::vector<double>> pts;
  pts.reserve(f.breakpoints());
  for (size_t i = 0; i < f.breakpoints(); ++i) {
    std::vector<double> p;
    p.push_back(to_double(f.xs()[i]));
    for (const auto& y : f.ys()[i]) p.push_back(to_double(y));
    pts.push_back(std::move(p));
  }
  return PointSet::from_cloud(1 + f.dim(), std::move(pts));
}

IndicatrixReport banach_indicatrix_check(const GridFunction& f) {
  if (f.dim() != 1) throw std::invalid_argument("banach_indicatrix_check: f must be real-valued");
  IndicatrixReport rep;
  rep.total_variation = f.total_variation();
  rep.lip = f.lipschitz();
  Rational domain = f.domain_hi() - f.domain_lo();
  rep.pass = rep.total_variation <= rep.lip * domain;
  return rep;
}

}  // namespace fiberdim

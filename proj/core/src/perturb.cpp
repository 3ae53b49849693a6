#include "fiberdim/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fiberdim/rng.hpp"

namespace fiberdim {

namespace {

// X draws use which = 0, Y draws which = 1; each coordinate takes one bit.
int sign_draw(uint64_t seed, int level, uint64_t piece, int which, int coord) {
  uint64_t bits = keyed_u64(seed, static_cast<uint64_t>(level), piece,
                            static_cast<uint64_t>(which));
  return ((bits >> coord) & 1) ? 1 : -1;
}

Rational max_norm_dist(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational m(0);
  for (size_t i = 0; i < a.size(); ++i) {
    Rational d = abs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

}  // namespace

PaperScheduleLevel paper_schedule(int d, int n) {
  if (d < 1 || n < 1) throw std::invalid_argument("paper_schedule: need d >= 1 and n >= 1");
  unsigned long q = 1UL << (d + 1);  // 2s
  auto a_of = [&](int k) {
    return pow_big(BigInt(static_cast<unsigned long>(q)), 1UL << (2 * k));  // (2s)^{4^k}
  };
  auto b_of = [&](int k) { return a_of(k) / pow_u(q, static_cast<unsigned long>(k + 3)); };

  PaperScheduleLevel lvl;
  lvl.a = a_of(n);
  lvl.b = b_of(n);
  BigInt prod_prev(1);
  for (int k = 1; k < n; ++k) prod_prev *= a_of(k);
  BigInt term1 = pow_u(q, static_cast<unsigned long>(8 * n)) * prod_prev;
  // ratio a_1..a_{n+1} / b_1..b_{n+1} = (2s)^{sum (k+3)}
  BigInt ratio(1);
  for (int k = 1; k <= n + 1; ++k) ratio *= pow_u(q, static_cast<unsigned long>(k + 3));
  BigInt term2 = pow_big(ratio, static_cast<unsigned long>(n + 1));
  lvl.hypothesis_ok = lvl.a >= term1 && lvl.a >= term2;
  return lvl;
}

// ---------------------------------------------------------------------------
// Run

int Run::x_sign(int level, uint64_t piece, int coord) const {
  return sign_draw(sched_.seed, level, piece, 0, coord);
}

int Run::y_sign(int level, uint64_t piece, int coord) const {
  return sign_draw(sched_.seed, level, piece, 1, coord);
}

Rational Run::fn_value(int level, uint64_t piece, int coord) const {
  int delta = x_sign(level, piece, coord) - y_sign(level, piece, coord);  // -2, 0, 2
  if (delta == 0) return Rational(0);
  Rational amp = dyadic(delta > 0 ? 1 : -1, static_cast<unsigned long>(level - 1));
  return amp;
}

std::vector<Rational> Run::h_partial(int level, uint64_t piece) const {
  if (level < 1 || level > depth()) throw std::out_of_range("Run::h_partial: bad level");
  RInterval hull = tree_->node_hull(level, piece);
  Rational mid = (hull.lo + hull.hi) / 2;
  std::vector<Rational> out = g_.eval(mid);
  const auto& cum = cum_[static_cast<size_t>(level - 1)];
  for (int c = 0; c < sched_.d; ++c) {
    out[static_cast<size_t>(c)] += cum[piece * static_cast<uint64_t>(sched_.d) + static_cast<uint64_t>(c)];
  }
  return out;
}

const std::vector<Rational>& Run::leaf_h(uint64_t leaf) const {
  return leaf_h_[static_cast<size_t>(leaf)];
}

uint64_t Run::leaf_count() const { return tree_->count_at(depth()); }

uint64_t Run::record_hash() const {
  uint64_t h = keyed_u64(sched_.seed, static_cast<uint64_t>(sched_.d),
                         static_cast<uint64_t>(depth()), 0x9d);
  for (const auto& lvl : cum_) {
    for (const auto& v : lvl) {
      h = mix64(h ^ static_cast<uint64_t>(mpz_fdiv_ui(v.get_num().get_mpz_t(), 0xffffffffULL)));
      h = mix64(h ^ static_cast<uint64_t>(mpz_fdiv_ui(v.get_den().get_mpz_t(), 0xffffffffULL)));
    }
  }
  return h;
}

Run sample_run(std::shared_ptr<const CantorTree> tree, int d, GridFunction g, uint64_t seed) {
  if (!tree) throw std::invalid_argument("sample_run: null tree");
  if (tree->depth() < 1) throw std::invalid_argument("sample_run: tree depth must be >= 1");
  if (!tree->has_lebesgue_measure()) {
    throw std::invalid_argument("sample_run: tree carries no Lebesgue measure");
  }
  if (tree->count_at(tree->depth()) > (uint64_t(1) << 24)) {
    throw std::length_error("sample_run: tree too large to materialize");
  }
  if (d < 1 || d > 6) throw std::invalid_argument("sample_run: d must lie in [1,6]");
  if (g.dim() != d) throw std::invalid_argument("sample_run: drift dimension != d");

  Run run;
  run.sched_.d = d;
  run.sched_.seed = seed;
  run.sched_.a = tree->branching();
  run.tree_ = std::move(tree);
  run.g_ = std::move(g);

  int depth = run.sched_.depth();
  run.cum_.resize(static_cast<size_t>(depth));
  const auto& a = run.sched_.a;
  uint64_t count = 1;
  for (int n = 1; n <= depth; ++n) {
    count *= a[static_cast<size_t>(n - 1)];
    auto& lvl = run.cum_[static_cast<size_t>(n - 1)];
    lvl.resize(count * static_cast<uint64_t>(d));
    const auto* prev = n >= 2 ? &run.cum_[static_cast<size_t>(n - 2)] : nullptr;
    uint64_t an = a[static_cast<size_t>(n - 1)];
    for (uint64_t piece = 0; piece < count; ++piece) {
      uint64_t parent = piece / an;
      for (int c = 0; c < d; ++c) {
        Rational v = prev ? (*prev)[parent * static_cast<uint64_t>(d) + static_cast<uint64_t>(c)]
                          : Rational(0);
        v += run.fn_value(n, piece, c);
        lvl[piece * static_cast<uint64_t>(d) + static_cast<uint64_t>(c)] = std::move(v);
      }
    }
  }

  // leaf values include the drift at piece midpoints
  uint64_t leaves = run.tree_->count_at(depth);
  run.leaf_h_.resize(leaves);
  for (uint64_t leaf = 0; leaf < leaves; ++leaf) {
    run.leaf_h_[static_cast<size_t>(leaf)] = run.h_partial(depth, leaf);
  }
  return run;
}

// ---------------------------------------------------------------------------

std::vector<MaxBall> refine_cover(const std::vector<Rational>& z, int n, int d) {
  if (n < 0) throw std::invalid_argument("refine_cover: n must be >= 0");
  if (d < 1 || static_cast<size_t>(d) != z.size()) {
    throw std::invalid_argument("refine_cover: dimension mismatch");
  }
  int s = 1 << d;
  std::vector<MaxBall> out;
  out.reserve(static_cast<size_t>(s));
  Rational r = dyadic(1, static_cast<unsigned long>(n + 1));
  for (int mask = 0; mask < s; ++mask) {
    MaxBall b;
    b.radius = r;
    b.center = z;
    for (int c = 0; c < d; ++c) {
      b.center[static_cast<size_t>(c)] += ((mask >> c) & 1) ? r : -r;
    }
    out.push_back(std::move(b));
  }
  return out;
}

LevelSetResult level_set(const Run& run, const std::vector<Rational>& y, const Rational& tol) {
  if (tol <= 0) throw std::invalid_argument("level_set: tol must be > 0");
  if (y.size() != static_cast<size_t>(run.d())) {
    throw std::invalid_argument("level_set: target dimension mismatch");
  }
  LevelSetResult res;
  res.total_measure = Rational(0);
  Rational w = run.tree().piece_measure(run.depth());
  uint64_t leaves = run.leaf_count();
  for (uint64_t leaf = 0; leaf < leaves; ++leaf) {
    if (max_norm_dist(run.leaf_h(leaf), y) <= tol) {
      res.pieces.push_back({leaf, run.tree().node_hull(run.depth(), leaf)});
      res.total_measure += w;
    }
  }
  return res;
}

OpenSetResult discovered_open_set(const Run& run, int m) {
  if (m < 1) throw std::invalid_argument("discovered_open_set: m must be >= 1");
  if (m >= run.depth()) throw std::invalid_argument("discovered_open_set: requires m < depth");
  int d = run.d();
  unsigned long two_s = 1UL << (d + 1);

  OpenSetResult res;
  res.m = m;
  for (int n = 0; m + n + 1 <= run.depth(); ++n) {
    res.p_bounds.push_back(pow_u(two_s, static_cast<unsigned long>(m + n + 5)) /
                           Rational(BigInt(static_cast<unsigned long>(
                               run.schedule().a[static_cast<size_t>(m + n)]))));
  }

  // T_m: lattice of pitch 2^-m over B(range(g), 2)
  Rational pitch = dyadic(1, static_cast<unsigned long>(m));
  std::vector<std::pair<BigInt, BigInt>> axis_range(static_cast<size_t>(d));
  {
    const GridFunction& g = run.drift();
    for (int c = 0; c < d; ++c) {
      Rational lo = g.ys()[0][static_cast<size_t>(c)], hi = lo;
      for (const auto& yv : g.ys()) {
        if (yv[static_cast<size_t>(c)] < lo) lo = yv[static_cast<size_t>(c)];
        if (yv[static_cast<size_t>(c)] > hi) hi = yv[static_cast<size_t>(c)];
      }
      axis_range[static_cast<size_t>(c)] = {ceil_rat((lo - 2) / pitch), floor_rat((hi + 2) / pitch)};
    }
  }
  unsigned __int128 net_size = 1;
  for (const auto& [lo, hi] : axis_range) {
    net_size *= static_cast<unsigned __int128>(mpz_get_ui(BigInt(hi - lo + 1).get_mpz_t()));
    if (net_size > (1u << 22)) throw std::length_error("discovered_open_set: T_m net too large");
  }

  // level-m piece values and measure
  uint64_t pieces_m = run.tree().count_at(m);
  Rational piece_measure_m = run.tree().piece_measure(m);
  std::vector<std::vector<Rational>> val_m(pieces_m);
  for (uint64_t p = 0; p < pieces_m; ++p) val_m[static_cast<size_t>(p)] = run.h_partial(m, p);

  Rational r0 = Rational(1) / pow_u(two_s, static_cast<unsigned long>(m + 2));
  std::vector<DiscoveredBall> frontier;
  {
    // enumerate the net in lexicographic order
    std::vector<BigInt> idx(static_cast<size_t>(d));
    for (int c = 0; c < d; ++c) idx[static_cast<size_t>(c)] = axis_range[static_cast<size_t>(c)].first;
    bool done = false;
    while (!done) {
      DiscoveredBall ball;
      ball.k = 0;
      ball.radius = pitch;
      ball.center.resize(static_cast<size_t>(d));
      for (int c = 0; c < d; ++c) ball.center[static_cast<size_t>(c)] = Rational(idx[static_cast<size_t>(c)]) * pitch;
      ball.chain.push_back(ball.center);
      Rational mass(0);
      for (uint64_t p = 0; p < pieces_m; ++p) {
        if (max_norm_dist(val_m[static_cast<size_t>(p)], ball.center) <= ball.radius) {
          mass += piece_measure_m;
        }
      }
      if (mass >= r0) {
        ball.preimage_measure = mass;
        frontier.push_back(ball);
      }
      // advance
      int c = d - 1;
      while (c >= 0) {
        idx[static_cast<size_t>(c)] += 1;
        if (idx[static_cast<size_t>(c)] <= axis_range[static_cast<size_t>(c)].second) break;
        idx[static_cast<size_t>(c)] = axis_range[static_cast<size_t>(c)].first;
        --c;
      }
      if (c < 0) done = true;
    }
  }
  res.balls = frontier;

  // extend chains while levels remain
  for (int k = 1; m + k <= run.depth(); ++k) {
    int level = m + k;
    uint64_t pieces = run.tree().count_at(level);
    Rational piece_measure = run.tree().piece_measure(level);
    Rational rk = Rational(1) / pow_u(two_s, static_cast<unsigned long>(m + k + 2));
    Rational radius = dyadic(1, static_cast<unsigned long>(level));
    Rational step = dyadic(1, static_cast<unsigned long>(level));

    std::vector<std::vector<Rational>> vals(pieces);
    for (uint64_t p = 0; p < pieces; ++p) vals[static_cast<size_t>(p)] = run.h_partial(level, p);

    std::vector<DiscoveredBall> next;
    int s = 1 << d;
    for (const auto& parent : frontier) {
      for (int mask = 0; mask < s; ++mask) {
        DiscoveredBall ball;
        ball.k = k;
        ball.radius = radius;
        ball.chain = parent.chain;
        std::vector<Rational> y(static_cast<size_t>(d));
        for (int c = 0; c < d; ++c) y[static_cast<size_t>(c)] = ((mask >> c) & 1) ? step : -step;
        ball.chain.push_back(y);
        ball.center = parent.center;
        for (int c = 0; c < d; ++c) ball.center[static_cast<size_t>(c)] += y[static_cast<size_t>(c)];
        Rational mass(0);
        for (uint64_t p = 0; p < pieces; ++p) {
          if (max_norm_dist(vals[static_cast<size_t>(p)], ball.center) <= radius) mass += piece_measure;
        }
        if (mass >= rk) {
          ball.preimage_measure = mass;
          next.push_back(std::move(ball));
        }
      }
    }
    res.balls.insert(res.balls.end(), next.begin(), next.end());
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return res;
}

FiberWitnessResult witness_fiber_cantor(const Run& run, const DiscoveredBall& ball, int m) {
  int d = run.d();
  unsigned long two_s = 1UL << (d + 1);
  int k = ball.k;
  int root_level = m + k;
  if (root_level > run.depth()) {
    throw std::invalid_argument("witness_fiber_cantor: chain deeper than the run");
  }
  // membership in T_k: the threshold must actually hold for this chain
  {
    Rational rk = Rational(1) / pow_u(two_s, static_cast<unsigned long>(m + k + 2));
    uint64_t pieces = run.tree().count_at(root_level);
    Rational piece_measure = run.tree().piece_measure(root_level);
    Rational mass(0);
    for (uint64_t p = 0; p < pieces; ++p) {
      if (max_norm_dist(run.h_partial(root_level, p), ball.center) <= ball.radius) {
        mass += piece_measure;
      }
    }
    if (mass < rk) {
      throw std::invalid_argument("witness_fiber_cantor: chain does not meet the T_k threshold");
    }
  }

  FiberWitnessResult res;
  res.root_level = root_level;
  res.center = ball.center;
  res.radius = ball.radius;

  // root: the qualifying level-(m+k) piece whose value is closest to the center
  uint64_t root_piece = 0;
  bool have_root = false;
  Rational best_dist;
  uint64_t pieces_root = run.tree().count_at(root_level);
  for (uint64_t p = 0; p < pieces_root; ++p) {
    Rational dist = max_norm_dist(run.h_partial(root_level, p), ball.center);
    if (dist <= ball.radius && (!have_root || dist < best_dist)) {
      have_root = true;
      best_dist = dist;
      root_piece = p;
    }
  }
  if (!have_root) {
    res.failure = "ball misses range(h) at the root level";
    return res;
  }
  int s = 1 << d;
  // DFS expansion; per node the extension y in S_level keeping the most
  // children is chosen (ties to the lexicographically smallest mask) and
  // starved branches are dropped
  std::function<bool(FiberNode&, const std::vector<Rational>&, int)> expand =
      [&](FiberNode& node, const std::vector<Rational>& center, int level) -> bool {
    ++res.node_count;
    if (level == run.depth()) {
      ++res.leaf_nodes;
      return true;
    }
    int next = level + 1;
    Rational child_radius = dyadic(1, static_cast<unsigned long>(next));
    uint64_t an = run.schedule().a[static_cast<size_t>(next - 1)];
    int best_mask = -1;
    uint64_t best_count = 0;
    for (int mask = 0; mask < s; ++mask) {
      std::vector<Rational> c = center;
      for (int cc = 0; cc < d; ++cc) {
        c[static_cast<size_t>(cc)] += ((mask >> cc) & 1) ? child_radius : -child_radius;
      }
      uint64_t count = 0;
      for (uint64_t j = 0; j < an; ++j) {
        if (max_norm_dist(run.h_partial(next, node.piece * an + j), c) <= child_radius) ++count;
      }
      if (count > best_count) {
        best_count = count;
        best_mask = mask;
      }
    }
    if (best_count == 0) {
      ++res.starved_nodes;
      if (res.failure.empty()) {
        res.failure = "starved node at level " + std::to_string(next - root_level) + " (piece " +
                      std::to_string(node.piece) + ")";
      }
      return false;
    }
    std::vector<Rational> c = center;
    for (int cc = 0; cc < d; ++cc) {
      c[static_cast<size_t>(cc)] += ((best_mask >> cc) & 1) ? child_radius : -child_radius;
    }
    for (uint64_t j = 0; j < an; ++j) {
      uint64_t child = node.piece * an + j;
      if (max_norm_dist(run.h_partial(next, child), c) <= child_radius) {
        FiberNode cn{child, {}};
        if (expand(cn, c, next)) node.children.push_back(std::move(cn));
      }
    }
    return !node.children.empty();
  };

  res.root.piece = root_piece;
  res.success = expand(res.root, ball.center, root_level);
  if (!res.success && res.failure.empty()) res.failure = "witness tree died before full depth";
  return res;
}

bool recheck_fiber_containment(const Run& run, const FiberWitnessResult& w) {
  if (!w.success) return false;
  // 2^{1-depth} + radius
  Rational bound = dyadic(2, static_cast<unsigned long>(run.depth())) + w.radius;
  bool ok = true;
  std::function<void(const FiberNode&)> walk = [&](const FiberNode& node) {
    if (node.children.empty()) {
      if (max_norm_dist(run.leaf_h(node.piece), w.center) > bound) ok = false;
      return;
    }
    for (const auto& c : node.children) walk(c);
  };
  walk(w.root);
  return ok;
}

Rational OccupationHistogram::mass_fraction_below(double density_threshold) const {
  if (total_mass == 0) return Rational(0);
  if (degenerate) return Rational(0);
  Rational acc(0);
  Rational thr = rational_from_double(density_threshold) * bin_volume;
  for (const auto& mass : masses) {
    if (mass <= thr) acc += mass;
  }
  return acc / total_mass;
}

OccupationHistogram occupation_histogram(const Run& run, int bins) {
  if (bins < 2) throw std::invalid_argument("occupation_histogram: bins must be >= 2");
  int d = run.d();
  if (d > 2 && bins > 64) throw std::length_error("occupation_histogram: grid too large");
  OccupationHistogram h;
  h.dim = d;
  h.bins = bins;
  uint64_t leaves = run.leaf_count();
  if (leaves == 0) throw std::logic_error("occupation_histogram: empty run");
  h.lo = h.hi = run.leaf_h(0);
  for (uint64_t leaf = 1; leaf < leaves; ++leaf) {
    const auto& v = run.leaf_h(leaf);
    for (int c = 0; c < d; ++c) {
      if (v[static_cast<size_t>(c)] < h.lo[static_cast<size_t>(c)]) h.lo[static_cast<size_t>(c)] = v[static_cast<size_t>(c)];
      if (v[static_cast<size_t>(c)] > h.hi[static_cast<size_t>(c)]) h.hi[static_cast<size_t>(c)] = v[static_cast<size_t>(c)];
    }
  }
  std::vector<Rational> width(static_cast<size_t>(d));
  h.bin_volume = Rational(1);
  for (int c = 0; c < d; ++c) {
    width[static_cast<size_t>(c)] = h.hi[static_cast<size_t>(c)] - h.lo[static_cast<size_t>(c)];
    if (width[static_cast<size_t>(c)] == 0) h.degenerate = true;
    h.bin_volume *= width[static_cast<size_t>(c)] / bins;
  }
  size_t cells = 1;
  for (int c = 0; c < d; ++c) cells *= static_cast<size_t>(bins);
  h.masses.assign(cells, Rational(0));
  Rational w = run.tree().piece_measure(run.depth());
  h.total_mass = Rational(0);
  for (uint64_t leaf = 0; leaf < leaves; ++leaf) {
    const auto& v = run.leaf_h(leaf);
    size_t cell = 0;
    for (int c = 0; c < d; ++c) {
      long idx = 0;
      if (width[static_cast<size_t>(c)] > 0) {
        Rational rel = (v[static_cast<size_t>(c)] - h.lo[static_cast<size_t>(c)]) * bins /
                       width[static_cast<size_t>(c)];
        idx = mpz_get_si(floor_rat(rel).get_mpz_t());
        if (idx >= bins) idx = bins - 1;  // top edge closes the last bin
      }
      cell = cell * static_cast<size_t>(bins) + static_cast<size_t>(idx);
    }
    h.masses[cell] += w;
    h.total_mass += w;
  }
  if (h.degenerate) {
    h.max_density = std::numeric_limits<double>::infinity();
  } else {
    Rational best(0);
    for (const auto& mass : h.masses) {
      if (mass > best) best = mass;
    }
    h.max_density = to_double(best / h.bin_volume);
  }
  return h;
}

ChebyshevResult chebyshev_bound_mc(uint64_t u, uint64_t v, const Rational& p, uint64_t trials,
                                   uint64_t seed) {
  if (u < 1 || v < 1 || trials < 1) {
    throw std::invalid_argument("chebyshev_bound_mc: u, v, trials must be >= 1");
  }
  if (p <= 0 || p * Rational(static_cast<unsigned long>(v)) > 1) {
    throw std::invalid_argument("chebyshev_bound_mc: need 0 < p <= 1/v");
  }
  ChebyshevResult res;
  res.trials = trials;
  res.bound = Rational(4) * Rational(static_cast<unsigned long>(v)) /
              (Rational(static_cast<unsigned long>(u)) * p);
  double pd = to_double(p);
  double half_up = to_double(p) * double(u) / 2.0;
  std::vector<uint64_t> counts(static_cast<size_t>(v));
  for (uint64_t t = 0; t < trials; ++t) {
    std::fill(counts.begin(), counts.end(), 0);
    RngStream rng(seed, t);
    for (uint64_t i = 0; i < u; ++i) {
      double x = rng.unit();
      double cell = x / pd;
      if (cell < double(v)) {
        auto j = static_cast<size_t>(cell);
        if (j < counts.size()) ++counts[j];
      }
    }
    for (uint64_t j = 0; j < v; ++j) {
      if (double(counts[static_cast<size_t>(j)]) < half_up) {
        ++res.failures;
        break;
      }
    }
  }
  res.empirical = double(res.failures) / double(trials);
  return res;
}

}  // namespace fiberdim

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fiberdim/cantor.hpp"
#include "fiberdim/grid_function.hpp"
#include "fiberdim/rational.hpp"
#include "fiberdim/schedule.hpp"

namespace fiberdim {

// Exact a_n = (2s)^{4^n}, b_n = (2s)^{-(n+3)} a_n with s = 2^d, plus the
// big-integer check of the proof hypothesis
// a_n >= max{(2s)^{8n} a_1..a_{n-1}, (a_1..a_{n+1}/(b_1..b_{n+1}))^{n+1}}.
struct PaperScheduleLevel {
  BigInt a, b;
  bool hypothesis_ok = false;
};
PaperScheduleLevel paper_schedule(int d, int n);

struct PerturbationSchedule {
  int d = 1;
  std::vector<uint64_t> a;
  uint64_t seed = 0;
  int depth() const { return static_cast<int>(a.size()); }
  int s() const { return 1 << d; }
};

// One sampled realization of the randomized perturbation process: per level n
// and per level-n piece an independent pair (X, Y) uniform on
// S_n = {-2^-n, +2^-n}^d, keyed by (seed, level, piece, which) so parallel and
// serial evaluation agree bit-exactly.
class Run {
 public:
  const PerturbationSchedule& schedule() const { return sched_; }
  const CantorTree& tree() const { return *tree_; }
  const std::shared_ptr<const CantorTree>& tree_ptr() const { return tree_; }
  const GridFunction& drift() const { return g_; }
  int d() const { return sched_.d; }
  int depth() const { return sched_.depth(); }

  // X/Y coordinate signs at a level-n piece: +1 or -1, scaled by 2^-n.
  int x_sign(int level, uint64_t piece, int coord) const;
  int y_sign(int level, uint64_t piece, int coord) const;
  // f_n coordinate on a piece: (X - Y)_c, one of {-2^{1-n}, 0, +2^{1-n}}.
  Rational fn_value(int level, uint64_t piece, int coord) const;

  // h_k = g + sum_{i<=level} f_i evaluated on a level-`level` piece (drift
  // taken at the piece midpoint).
  std::vector<Rational> h_partial(int level, uint64_t piece) const;
  // full-depth value on a leaf
  const std::vector<Rational>& leaf_h(uint64_t leaf) const;
  uint64_t leaf_count() const;

  uint64_t record_hash() const;

  friend Run sample_run(std::shared_ptr<const CantorTree> tree, int d, GridFunction g,
                        uint64_t seed);

 private:
  Run() : g_(GridFunction::zero(1)) {}
  PerturbationSchedule sched_;
  std::shared_ptr<const CantorTree> tree_;
  GridFunction g_;
  // cumulative sum of f_1..f_n per level-n piece, coordinate-major
  std::vector<std::vector<Rational>> cum_;
  std::vector<std::vector<Rational>> leaf_h_;
};

Run sample_run(std::shared_ptr<const CantorTree> tree, int d, GridFunction g, uint64_t seed);

struct MaxBall {
  std::vector<Rational> center;
  Rational radius;
};

// The s = 2^d balls {B(z + y, 2^-(n+1)) : y in S_{n+1}} refining B(z, 2^-n)
// under the max norm.
std::vector<MaxBall> refine_cover(const std::vector<Rational>& z, int n, int d);

struct LevelSetPiece {
  uint64_t leaf = 0;
  RInterval hull;
};

struct LevelSetResult {
  std::vector<LevelSetPiece> pieces;
  Rational total_measure;
};

// Deepest-level pieces with ||h(piece) - y||_inf <= tol, exact comparisons.
LevelSetResult level_set(const Run& run, const std::vector<Rational>& y, const Rational& tol);

struct DiscoveredBall {
  int k = 0;                         // chain length
  std::vector<std::vector<Rational>> chain;  // y_0, .., y_k
  std::vector<Rational> center;      // y_0 + ... + y_k
  Rational radius;                   // 2^-(m+k)
  Rational preimage_measure;         // lambda(h_k^-1(B))
};

struct OpenSetResult {
  int m = 0;
  std::vector<DiscoveredBall> balls;
  // theoretical per-step failure bound p_n = (2s)^{m+n+5} / a_{m+n+1}
  std::vector<Rational> p_bounds;
};

// T_m net (max-norm grid of pitch 2^-m over B(range(g), 2)) followed by the
// threshold recursion: a chain (y_0..y_k) survives iff
// lambda(h_k^-1(B(center, 2^-(m+k)))) >= r_k = (2s)^-(m+k+2).
OpenSetResult discovered_open_set(const Run& run, int m);

struct FiberNode {
  uint64_t piece = 0;  // global piece index at this node's level
  std::vector<FiberNode> children;
};

struct FiberWitnessResult {
  bool success = false;
  int root_level = 0;  // m + k
  std::vector<Rational> center;
  Rational radius;
  FiberNode root;
  uint64_t starved_nodes = 0;
  uint64_t leaf_nodes = 0;
  uint64_t node_count = 0;
  std::string failure;
};

// Greedy witness reconstruction inside the fiber ball of a discovered chain:
// per node the chain extension y in S_{m+n+1} keeping the most children is
// chosen and children whose h-value stays in the shrunk ball are kept.
// Starved branches are pruned; success means a non-empty frontier at full
// depth. Every returned leaf satisfies
// ||h - center||_inf <= 2^{1-depth} + radius (exact dyadic check).
FiberWitnessResult witness_fiber_cantor(const Run& run, const DiscoveredBall& ball, int m);

// Independent containment recheck over all leaves of a witness result.
bool recheck_fiber_containment(const Run& run, const FiberWitnessResult& w);

struct OccupationHistogram {
  int dim = 1;
  int bins = 0;
  std::vector<Rational> lo, hi;       // bounding box per axis
  std::vector<Rational> masses;       // bins^dim cells, row-major
  Rational total_mass;
  Rational bin_volume;                // zero when the box is degenerate
  bool degenerate = false;
  double max_density = 0.0;
  // fraction of total mass in bins with density <= threshold
  Rational mass_fraction_below(double density_threshold) const;
};

// Pushes exact piece measures through h onto a regular grid over the bounding
// box of the realized leaf values.
OccupationHistogram occupation_histogram(const Run& run, int bins);

struct ChebyshevResult {
  double empirical = 0.0;
  Rational bound;  // 4v/(u p)
  uint64_t failures = 0;
  uint64_t trials = 0;
};

// Simulates u independent xi_i with Pr(xi_i = j) = p per j <= v and counts
// trials where some symbol lands fewer than up/2 times.
ChebyshevResult chebyshev_bound_mc(uint64_t u, uint64_t v, const Rational& p, uint64_t trials,
                                   uint64_t seed);

}  // namespace fiberdim

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fiberdim/interval.hpp"
#include "fiberdim/rational.hpp"
#include "fiberdim/schedule.hpp"

namespace fiberdim {

enum class TreeVariant {
  fat,             // canonical positive-measure construction, disjoint hulls
  compact_type,    // epsilon = 0, hulls tile the host and may share endpoints
  self_similar,    // two-branch similar tree, zero Lebesgue measure
};

// Hierarchical elementary pieces with exact rational geometry. Node hulls are
// evaluated on demand from per-level closed forms, so trees far above the
// materialization limit can still be addressed level by level.
class CantorTree {
 public:
  int depth() const { return depth_; }
  const std::vector<uint64_t>& branching() const { return a_; }
  TreeVariant variant() const { return variant_; }
  const Rational& total_measure() const { return total_measure_; }
  const Rational& epsilon() const { return epsilon_; }
  bool has_lebesgue_measure() const { return has_lebesgue_; }
  // True when the Lebesgue measure identity is intentionally suspended
  // (self-similar trees carry hull lengths but zero measure).
  bool measure_invariant_suspended() const { return !has_lebesgue_; }

  // lambda(K) / (a_1 ... a_n); zero when the measure invariant is suspended.
  Rational piece_measure(int level) const;
  uint64_t count_at(int level) const;

  RInterval node_hull(int level, uint64_t index) const;
  std::vector<RInterval> level_hulls(int level) const;

  // Hull length of any single level-n piece (uniform across the level for the
  // fat/compact/self-similar variants; embedded hulls vary and must be read
  // per node).
  Rational uniform_piece_length(int level) const;

  bool is_embedded() const { return !host_.empty(); }
  const IntervalUnion& host() const { return host_; }
  const Rational& contraction() const { return contraction_; }

  friend CantorTree build_fat_cantor(const std::vector<uint64_t>&, const Rational&, int);
  friend CantorTree partition_tree(const std::vector<uint64_t>&, int);
  friend CantorTree embed_in_compact(const IntervalUnion&, const std::vector<uint64_t>&,
                                     const Rational&, int);
  friend CantorTree prescribed_dimension_cantor(double, int);

 private:
  CantorTree() = default;

  RInterval unit_node_hull(int level, uint64_t index) const;
  Rational map_mass_left(const Rational& mass) const;
  Rational map_mass_right(const Rational& mass) const;

  TreeVariant variant_ = TreeVariant::fat;
  std::vector<uint64_t> a_;
  int depth_ = 0;
  Rational epsilon_;
  Rational total_measure_;
  bool has_lebesgue_ = true;

  // per level 1..depth, in the unit construction domain
  std::vector<Rational> piece_len_;
  std::vector<Rational> gap_len_;
  Rational contraction_;  // self_similar only

  // embedded variant: host components with cumulative-mass prefixes
  IntervalUnion host_;
  Rational host_mass_;
  std::vector<Rational> mass_prefix_;
};

// Canonical fat Cantor set in [0,1] with lambda(K) = 1 - epsilon. Stage n
// removes a_n - 1 equal, equally spaced open gaps per interval, with total
// removed length epsilon * 2^-n across the stage.
CantorTree build_fat_cantor(const std::vector<uint64_t>& a, const Rational& epsilon, int depth);

// Degenerate epsilon = 0 construction whose level-n pieces tile the unit
// interval; hulls may share endpoints (the compact-type variant). The triadic
// tree with a = (3,3,...) is the canonical instance.
CantorTree partition_tree(const std::vector<uint64_t>& a, int depth);

// Pulls the canonical construction back through phi(x) = lambda((-inf,x] on C)
// into a finite union of disjoint closed intervals. lambda(K) = lambda(C) - epsilon.
CantorTree embed_in_compact(const IntervalUnion& host, const std::vector<uint64_t>& a,
                            const Rational& epsilon, int depth);

// Two-branch self-similar tree with contraction ratio 2^{-1/s}; the limit set
// has box and Hausdorff dimension s. Carries zero Lebesgue measure.
CantorTree prescribed_dimension_cantor(double s, int depth);

struct Selector {
  enum class Kind { first, random, explicit_lists };
  Kind kind = Kind::first;
  uint64_t seed = 0;
  // One sorted child-index list per level, applied to every parent.
  std::vector<std::vector<uint64_t>> lists;

  static Selector first() { return Selector{}; }
  static Selector random(uint64_t seed) {
    Selector s;
    s.kind = Kind::random;
    s.seed = seed;
    return s;
  }
  static Selector explicit_lists(std::vector<std::vector<uint64_t>> lists) {
    Selector s;
    s.kind = Kind::explicit_lists;
    s.lists = std::move(lists);
    return s;
  }
};

// (a_n, b_n)-type subset: every node keeps exactly b_{n+1} of its children.
class SubsetTree {
 public:
  const CantorTree& parent() const { return *parent_; }
  const std::shared_ptr<const CantorTree>& parent_ptr() const { return parent_; }
  const std::vector<uint64_t>& b() const { return b_; }
  int depth() const { return parent_->depth(); }

  uint64_t count_at(int level) const;
  // Sorted global node indices at `level` (1-based levels; level 0 is the root).
  const std::vector<uint64_t>& selected_at(int level) const;
  std::vector<RInterval> leaf_hulls() const;

  friend SubsetTree select_subset(std::shared_ptr<const CantorTree> tree,
                                  const std::vector<uint64_t>& b, const Selector& sel);

 private:
  SubsetTree() = default;
  std::shared_ptr<const CantorTree> parent_;
  std::vector<uint64_t> b_;
  std::vector<std::vector<uint64_t>> selected_;  // selected_[n-1] = level n
};

SubsetTree select_subset(std::shared_ptr<const CantorTree> tree, const std::vector<uint64_t>& b,
                         const Selector& sel);

// The triadic Cantor set as the outer-two selection of the 3-adic partition tree.
SubsetTree triadic_cantor(int depth);

// Natural measure mu(C_{i1..in}) = 1/(b_1..b_n) on a subset tree.
class MassDistribution {
 public:
  explicit MassDistribution(SubsetTree subset) : subset_(std::move(subset)) {}
  const SubsetTree& subset() const { return subset_; }
  Rational weight(int level) const;

 private:
  SubsetTree subset_;
};

MassDistribution natural_measure(SubsetTree subset);

struct MassBoundReport {
  double sup_ratio = 0.0;
  bool pass = false;
  RInterval witness;
  Rational witness_mu;
  Rational witness_diam;
  uint64_t windows_scanned = 0;
};

// Exhaustive scan over boundary-aligned windows B (endpoints at deepest-level
// selected hulls, diam <= (a_1..a_k)^-1) of mu(B) / (diam B)^{1-1/k}.
// Pass iff the sup is <= 4; comparisons are exact via k-th powers.
MassBoundReport verify_mass_bound(const MassDistribution& mass, int k);

// Window candidates shared by the mass-bound checks: for every achievable
// contained-leaf count, the minimum window diameter that achieves it.
struct WindowCandidate {
  uint64_t leaf_count = 0;
  Rational diam;
  RInterval window;
};
std::vector<WindowCandidate> window_candidates(const std::vector<RInterval>& leaves,
                                               const Rational& diam_cap,
                                               uint64_t max_windows = 0);

}  // namespace fiberdim

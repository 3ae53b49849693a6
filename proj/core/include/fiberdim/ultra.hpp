#pragma once

#include <cstdint>
#include <vector>

#include "fiberdim/rational.hpp"

namespace fiberdim {

// Finite-depth ultrametric space modeled as a rooted tree: leaves carry
// positive masses summing to 1, the distance between two leaves is the
// diameter delta_n of their deepest common ancestor's level, and the
// lexicographic (DFS) leaf order is 1-monotone.
class UltrametricTree {
 public:
  struct Node {
    std::vector<Node> children;
    Rational mass;  // leaf mass; internal nodes derive theirs
  };

  UltrametricTree(Node root, std::vector<Rational> level_diameters);

  static UltrametricTree uniform(int arity, int depth);
  // Per-level child mass split applied at every internal node (binary splits
  // like (1/3, 2/3) give the standard skewed examples).
  static UltrametricTree weighted(const std::vector<Rational>& child_weights, int depth);

  int depth() const { return static_cast<int>(level_diam_.size()) - 1; }
  const std::vector<Rational>& level_diameters() const { return level_diam_; }
  size_t leaf_count() const { return leaf_mass_.size(); }
  const Rational& leaf_mass(size_t i) const { return leaf_mass_[i]; }
  const Rational& prefix_mass(size_t i) const { return prefix_[i]; }

  // level of the deepest common ancestor of two leaves
  int common_level(size_t i, size_t j) const;
  const Rational& distance(size_t i, size_t j) const;

  struct Subtree {
    int level = 0;
    size_t first_leaf = 0, last_leaf = 0;
    Rational mass;
  };
  // every node of the tree, root first (DFS order)
  const std::vector<Subtree>& subtrees() const { return subtrees_; }

 private:
  std::vector<Rational> level_diam_;
  std::vector<Rational> leaf_mass_;
  std::vector<Rational> prefix_;  // exclusive prefix sums
  std::vector<Subtree> subtrees_;
  std::vector<std::vector<size_t>> ancestor_;  // ancestor_[n][leaf] = subtree id at level n
};

// h(leaf) = mu((-inf, leaf)) = mass of strictly smaller leaves, exact.
std::vector<Rational> monotone_map(const UltrametricTree& tree);

struct PushforwardReport {
  bool all_pass = true;
  size_t subtrees_checked = 0;
  std::vector<size_t> failing;  // indices into tree.subtrees()
};

// For every subtree: the image interval [h(first), h(last) + mass(last)] must
// have length exactly equal to the subtree mass.
PushforwardReport pushforward_check(const UltrametricTree& tree);

struct HolderPair {
  size_t i = 0, j = 0;
  int level = 0;       // deepest common ancestor level
  Rational dh;         // image-interval length mu([leaf_i, leaf_j])
  Rational dist;       // delta_level
  double exponent = 0; // log dh / log dist
};

struct HolderProfile {
  std::vector<HolderPair> pairs;
  double min_exponent = 0.0;
  size_t argmin = 0;
};

// Empirical Hoelder exponents log|dh| / log d(x,z) over all leaf pairs, where
// dh is the image-interval length (the pushforward mass of the closed order
// interval). Pairwise enumeration requires <= 2^12 leaves.
HolderProfile holder_profile(const UltrametricTree& tree);

}  // namespace fiberdim

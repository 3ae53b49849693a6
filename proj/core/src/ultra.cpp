#include "fiberdim/ultra.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace fiberdim {

UltrametricTree::UltrametricTree(Node root, std::vector<Rational> level_diameters)
    : level_diam_(std::move(level_diameters)) {
  if (level_diam_.empty()) throw std::invalid_argument("UltrametricTree: no level diameters");
  for (size_t i = 1; i < level_diam_.size(); ++i) {
    if (level_diam_[i] >= level_diam_[i - 1] || level_diam_[i] <= 0) {
      throw std::invalid_argument("UltrametricTree: diameters must strictly decrease and stay positive");
    }
  }

  // collect leaves and subtrees in DFS order
  std::function<Subtree(const Node&, int)> walk = [&](const Node& node, int level) -> Subtree {
    if (level >= static_cast<int>(level_diam_.size())) {
      throw std::invalid_argument("UltrametricTree: tree deeper than diameter list");
    }
    Subtree st;
    st.level = level;
    st.first_leaf = leaf_mass_.size();
    size_t my_index = subtrees_.size();
    subtrees_.push_back(st);
    if (node.children.empty()) {
      if (node.mass <= 0) throw std::invalid_argument("UltrametricTree: leaf masses must be > 0");
      leaf_mass_.push_back(node.mass);
      subtrees_[my_index].last_leaf = leaf_mass_.size() - 1;
      subtrees_[my_index].mass = node.mass;
      return subtrees_[my_index];
    }
    Rational mass(0);
    for (const auto& c : node.children) {
      Subtree cs = walk(c, level + 1);
      mass += cs.mass;
    }
    subtrees_[my_index].last_leaf = leaf_mass_.size() - 1;
    subtrees_[my_index].mass = mass;
    return subtrees_[my_index];
  };
  Subtree root_st = walk(root, 0);
  if (root_st.mass != 1) throw std::invalid_argument("UltrametricTree: leaf masses must sum to 1");

  prefix_.resize(leaf_mass_.size());
  Rational acc(0);
  for (size_t i = 0; i < leaf_mass_.size(); ++i) {
    prefix_[i] = acc;
    acc += leaf_mass_[i];
  }

  ancestor_.assign(level_diam_.size(), std::vector<size_t>(leaf_mass_.size(), 0));
  for (size_t s = 0; s < subtrees_.size(); ++s) {
    const auto& st = subtrees_[s];
    for (size_t l = st.first_leaf; l <= st.last_leaf; ++l) {
      ancestor_[static_cast<size_t>(st.level)][l] = s;
    }
  }
}

UltrametricTree UltrametricTree::uniform(int arity, int depth) {
  if (arity < 1 || depth < 0) throw std::invalid_argument("UltrametricTree::uniform: bad shape");
  Rational leaf = Rational(1);
  for (int i = 0; i < depth; ++i) leaf /= static_cast<unsigned long>(arity);
  std::function<Node(int)> build = [&](int level) -> Node {
    Node n;
    if (level == depth) {
      n.mass = leaf;
      return n;
    }
    for (int c = 0; c < arity; ++c) n.children.push_back(build(level + 1));
    return n;
  };
  std::vector<Rational> diam;
  for (int i = 0; i <= depth; ++i) diam.push_back(dyadic(1, static_cast<unsigned long>(i)));
  return UltrametricTree(build(0), std::move(diam));
}

UltrametricTree UltrametricTree::weighted(const std::vector<Rational>& child_weights, int depth) {
  if (child_weights.size() < 2) throw std::invalid_argument("UltrametricTree::weighted: need >= 2 weights");
  Rational sum(0);
  for (const auto& w : child_weights) {
    if (w <= 0) throw std::invalid_argument("UltrametricTree::weighted: weights must be > 0");
    sum += w;
  }
  if (sum != 1) throw std::invalid_argument("UltrametricTree::weighted: weights must sum to 1");
  std::function<Node(int, Rational)> build = [&](int level, Rational mass) -> Node {
    Node n;
    if (level == depth) {
      n.mass = std::move(mass);
      return n;
    }
    for (const auto& w : child_weights) n.children.push_back(build(level + 1, mass * w));
    return n;
  };
  std::vector<Rational> diam;
  for (int i = 0; i <= depth; ++i) diam.push_back(dyadic(1, static_cast<unsigned long>(i)));
  return UltrametricTree(build(0, Rational(1)), std::move(diam));
}

int UltrametricTree::common_level(size_t i, size_t j) const {
  if (i >= leaf_count() || j >= leaf_count()) throw std::out_of_range("common_level");
  int level = 0;
  for (size_t n = 0; n < ancestor_.size(); ++n) {
    if (ancestor_[n][i] == ancestor_[n][j]) {
      level = static_cast<int>(n);
    } else {
      break;
    }
  }
  return level;
}

const Rational& UltrametricTree::distance(size_t i, size_t j) const {
  return level_diam_[static_cast<size_t>(common_level(i, j))];
}

std::vector<Rational> monotone_map(const UltrametricTree& tree) {
  std::vector<Rational> h;
  h.reserve(tree.leaf_count());
  for (size_t i = 0; i < tree.leaf_count(); ++i) h.push_back(tree.prefix_mass(i));
  return h;
}

PushforwardReport pushforward_check(const UltrametricTree& tree) {
  PushforwardReport rep;
  const auto& subs = tree.subtrees();
  rep.subtrees_checked = subs.size();
  for (size_t s = 0; s < subs.size(); ++s) {
    const auto& st = subs[s];
    Rational image_len = tree.prefix_mass(st.last_leaf) + tree.leaf_mass(st.last_leaf) -
                         tree.prefix_mass(st.first_leaf);
    if (image_len != st.mass) {
      rep.all_pass = false;
      rep.failing.push_back(s);
    }
  }
  return rep;
}

HolderProfile holder_profile(const UltrametricTree& tree) {
  size_t n = tree.leaf_count();
  if (n > (size_t(1) << 12)) {
    throw std::length_error("holder_profile: pairwise enumeration needs <= 2^12 leaves");
  }
  HolderProfile prof;
  if (n < 2) return prof;
  prof.min_exponent = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      HolderPair p;
      p.i = i;
      p.j = j;
      p.level = tree.common_level(i, j);
      p.dh = tree.prefix_mass(j) + tree.leaf_mass(j) - tree.prefix_mass(i);
      p.dist = tree.distance(i, j);
      p.exponent = std::log(to_double(p.dh)) / std::log(to_double(p.dist));
      if (p.exponent < prof.min_exponent) {
        prof.min_exponent = p.exponent;
        prof.argmin = prof.pairs.size();
      }
      prof.pairs.push_back(std::move(p));
    }
  }
  return prof;
}

}  // namespace fiberdim

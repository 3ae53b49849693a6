#include "fiberdim/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fiberdim/rng.hpp"

namespace fiberdim {

namespace {

constexpr uint64_t kMaxMaterializedNodes = uint64_t(1) << 24;

uint64_t checked_mul(uint64_t a, uint64_t b, const char* what) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  if (p > ~uint64_t(0)) throw std::overflow_error(std::string(what) + ": index overflow");
  return static_cast<uint64_t>(p);
}

void check_depth(int depth, size_t levels) {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  if (static_cast<size_t>(depth) > levels) {
    throw std::invalid_argument("depth exceeds schedule length");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// CantorTree

Rational CantorTree::piece_measure(int level) const {
  if (!has_lebesgue_) return Rational(0);
  if (level < 0 || level > depth_) throw std::out_of_range("piece_measure: bad level");
  Rational m = total_measure_;
  for (int i = 0; i < level; ++i) m /= static_cast<unsigned long>(a_[static_cast<size_t>(i)]);
  return m;
}

uint64_t CantorTree::count_at(int level) const {
  if (level < 0 || level > depth_) throw std::out_of_range("count_at: bad level");
  uint64_t n = 1;
  for (int i = 0; i < level; ++i) n = checked_mul(n, a_[static_cast<size_t>(i)], "count_at");
  return n;
}

Rational CantorTree::uniform_piece_length(int level) const {
  if (is_embedded()) throw std::logic_error("uniform_piece_length: embedded hulls are not uniform");
  if (level == 0) return Rational(1);
  return piece_len_[static_cast<size_t>(level - 1)];
}

RInterval CantorTree::unit_node_hull(int level, uint64_t index) const {
  if (level < 0 || level > depth_) throw std::out_of_range("node_hull: bad level");
  if (index >= count_at(level)) throw std::out_of_range("node_hull: bad index");
  // digits, most significant first
  std::vector<uint64_t> digits(static_cast<size_t>(level));
  uint64_t rest = index;
  for (int k = level; k >= 1; --k) {
    uint64_t ak = a_[static_cast<size_t>(k - 1)];
    digits[static_cast<size_t>(k - 1)] = rest % ak;
    rest /= ak;
  }
  Rational lo(0);
  if (variant_ == TreeVariant::self_similar) {
    Rational len(1);
    for (int k = 1; k <= level; ++k) {
      Rational child_len = piece_len_[static_cast<size_t>(k - 1)];
      if (digits[static_cast<size_t>(k - 1)] == 1) lo += len - child_len;
      len = child_len;
    }
    return RInterval(lo, lo + len);
  }
  for (int k = 1; k <= level; ++k) {
    Rational pitch = piece_len_[static_cast<size_t>(k - 1)] + gap_len_[static_cast<size_t>(k - 1)];
    lo += Rational(static_cast<unsigned long>(digits[static_cast<size_t>(k - 1)])) * pitch;
  }
  return RInterval(lo, lo + (level == 0 ? Rational(1) : piece_len_[static_cast<size_t>(level - 1)]));
}

Rational CantorTree::map_mass_left(const Rational& mass) const {
  const auto& comps = host_.parts();
  if (mass == 0) return comps.front().lo;
  // smallest j with prefix[j] >= mass
  size_t lo = 0, hi = mass_prefix_.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (mass_prefix_[mid] >= mass) hi = mid; else lo = mid + 1;
  }
  if (mass_prefix_[lo] == mass) return comps[lo - 1].hi;
  return comps[lo - 1].lo + (mass - mass_prefix_[lo - 1]);
}

Rational CantorTree::map_mass_right(const Rational& mass) const {
  const auto& comps = host_.parts();
  if (mass == host_mass_) return comps.back().hi;
  size_t lo = 0, hi = mass_prefix_.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (mass_prefix_[mid] >= mass) hi = mid; else lo = mid + 1;
  }
  if (mass_prefix_[lo] == mass) return comps[lo].lo;
  return comps[lo - 1].lo + (mass - mass_prefix_[lo - 1]);
}

RInterval CantorTree::node_hull(int level, uint64_t index) const {
  RInterval unit = unit_node_hull(level, index);
  if (!is_embedded()) return unit;
  Rational lo_mass = unit.lo * host_mass_;
  Rational hi_mass = unit.hi * host_mass_;
  return RInterval(map_mass_left(lo_mass), map_mass_right(hi_mass));
}

std::vector<RInterval> CantorTree::level_hulls(int level) const {
  uint64_t n = count_at(level);
  if (n > kMaxMaterializedNodes) {
    throw std::length_error("level_hulls: level too large to materialize; iterate node_hull");
  }
  std::vector<RInterval> out;
  out.reserve(n);
  if (is_embedded()) {
    for (uint64_t i = 0; i < n; ++i) out.push_back(node_hull(level, i));
    return out;
  }
  // iterative expansion keeps this linear in the node count
  out.push_back(RInterval(Rational(0), Rational(1)));
  for (int k = 1; k <= level; ++k) {
    std::vector<RInterval> next;
    next.reserve(out.size() * a_[static_cast<size_t>(k - 1)]);
    const Rational& len = piece_len_[static_cast<size_t>(k - 1)];
    if (variant_ == TreeVariant::self_similar) {
      for (const auto& p : out) {
        next.push_back(RInterval(p.lo, p.lo + len));
        next.push_back(RInterval(p.hi - len, p.hi));
      }
    } else {
      Rational pitch = len + gap_len_[static_cast<size_t>(k - 1)];
      for (const auto& p : out) {
        Rational lo = p.lo;
        for (uint64_t i = 0; i < a_[static_cast<size_t>(k - 1)]; ++i) {
          next.push_back(RInterval(lo, lo + len));
          lo += pitch;
        }
      }
    }
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Factories

CantorTree build_fat_cantor(const std::vector<uint64_t>& a, const Rational& epsilon, int depth) {
  if (epsilon <= 0 || epsilon >= 1) {
    throw std::invalid_argument("build_fat_cantor: epsilon must lie in (0,1)");
  }
  check_depth(depth, a.size());
  for (auto v : a) {
    if (v == 0) throw std::invalid_argument("build_fat_cantor: zero branching");
    if (v == 1) {
      // a stage with a single child has no gap to carry the stage budget,
      // so lambda(K) = 1 - epsilon would fail
      throw std::invalid_argument("build_fat_cantor: branching must be >= 2 at every stage");
    }
  }
  CantorTree t;
  t.variant_ = TreeVariant::fat;
  t.a_.assign(a.begin(), a.begin() + depth);
  t.depth_ = depth;
  t.epsilon_ = epsilon;
  t.total_measure_ = Rational(1) - epsilon;
  Rational len(1);
  uint64_t parents = 1;
  for (int n = 1; n <= depth; ++n) {
    uint64_t an = a[static_cast<size_t>(n - 1)];
    // stage budget epsilon * 2^-n split over all gaps of the stage
    Rational stage = epsilon * dyadic(1, static_cast<unsigned long>(n));
    Rational gap = stage / Rational(static_cast<unsigned long>(parents)) /
                   Rational(static_cast<unsigned long>(an - 1));
    Rational child = (len - Rational(static_cast<unsigned long>(an - 1)) * gap) /
                     Rational(static_cast<unsigned long>(an));
    if (child <= 0) throw std::invalid_argument("build_fat_cantor: stage leaves no interval");
    t.piece_len_.push_back(child);
    t.gap_len_.push_back(gap);
    len = child;
    parents = checked_mul(parents, an, "build_fat_cantor");
  }
  return t;
}

CantorTree partition_tree(const std::vector<uint64_t>& a, int depth) {
  check_depth(depth, a.size());
  for (auto v : a) {
    if (v == 0) throw std::invalid_argument("partition_tree: zero branching");
  }
  CantorTree t;
  t.variant_ = TreeVariant::compact_type;
  t.a_.assign(a.begin(), a.begin() + depth);
  t.depth_ = depth;
  t.epsilon_ = Rational(0);
  t.total_measure_ = Rational(1);
  Rational len(1);
  for (int n = 1; n <= depth; ++n) {
    len /= static_cast<unsigned long>(a[static_cast<size_t>(n - 1)]);
    t.piece_len_.push_back(len);
    t.gap_len_.push_back(Rational(0));
  }
  return t;
}

CantorTree embed_in_compact(const IntervalUnion& host, const std::vector<uint64_t>& a,
                            const Rational& epsilon, int depth) {
  if (host.empty() || host.total_length() == 0) {
    throw std::invalid_argument("embed_in_compact: host has zero length");
  }
  Rational mass = host.total_length();
  if (epsilon <= 0 || epsilon >= mass) {
    throw std::invalid_argument("embed_in_compact: epsilon must lie in (0, lambda(C))");
  }
  CantorTree t = build_fat_cantor(a, epsilon / mass, depth);
  t.host_ = host;
  t.host_mass_ = mass;
  t.total_measure_ = mass - epsilon;
  t.epsilon_ = epsilon;
  t.mass_prefix_.clear();
  Rational acc(0);
  t.mass_prefix_.push_back(acc);
  for (const auto& c : host.parts()) {
    acc += c.length();
    t.mass_prefix_.push_back(acc);
  }
  return t;
}

CantorTree prescribed_dimension_cantor(double s, int depth) {
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("prescribed_dimension_cantor: s must lie in (0,1)");
  }
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  CantorTree t;
  t.variant_ = TreeVariant::self_similar;
  t.a_.assign(static_cast<size_t>(depth), 2);
  t.depth_ = depth;
  t.epsilon_ = Rational(0);
  t.total_measure_ = Rational(0);
  t.has_lebesgue_ = false;
  // the double is a dyadic rational; the tree is exact wrt this stored ratio
  t.contraction_ = rational_from_double(std::pow(2.0, -1.0 / s));
  Rational len(1);
  for (int n = 1; n <= depth; ++n) {
    len *= t.contraction_;
    t.piece_len_.push_back(len);
    t.gap_len_.push_back(Rational(0));
  }
  return t;
}

// ---------------------------------------------------------------------------
// SubsetTree

uint64_t SubsetTree::count_at(int level) const {
  if (level < 0 || level > depth()) throw std::out_of_range("SubsetTree::count_at");
  uint64_t n = 1;
  for (int i = 0; i < level; ++i) n = checked_mul(n, b_[static_cast<size_t>(i)], "SubsetTree");
  return n;
}

const std::vector<uint64_t>& SubsetTree::selected_at(int level) const {
  static const std::vector<uint64_t> root{0};
  if (level == 0) return root;
  if (level < 1 || level > depth()) throw std::out_of_range("SubsetTree::selected_at");
  return selected_[static_cast<size_t>(level - 1)];
}

std::vector<RInterval> SubsetTree::leaf_hulls() const {
  const auto& leaves = selected_at(depth());
  std::vector<RInterval> out;
  out.reserve(leaves.size());
  for (uint64_t idx : leaves) out.push_back(parent_->node_hull(depth(), idx));
  return out;
}

SubsetTree select_subset(std::shared_ptr<const CantorTree> tree, const std::vector<uint64_t>& b,
                         const Selector& sel) {
  if (!tree) throw std::invalid_argument("select_subset: null tree");
  const auto& a = tree->branching();
  if (b.size() < a.size()) throw std::invalid_argument("select_subset: b shorter than tree depth");
  for (size_t i = 0; i < a.size(); ++i) {
    if (b[i] < 1 || b[i] > a[i]) {
      throw std::invalid_argument("select_subset: need 1 <= b_n <= a_n at every level");
    }
  }
  if (sel.kind == Selector::Kind::explicit_lists) {
    if (sel.lists.size() < a.size()) {
      throw std::invalid_argument("select_subset: explicit selector missing levels");
    }
    for (size_t i = 0; i < a.size(); ++i) {
      const auto& l = sel.lists[i];
      if (l.size() != b[i]) throw std::invalid_argument("select_subset: explicit list length != b_n");
      for (size_t j = 0; j < l.size(); ++j) {
        if (l[j] >= a[i]) throw std::invalid_argument("select_subset: explicit index out of range");
        if (j > 0 && l[j] <= l[j - 1]) {
          throw std::invalid_argument("select_subset: explicit indices must increase");
        }
      }
    }
  }

  SubsetTree st;
  st.parent_ = std::move(tree);
  st.b_.assign(b.begin(), b.begin() + st.parent_->depth());

  std::vector<uint64_t> parents{0};
  for (int n = 1; n <= st.parent_->depth(); ++n) {
    uint64_t an = a[static_cast<size_t>(n - 1)];
    uint64_t bn = b[static_cast<size_t>(n - 1)];
    uint64_t total = checked_mul(parents.size(), bn, "select_subset");
    if (total > kMaxMaterializedNodes) {
      throw std::length_error("select_subset: selection too large to materialize");
    }
    std::vector<uint64_t> level;
    level.reserve(total);
    for (uint64_t p : parents) {
      uint64_t base = checked_mul(p, an, "select_subset");
      switch (sel.kind) {
        case Selector::Kind::first:
          for (uint64_t j = 0; j < bn; ++j) level.push_back(base + j);
          break;
        case Selector::Kind::explicit_lists:
          for (uint64_t j : sel.lists[static_cast<size_t>(n - 1)]) level.push_back(base + j);
          break;
        case Selector::Kind::random: {
          if (an > (uint64_t(1) << 22)) {
            throw std::length_error("select_subset: random selector needs a_n <= 2^22");
          }
          std::vector<uint64_t> pool(an);
          std::iota(pool.begin(), pool.end(), uint64_t(0));
          RngStream rng(sel.seed, static_cast<uint64_t>(n), p);
          for (uint64_t j = 0; j < bn; ++j) {
            uint64_t k = j + rng.below(an - j);
            std::swap(pool[j], pool[k]);
          }
          std::sort(pool.begin(), pool.begin() + static_cast<ptrdiff_t>(bn));
          for (uint64_t j = 0; j < bn; ++j) level.push_back(base + pool[j]);
          break;
        }
      }
    }
    st.selected_.push_back(std::move(level));
    parents = st.selected_.back();
  }
  return st;
}

SubsetTree triadic_cantor(int depth) {
  std::vector<uint64_t> a(static_cast<size_t>(depth), 3);
  std::vector<uint64_t> b(static_cast<size_t>(depth), 2);
  auto tree = std::make_shared<CantorTree>(partition_tree(a, depth));
  std::vector<std::vector<uint64_t>> outer(static_cast<size_t>(depth), {0, 2});
  return select_subset(tree, b, Selector::explicit_lists(outer));
}

// ---------------------------------------------------------------------------
// MassDistribution

Rational MassDistribution::weight(int level) const {
  if (level < 0 || level > subset_.depth()) throw std::out_of_range("MassDistribution::weight");
  Rational w(1);
  for (int i = 0; i < level; ++i) {
    w /= static_cast<unsigned long>(subset_.b()[static_cast<size_t>(i)]);
  }
  return w;
}

MassDistribution natural_measure(SubsetTree subset) { return MassDistribution(std::move(subset)); }

// ---------------------------------------------------------------------------
// Window scan

std::vector<WindowCandidate> window_candidates(const std::vector<RInterval>& leaves,
                                               const Rational& diam_cap, uint64_t max_windows) {
  // Endpoint list: position 2t is leaves[t].lo, 2t+1 is leaves[t].hi. A window
  // [E_u, E_v] fully contains leaves ceil(u/2) .. floor((v-1)/2); counts only
  // change when v crosses a hi endpoint, so per left endpoint we record one
  // candidate per count with its minimal diameter.
  size_t L = leaves.size();
  std::vector<WindowCandidate> best(L + 1);
  std::vector<bool> seen(L + 1, false);
  if (L == 0) return {};
  std::vector<Rational> E(2 * L);
  for (size_t t = 0; t < L; ++t) {
    E[2 * t] = leaves[t].lo;
    E[2 * t + 1] = leaves[t].hi;
  }
  uint64_t budget = max_windows;
  bool limited = max_windows > 0;
  for (size_t u = 0; u + 1 < 2 * L; ++u) {
    size_t first = (u + 1) / 2;  // first fully contained leaf
    for (size_t v = u + 1; v < 2 * L; ++v) {
      Rational diam = E[v] - E[u];
      if (diam_cap > 0 && diam > diam_cap) break;
      if (limited) {
        if (budget == 0) break;
        --budget;
      }
      if (v % 2 == 0) continue;  // count unchanged until a hi endpoint
      size_t last = (v - 1) / 2;
      if (last < first) continue;
      uint64_t count = last - first + 1;
      if (diam == 0) continue;
      if (!seen[count] || diam < best[count].diam) {
        seen[count] = true;
        best[count] = WindowCandidate{count, diam, RInterval(E[u], E[v])};
      }
    }
    if (limited && budget == 0) break;
  }
  std::vector<WindowCandidate> out;
  for (size_t c = 1; c <= L; ++c) {
    if (seen[c]) out.push_back(best[c]);
  }
  return out;
}

MassBoundReport verify_mass_bound(const MassDistribution& mass, int k) {
  const SubsetTree& st = mass.subset();
  if (k < 1) throw std::invalid_argument("verify_mass_bound: k must be >= 1");
  if (k >= st.depth()) throw std::invalid_argument("verify_mass_bound: k must satisfy k < depth");
  const auto& a = st.parent().branching();
  Rational cap(1);
  for (int i = 0; i < k; ++i) cap /= static_cast<unsigned long>(a[static_cast<size_t>(i)]);

  std::vector<RInterval> leaves = st.leaf_hulls();
  Rational w = mass.weight(st.depth());
  auto candidates = window_candidates(leaves, cap);

  MassBoundReport rep;
  rep.windows_scanned = candidates.size();
  if (candidates.empty()) {
    rep.pass = true;
    return rep;
  }
  // argmax of mu/d^{(k-1)/k} via exact cross-powers: A > B iff
  // muA^k * dB^{k-1} > muB^k * dA^{k-1}
  auto mu_of = [&](const WindowCandidate& c) {
    return Rational(static_cast<unsigned long>(c.leaf_count)) * w;
  };
  const WindowCandidate* bestc = &candidates.front();
  Rational best_mu_k = pow_rat(mu_of(*bestc), static_cast<unsigned long>(k));
  Rational best_d_k1 = pow_rat(bestc->diam, static_cast<unsigned long>(k - 1));
  for (size_t i = 1; i < candidates.size(); ++i) {
    Rational mu_k = pow_rat(mu_of(candidates[i]), static_cast<unsigned long>(k));
    Rational d_k1 = pow_rat(candidates[i].diam, static_cast<unsigned long>(k - 1));
    if (mu_k * best_d_k1 > best_mu_k * d_k1) {
      bestc = &candidates[i];
      best_mu_k = mu_k;
      best_d_k1 = d_k1;
    }
  }
  rep.witness = bestc->window;
  rep.witness_mu = mu_of(*bestc);
  rep.witness_diam = bestc->diam;
  // pass iff mu^k <= 4^k d^{k-1}
  rep.pass = best_mu_k <= pow_rat(Rational(4), static_cast<unsigned long>(k)) * best_d_k1;
  rep.sup_ratio = to_double(rep.witness_mu) *
                  std::pow(to_double(rep.witness_diam), -(double(k) - 1.0) / double(k));
  return rep;
}

}  // namespace fiberdim

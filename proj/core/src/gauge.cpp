#include "fiberdim/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fiberdim {

namespace {

double eval_power(double r, double s) {
  if (r <= 0.0) return 0.0;
  if (s == 0.0) return 1.0;
  return std::pow(r, s);
}

}  // namespace

Gauge Gauge::power(Rational s) {
  if (s < 0) throw std::invalid_argument("Gauge::power: s must be >= 0");
  Gauge g;
  g.family_ = GaugeFamily::power;
  g.s_ = std::move(s);
  return g;
}

Gauge Gauge::power_log(Rational s, Rational t) {
  if (s <= 0) throw std::invalid_argument("Gauge::power_log: s must be > 0");
  Gauge g;
  g.family_ = GaugeFamily::power_log;
  g.s_ = std::move(s);
  g.t_ = std::move(t);
  double sd = to_double(g.s_), td = to_double(g.t_);
  // r^s (log 1/r)^t is non-decreasing iff s log(1/r) >= t, largest such point
  // is e^{-t/s}; for t <= 0 the formula blows up at r = 1, cut at e^-1.
  g.cutoff_ = td > 0.0 ? std::exp(-td / sd) : std::exp(-1.0);
  return g;
}

Gauge Gauge::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("Gauge::tabulated: need >= 2 samples");
  std::sort(samples.begin(), samples.end());
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].first < 0 || samples[i].second < 0) {
      throw std::invalid_argument("Gauge::tabulated: samples must be non-negative");
    }
    if (i > 0 && samples[i].second < samples[i - 1].second) {
      throw std::invalid_argument("Gauge::tabulated: samples must be non-decreasing");
    }
  }
  Gauge g;
  g.family_ = GaugeFamily::tabulated;
  g.samples_ = std::move(samples);
  return g;
}

double Gauge::eval(double r) const {
  if (r <= 0.0) return 0.0;
  switch (family_) {
    case GaugeFamily::power:
      return eval_power(r, to_double(s_));
    case GaugeFamily::power_log: {
      double rr = std::min(r, cutoff_);
      return eval_power(rr, to_double(s_)) * std::pow(std::log(1.0 / rr), to_double(t_));
    }
    case GaugeFamily::tabulated: {
      if (r <= samples_.front().first) {
        // interpolate down toward phi(0) = 0
        double x1 = samples_.front().first;
        if (x1 <= 0.0) return samples_.front().second;
        return samples_.front().second * (r / x1);
      }
      if (r >= samples_.back().first) return samples_.back().second;
      auto it = std::upper_bound(samples_.begin(), samples_.end(), std::make_pair(r, 1e300));
      auto lo = *(it - 1);
      auto hi = *it;
      double w = (r - lo.first) / (hi.first - lo.first);
      return lo.second + w * (hi.second - lo.second);
    }
  }
  return 0.0;
}

ClassMembership in_class(const Gauge& g, double s) {
  Rational sr = rational_from_double(s);
  switch (g.family()) {
    case GaugeFamily::power:
      return g.s() < sr ? ClassMembership::in_class : ClassMembership::not_in_class;
    case GaugeFamily::power_log:
      if (g.s() < sr) return ClassMembership::in_class;
      if (g.s() == sr && g.t() > 0) return ClassMembership::in_class;
      return ClassMembership::not_in_class;
    case GaugeFamily::tabulated:
      return ClassMembership::inconclusive;
  }
  return ClassMembership::inconclusive;
}

PhiTransformResult phi_transform(const Gauge& g, double x, double tol) {
  if (!(x >= 1.0)) throw std::invalid_argument("phi_transform: x must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("phi_transform: tol must be > 0");
  if (in_class(g, 1.0) != ClassMembership::in_class) {
    throw std::domain_error("phi_transform: gauge not verified in G(1); sup may be infinite");
  }
  auto F = [&](double r) { return r * g.eval(1.0 / r); };

  double lo = 0.0, hi = 0.0;
  if (F(1.0) <= x) {
    lo = 1.0;
    hi = 2.0;
    int guard = 0;
    while (F(hi) <= x) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 1100) throw std::runtime_error("phi_transform: bracket growth did not terminate");
    }
  } else {
    // the map may start above x; search down for a bracket
    double r = 0.5;
    double prev = 1.0;
    bool found = false;
    while (r > 1e-18) {
      if (F(r) <= x) {
        lo = r;
        hi = prev;
        found = true;
        break;
      }
      prev = r;
      r *= 0.5;
    }
    if (!found) return PhiTransformResult{1.0, true};
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (F(mid) <= x) lo = mid; else hi = mid;
  }
  return PhiTransformResult{lo + 1.0, false};
}

Gauge divide_by_power(const Gauge& psi, int d) {
  if (d < 0) throw std::invalid_argument("divide_by_power: d must be >= 0");
  ClassMembership cm = in_class(psi, double(d) + 1.0);
  if (cm == ClassMembership::not_in_class) {
    throw std::domain_error("divide_by_power: psi not in G(d+1)");
  }
  if (psi.family() == GaugeFamily::power) {
    // psi(u) u^-d = u^{s-d}: increasing for s > d (inf at u = r), otherwise
    // the inf sits at u = 1 where the value is 1
    Rational diff = psi.s() - d;
    if (diff > 0) return Gauge::power(diff);
    return Gauge::power(Rational(0));
  }
  constexpr int kGrid = 1024;
  std::vector<std::pair<double, double>> pts(kGrid);
  double lo = 1e-9;
  for (int i = 0; i < kGrid; ++i) {
    double u = lo * std::pow(1.0 / lo, double(i) / double(kGrid - 1));
    pts[static_cast<size_t>(i)] = {u, psi.eval(u) * std::pow(u, -double(d))};
  }
  // suffix minimum turns the samples into the lower envelope inf_{u >= r}
  for (int i = kGrid - 2; i >= 0; --i) {
    pts[static_cast<size_t>(i)].second =
        std::min(pts[static_cast<size_t>(i)].second, pts[static_cast<size_t>(i + 1)].second);
  }
  return Gauge::tabulated(std::move(pts));
}

GaugeScheduleResult gauge_schedule(const Gauge& g, int d, int depth) {
  if (d < 1) throw std::invalid_argument("gauge_schedule: d must be >= 1");
  if (depth < 0) throw std::invalid_argument("gauge_schedule: depth must be >= 0");
  if (in_class(g, 1.0) != ClassMembership::in_class) {
    throw std::domain_error("gauge_schedule: gauge not verified in G(1)");
  }
  unsigned long q = 1UL << (d + 1);  // 2s with s = 2^d

  bool exact_power = g.family() == GaugeFamily::power && g.s() > 0 && g.s() < 1;
  // For Power(p/q'): Phi(x) = x^{1/(1-s)} + 1, so a_n - 1 >= x^{v/u} with
  // 1 - s = u/v is an exact big-integer comparison.
  BigInt u_exp, v_exp;
  if (exact_power) {
    Rational one_minus = Rational(1) - g.s();
    u_exp = one_minus.get_num();
    v_exp = one_minus.get_den();
  }

  GaugeScheduleResult res;
  for (int n = 1; n <= depth; ++n) {
    // ratio_n = prod a_k/b_k for k <= n+1 = (2s)^{sum (k+3)} = (2s)^{(n+1)(n+8)/2}
    unsigned long ratio_exp = static_cast<unsigned long>((n + 1) * (n + 8) / 2);
    BigInt ratio = pow_u(q, ratio_exp);
    BigInt term1 = pow_u(q, static_cast<unsigned long>(8 * n)) * res.schedule.a_product(n - 1);
    BigInt phi_floor;  // smallest integer M with M >= ratio^{1/(1-s)}
    if (exact_power) {
      BigInt powed = pow_big(ratio, mpz_get_ui(v_exp.get_mpz_t()));
      phi_floor = ceil_nth_root(powed, mpz_get_ui(u_exp.get_mpz_t()));
    } else {
      PhiTransformResult pt = phi_transform(g, to_double(ratio), 1e-9);
      phi_floor = ceil_rat(rational_from_double(pt.value * (1.0 + 1e-12)));
    }
    BigInt need = std::max(term1, BigInt(phi_floor + 1));
    BigInt step = pow_u(q, static_cast<unsigned long>(n + 3));
    BigInt an = ceil_div(need, step) * step;
    res.schedule.a.push_back(an);
  }
  res.schedule.b = std::vector<BigInt>();
  for (int n = 1; n <= depth; ++n) {
    BigInt step = pow_u(q, static_cast<unsigned long>(n + 3));
    BigInt an = res.schedule.a[static_cast<size_t>(n - 1)];
    if (an % step != 0) throw std::logic_error("gauge_schedule: b_n not integral");
    res.schedule.b->push_back(an / step);
  }

  // re-verify both hypotheses from the actual schedule
  res.verified_exact = exact_power;
  for (int n = 1; n <= depth; ++n) {
    GaugeScheduleLevel lvl;
    const BigInt& an = res.schedule.a[static_cast<size_t>(n - 1)];
    lvl.growth_ok =
        an >= pow_u(q, static_cast<unsigned long>(8 * n)) * res.schedule.a_product(n - 1);
    BigInt ratio(1);
    for (int k = 1; k <= n + 1; ++k) ratio *= pow_u(q, static_cast<unsigned long>(k + 3));
    if (exact_power) {
      BigInt lhs = pow_big(an - 1, mpz_get_ui(u_exp.get_mpz_t()));
      BigInt rhs = pow_big(ratio, mpz_get_ui(v_exp.get_mpz_t()));
      lvl.transform_ok = lhs >= rhs;
    } else {
      PhiTransformResult pt = phi_transform(g, to_double(ratio), 1e-9);
      lvl.transform_ok = to_double(an) >= pt.value - 1e-6;
    }
    res.levels.push_back(lvl);
    if (!lvl.growth_ok || !lvl.transform_ok) {
      throw std::logic_error("gauge_schedule: constructed schedule failed re-verification");
    }
  }
  return res;
}

double hausdorff_premeasure(std::span<const double> diams, const Gauge& g, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("hausdorff_premeasure: delta must be > 0");
  double sum = 0.0;
  for (double d : diams) {
    if (d < 0.0) throw std::invalid_argument("hausdorff_premeasure: negative diameter");
    if (d > delta) throw std::invalid_argument("hausdorff_premeasure: diameter exceeds delta");
    sum += g.eval(d);
  }
  return sum;
}

GaugeMassReport gauge_mass_check(const MassDistribution& mass, const Gauge& g, int max_level) {
  const SubsetTree& st = mass.subset();
  if (max_level < 1 || max_level > st.depth()) {
    throw std::invalid_argument("gauge_mass_check: max_level must lie in [1, depth]");
  }
  const auto& a = st.parent().branching();
  Rational cap(1);
  for (int i = 0; i < max_level; ++i) cap /= static_cast<unsigned long>(a[static_cast<size_t>(i)]);
  std::vector<RInterval> leaves = st.leaf_hulls();
  Rational w = mass.weight(st.depth());
  auto candidates = window_candidates(leaves, cap);

  GaugeMassReport rep;
  if (candidates.empty()) {
    rep.pass = true;
    return rep;
  }
  bool exact_power = g.family() == GaugeFamily::power && g.s() >= 0;
  rep.exact = exact_power;
  if (exact_power) {
    // mu/d^{p/q} comparisons via mu^q against d^p
    unsigned long p = mpz_get_ui(g.s().get_num().get_mpz_t());
    unsigned long q = mpz_get_ui(g.s().get_den().get_mpz_t());
    const WindowCandidate* best = &candidates.front();
    auto mu_of = [&](const WindowCandidate& c) {
      return Rational(static_cast<unsigned long>(c.leaf_count)) * w;
    };
    Rational best_mu_q = pow_rat(mu_of(*best), q);
    Rational best_d_p = pow_rat(best->diam, p);
    for (size_t i = 1; i < candidates.size(); ++i) {
      Rational mu_q = pow_rat(mu_of(candidates[i]), q);
      Rational d_p = pow_rat(candidates[i].diam, p);
      if (mu_q * best_d_p > best_mu_q * d_p) {
        best = &candidates[i];
        best_mu_q = mu_q;
        best_d_p = d_p;
      }
    }
    rep.witness = best->window;
    rep.witness_mu = mu_of(*best);
    rep.witness_diam = best->diam;
    rep.pass = best_mu_q <= pow_rat(Rational(4), q) * best_d_p;
    rep.sup_ratio = to_double(rep.witness_mu) / g.eval(to_double(rep.witness_diam));
    return rep;
  }
  double best_ratio = -1.0;
  const WindowCandidate* best = nullptr;
  for (const auto& c : candidates) {
    Rational mu = Rational(static_cast<unsigned long>(c.leaf_count)) * w;
    double phi = g.eval(to_double(c.diam));
    double ratio = phi > 0.0 ? to_double(mu) / phi : std::numeric_limits<double>::infinity();
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = &c;
    }
  }
  rep.witness = best->window;
  rep.witness_mu = Rational(static_cast<unsigned long>(best->leaf_count)) * w;
  rep.witness_diam = best->diam;
  rep.sup_ratio = best_ratio;
  rep.pass = best_ratio <= 4.0;
  return rep;
}

}  // namespace fiberdim

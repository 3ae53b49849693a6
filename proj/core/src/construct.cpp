#include "fiberdim/construct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fiberdim/rng.hpp"

namespace fiberdim {

namespace {

constexpr uint64_t kMaxLattice = uint64_t(1) << 61;

// smallest integer M with M^p >= v (v > 0 rational)
BigInt ceil_root_of_rational(const Rational& v, unsigned long p) {
  if (v <= 0) return 0;
  BigInt n = v.get_num(), d = v.get_den();
  BigInt guess = ceil_nth_root(ceil_div(n, d), p);
  while (guess > 0 && pow_big(guess - 1, p) * d >= n) guess -= 1;
  while (pow_big(guess, p) * d < n) guess += 1;
  return guess;
}

}  // namespace

// ---------------------------------------------------------------------------
// Modulus

Modulus Modulus::linear(Rational c) {
  if (c <= 0) throw std::invalid_argument("Modulus::linear: c must be > 0");
  Modulus m;
  m.family_ = Family::linear;
  m.c_ = std::move(c);
  m.alpha_ = Rational(1);
  return m;
}

Modulus Modulus::hoelder(Rational c, Rational alpha) {
  if (c <= 0 || alpha <= 0 || alpha > 1) {
    throw std::invalid_argument("Modulus::hoelder: need c > 0 and alpha in (0,1]");
  }
  Modulus m;
  m.family_ = Family::hoelder;
  m.c_ = std::move(c);
  m.alpha_ = std::move(alpha);
  return m;
}

double Modulus::eval(double t) const {
  if (t <= 0.0) return 0.0;
  if (family_ == Family::linear) return to_double(c_) * t;
  return to_double(c_) * std::pow(t, to_double(alpha_));
}

double Modulus::inverse(double y) const {
  if (y <= 0.0) return 0.0;
  if (family_ == Family::linear) return y / to_double(c_);
  return std::pow(y / to_double(c_), 1.0 / to_double(alpha_));
}

Rational Modulus::eval_exact(const Rational& t) const {
  if (family_ != Family::linear) throw std::logic_error("Modulus::eval_exact: not exact");
  return c_ * abs(t);
}

Rational Modulus::eval_upper(const Rational& t) const {
  if (family_ == Family::linear) return eval_exact(t);
  double v = eval(to_double(t));
  v = std::nextafter(std::nextafter(v, 1e300), 1e300);
  return rational_from_double(v);
}

BigInt Modulus::ceil_inv_reciprocal(const Rational& y) const {
  if (y <= 0) throw std::invalid_argument("Modulus::ceil_inv_reciprocal: y must be > 0");
  if (family_ == Family::linear) return ceil_rat(c_ / y);
  // 1/h^-1(y) = (c/y)^{q/p} for alpha = p/q
  unsigned long p = mpz_get_ui(alpha_.get_num().get_mpz_t());
  unsigned long q = mpz_get_ui(alpha_.get_den().get_mpz_t());
  return ceil_root_of_rational(pow_rat(c_ / y, q), p);
}

Modulus modulus_for_lipschitz(const Rational& L) { return Modulus::linear(2 * L); }

Modulus modulus_for_hoelder(const Rational& c, const Rational& alpha) {
  return Modulus::hoelder(2 * c, alpha);
}

// ---------------------------------------------------------------------------
// Cone

ConeFunction::ConeFunction(Rational x0, Rational y0, Modulus h)
    : x0_(std::move(x0)), y0_(std::move(y0)), h_(std::move(h)) {}

double ConeFunction::eval(double x) const {
  return to_double(y0_) + h_.eval(std::abs(x - to_double(x0_)));
}

Rational ConeFunction::eval_exact(const Rational& x) const {
  return y0_ + h_.eval_exact(abs(x - x0_));
}

GridFunction ConeFunction::to_grid(size_t points) const {
  std::vector<Rational> xs;
  std::vector<std::vector<Rational>> ys;
  xs.reserve(points + 2);
  bool x0_hit = false;
  for (size_t j = 0; j <= points; ++j) {
    Rational x = make_rational(BigInt(static_cast<unsigned long>(j)),
                               BigInt(static_cast<unsigned long>(points)));
    if (x == x0_) x0_hit = true;
    if (!x0_hit && x > x0_) {
      xs.push_back(x0_);
      x0_hit = true;
    }
    xs.push_back(x);
  }
  for (const auto& x : xs) {
    Rational v = h_.exact() ? eval_exact(x) : rational_from_double(eval(to_double(x)));
    ys.push_back({v});
  }
  return GridFunction(std::move(xs), std::move(ys));
}

ConeFunction cone_function(const Rational& x0, const Rational& y0, const Modulus& h) {
  return ConeFunction(x0, y0, h);
}

// ---------------------------------------------------------------------------
// Staircase

void StaircaseConfig::validate() const {
  Rational prev(1, 2);  // alpha_0
  for (const auto& a : alpha) {
    if (a <= 0) throw std::invalid_argument("StaircaseConfig: alpha entries must be > 0");
    if (2 * a > prev) throw std::invalid_argument("StaircaseConfig: need alpha_{n+1} <= alpha_n/2");
    prev = a;
  }
}

StaircaseFunction::StaircaseFunction(StaircaseConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

Rational StaircaseFunction::eval(const Rational& x) const {
  if (x < 0 || x > 1) throw std::out_of_range("StaircaseFunction: x outside [0,1]");
  // predecessor walk in the sign tree: the value order matches the z order,
  // so g(x) is g of the largest truncated-Z point <= x
  Rational v(1, 2), gv(1, 2);
  Rational bestg(0);
  bool go_right = v <= x;
  for (int i = 1; i <= depth(); ++i) {
    const Rational& a = cfg_.alpha[static_cast<size_t>(i - 1)];
    Rational step = dyadic(1, static_cast<unsigned long>(i + 1));
    if (go_right) {
      v += a;
      gv += step;
    } else {
      v -= a;
      gv -= step;
    }
    if (v <= x) {
      bestg = gv;
      go_right = true;
    } else {
      go_right = false;
    }
  }
  return bestg;
}

Rational StaircaseFunction::max_value() const {
  return Rational(1) - dyadic(1, static_cast<unsigned long>(depth() + 1));
}

std::vector<StaircaseFunction::ZPoint> StaircaseFunction::z_points() const {
  std::vector<ZPoint> out;
  out.push_back({Rational(0), Rational(0)});
  // all sign prefixes, depth 1..N
  std::vector<ZPoint> frontier{{Rational(1, 2), Rational(1, 2)}};
  for (int i = 1; i <= depth(); ++i) {
    const Rational& a = cfg_.alpha[static_cast<size_t>(i - 1)];
    Rational step = dyadic(1, static_cast<unsigned long>(i + 1));
    std::vector<ZPoint> next;
    next.reserve(frontier.size() * 2);
    for (const auto& p : frontier) {
      next.push_back({p.z - a, p.g - step});
      next.push_back({p.z + a, p.g + step});
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end(), [](const ZPoint& a, const ZPoint& b) { return a.z < b.z; });
  return out;
}

Rational StaircaseFunction::preimage_diameter(int n, uint64_t i) const {
  if (n < 1 || n > depth()) throw std::out_of_range("preimage_diameter: bad n");
  if (i < 1 || i > (uint64_t(1) << n)) throw std::out_of_range("preimage_diameter: bad i");
  Rational lo = make_rational(BigInt(static_cast<unsigned long>(i - 1)), pow_u(2, static_cast<unsigned long>(n)));
  Rational hi = make_rational(BigInt(static_cast<unsigned long>(i)), pow_u(2, static_cast<unsigned long>(n)));
  bool found = false;
  Rational zmin, zmax;
  for (const auto& p : z_points()) {
    if (p.g > lo && p.g < hi) {
      if (!found) {
        zmin = zmax = p.z;
        found = true;
      } else {
        if (p.z < zmin) zmin = p.z;
        if (p.z > zmax) zmax = p.z;
      }
    }
  }
  if (!found) return Rational(0);
  return zmax - zmin;
}

StaircaseFunction staircase_g(StaircaseConfig cfg) { return StaircaseFunction(std::move(cfg)); }

// ---------------------------------------------------------------------------
// C_n / Gamma_n

std::vector<CGammaLevel> c_gamma_sets(const StaircaseConfig& cfg, const Modulus& h, int depth) {
  cfg.validate();
  if (depth < 0 || depth > cfg.depth()) throw std::invalid_argument("c_gamma_sets: bad depth");
  if (depth > 24) throw std::length_error("c_gamma_sets: depth too large to materialize");
  std::vector<CGammaLevel> out;
  CGammaLevel level0;
  level0.c_set = IntervalUnion::unit();
  level0.gamma.push_back({Rational(1, 2), IntervalUnion::unit()});
  out.push_back(level0);

  for (int n = 0; n < depth; ++n) {
    const Rational& alpha_next = cfg.alpha[static_cast<size_t>(n)];
    Rational rad = h.eval_upper(4 * alpha_next);
    Rational bound = dyadic(1, static_cast<unsigned long>(n + 2));
    if (rad >= bound) {
      throw std::domain_error("c_gamma_sets: degenerate C_" + std::to_string(n + 1) +
                              " (h(4 alpha) too large; shrink the alpha schedule)");
    }
    uint64_t cells = uint64_t(1) << (n + 1);
    IntervalUnion c = out.back().c_set;
    for (uint64_t i = 0; i <= cells; ++i) {
      Rational center = make_rational(BigInt(static_cast<unsigned long>(i)),
                                      pow_u(2, static_cast<unsigned long>(n + 1)));
      c = c.subtract_open(center, rad);
    }
    CGammaLevel lvl;
    lvl.c_set = c;
    for (uint64_t i = 1; i <= cells; ++i) {
      // phi(i, n+1): the i-th sign vector in lexicographic order
      Rational z(1, 2);
      uint64_t bits = i - 1;
      for (int j = 1; j <= n + 1; ++j) {
        bool plus = (bits >> (n + 1 - j)) & 1;
        const Rational& aj = cfg.alpha[static_cast<size_t>(j - 1)];
        z += plus ? aj : -aj;
      }
      Rational lo = make_rational(BigInt(static_cast<unsigned long>(i - 1)),
                                  pow_u(2, static_cast<unsigned long>(n + 1)));
      Rational hi = make_rational(BigInt(static_cast<unsigned long>(i)),
                                  pow_u(2, static_cast<unsigned long>(n + 1)));
      lvl.gamma.push_back({z, c.intersect(RInterval(lo, hi))});
    }
    out.push_back(std::move(lvl));
  }
  return out;
}

bool gamma_membership(const GridFunction& f, const std::vector<GammaSegment>& gamma) {
  for (const auto& seg : gamma) {
    if (seg.x < f.domain_lo() || seg.x > f.domain_hi()) continue;
    if (seg.span.empty()) continue;
    if (seg.span.contains(f.eval1(seg.x))) return true;
  }
  return false;
}

StaircaseConfig choose_alpha_mc(const FunctionSampler& sampler, const Modulus& h, int depth,
                                int trials, uint64_t seed) {
  if (trials <= 0) throw std::invalid_argument("choose_alpha_mc: trials must be > 0");
  if (depth < 1) throw std::invalid_argument("choose_alpha_mc: depth must be >= 1");

  std::vector<GridFunction> samples;
  samples.reserve(static_cast<size_t>(trials));
  for (int i = 0; i < trials; ++i) samples.push_back(sampler(seed, static_cast<uint64_t>(i)));

  // spot-check the modulus bound on a few samples
  for (size_t i = 0; i < samples.size() && i < 5; ++i) {
    const auto& f = samples[i];
    for (size_t j = 1; j < f.xs().size(); ++j) {
      double dx = to_double(f.xs()[j] - f.xs()[j - 1]);
      double dy = std::abs(to_double(f.ys()[j][0] - f.ys()[j - 1][0]));
      if (dy > h.eval(dx) * (1.0 + 1e-9) + 1e-12) {
        throw std::invalid_argument("choose_alpha_mc: sampler violates the modulus bound");
      }
    }
  }

  StaircaseConfig cfg;
  IntervalUnion c_cur = IntervalUnion::unit();
  std::vector<bool> in_prev(samples.size());
  int in_prev_count = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    Rational v = samples[i].eval1(Rational(1, 2));
    in_prev[i] = v >= 0 && v <= 1;
    if (in_prev[i]) ++in_prev_count;
  }
  double sigma = 0.5 / std::sqrt(double(trials));

  Rational alpha_prev(1, 2);
  for (int n = 0; n < depth; ++n) {
    Rational cand = alpha_prev / 2;
    bool committed = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Rational rad = h.eval_upper(4 * cand);
      if (rad >= dyadic(1, static_cast<unsigned long>(n + 2))) {
        cand /= 2;
        continue;
      }
      uint64_t cells = uint64_t(1) << (n + 1);
      IntervalUnion c_next = c_cur;
      for (uint64_t i = 0; i <= cells; ++i) {
        Rational center = make_rational(BigInt(static_cast<unsigned long>(i)),
                                        pow_u(2, static_cast<unsigned long>(n + 1)));
        c_next = c_next.subtract_open(center, rad);
      }
      // membership in Gamma_{n+1} for the candidate alpha
      StaircaseConfig probe = cfg;
      probe.alpha.push_back(cand);
      std::vector<GammaSegment> gamma;
      for (uint64_t i = 1; i <= cells; ++i) {
        Rational z(1, 2);
        uint64_t bits = i - 1;
        for (int j = 1; j <= n + 1; ++j) {
          bool plus = (bits >> (n + 1 - j)) & 1;
          z += plus ? probe.alpha[static_cast<size_t>(j - 1)] : -probe.alpha[static_cast<size_t>(j - 1)];
        }
        Rational lo = make_rational(BigInt(static_cast<unsigned long>(i - 1)),
                                    pow_u(2, static_cast<unsigned long>(n + 1)));
        Rational hi = make_rational(BigInt(static_cast<unsigned long>(i)),
                                    pow_u(2, static_cast<unsigned long>(n + 1)));
        gamma.push_back({z, c_next.intersect(RInterval(lo, hi))});
      }
      std::vector<bool> member(samples.size());
      int retained = 0;
      for (size_t i = 0; i < samples.size(); ++i) {
        member[i] = gamma_membership(samples[i], gamma);
        if (member[i] && in_prev[i]) ++retained;
      }
      double prev_frac = double(in_prev_count) / double(trials);
      double need = prev_frac - std::pow(0.5, n + 2) + 2.0 * sigma;
      if (double(retained) / double(trials) >= need) {
        cfg.alpha.push_back(cand);
        alpha_prev = cand;
        c_cur = std::move(c_next);
        in_prev = std::move(member);
        in_prev_count = 0;
        for (bool m : in_prev) in_prev_count += m ? 1 : 0;
        committed = true;
        break;
      }
      cand /= 2;
    }
    if (!committed) {
      throw std::runtime_error("choose_alpha_mc: retention bound not met within 60 halvings at level " +
                               std::to_string(n + 1));
    }
  }
  return cfg;
}

GridFunction sampled_lipschitz_function(const Rational& x0, const Rational& y0, const Rational& L,
                                        size_t segments, uint64_t seed, uint64_t index) {
  if (segments < 1) throw std::invalid_argument("sampled_lipschitz_function: segments >= 1");
  if (x0 < 0 || x0 > 1) throw std::invalid_argument("sampled_lipschitz_function: x0 outside [0,1]");
  std::vector<Rational> xs;
  for (size_t j = 0; j <= segments; ++j) {
    xs.push_back(make_rational(BigInt(static_cast<unsigned long>(j)),
                               BigInt(static_cast<unsigned long>(segments))));
  }
  size_t anchor = 0;
  bool on_grid = false;
  for (size_t j = 0; j < xs.size(); ++j) {
    if (xs[j] == x0) {
      anchor = j;
      on_grid = true;
      break;
    }
    if (xs[j] > x0) {
      anchor = j;
      break;
    }
  }
  if (!on_grid) xs.insert(xs.begin() + static_cast<ptrdiff_t>(anchor), x0);

  RngStream rng(seed, index, 0x5c07a11);
  // dyadic slopes in [-L, L]
  auto slope = [&]() {
    long k = static_cast<long>(rng.below((1UL << 21) + 1)) - (1L << 20);
    return L * dyadic(k, 20);
  };
  std::vector<Rational> vals(xs.size());
  vals[anchor] = y0;
  for (size_t j = anchor; j + 1 < xs.size(); ++j) {
    vals[j + 1] = vals[j] + slope() * (xs[j + 1] - xs[j]);
  }
  for (size_t j = anchor; j > 0; --j) {
    vals[j - 1] = vals[j] - slope() * (xs[j] - xs[j - 1]);
  }
  std::vector<std::vector<Rational>> ys;
  ys.reserve(vals.size());
  for (auto& v : vals) ys.push_back({std::move(v)});
  return GridFunction(std::move(xs), std::move(ys));
}

IsolatedZeroReport verify_isolated_zero(const GridFunction& f, const StaircaseFunction& g,
                                        const Modulus& h, const Rational& tol,
                                        size_t grid_points) {
  if (tol <= 0) throw std::invalid_argument("verify_isolated_zero: tol must be > 0");
  std::vector<Rational> grid;
  for (size_t j = 0; j <= grid_points; ++j) {
    grid.push_back(make_rational(BigInt(static_cast<unsigned long>(j)),
                                 BigInt(static_cast<unsigned long>(grid_points))));
  }
  for (const auto& p : g.z_points()) grid.push_back(p.z);
  for (const auto& x : f.xs()) {
    if (x >= 0 && x <= 1) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto levels = c_gamma_sets(g.config(), h, g.depth());
  const IntervalUnion& c_deep = levels.back().c_set;

  struct NearZero {
    Rational x;
    bool in_c;
  };
  std::vector<NearZero> near;
  for (const auto& x : grid) {
    Rational gx = g.eval(x);
    if (abs(f.eval1(x) - gx) <= tol) near.push_back({x, c_deep.contains(gx)});
  }

  IsolatedZeroReport rep;
  rep.near_zero_points = near.size();
  Rational lo_band = 4 * g.config().alpha.back();
  Rational hi_band = 4 * g.config().alpha.front();
  for (const auto& a : near) {
    if (!a.in_c) continue;
    ++rep.checked_points;
    for (const auto& b : near) {
      Rational dist = abs(a.x - b.x);
      if (dist > lo_band && dist <= hi_band) rep.violations.push_back({a.x, b.x});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sawtooth

bool SawtoothHypotheses::all() const {
  auto ok = [](const std::vector<bool>& v) {
    for (bool b : v) {
      if (!b) return false;
    }
    return true;
  };
  return ok(modulus_ok) && ok(growth_ok) && ok(b_rule_ok);
}

void SawtoothConfig::validate() const {
  if (a.size() != b.size()) throw std::invalid_argument("SawtoothConfig: a/b length mismatch");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 1 || b[i] < 1) throw std::invalid_argument("SawtoothConfig: entries must be >= 1");
    if (b[i] > a[i]) throw std::invalid_argument("SawtoothConfig: need b_n <= a_n");
  }
}

SawtoothHypotheses SawtoothConfig::hypotheses() const {
  SawtoothHypotheses hy;
  for (int n = 1; n <= depth(); ++n) {
    const BigInt& an = a[static_cast<size_t>(n - 1)];
    BigInt mod_term = h.ceil_inv_reciprocal(dyadic(1, static_cast<unsigned long>(n + 2)));
    hy.modulus_ok.push_back(an >= mod_term);
    hy.growth_ok.push_back(an >= pow_u(2, static_cast<unsigned long>(5 * n * n)));
    hy.b_rule_ok.push_back(b[static_cast<size_t>(n - 1)] == ceil_div(an, BigInt(32)));
  }
  return hy;
}

SawtoothConfig SawtoothConfig::paper(const Modulus& h, int depth) {
  if (depth < 1) throw std::invalid_argument("SawtoothConfig::paper: depth must be >= 1");
  SawtoothConfig cfg;
  cfg.h = h;
  cfg.paper_exact = true;
  for (int n = 1; n <= depth; ++n) {
    BigInt mod_term = h.ceil_inv_reciprocal(dyadic(1, static_cast<unsigned long>(n + 2)));
    BigInt an = std::max(mod_term, pow_u(2, static_cast<unsigned long>(5 * n * n)));
    cfg.a.push_back(an);
    cfg.b.push_back(ceil_div(an, BigInt(32)));
  }
  cfg.validate();
  return cfg;
}

SawtoothConfig SawtoothConfig::desk(const Modulus& h, std::vector<BigInt> a, std::vector<BigInt> b) {
  SawtoothConfig cfg;
  cfg.h = h;
  cfg.a = std::move(a);
  cfg.b = std::move(b);
  cfg.paper_exact = false;
  cfg.validate();
  return cfg;
}

SawtoothSum::SawtoothSum(SawtoothConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rational p(1);
  unsigned __int128 lattice = 1;
  for (int n = 1; n <= cfg_.depth(); ++n) {
    uint64_t an = to_u64_checked(cfg_.a[static_cast<size_t>(n - 1)], "SawtoothSum");
    lattice *= an;
    if (lattice > kMaxLattice) {
      throw std::length_error("SawtoothSum: breakpoint lattice too fine to evaluate");
    }
    a64_.push_back(an);
    p /= static_cast<unsigned long>(an);
    pitch_.push_back(p);
  }
}

const Rational& SawtoothSum::pitch(int n) const {
  if (n < 1 || n > depth()) throw std::out_of_range("SawtoothSum::pitch");
  return pitch_[static_cast<size_t>(n - 1)];
}

uint64_t SawtoothSum::lattice_size(int n) const {
  uint64_t l = 1;
  for (int i = 1; i <= n; ++i) l *= a64_[static_cast<size_t>(i - 1)];
  return l;
}

Rational SawtoothSum::eval_gn(int n, const Rational& x) const {
  if (x < 0 || x > 1) throw std::out_of_range("SawtoothSum: x outside [0,1]");
  const Rational& p = pitch(n);
  Rational t = x / p;
  BigInt i = floor_rat(t);
  Rational frac = t - Rational(i);
  Rational amp = dyadic(1, static_cast<unsigned long>(n));
  bool odd = mpz_odd_p(i.get_mpz_t()) != 0;
  Rational v = amp * (Rational(1) - 2 * frac);
  return odd ? -v : v;
}

Rational SawtoothSum::eval_partial(int upto, const Rational& x) const {
  if (upto < 0 || upto > depth()) throw std::out_of_range("SawtoothSum::eval_partial");
  Rational sum(0);
  for (int n = 1; n <= upto; ++n) sum += eval_gn(n, x);
  return sum;
}

Rational SawtoothSum::eval(const Rational& x) const { return eval_partial(depth(), x); }

Rational SawtoothSum::lip_gn(int n) const {
  return dyadic(2, static_cast<unsigned long>(n)) / pitch(n);
}

Rational SawtoothSum::tail_bound(int n) const {
  if (n < 0) throw std::out_of_range("tail_bound");
  return dyadic(1, static_cast<unsigned long>(n));
}

GridFunction SawtoothSum::sample_grid(size_t points) const {
  std::vector<Rational> xs;
  std::vector<std::vector<Rational>> ys;
  for (size_t j = 0; j <= points; ++j) {
    Rational x = make_rational(BigInt(static_cast<unsigned long>(j)),
                               BigInt(static_cast<unsigned long>(points)));
    xs.push_back(x);
    ys.push_back({eval(x)});
  }
  return GridFunction(std::move(xs), std::move(ys));
}

SawtoothSum sawtooth_g(SawtoothConfig cfg) { return SawtoothSum(std::move(cfg)); }

// ---------------------------------------------------------------------------
// Witness level tree

namespace {

struct PartialSum {
  const GridFunction* f;
  const SawtoothSum* g;
  int upto;
  Rational operator()(const Rational& x) const { return f->eval1(x) + g->eval_partial(upto, x); }
};

// leftmost exact root of F - y on [lo, hi]; F is affine between consecutive
// knots, the knot list must include lo and hi
std::optional<Rational> leftmost_root(const PartialSum& F, const std::vector<Rational>& knots,
                                      const Rational& y) {
  Rational v0 = F(knots.front()) - y;
  if (v0 == 0) return knots.front();
  for (size_t i = 1; i < knots.size(); ++i) {
    Rational v1 = F(knots[i]) - y;
    bool crosses = (v0 <= 0 && v1 >= 0) || (v0 >= 0 && v1 <= 0);
    if (crosses) {
      if (v0 == 0) return knots[i - 1];
      Rational slope = (v1 - v0) / (knots[i] - knots[i - 1]);
      if (slope == 0) return knots[i - 1];
      return knots[i - 1] - v0 / slope;
    }
    v0 = v1;
  }
  return std::nullopt;
}

std::vector<Rational> knots_in_cell(const GridFunction& f, const Rational& lo, const Rational& hi) {
  std::vector<Rational> knots{lo};
  for (const auto& x : f.xs()) {
    if (x > lo && x < hi) knots.push_back(x);
  }
  knots.push_back(hi);
  return knots;
}

}  // namespace

WitnessTreeResult witness_level_tree(const GridFunction& f, const SawtoothSum& g,
                                     const Rational& y, int levels) {
  if (levels < 1) throw std::invalid_argument("witness_level_tree: levels must be >= 1");
  if (f.dim() != 1) throw std::invalid_argument("witness_level_tree: f must be scalar");
  if (f.domain_lo() != 0 || f.domain_hi() != 1) {
    throw std::invalid_argument("witness_level_tree: f must be defined on [0,1]");
  }

  WitnessTreeResult res;
  res.y = y;

  // find the smallest m with y strictly inside the range of f + G_m
  int m = 0;
  Rational x_root;
  for (int cand = 1; cand + levels <= g.depth(); ++cand) {
    uint64_t lattice = g.lattice_size(cand);
    if (lattice > (uint64_t(1) << 22)) {
      throw std::length_error("witness_level_tree: G_m lattice too fine to scan");
    }
    const Rational& p = g.pitch(cand);
    std::vector<Rational> knots;
    knots.reserve(lattice + 1 + f.xs().size());
    for (uint64_t i = 0; i <= lattice; ++i) {
      knots.push_back(Rational(static_cast<unsigned long>(i)) * p);
    }
    for (const auto& x : f.xs()) {
      if (x > 0 && x < 1) knots.push_back(x);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    PartialSum F{&f, &g, cand};
    Rational lo = F(knots.front()), hi = lo;
    for (const auto& k : knots) {
      Rational v = F(k);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    if (y > lo && y < hi) {
      auto root = leftmost_root(F, knots, y);
      if (root) {
        m = cand;
        x_root = *root;
        break;
      }
    }
  }
  if (m == 0) {
    throw std::domain_error(
        "witness_level_tree: y is not strictly inside the range of any usable f+G_m");
  }
  res.m = m;

  const Rational& pm = g.pitch(m);
  BigInt cell_idx = floor_rat(x_root / pm);
  if (cell_idx >= BigInt(static_cast<unsigned long>(g.lattice_size(m)))) cell_idx -= 1;
  res.root.level = 0;
  BigInt cell_next = cell_idx + 1;
  res.root.cell = RInterval(Rational(cell_idx) * pm, Rational(cell_next) * pm);
  res.root.x = x_root;
  PartialSum Fm{&f, &g, m};
  res.root.residual = abs(Fm(x_root) - y);
  res.root.bracket_u = res.root.bracket_v = x_root;
  res.root.value_u = res.root.value_v = Fm(x_root);
  res.node_count = 1;

  // expand level by level; selection takes the leftmost b_{m+n+1} cells of
  // J_{n+1} inside I cap U(x, p_{m+n}/16)
  std::vector<WitnessNode*> frontier{&res.root};
  for (int n = 0; n < levels; ++n) {
    int lvl = m + n + 1;
    if (lvl > g.depth()) {
      res.failure = "schedule exhausted at level " + std::to_string(n + 1);
      return res;
    }
    const Rational& p_par = g.pitch(m + n);
    const Rational& p_chl = g.pitch(lvl);
    uint64_t b_need = to_u64_checked(g.config().b[static_cast<size_t>(lvl - 1)], "witness tree b");
    Rational amp = dyadic(1, static_cast<unsigned long>(lvl));
    PartialSum F{&f, &g, lvl};

    std::vector<WitnessNode*> next;
    for (WitnessNode* node : frontier) {
      Rational radius = p_par / 16;
      // cells [j p', (j+1) p'] strictly inside the open ball and inside I
      BigInt jmin = floor_rat((node->x - radius) / p_chl) + 1;
      BigInt jmax = ceil_rat((node->x + radius) / p_chl) - 2;
      BigInt cell_lo = floor_rat(node->cell.lo / p_chl);
      BigInt cell_hi = floor_rat(node->cell.hi / p_chl) - 1;
      if (jmin < cell_lo) jmin = cell_lo;
      if (jmax > cell_hi) jmax = cell_hi;
      BigInt avail = jmax - jmin + 1;
      if (avail < BigInt(static_cast<unsigned long>(b_need))) {
        res.failure = "level " + std::to_string(n + 1) + ": only " + avail.get_str() +
                      " candidate cells near x=" + fraction_string(node->x);
        return res;
      }
      node->children.reserve(b_need);
      for (uint64_t t = 0; t < b_need; ++t) {
        BigInt j = jmin + BigInt(static_cast<unsigned long>(t));
        BigInt j1 = j + 1;
        Rational e0 = Rational(j) * p_chl;
        Rational e1 = Rational(j1) * p_chl;
        bool j_odd = mpz_odd_p(j.get_mpz_t()) != 0;
        // g_lvl is +amp at even lattice points, -amp at odd ones
        Rational u = j_odd ? e0 : e1;
        Rational v = j_odd ? e1 : e0;
        WitnessNode child;
        child.level = n + 1;
        child.cell = RInterval(e0, e1);
        child.bracket_u = u;
        child.bracket_v = v;
        child.value_u = F(u);
        child.value_v = F(v);
        if (!(child.value_u <= y && y <= child.value_v)) {
          res.failure = "level " + std::to_string(n + 1) + " cell " + j.get_str() +
                        ": bracket certificate failed";
          node->children.push_back(std::move(child));
          return res;
        }
        auto knots = knots_in_cell(f, e0, e1);
        auto root = leftmost_root(F, knots, y);
        if (!root) {
          res.failure = "level " + std::to_string(n + 1) + " cell " + j.get_str() +
                        ": no root despite valid bracket";
          return res;
        }
        child.x = *root;
        child.residual = abs(F(*root) - y);
        node->children.push_back(std::move(child));
        ++res.node_count;
      }
      for (auto& c : node->children) next.push_back(&c);
    }
    frontier = std::move(next);
  }
  res.complete = true;
  return res;
}

bool recheck_witness_tree(const WitnessTreeResult& tree, const GridFunction& f,
                          const SawtoothSum& g) {
  bool ok = true;
  std::function<void(const WitnessNode&, int)> walk = [&](const WitnessNode& node, int level) {
    PartialSum F{&f, &g, tree.m + level};
    if (level > 0) {
      if (F(node.bracket_u) != node.value_u || F(node.bracket_v) != node.value_v) ok = false;
      if (!(node.value_u <= tree.y && tree.y <= node.value_v)) ok = false;
    }
    if (abs(F(node.x) - tree.y) != node.residual) ok = false;
    if (node.cell.length() != g.pitch(tree.m + level)) ok = false;
    for (const auto& c : node.children) walk(c, level + 1);
  };
  walk(tree.root, 0);
  return ok;
}

std::vector<RInterval> witness_leaf_cells(const WitnessTreeResult& tree) {
  std::vector<RInterval> out;
  std::function<void(const WitnessNode&)> walk = [&](const WitnessNode& node) {
    if (node.children.empty()) {
      out.push_back(node.cell);
      return;
    }
    for (const auto& c : node.children) walk(c);
  };
  walk(tree.root);
  return out;
}

}  // namespace fiberdim

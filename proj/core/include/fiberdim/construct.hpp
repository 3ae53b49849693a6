#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fiberdim/grid_function.hpp"
#include "fiberdim/interval.hpp"
#include "fiberdim/rational.hpp"

namespace fiberdim {

// Strictly increasing modulus with h(0) = 0. Linear(c): c*t. Hoelder(c,a): c*t^a.
class Modulus {
 public:
  enum class Family { linear, hoelder };

  static Modulus linear(Rational c);
  static Modulus hoelder(Rational c, Rational alpha);

  Family family() const { return family_; }
  const Rational& c() const { return c_; }
  const Rational& alpha() const { return alpha_; }

  double eval(double t) const;
  double inverse(double y) const;

  bool exact() const { return family_ == Family::linear; }
  Rational eval_exact(const Rational& t) const;  // linear only
  // Rational upper bound on h(t), outward-rounded for the hoelder family.
  Rational eval_upper(const Rational& t) const;
  // ceil(1 / h^-1(y)) in exact big-integer arithmetic (rational c and alpha).
  BigInt ceil_inv_reciprocal(const Rational& y) const;

 private:
  Family family_ = Family::linear;
  Rational c_;
  Rational alpha_;
};

// Doubling modulus that strictly dominates the family oscillation.
Modulus modulus_for_lipschitz(const Rational& L);
Modulus modulus_for_hoelder(const Rational& c, const Rational& alpha);

// g(x) = y0 + h(|x - x0|); exact evaluation plus a sampled grid view.
class ConeFunction {
 public:
  ConeFunction(Rational x0, Rational y0, Modulus h);
  const Rational& x0() const { return x0_; }
  const Rational& y0() const { return y0_; }
  const Modulus& modulus() const { return h_; }
  double eval(double x) const;
  Rational eval_exact(const Rational& x) const;  // exact moduli only
  GridFunction to_grid(size_t points = 4096) const;

 private:
  Rational x0_, y0_;
  Modulus h_;
};

ConeFunction cone_function(const Rational& x0, const Rational& y0, const Modulus& h);

// alpha_1..alpha_N with alpha_0 = 1/2 implied and alpha_{n+1} <= alpha_n / 2.
struct StaircaseConfig {
  std::vector<Rational> alpha;
  void validate() const;
  int depth() const { return static_cast<int>(alpha.size()); }
};

// Truncated staircase: sign points z_{k1..kn} = 1/2 + sum k_i alpha_i with
// values 1/2 + sum k_i 2^-(i+1), extended by g(x) = sup{g(z) : z <= x}, g(0)=0.
class StaircaseFunction {
 public:
  explicit StaircaseFunction(StaircaseConfig cfg);
  const StaircaseConfig& config() const { return cfg_; }
  int depth() const { return cfg_.depth(); }

  Rational eval(const Rational& x) const;
  // value at the maximal depth-N point: 1 - 2^-(N+1) (truncation, flagged)
  Rational max_value() const;

  struct ZPoint {
    Rational z;
    Rational g;
  };
  // sorted truncated Z including 0
  std::vector<ZPoint> z_points() const;

  // diameter of {z in Z_N : g(z) in ((i-1)/2^n, i/2^n)}; equals
  // 2 * sum_{k=n+1}^{N} alpha_k for every i when n < N
  Rational preimage_diameter(int n, uint64_t i) const;

 private:
  StaircaseConfig cfg_;
};

StaircaseFunction staircase_g(StaircaseConfig cfg);

struct GammaSegment {
  Rational x;
  IntervalUnion span;
};

struct CGammaLevel {
  IntervalUnion c_set;
  std::vector<GammaSegment> gamma;  // 2^n segments, possibly clipped empty
};

// C_0 = [0,1], Gamma_0 = {1/2} x [0,1];
// C_{n+1} = C_n minus open balls U(i/2^{n+1}, h(4 alpha_{n+1}));
// Gamma_{n+1} glues the clipped dyadic strips onto the depth-(n+1) sign points.
// Throws when h(4 alpha_{n+1}) >= 2^-(n+2) (the alpha schedule must shrink).
std::vector<CGammaLevel> c_gamma_sets(const StaircaseConfig& cfg, const Modulus& h, int depth);

bool gamma_membership(const GridFunction& f, const std::vector<GammaSegment>& gamma);

using FunctionSampler = std::function<GridFunction(uint64_t seed, uint64_t index)>;

// Seeded piecewise-linear function with |slope| <= L on a uniform grid,
// passing exactly through (x0, y0). Slopes are dyadic multiples of L so the
// function is exact.
GridFunction sampled_lipschitz_function(const Rational& x0, const Rational& y0, const Rational& L,
                                        size_t segments, uint64_t seed, uint64_t index);

// Halves alpha_{n+1} from alpha_n/2 until the Monte Carlo retention estimate
// over `trials` samples meets mu(pi(G_{n+1}) cap pi(G_n)) >= mu(pi(G_n)) - 2^-(n+2)
// with a one-sided 2 sigma margin. Deterministic given the seed.
StaircaseConfig choose_alpha_mc(const FunctionSampler& sampler, const Modulus& h, int depth,
                                int trials, uint64_t seed);

struct IsolatedZeroReport {
  struct Violation {
    Rational x, z;
  };
  size_t near_zero_points = 0;
  size_t checked_points = 0;
  std::vector<Violation> violations;
};

// For every grid point x with |f(x)-g(x)| <= tol and g(x) in C_depth, checks
// that no other near-zero grid point sits at distance in (4 alpha_N, 4 alpha_1].
IsolatedZeroReport verify_isolated_zero(const GridFunction& f, const StaircaseFunction& g,
                                        const Modulus& h, const Rational& tol,
                                        size_t grid_points = 4096);

struct SawtoothHypotheses {
  std::vector<bool> modulus_ok;  // a_n >= 1/h^-1(2^-(n+2))
  std::vector<bool> growth_ok;   // a_n >= 2^{5 n^2}
  std::vector<bool> b_rule_ok;   // b_n == ceil(a_n / 32)
  bool all() const;
};

struct SawtoothConfig {
  Modulus h;
  std::vector<BigInt> a;
  std::vector<BigInt> b;
  bool paper_exact = false;

  int depth() const { return static_cast<int>(a.size()); }
  void validate() const;
  SawtoothHypotheses hypotheses() const;

  // a_n = max{ceil(1/h^-1(2^-(n+2))), 2^{5n^2}}, b_n = ceil(a_n/32), exact.
  static SawtoothConfig paper(const Modulus& h, int depth);
  static SawtoothConfig desk(const Modulus& h, std::vector<BigInt> a, std::vector<BigInt> b);
};

// g = sum g_n with g_n(i p_n) = (-1)^i 2^-n and affine between; evaluated
// lazily so the breakpoint lattice is never materialized.
class SawtoothSum {
 public:
  explicit SawtoothSum(SawtoothConfig cfg);
  const SawtoothConfig& config() const { return cfg_; }
  int depth() const { return cfg_.depth(); }
  const Rational& pitch(int n) const;  // p_n = 1/(a_1..a_n)

  Rational eval_gn(int n, const Rational& x) const;
  Rational eval_partial(int upto, const Rational& x) const;  // G_n
  Rational eval(const Rational& x) const;

  Rational lip_gn(int n) const;        // 2^{1-n} / p_n, exact
  Rational tail_bound(int n) const;    // sup-norm of the tail beyond level n: 2^-n
  uint64_t lattice_size(int n) const;  // a_1..a_n, guarded

  GridFunction sample_grid(size_t points) const;

 private:
  SawtoothConfig cfg_;
  std::vector<uint64_t> a64_;
  std::vector<Rational> pitch_;
};

SawtoothSum sawtooth_g(SawtoothConfig cfg);

struct WitnessNode {
  int level = 0;
  RInterval cell;
  Rational x;
  Rational residual;
  Rational bracket_u, bracket_v;    // g_{m+n+1} = -/+ 2^-(m+n+1) endpoints
  Rational value_u, value_v;        // (f + G_{m+n+1}) there
  std::vector<WitnessNode> children;
};

struct WitnessTreeResult {
  bool complete = false;
  int m = 0;
  Rational y;
  WitnessNode root;
  size_t node_count = 0;
  std::string failure;  // names the first failing node when not complete
};

// Root tracking of (f + G_{m+n})(x_{i1..in}) = y: finds m and the leftmost
// root x_empty, then per node certifies the sign bracket
// (f+G_{m+n+1})(u) <= y <= (f+G_{m+n+1})(v) exactly before taking the
// leftmost exact piecewise-linear root in each selected cell.
WitnessTreeResult witness_level_tree(const GridFunction& f, const SawtoothSum& g,
                                     const Rational& y, int levels);

// Independent re-verification of every stored bracket certificate.
bool recheck_witness_tree(const WitnessTreeResult& tree, const GridFunction& f,
                          const SawtoothSum& g);

// Deepest-level cells of the witness tree as an interval union.
std::vector<RInterval> witness_leaf_cells(const WitnessTreeResult& tree);

}  // namespace fiberdim

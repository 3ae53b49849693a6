#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fiberdim/cantor.hpp"
#include "fiberdim/rational.hpp"
#include "fiberdim/schedule.hpp"

namespace fiberdim {

enum class GaugeFamily { power, power_log, tabulated };

// Non-decreasing gauge with phi(0) = 0. Power(s): r^s. PowerLog(s,t):
// r^s (log 1/r)^t on (0, r0], constant beyond the largest r0 keeping the
// formula non-decreasing. Tabulated: monotone sample list, linearly
// interpolated.
class Gauge {
 public:
  static Gauge power(Rational s);
  static Gauge power_log(Rational s, Rational t);
  static Gauge tabulated(std::vector<std::pair<double, double>> samples);

  GaugeFamily family() const { return family_; }
  const Rational& s() const { return s_; }
  const Rational& t() const { return t_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }
  double cutoff() const { return cutoff_; }

  double eval(double r) const;

 private:
  Gauge() = default;
  GaugeFamily family_ = GaugeFamily::power;
  Rational s_, t_;
  std::vector<std::pair<double, double>> samples_;
  double cutoff_ = 1.0;
};

enum class ClassMembership { in_class, not_in_class, inconclusive };

// Membership in G(s) = { phi : lim_{r->0+} phi(r)/r^s = infinity }, decided
// analytically for the parametric families.
ClassMembership in_class(const Gauge& g, double s);

struct PhiTransformResult {
  double value = 1.0;
  // sup{r : r phi(1/r) <= x} was empty; by convention the sup is 0 and the
  // transform returns 1.
  bool empty_sup = false;
};

// Phi(x) = sup{r > 0 : r phi(1/r) <= x} + 1 for phi in G(1), by bracket
// growth then bisection to absolute tolerance tol.
PhiTransformResult phi_transform(const Gauge& g, double x, double tol = 1e-9);

// Largest gauge phi in G(1) with phi(r) r^d <= psi(r) on [0,1], defined by
// phi(r) = inf_{u in [r,1]} psi(u) u^-d. Closed form for Power; 1024-point
// log-grid lower envelope otherwise.
Gauge divide_by_power(const Gauge& psi, int d);

struct GaugeScheduleLevel {
  bool growth_ok = false;     // a_n >= (2s)^{8n} a_1..a_{n-1}
  bool transform_ok = false;  // a_n >= Phi(a_1..a_{n+1} / b_1..b_{n+1})
};

struct GaugeScheduleResult {
  Schedule schedule;
  bool verified_exact = false;  // exact big-integer verification (Power gauges)
  std::vector<GaugeScheduleLevel> levels;
};

// Gauge-driven schedule with s = 2^d: a_n is the smallest multiple of
// (2s)^{n+3} dominating both hypothesis terms, so b_n = (2s)^{-(n+3)} a_n is
// an integer and a_k/b_k = (2s)^{k+3} makes the Phi argument independent of
// the chosen a_k. Both hypotheses are re-verified before returning.
GaugeScheduleResult gauge_schedule(const Gauge& g, int d, int depth);

// Sum of phi(diam) over one explicit cover; every diameter must be <= delta.
double hausdorff_premeasure(std::span<const double> diams, const Gauge& g, double delta);

struct GaugeMassReport {
  double sup_ratio = 0.0;
  bool pass = false;
  bool exact = false;  // comparisons ran in exact rational arithmetic
  RInterval witness;
  Rational witness_mu;
  Rational witness_diam;
};

// Same boundary-aligned window family as verify_mass_bound with
// (diam B)^{1-1/k} replaced by phi(diam B); pass iff sup mu(B)/phi(diam B) <= 4.
GaugeMassReport gauge_mass_check(const MassDistribution& mass, const Gauge& g, int max_level);

}  // namespace fiberdim

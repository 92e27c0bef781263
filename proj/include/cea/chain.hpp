#pragma once

// Time-indexed families (s, t) -> M^{[s,t]} of structural matrices and the
// Chapman-Kolmogorov check M^{[s,t]} = M^{[s,tau]} M^{[tau,t]}.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cea/evolution_algebra.hpp"
#include "cea/scalar_fn.hpp"

namespace cea {

// A closed form a(s, t) plus its human-readable rendering.
class Entry {
 public:
  using Fn = std::function<double(double s, double t)>;

  Entry() = default;  // identically zero
  Entry(Fn fn, std::string formula) : fn_(std::move(fn)), formula_(std::move(formula)) {}

  static Entry constant(double value);

  double operator()(double s, double t) const { return fn_ ? fn_(s, t) : 0.0; }
  const std::string& formula() const noexcept { return formula_; }
  bool is_zero() const noexcept { return !fn_; }

 private:
  Fn fn_;
  std::string formula_ = "0";
};

struct DomainWindow {
  double s_min = 0.0;
  double t_max = std::numeric_limits<double>::infinity();
};

class ChainFamily {
 public:
  ChainFamily(std::string generator, int n);

  int dim() const noexcept { return n_; }
  const std::string& generator() const noexcept { return generator_; }

  const Entry& entry(int i, int j) const { return entries_[index(i, j)]; }
  void set_entry(int i, int j, Entry e) { entries_[index(i, j)] = std::move(e); }

  const DomainWindow& window() const noexcept { return window_; }
  void set_window(DomainWindow w);

  // Sorted, unique step thresholds at which entry formulas switch.
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  void add_threshold(double alpha);

  // Functions that must be nonzero at the start time s (ratio denominators).
  const std::vector<ScalarFn>& nonzero_at_start() const noexcept { return nonzero_; }
  void require_nonzero_at_start(ScalarFn fn) { nonzero_.push_back(std::move(fn)); }

  // Generator parameters, kept for reports.
  const std::map<std::string, std::string>& params() const noexcept { return params_; }
  void set_param(const std::string& key, std::string value) { params_[key] = std::move(value); }

  // True when M^{[s, .]} is defined: every declared denominator is finite
  // and nonzero at s, and s lies in the window.
  bool admits_start(double s) const;

  // Throws DomainError outside 0 <= s <= t, the window, or an exclusion.
  Matrix matrix(double s, double t) const;
  Algebra evaluate(double s, double t) const { return Algebra(matrix(s, t)); }

  bool identically_zero() const;

 private:
  std::size_t index(int i, int j) const;

  std::string generator_;
  int n_;
  std::vector<Entry> entries_;
  DomainWindow window_;
  std::vector<double> thresholds_;
  std::vector<ScalarFn> nonzero_;
  std::map<std::string, std::string> params_;
};

inline constexpr std::uint64_t kDefaultSeed = 20160817;

struct Triple {
  double s = 0.0;
  double tau = 0.0;
  double t = 0.0;
};

// Seeded uniform triples in [lo, hi] plus, when `straddle` is set, every
// increasing triple drawn from anchor points {alpha - h, alpha, alpha + h}
// around each chain threshold inside the window.
struct SamplingPlan {
  double lo = 0.1;
  double hi = 10.0;
  int count = 1000;
  std::uint64_t seed = kDefaultSeed;
  bool straddle = true;
};

std::vector<Triple> sample_triples(const ChainFamily& chain, const SamplingPlan& plan);

// Index k of the interval [alpha_k, alpha_{k+1}) containing x, with
// alpha_0 = -inf taken over the chain's thresholds.
int regime_of(const std::vector<double>& thresholds, double x);
std::string regime_label(const std::vector<double>& thresholds, const Triple& tr);

struct CkResidual {
  double relative = 0.0;  // absolute / (1 + largest entry magnitude of the three)
  double absolute = 0.0;  // max |M[s,tau] M[tau,t] - M[s,t]|
};

CkResidual ck_residuals(const ChainFamily& chain, const Triple& tr);
double ck_residual(const ChainFamily& chain, const Triple& tr);

struct TripleOutcome {
  Triple triple;
  double residual = 0.0;
  double abs_residual = 0.0;
  std::string regime;
  std::optional<std::string> error;
};

struct RegimeStats {
  std::string label;
  int samples = 0;
  double max_residual = 0.0;
  Triple worst;
};

struct CkReport {
  int samples = 0;
  int domain_errors = 0;
  double max_residual = 0.0;
  double max_abs_residual = 0.0;
  Triple worst;
  double tol = 0.0;
  bool passed = false;
  std::vector<RegimeStats> regimes;  // sorted by label
  std::vector<TripleOutcome> outcomes;  // in sampling order

  // Regimes whose max residual exceeds tol.
  std::vector<std::string> failing_regimes() const;
};

CkReport reduce_ck(std::vector<TripleOutcome> outcomes, double tol);

// Reference implementation: one triple after another.
CkReport verify_ck_serial(const ChainFamily& chain, const std::vector<Triple>& triples, double tol);
// OpenMP kernel; produces the same report as the serial version.
CkReport verify_ck(const ChainFamily& chain, const std::vector<Triple>& triples, double tol);
CkReport verify_ck(const ChainFamily& chain, const SamplingPlan& plan, double tol);

struct HomogeneityResult {
  bool homogeneous = true;
  double max_difference = 0.0;
  // Two pairs with equal t - s whose matrices differ beyond tol.
  std::optional<std::pair<std::pair<double, double>, std::pair<double, double>>> witness;
};

HomogeneityResult is_time_homogeneous(const ChainFamily& chain, int samples, double tol,
                                      const SamplingPlan& plan = {});

// Block diagonal family M_1 (+) ... (+) M_m on the intersection of windows.
ChainFamily direct_sum(const std::vector<ChainFamily>& chains);

// M'[p(i)][p(j)] = M[i][j] for a permutation p of 0..n-1.
ChainFamily relabel(const ChainFamily& chain, const std::vector<int>& perm);

}  // namespace cea

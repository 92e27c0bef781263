#include "cea/chain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cea {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Entry Entry::constant(double value) {
  if (value == 0.0) return Entry();
  return Entry([value](double, double) { return value; }, format_double(value));
}

ChainFamily::ChainFamily(std::string generator, int n)
    : generator_(std::move(generator)), n_(n), entries_(static_cast<std::size_t>(n) * n) {
  if (n <= 0) throw std::invalid_argument("chain dimension must be positive");
}

std::size_t ChainFamily::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("chain entry index");
  return static_cast<std::size_t>(i) * n_ + j;
}

void ChainFamily::set_window(DomainWindow w) {
  if (!(w.s_min >= 0.0) || !(w.s_min < w.t_max)) {
    throw std::invalid_argument("domain window needs 0 <= s_min < t_max");
  }
  window_ = w;
}

void ChainFamily::add_threshold(double alpha) {
  auto it = std::lower_bound(thresholds_.begin(), thresholds_.end(), alpha);
  if (it == thresholds_.end() || *it != alpha) thresholds_.insert(it, alpha);
}

bool ChainFamily::admits_start(double s) const {
  if (!(s >= window_.s_min) || !(s <= window_.t_max)) return false;
  for (const auto& fn : nonzero_) {
    try {
      double v = fn(s);
      if (!std::isfinite(v) || v == 0.0) return false;
    } catch (const DomainError&) {
      return false;
    }
  }
  return true;
}

Matrix ChainFamily::matrix(double s, double t) const {
  if (!(s >= 0.0) || !(s <= t)) {
    throw DomainError("chain evaluated outside 0 <= s <= t at (" + format_double(s) + ", " +
                      format_double(t) + ")");
  }
  if (s < window_.s_min || t > window_.t_max) {
    throw DomainError("(" + format_double(s) + ", " + format_double(t) +
                      ") lies outside the chain's domain window");
  }
  for (const auto& fn : nonzero_) {
    double v = fn(s);
    if (!std::isfinite(v) || v == 0.0) {
      throw DomainError("denominator " + fn.source() + " vanishes at s = " + format_double(s));
    }
  }
  Matrix m(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      double v = entry(i, j)(s, t);
      if (!std::isfinite(v)) {
        throw DomainError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is not finite at (" + format_double(s) + ", " + format_double(t) +
                          ")");
      }
      m(i, j) = v;
    }
  }
  return m;
}

bool ChainFamily::identically_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.is_zero(); });
}

std::vector<Triple> sample_triples(const ChainFamily& chain, const SamplingPlan& plan) {
  const double lo = std::max(plan.lo, chain.window().s_min);
  const double hi = std::min(plan.hi, chain.window().t_max);
  if (!(lo >= 0.0) || !(lo < hi)) throw std::invalid_argument("empty sampling window");

  std::vector<Triple> out;
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> u(lo, hi);
  const long max_attempts = 100L * std::max(plan.count, 1);
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < plan.count;
       ++attempt) {
    double p[3] = {u(rng), u(rng), u(rng)};
    std::sort(p, p + 3);
    if (!(p[0] < p[1] && p[1] < p[2])) continue;
    if (!chain.admits_start(p[0]) || !chain.admits_start(p[1])) continue;
    out.push_back({p[0], p[1], p[2]});
  }

  if (!plan.straddle) return out;
  std::vector<double> inside;
  for (double a : chain.thresholds())
    if (a > lo && a < hi) inside.push_back(a);
  if (inside.empty()) return out;

  std::vector<double> anchors;
  for (std::size_t k = 0; k < inside.size(); ++k) {
    const double left = k == 0 ? lo : inside[k - 1];
    const double right = k + 1 == inside.size() ? hi : inside[k + 1];
    const double h = std::min(0.25, std::min(inside[k] - left, right - inside[k]) / 4.0);
    anchors.insert(anchors.end(), {inside[k] - h, inside[k], inside[k] + h, 0.5 * (left + inside[k])});
  }
  anchors.push_back(0.5 * (inside.back() + hi));
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (!chain.admits_start(anchors[i])) continue;
    for (std::size_t j = i + 1; j < anchors.size(); ++j) {
      if (!chain.admits_start(anchors[j])) continue;
      for (std::size_t k = j + 1; k < anchors.size(); ++k) {
        out.push_back({anchors[i], anchors[j], anchors[k]});
      }
    }
  }
  return out;
}

int regime_of(const std::vector<double>& thresholds, double x) {
  return static_cast<int>(std::upper_bound(thresholds.begin(), thresholds.end(), x) -
                          thresholds.begin());
}

std::string regime_label(const std::vector<double>& thresholds, const Triple& tr) {
  return "I" + std::to_string(regime_of(thresholds, tr.s)) + "/I" +
         std::to_string(regime_of(thresholds, tr.tau)) + "/I" +
         std::to_string(regime_of(thresholds, tr.t));
}

CkResidual ck_residuals(const ChainFamily& chain, const Triple& tr) {
  const Matrix left = chain.matrix(tr.s, tr.tau);
  const Matrix right = chain.matrix(tr.tau, tr.t);
  const Matrix whole = chain.matrix(tr.s, tr.t);
  const double scale = std::max({left.cwiseAbs().maxCoeff(), right.cwiseAbs().maxCoeff(),
                                 whole.cwiseAbs().maxCoeff()});
  const double diff = (left * right - whole).cwiseAbs().maxCoeff();
  return {diff / (1.0 + scale), diff};
}

double ck_residual(const ChainFamily& chain, const Triple& tr) { return ck_residuals(chain, tr).relative; }

std::vector<std::string> CkReport::failing_regimes() const {
  std::vector<std::string> out;
  for (const auto& r : regimes)
    if (r.max_residual > tol) out.push_back(r.label);
  return out;
}

CkReport reduce_ck(std::vector<TripleOutcome> outcomes, double tol) {
  CkReport report;
  report.tol = tol;
  std::map<std::string, RegimeStats> regimes;
  for (auto& o : outcomes) {
    if (o.error) {
      ++report.domain_errors;
      continue;
    }
    if (std::isnan(o.residual)) o.residual = std::numeric_limits<double>::infinity();
    if (std::isnan(o.abs_residual)) o.abs_residual = std::numeric_limits<double>::infinity();
    report.max_abs_residual = std::max(report.max_abs_residual, o.abs_residual);
    if (report.samples == 0 || o.residual > report.max_residual) {
      report.max_residual = o.residual;
      report.worst = o.triple;
    }
    ++report.samples;
    auto& r = regimes[o.regime];
    if (r.samples == 0 || o.residual > r.max_residual) {
      r.max_residual = o.residual;
      r.worst = o.triple;
    }
    r.label = o.regime;
    ++r.samples;
  }
  for (auto& [label, stats] : regimes) report.regimes.push_back(stats);
  report.passed = report.samples > 0 && report.max_residual <= tol;
  report.outcomes = std::move(outcomes);
  return report;
}

CkReport verify_ck(const ChainFamily& chain, const SamplingPlan& plan, double tol) {
  return verify_ck(chain, sample_triples(chain, plan), tol);
}

HomogeneityResult is_time_homogeneous(const ChainFamily& chain, int samples, double tol,
                                      const SamplingPlan& plan) {
  if (samples < 2) throw std::invalid_argument("is_time_homogeneous needs at least 2 samples");
  const double lo = std::max(plan.lo, chain.window().s_min);
  const double hi = std::min(plan.hi, chain.window().t_max);
  if (!(lo < hi)) throw std::invalid_argument("empty sampling window");

  struct Probe {
    double s1, s2, d;
  };
  std::vector<Probe> probes;
  const double anchor = std::ceil(lo);
  if (anchor + 2.0 <= hi) probes.push_back({anchor, anchor + 1.0, 1.0});
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(probes.size()) < samples) {
    const double d = unit(rng) * (hi - lo) / 2.0;
    const double s1 = lo + unit(rng) * (hi - lo - d);
    const double s2 = lo + unit(rng) * (hi - lo - d);
    probes.push_back({s1, s2, d});
  }

  HomogeneityResult out;
  for (const auto& p : probes) {
    if (!chain.admits_start(p.s1) || !chain.admits_start(p.s2)) continue;
    Matrix m1, m2;
    try {
      m1 = chain.matrix(p.s1, p.s1 + p.d);
      m2 = chain.matrix(p.s2, p.s2 + p.d);
    } catch (const DomainError&) {
      continue;
    }
    const double scale = std::max(m1.cwiseAbs().maxCoeff(), m2.cwiseAbs().maxCoeff());
    const double diff = (m1 - m2).cwiseAbs().maxCoeff() / (1.0 + scale);
    out.max_difference = std::max(out.max_difference, diff);
    if (diff > tol && !out.witness) {
      out.homogeneous = false;
      out.witness = {{p.s1, p.s1 + p.d}, {p.s2, p.s2 + p.d}};
    }
  }
  return out;
}

ChainFamily direct_sum(const std::vector<ChainFamily>& chains) {
  if (chains.empty()) throw std::invalid_argument("direct_sum needs at least one chain");
  int n = 0;
  DomainWindow w;
  std::string names;
  for (const auto& c : chains) {
    n += c.dim();
    w.s_min = std::max(w.s_min, c.window().s_min);
    w.t_max = std::min(w.t_max, c.window().t_max);
    names += (names.empty() ? "" : " (+) ") + c.generator();
  }
  if (!(w.s_min < w.t_max)) throw std::invalid_argument("direct_sum: domain windows do not intersect");

  ChainFamily out("direct-sum", n);
  out.set_window(w);
  out.set_param("blocks", names);
  int offset = 0;
  for (const auto& c : chains) {
    for (int i = 0; i < c.dim(); ++i)
      for (int j = 0; j < c.dim(); ++j) out.set_entry(offset + i, offset + j, c.entry(i, j));
    for (double a : c.thresholds()) out.add_threshold(a);
    for (const auto& fn : c.nonzero_at_start()) out.require_nonzero_at_start(fn);
    offset += c.dim();
  }
  return out;
}

ChainFamily relabel(const ChainFamily& chain, const std::vector<int>& perm) {
  const int n = chain.dim();
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("relabel: wrong permutation length");
  std::vector<bool> hit(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || hit[p]) throw std::invalid_argument("relabel: not a permutation");
    hit[p] = true;
  }
  ChainFamily out(chain.generator(), n);
  out.set_window(chain.window());
  for (const auto& [k, v] : chain.params()) out.set_param(k, v);
  std::string text;
  for (int p : perm) text += (text.empty() ? "" : ",") + std::to_string(p + 1);
  out.set_param("relabel", "[" + text + "]");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.set_entry(perm[i], perm[j], chain.entry(i, j));
  for (double a : chain.thresholds()) out.add_threshold(a);
  for (const auto& fn : chain.nonzero_at_start()) out.require_nonzero_at_start(fn);
  return out;
}

}  // namespace cea

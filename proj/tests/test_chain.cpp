#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <set>

#include "cea/chain.hpp"
#include "cea/config.hpp"
#include "cea/generators.hpp"
#include "oracles.hpp"

using namespace cea;

namespace {

ChainFamily load(const std::string& name) { return load_chain(oracle::preset(name)).chain; }

ChainFamily with_perturbed_a3(const ChainFamily& base, double delta) {
  ChainFamily c = base;
  const Entry old = base.entry(0, 2);
  c.set_entry(0, 2, Entry([old, delta](double s, double t) { return old(s, t) + delta; }, old.formula() + " + d"));
  return c;
}

}  // namespace

TEST_CASE("entries and windows") {
  const Entry zero;
  CHECK(zero.is_zero());
  CHECK(zero(1.0, 2.0) == 0.0);
  CHECK(Entry::constant(0.0).is_zero());
  CHECK(Entry::constant(2.5)(0.0, 9.0) == 2.5);

  ChainFamily c = constant_chain(Matrix::Identity(2, 2));
  CHECK_THROWS_AS(c.matrix(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(c.matrix(-1.0, 1.0), DomainError);
  c.set_window({1.0, 5.0});
  CHECK_THROWS_AS(c.matrix(0.5, 2.0), DomainError);
  CHECK_THROWS_AS(c.matrix(2.0, 6.0), DomainError);
  CHECK(c.matrix(1.0, 5.0) == Matrix::Identity(2, 2));
  CHECK_FALSE(c.admits_start(0.5));
  CHECK(c.admits_start(1.5));
  CHECK_THROWS_AS(c.set_window({3.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(c.set_window({-1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("sampled triples are ordered, seeded and straddle thresholds") {
  const ChainFamily c = load("case222-generic.json");
  SamplingPlan plan;
  plan.count = 300;
  const auto a = sample_triples(c, plan);
  const auto b = sample_triples(c, plan);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() > 300);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].s == b[k].s);
    CHECK(a[k].tau == b[k].tau);
    CHECK(a[k].t == b[k].t);
    CHECK(a[k].s < a[k].tau);
    CHECK(a[k].tau < a[k].t);
    CHECK(a[k].s >= plan.lo);
    CHECK(a[k].t <= plan.hi);
  }
  plan.seed = 99;
  const auto d = sample_triples(c, plan);
  CHECK(d[0].s != a[0].s);

  for (double alpha : c.thresholds()) {
    bool tau_below_t_above = false, exactly_at = false;
    for (const auto& tr : a) {
      if (tr.tau < alpha && tr.t >= alpha) tau_below_t_above = true;
      if (tr.t == alpha || tr.tau == alpha) exactly_at = true;
    }
    CHECK(tau_below_t_above);
    CHECK(exactly_at);
  }

  std::set<std::string> labels;
  for (const auto& tr : a) labels.insert(regime_label(c.thresholds(), tr));
  for (int k = 0; k < 3; ++k) {
    const std::string lo = "I" + std::to_string(k), hi = "I" + std::to_string(k + 1);
    CHECK(labels.count(lo + "/" + lo + "/" + hi) == 1);
    CHECK(labels.count(lo + "/" + hi + "/" + hi) == 1);
  }

  plan.straddle = false;
  CHECK(sample_triples(c, plan).size() == 300);
}

TEST_CASE("regimes") {
  const std::vector<double> th{1.0, 2.0};
  CHECK(regime_of(th, 0.5) == 0);
  CHECK(regime_of(th, 1.0) == 1);
  CHECK(regime_of(th, 1.5) == 1);
  CHECK(regime_of(th, 2.0) == 2);
  CHECK(regime_label(th, {0.5, 1.5, 3.0}) == "I0/I1/I2");
  CHECK(regime_label({}, {0.5, 1.5, 3.0}) == "I0/I0/I0");
}

TEST_CASE("constant idempotent chain has residual exactly zero") {
  Matrix p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  const auto r = verify_ck(constant_chain(p), SamplingPlan{}, 0.0);
  CHECK(r.passed);
  CHECK(r.max_residual == 0.0);
  CHECK(r.samples == 1000);
}

TEST_CASE("perturbing a3 produces the predicted defect") {
  const ChainFamily base = load("prop1-exp.json");
  const ChainFamily bad = with_perturbed_a3(base, 0.01);
  SamplingPlan plan;
  const auto triples = sample_triples(bad, plan);
  const auto r = verify_ck(bad, triples, 1e-9);
  CHECK_FALSE(r.passed);

  // (AB - C)_13 gains 0.01 (a1(s,tau) + a6(tau,t) - 1) = 0.01 (e^(tau-s) + e^(t-tau) - 1)
  double expect_abs = 0.0, expect_rel = 0.0;
  for (const auto& tr : triples) {
    const double defect = 0.01 * (std::exp(tr.tau - tr.s) + std::exp(tr.t - tr.tau) - 1.0);
    expect_abs = std::max(expect_abs, defect);
    double scale = 0.0;
    for (auto [s, t] : {std::pair{tr.s, tr.tau}, {tr.tau, tr.t}, {tr.s, tr.t}})
      scale = std::max(scale, bad.matrix(s, t).cwiseAbs().maxCoeff());
    expect_rel = std::max(expect_rel, defect / (1.0 + scale));
  }
  CHECK(r.max_abs_residual == doctest::Approx(expect_abs).epsilon(1e-9));
  CHECK(r.max_residual == doctest::Approx(expect_rel).epsilon(1e-6));
  CHECK(r.max_abs_residual >= 0.01);
  CHECK(r.max_residual >= 0.005);
}

TEST_CASE("stored residuals match three evaluate calls") {
  const ChainFamily c = load("case111-trig.json");
  SamplingPlan plan;
  plan.count = 50;
  const auto triples = sample_triples(c, plan);
  const auto r = verify_ck(c, triples, 1e-9);
  for (const auto& o : r.outcomes) {
    const Matrix a = c.evaluate(o.triple.s, o.triple.tau).structure();
    const Matrix b = c.evaluate(o.triple.tau, o.triple.t).structure();
    const Matrix w = c.evaluate(o.triple.s, o.triple.t).structure();
    const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), w.cwiseAbs().maxCoeff()});
    const double diff = (a * b - w).cwiseAbs().maxCoeff();
    CHECK(o.abs_residual == diff);
    CHECK(o.residual == diff / (1.0 + scale));
  }
}

TEST_CASE("serial and OpenMP kernels agree exactly") {
  omp_set_num_threads(4);
  for (const char* name : {"prop1-exp.json", "case122-generic.json", "case222-generic.json", "symmetric-generic.json"}) {
    CAPTURE(name);
    const ChainFamily c = load(name);
    const auto triples = sample_triples(c, SamplingPlan{});
    const auto a = verify_ck_serial(c, triples, 1e-9);
    const auto b = verify_ck(c, triples, 1e-9);
    CHECK(a.max_residual == b.max_residual);
    CHECK(a.max_abs_residual == b.max_abs_residual);
    CHECK(a.passed == b.passed);
    CHECK(a.failing_regimes() == b.failing_regimes());
    REQUIRE(a.outcomes.size() == b.outcomes.size());
    for (std::size_t k = 0; k < a.outcomes.size(); ++k) CHECK(a.outcomes[k].residual == b.outcomes[k].residual);
  }
}

TEST_CASE("domain errors are reported per triple") {
  PermutationSpec spec{{0}, {{0, parse("sqrt(5-t)")}}};
  const ChainFamily c = permutation_chain(spec);
  const auto r = verify_ck(c, SamplingPlan{}, 1e-9);
  CHECK(r.domain_errors > 0);
  CHECK(r.samples > 0);
  CHECK(r.passed);
  int errors = 0;
  for (const auto& o : r.outcomes) errors += o.error.has_value();
  CHECK(errors == r.domain_errors);
}

TEST_CASE("step-only chains satisfy CK exactly") {
  PermutationSpec spec{{0, 1, 2}, {{0, StepSpec(2.0)}, {1, StepSpec(4.5)}, {2, StepSpec(7.0)}}};
  const auto r = verify_ck(permutation_chain(spec), SamplingPlan{}, 0.0);
  CHECK(r.passed);
  CHECK(r.max_residual == 0.0);
}

TEST_CASE("direct sums are blockwise") {
  const ChainFamily a = load("prop1-exp.json");
  const ChainFamily b = with_perturbed_a3(load("case111-polynomial.json"), 0.05);
  const ChainFamily ab = direct_sum({a, b});
  CHECK(ab.dim() == 6);
  const Matrix m = ab.matrix(1.0, 2.5);
  CHECK(m.topLeftCorner(3, 3) == a.matrix(1.0, 2.5));
  CHECK(m.bottomRightCorner(3, 3) == b.matrix(1.0, 2.5));
  CHECK(m.topRightCorner(3, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.bottomLeftCorner(3, 3).cwiseAbs().maxCoeff() == 0.0);

  const auto triples = sample_triples(ab, SamplingPlan{});
  const auto ra = verify_ck(a, triples, 1e-9);
  const auto rb = verify_ck(b, triples, 1e-9);
  const auto rab = verify_ck(ab, triples, 1e-9);
  for (std::size_t k = 0; k < triples.size(); ++k) {
    const double expect = std::max(ra.outcomes[k].abs_residual, rb.outcomes[k].abs_residual);
    CHECK(std::fabs(rab.outcomes[k].abs_residual - expect) <= 1e-14 * (1.0 + expect));
  }
  CHECK_FALSE(rab.passed);

  ChainFamily w1 = load("prop1-exp.json");
  ChainFamily w2 = load("prop1-exp.json");
  w1.set_window({0.0, 3.0});
  w2.set_window({1.0, 8.0});
  const auto both = direct_sum({w1, w2});
  CHECK(both.window().s_min == 1.0);
  CHECK(both.window().t_max == 3.0);
  w2.set_window({4.0, 8.0});
  CHECK_THROWS_AS(direct_sum({w1, w2}), std::invalid_argument);
  CHECK_THROWS_AS(direct_sum({}), std::invalid_argument);
}

TEST_CASE("relabelling conjugates by the permutation") {
  const ChainFamily c = load("case222-generic.json");
  const std::vector<int> perm{2, 0, 1};
  const ChainFamily r = relabel(c, perm);
  for (double t : {0.5, 1.5, 3.0, 5.0}) {
    const Matrix m = c.matrix(0.25, t), mr = r.matrix(0.25, t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(mr(perm[i], perm[j]) == m(i, j));
  }
  const auto triples = sample_triples(c, SamplingPlan{});
  const auto a = verify_ck(c, triples, 1e-9), b = verify_ck(r, triples, 1e-9);
  CHECK(a.max_abs_residual == doctest::Approx(b.max_abs_residual).epsilon(1e-12));
  CHECK_THROWS_AS(relabel(c, {0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(relabel(c, {0, 1}), std::invalid_argument);
}

TEST_CASE("time homogeneity") {
  CHECK(is_time_homogeneous(constant_chain(Matrix::Identity(3, 3)), 50, 1e-12).homogeneous);
  PermutationSpec spec{{1, 0, 2}, {{2, parse("exp(t)")}}};
  CHECK(is_time_homogeneous(permutation_chain(spec), 50, 1e-12).homogeneous);

  const auto h = is_time_homogeneous(load("prop1-exp.json"), 50, 1e-9);
  CHECK_FALSE(h.homogeneous);
  REQUIRE(h.witness.has_value());
  CHECK(h.witness->first == std::pair{1.0, 2.0});
  CHECK(h.witness->second == std::pair{2.0, 3.0});
}

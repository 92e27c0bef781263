#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cea/chain.hpp"
#include "cea/config.hpp"
#include "cea/generators.hpp"
#include "oracles.hpp"

using namespace cea;

namespace {

ChainFamily load(const std::string& name) { return load_chain(oracle::preset(name)).chain; }

std::vector<std::pair<double, double>> st_points(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<std::pair<double, double>> out;
  while (static_cast<int>(out.size()) < count) {
    double s = u(rng), t = u(rng);
    if (s > t) std::swap(s, t);
    out.emplace_back(s, t);
  }
  return out;
}

Matrix product_check(const ChainFamily& c, double s, double tau, double t) {
  return c.matrix(s, tau) * c.matrix(tau, t) - c.matrix(s, t);
}

}  // namespace

TEST_CASE("permutation chains vanish iff the permutation has no fixed point") {
  const auto pts = st_points(100, 11);
  for (int n : {3, 4}) {
    std::vector<int> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    int perms = 0;
    do {
      PermutationSpec spec{pi, {}};
      int fixed = 0;
      for (int j = 0; j < n; ++j) {
        if (pi[j] != j) continue;
        if (j % 2 == 0) {
          spec.fixed[j] = parse("exp(" + std::to_string(j + 1) + "*t/4)");
        } else {
          spec.fixed[j] = StepSpec(2.0 + j);
        }
        ++fixed;
      }
      const ChainFamily c = permutation_chain(spec);
      bool all_zero = true;
      for (auto [s, t] : pts) {
        const Matrix m = c.matrix(s, t);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (i != j || pi[j] != j) CHECK(m(i, j) == 0.0);
        if (m.cwiseAbs().maxCoeff() != 0.0) all_zero = false;
      }
      CHECK(all_zero == (fixed == 0));
      CHECK(verify_ck(c, SamplingPlan{.count = 200}, 1e-12).passed);
      ++perms;
    } while (std::next_permutation(pi.begin(), pi.end()));
    CHECK(perms == (n == 3 ? 6 : 24));
  }
}

TEST_CASE("identity permutation with exponential ratios") {
  PermutationSpec spec{{0, 1, 2}, {{0, parse("exp(t)")}, {1, parse("exp(t)")}, {2, parse("exp(t)")}}};
  const ChainFamily c = permutation_chain(spec);
  for (auto [s, t] : st_points(20, 12)) {
    const Matrix m = c.matrix(s, t);
    CHECK((m - std::exp(t - s) * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12 * std::exp(t - s));
  }
}

TEST_CASE("permutation input validation") {
  CHECK_THROWS_AS(permutation_chain({{}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(permutation_chain({{0, 0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(permutation_chain({{0, 2}, {{0, parse("1")}}}), std::invalid_argument);
  CHECK_THROWS_AS(permutation_chain({{1, 0}, {{0, parse("1")}}}), std::invalid_argument);
  CHECK_THROWS_AS(permutation_chain({{0, 1}, {{0, parse("1")}}}), std::invalid_argument);
}

TEST_CASE("case 111 presets satisfy CK") {
  for (const char* name : {"case111-polynomial.json", "case111-trig.json", "case111-mixed.json", "case111-log.json",
                           "prop1-exp.json", "case111-d1-fixture.json"}) {
    CAPTURE(name);
    const ChainFamily c = load(name);
    const auto r = verify_ck(c, SamplingPlan{}, 1e-9);
    CHECK(r.passed);
    CHECK(r.domain_errors == 0);
    // independent product check at a few fixed triples
    for (double s : {0.2, 1.0, 3.0}) {
      const Matrix d = product_check(c, s, s + 0.7, s + 2.1);
      const double scale = 1.0 + c.matrix(s, s + 2.1).cwiseAbs().maxCoeff();
      CHECK(d.cwiseAbs().maxCoeff() <= 1e-12 * scale * scale);
    }
  }
}

TEST_CASE("case 111 degenerate and gauge properties") {
  Case111 p{parse("exp(t)"), parse("1+t"), parse("exp(-t)"), ScalarFn(), ScalarFn(), ScalarFn(), 0.3};
  const ChainFamily diag = triangular3_case111(p);
  for (auto [s, t] : st_points(30, 13)) {
    const Matrix m = diag.matrix(s, t);
    CHECK(m(0, 1) == 0.0);
    CHECK(m(0, 2) == 0.0);
    CHECK(m(1, 2) == 0.0);
  }

  // gamma enters only through gamma(t) - gamma(s)
  Case111 g1{parse("exp(t)"), parse("exp(t/2)"), parse("2+t"), parse("t"), parse("t/4"), parse("t^2"), 0.5};
  Case111 g2 = g1;
  g2.gamma = parse("t^2 + 3");
  const ChainFamily c1 = triangular3_case111(g1), c2 = triangular3_case111(g2);
  for (double s : {0.25, 0.5, 1.0, 2.0})
    for (double t : {2.0, 4.0, 8.0}) CHECK(c1.matrix(s, t) == c2.matrix(s, t));
}

TEST_CASE("case 112 with vanishing auxiliary functions") {
  Case112 p;
  p.phi1 = parse("exp(t)");
  p.phi4 = parse("exp(2*t)");
  p.xi = parse("sin(t)");
  p.alpha6 = 3.0;
  p.a = 0.7;
  p.b = 1.3;
  const ChainFamily c = triangular3_case112(p);
  for (auto [s, t] : st_points(50, 14)) {
    const Matrix m = c.matrix(s, t);
    CHECK(m(1, 2) == 0.0);
    CHECK(m(0, 2) == 0.0);
  }
  CHECK(verify_ck(c, SamplingPlan{}, 1e-9).passed);
}

TEST_CASE("triangular families are upper triangular with the declared diagonals") {
  for (const char* name : {"prop1-exp.json", "case112-generic.json", "case122-generic.json", "case222-generic.json"}) {
    CAPTURE(name);
    const ChainFamily c = load(name);
    for (auto [s, t] : st_points(40, 15)) {
      const Matrix m = c.matrix(s, t);
      CHECK(m(1, 0) == 0.0);
      CHECK(m(2, 0) == 0.0);
      CHECK(m(2, 1) == 0.0);
    }
  }
  const ChainFamily c = load("case222-generic.json");
  CHECK(c.thresholds() == std::vector<double>{1.0, 2.5, 4.0});
  const Matrix before = c.matrix(0.2, 0.9), after = c.matrix(0.2, 5.0);
  CHECK(before.diagonal() == Eigen::Vector3d(1, 1, 1));
  CHECK(after.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("threshold ordering is enforced") {
  Case122 p;
  p.alpha4 = 3.0;
  p.alpha6 = 2.0;
  CHECK_THROWS_AS(triangular3_case122(p), std::invalid_argument);
  Case222 q;
  q.alpha1 = 1.0;
  q.alpha4 = 1.0;
  q.alpha6 = 2.0;
  CHECK_THROWS_AS(triangular3_case222(q), std::invalid_argument);
}

TEST_CASE("step cases fail CK exactly in the predicted regimes") {
  const auto r122 = verify_ck(load("case122-generic.json"), SamplingPlan{}, 1e-9);
  CHECK_FALSE(r122.passed);
  CHECK(r122.failing_regimes() == std::vector<std::string>{"I0/I0/I1"});

  const auto r222 = verify_ck(load("case222-generic.json"), SamplingPlan{}, 1e-9);
  CHECK_FALSE(r222.passed);
  CHECK(r222.failing_regimes() == std::vector<std::string>{"I0/I0/I1", "I0/I0/I2", "I0/I1/I2", "I1/I1/I2"});

  for (const char* name : {"case112-generic.json", "case122-constrained.json", "case222-constrained.json"}) {
    CAPTURE(name);
    const auto r = verify_ck(load(name), SamplingPlan{}, 1e-9);
    CHECK(r.passed);
    CHECK(r.failing_regimes().empty());
  }
}

TEST_CASE("similar cases are relabellings") {
  const LoadedChain base112 = load_chain(oracle::preset("case112-generic.json"));
  const LoadedChain base122 = load_chain(oracle::preset("case122-constrained.json"));
  const ChainFamily& c112 = base112.chain;
  const ChainFamily& c122 = base122.chain;
  // diagonal slot that carries each original diagonal entry
  for (auto tag : {SimilarCase::C121, SimilarCase::C211, SimilarCase::C221, SimilarCase::C212}) {
    const auto perm = similar_case_permutation(tag);
    const bool from112 = tag == SimilarCase::C121 || tag == SimilarCase::C211;
    const ChainFamily& base = from112 ? c112 : c122;
    const ChainFamily r = relabel(base, perm);
    const auto rep = verify_ck(r, SamplingPlan{}, 1e-9);
    CHECK(rep.passed);
    for (auto [s, t] : st_points(20, 16)) {
      const Matrix m = base.matrix(s, t), mr = r.matrix(s, t);
      for (int i = 0; i < 3; ++i) CHECK(mr(perm[i], perm[i]) == m(i, i));
    }
  }
  CHECK(similar_case_permutation(SimilarCase::C121) == std::vector<int>{0, 2, 1});
  CHECK_THROWS_AS(triangular3_similar(SimilarCase::C221, Case112{}), std::invalid_argument);
  CHECK_THROWS_AS(triangular3_similar(SimilarCase::C121, Case122{}), std::invalid_argument);

  // case121 preset: the step sits in the middle slot
  const ChainFamily c121 = load("case121.json");
  REQUIRE(c121.thresholds().size() == 1);
  const double alpha = c121.thresholds()[0];
  CHECK(c121.matrix(0.1, alpha * 0.5)(1, 1) == 1.0);
  CHECK(c121.matrix(0.1, alpha)(1, 1) == 0.0);
}

TEST_CASE("constant chains") {
  Matrix p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  const ChainFamily c = constant_chain(p);
  CHECK(c.matrix(0.0, 7.0) == p);
  CHECK_THROWS_AS(constant_chain(Matrix(2, 3)), std::invalid_argument);
  Matrix bad = p;
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(constant_chain(bad), std::invalid_argument);
}

TEST_CASE("symmetric family") {
  SymmetricParams control{{parse("1"), parse("1")}, {{parse("0.5"), parse("0.5")}, {parse("0.5"), parse("0.5")}}};
  const auto ctl = symmetric_chain(control, 1e-9);
  CHECK(ctl.diagnostics.samples > 0);
  CHECK(ctl.diagnostics.each_f == 0.0);
  CHECK(ctl.diagnostics.each_g == 0.0);
  const auto rc = verify_ck(ctl.chain, SamplingPlan{}, 0.0);
  CHECK(rc.passed);
  CHECK(rc.max_residual == 0.0);

  // Phi equal to gamma makes every entry vanish
  SymmetricParams zero{{parse("exp(t)"), parse("exp(t)")},
                       {{parse("exp(t)"), parse("exp(t)")}, {parse("exp(t)"), parse("exp(t)")}}};
  const auto z = symmetric_chain(zero, 1e-12);
  for (auto [s, t] : st_points(20, 17)) CHECK(z.chain.matrix(s, t).cwiseAbs().maxCoeff() == 0.0);

  SymmetricParams broken{{parse("exp(t)"), parse("2*exp(t)")}, {{parse("0"), parse("0")}, {parse("1"), parse("0")}}};
  try {
    symmetric_chain(broken, 1e-9);
    FAIL("asymmetric structure accepted");
  } catch (const SymmetryError& e) {
    CHECK(e.i == 0);
    CHECK(e.k == 1);
    CHECK(e.gap > 0.0);
    CHECK(std::string(e.what()).find("a(1,2)") != std::string::npos);
  }

  // generic: diagnostics recomputed at one triple from the raw matrices
  const LoadedChain gen = load_chain(oracle::preset("symmetric-generic.json"));
  REQUIRE(gen.diagnostics.has_value());
  CHECK(gen.diagnostics->samples > 0);
  const Triple tr{0.5, 1.25, 3.0};
  const auto one = row_sum_diagnostics(gen.chain, {tr});
  const Matrix l = gen.chain.matrix(tr.s, tr.tau), r = gen.chain.matrix(tr.tau, tr.t), w = gen.chain.matrix(tr.s, tr.t);
  double scale = 1.0 + std::max({l.cwiseAbs().maxCoeff(), r.cwiseAbs().maxCoeff(), w.cwiseAbs().maxCoeff()});
  double each_f = 0.0, each_g = 0.0;
  for (int i = 0; i < 3; ++i) {
    double fl = 0, fr = 0, fw = 0;
    for (int j = 0; j < 3; ++j) {
      fl += l(i, j);
      fr += r(i, j);
      fw += w(i, j);
    }
    each_f = std::max(each_f, std::fabs(fw - fl * fr));
    for (int k = 0; k < 3; ++k) each_g = std::max(each_g, std::fabs((fw - w(i, k)) - fl * (fr - r(i, k))));
  }
  CHECK(one.each_f == doctest::Approx(each_f / scale).epsilon(1e-12));
  CHECK(one.each_g == doctest::Approx(each_g / scale).epsilon(1e-12));

  const auto rg = verify_ck(gen.chain, SamplingPlan{}, 1e-9);
  CHECK_FALSE(rg.passed);
  CHECK(rg.samples == 1000);
}

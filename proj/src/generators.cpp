#include "cea/generators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cea {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// f rendered as a function of `var`, bracketed.
std::string at(const ScalarFn& f, const char* var) { return "(" + f.source_in(var) + ")"; }

std::string ratio_text(const ScalarFn& phi) { return at(phi, "t") + "/" + at(phi, "s"); }

std::string step_text(double alpha) { return "[t < " + num(alpha) + "]"; }

std::string branch(double alpha, const std::string& below, const std::string& above) {
  return "t < " + num(alpha) + " ? " + below + " : " + above;
}

Entry ratio_entry(const ScalarFn& phi) {
  return Entry([phi](double s, double t) { return phi(t) / phi(s); }, ratio_text(phi));
}

Entry step_entry(double alpha) {
  StepSpec spec(alpha);
  return Entry([spec](double s, double t) { return cantor2_step(spec, s, t); }, step_text(alpha));
}

Entry cantor_entry(const CantorSecond& sol) {
  if (const auto* phi = std::get_if<ScalarFn>(&sol)) return ratio_entry(*phi);
  return step_entry(std::get<StepSpec>(sol).alpha());
}

void set_fn(ChainFamily& c, const std::string& key, const ScalarFn& f) { c.set_param(key, f.source()); }

}  // namespace

ChainFamily permutation_chain(const PermutationSpec& spec) {
  const int n = static_cast<int>(spec.pi.size());
  if (n == 0) throw std::invalid_argument("permutation is empty");
  std::vector<bool> hit(n, false);
  for (int v : spec.pi) {
    if (v < 0 || v >= n || hit[v]) throw std::invalid_argument("pi is not a permutation of 1..n");
    hit[v] = true;
  }
  for (const auto& [j, sol] : spec.fixed) {
    if (j < 0 || j >= n || spec.pi[j] != j) {
      throw std::invalid_argument("solution given for index " + std::to_string(j + 1) +
                                  ", which is not a fixed point of pi");
    }
  }

  ChainFamily c("permutation", n);
  std::string one_line;
  for (int v : spec.pi) one_line += (one_line.empty() ? "" : ",") + std::to_string(v + 1);
  c.set_param("pi", "[" + one_line + "]");
  for (int j = 0; j < n; ++j) {
    if (spec.pi[j] != j) continue;
    auto it = spec.fixed.find(j);
    if (it == spec.fixed.end()) {
      throw std::invalid_argument("no solution given for fixed point " + std::to_string(j + 1));
    }
    c.set_entry(j, j, cantor_entry(it->second));
    if (const auto* phi = std::get_if<ScalarFn>(&it->second)) {
      c.require_nonzero_at_start(*phi);
      c.set_param("phi" + std::to_string(j + 1), phi->source());
    } else {
      const double alpha = std::get<StepSpec>(it->second).alpha();
      c.add_threshold(alpha);
      c.set_param("alpha" + std::to_string(j + 1), num(alpha));
    }
  }
  return c;
}

ChainFamily triangular3_case111(const Case111& p) {
  ChainFamily c("triangular3-111", 3);
  const auto& [phi1, phi4, phi6, xi, f, gamma, a] = p;
  c.set_entry(0, 0, ratio_entry(phi1));
  c.set_entry(1, 1, ratio_entry(phi4));
  c.set_entry(2, 2, ratio_entry(phi6));
  c.set_entry(0, 1, Entry([=](double s, double t) { return phi4(t) / phi1(s) * (xi(t) - xi(s)); },
                          at(phi4, "t") + "/" + at(phi1, "s") + "*(" + at(xi, "t") + "-" +
                              at(xi, "s") + ")"));
  c.set_entry(1, 2, Entry([=](double s, double t) { return phi6(t) / phi4(s) * (f(t) - f(s)); },
                          at(phi6, "t") + "/" + at(phi4, "s") + "*(" + at(f, "t") + "-" +
                              at(f, "s") + ")"));
  c.set_entry(0, 2,
              Entry(
                  [=](double s, double t) {
                    const double fs = f(s), ft = f(t), xs = xi(s), xt = xi(t);
                    return phi6(t) / phi1(s) *
                           (a * fs * xs - ft * xs + (1.0 - a) * ft * xt + gamma(t) - gamma(s));
                  },
                  at(phi6, "t") + "/" + at(phi1, "s") + "*[" + num(a) + "*" + at(f, "s") +
                      at(xi, "s") + " - " + at(f, "t") + at(xi, "s") + " + " + num(1.0 - a) + "*" +
                      at(f, "t") + at(xi, "t") + " + " + at(gamma, "t") + " - " + at(gamma, "s") +
                      "]"));
  for (const auto* phi : {&phi1, &phi4, &phi6}) c.require_nonzero_at_start(*phi);
  set_fn(c, "phi1", phi1);
  set_fn(c, "phi4", phi4);
  set_fn(c, "phi6", phi6);
  set_fn(c, "xi", xi);
  set_fn(c, "f", f);
  set_fn(c, "gamma", gamma);
  c.set_param("a", num(a));
  return c;
}

ChainFamily triangular3_case112(const Case112& p) {
  ChainFamily c("triangular3-112", 3);
  const auto& [phi1, phi4, xi, alpha6, beta, gamma, theta, v, a, b] = p;
  c.set_entry(0, 0, ratio_entry(phi1));
  c.set_entry(1, 1, ratio_entry(phi4));
  c.set_entry(2, 2, step_entry(alpha6));
  c.set_entry(0, 1, Entry([=](double s, double t) { return phi4(t) / phi1(s) * (xi(t) - xi(s)); },
                          at(phi4, "t") + "/" + at(phi1, "s") + "*(" + at(xi, "t") + "-" +
                              at(xi, "s") + ")"));
  c.set_entry(1, 2,
              Entry(
                  [=](double s, double t) {
                    const double top = t < alpha6 ? beta(t) - beta(s) : gamma(t);
                    return top / phi4(s);
                  },
                  "1/" + at(phi4, "s") + "*{" +
                      branch(alpha6, at(beta, "t") + "-" + at(beta, "s"), at(gamma, "t")) + "}"));
  c.set_entry(0, 2,
              Entry(
                  [=](double s, double t) {
                    const double xs = xi(s);
                    double top;
                    if (t < alpha6) {
                      const double bs = beta(s), bt = beta(t);
                      top = a * bs * xs - bt * xs + (1.0 - a) * bt * xi(t) + theta(t) - theta(s);
                    } else {
                      top = gamma(t) * (v(t) + b * xi(t) - xs);
                    }
                    return top / phi1(s);
                  },
                  "1/" + at(phi1, "s") + "*{" +
                      branch(alpha6,
                             num(a) + "*" + at(beta, "s") + at(xi, "s") + " - " + at(beta, "t") +
                                 at(xi, "s") + " + " + num(1.0 - a) + "*" + at(beta, "t") +
                                 at(xi, "t") + " + " + at(theta, "t") + " - " + at(theta, "s"),
                             at(gamma, "t") + "*(" + at(v, "t") + " + " + num(b) + "*" +
                                 at(xi, "t") + " - " + at(xi, "s") + ")") +
                      "}"));
  c.add_threshold(alpha6);
  c.require_nonzero_at_start(phi1);
  c.require_nonzero_at_start(phi4);
  set_fn(c, "phi1", phi1);
  set_fn(c, "phi4", phi4);
  set_fn(c, "xi", xi);
  c.set_param("alpha6", num(alpha6));
  set_fn(c, "beta", beta);
  set_fn(c, "gamma", gamma);
  set_fn(c, "theta", theta);
  set_fn(c, "v", v);
  c.set_param("a", num(a));
  c.set_param("b", num(b));
  return c;
}

ChainFamily triangular3_case122(const Case122& p) {
  const auto& [phi1, alpha4, alpha6, omega, delta, zeta, pfn, d, e, m, a] = p;
  if (!(alpha4 < alpha6)) throw std::invalid_argument("case 122 requires alpha4 < alpha6");

  ChainFamily c("triangular3-122", 3);
  c.set_entry(0, 0, ratio_entry(phi1));
  c.set_entry(1, 1, step_entry(alpha4));
  c.set_entry(2, 2, step_entry(alpha6));
  c.set_entry(0, 1,
              Entry(
                  [=](double s, double t) {
                    const double top = t < alpha4 ? omega(t) - omega(s) : delta(t);
                    return top / phi1(s);
                  },
                  "1/" + at(phi1, "s") + "*{" +
                      branch(alpha4, at(omega, "t") + "-" + at(omega, "s"), at(delta, "t")) + "}"));
  c.set_entry(1, 2,
              Entry(
                  [=](double s, double t) {
                    if (t < alpha4) return zeta(t) - zeta(s);
                    if (t < alpha6) return pfn(s);
                    return 0.0;
                  },
                  branch(alpha4, at(zeta, "t") + "-" + at(zeta, "s"),
                         branch(alpha6, at(pfn, "s"), "0"))));
  c.set_entry(0, 2,
              Entry(
                  [=](double s, double t) {
                    double top;
                    if (t < alpha4) {
                      const double zs = zeta(s), zt = zeta(t), ws = omega(s);
                      top = a * zs * ws - zt * ws + (1.0 - a) * zt * omega(t) + d(t) - d(s);
                    } else if (t < alpha6) {
                      top = a * delta(s) * pfn(s) - (1.0 + a) * delta(t) * pfn(t) + e(t) - e(s);
                    } else {
                      top = m(t);
                    }
                    return top / phi1(s);
                  },
                  "1/" + at(phi1, "s") + "*{" +
                      branch(alpha4,
                             num(a) + "*" + at(zeta, "s") + at(omega, "s") + " - " +
                                 at(zeta, "t") + at(omega, "s") + " + " + num(1.0 - a) + "*" +
                                 at(zeta, "t") + at(omega, "t") + " + " + at(d, "t") + " - " +
                                 at(d, "s"),
                             branch(alpha6,
                                    num(a) + "*" + at(delta, "s") + at(pfn, "s") + " - " +
                                        num(1.0 + a) + "*" + at(delta, "t") + at(pfn, "t") +
                                        " + " + at(e, "t") + " - " + at(e, "s"),
                                    at(m, "t"))) +
                      "}"));
  c.add_threshold(alpha4);
  c.add_threshold(alpha6);
  c.require_nonzero_at_start(phi1);
  set_fn(c, "phi1", phi1);
  c.set_param("alpha4", num(alpha4));
  c.set_param("alpha6", num(alpha6));
  set_fn(c, "omega", omega);
  set_fn(c, "delta", delta);
  set_fn(c, "zeta", zeta);
  set_fn(c, "p", pfn);
  set_fn(c, "d", d);
  set_fn(c, "e", e);
  set_fn(c, "m", m);
  c.set_param("a", num(a));
  return c;
}

ChainFamily triangular3_case222(const Case222& p) {
  const auto& [alpha1, alpha4, alpha6, l, w, A, B, cfn, g, q, a, b] = p;
  if (!(alpha1 < alpha4 && alpha4 < alpha6)) {
    throw std::invalid_argument("case 222 requires alpha1 < alpha4 < alpha6");
  }

  ChainFamily c("triangular3-222", 3);
  c.set_entry(0, 0, step_entry(alpha1));
  c.set_entry(1, 1, step_entry(alpha4));
  c.set_entry(2, 2, step_entry(alpha6));
  c.set_entry(0, 1,
              Entry(
                  [=](double s, double t) {
                    if (t < alpha1) return l(t) - l(s);
                    if (t < alpha4) return w(s);
                    return 0.0;
                  },
                  branch(alpha1, at(l, "t") + "-" + at(l, "s"), branch(alpha4, at(w, "s"), "0"))));
  c.set_entry(1, 2,
              Entry(
                  [=](double s, double t) {
                    if (t < alpha4) return A(t) - A(s);
                    if (t < alpha6) return B(s);
                    return 0.0;
                  },
                  branch(alpha4, at(A, "t") + "-" + at(A, "s"), branch(alpha6, at(B, "s"), "0"))));
  c.set_entry(0, 2,
              Entry(
                  [=](double s, double t) {
                    if (t < alpha1) {
                      const double As = A(s), At = A(t), ls = l(s);
                      return a * As * ls - At * ls + (1.0 - a) * At * l(t) + cfn(t) - cfn(s);
                    }
                    if (t < alpha4) return (A(t) + b * A(s) + g(s)) * w(s);
                    if (t < alpha6) return q(s);
                    return 0.0;
                  },
                  branch(alpha1,
                         num(a) + "*" + at(A, "s") + at(l, "s") + " - " + at(A, "t") + at(l, "s") +
                             " + " + num(1.0 - a) + "*" + at(A, "t") + at(l, "t") + " + " +
                             at(cfn, "t") + " - " + at(cfn, "s"),
                         branch(alpha4,
                                "(" + at(A, "t") + " + " + num(b) + "*" + at(A, "s") + " + " +
                                    at(g, "s") + ")*" + at(w, "s"),
                                branch(alpha6, at(q, "s"), "0")))));
  c.add_threshold(alpha1);
  c.add_threshold(alpha4);
  c.add_threshold(alpha6);
  c.set_param("alpha1", num(alpha1));
  c.set_param("alpha4", num(alpha4));
  c.set_param("alpha6", num(alpha6));
  set_fn(c, "l", l);
  set_fn(c, "w", w);
  set_fn(c, "A", A);
  set_fn(c, "B", B);
  set_fn(c, "c", cfn);
  set_fn(c, "g", g);
  set_fn(c, "q", q);
  c.set_param("a", num(a));
  c.set_param("b", num(b));
  return c;
}

ChainFamily triangular3(const Triangular3Params& p) {
  return std::visit(
      [](const auto& params) -> ChainFamily {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, Case111>) return triangular3_case111(params);
        if constexpr (std::is_same_v<T, Case112>) return triangular3_case112(params);
        if constexpr (std::is_same_v<T, Case122>) return triangular3_case122(params);
        if constexpr (std::is_same_v<T, Case222>) return triangular3_case222(params);
      },
      p);
}

std::vector<int> similar_case_permutation(SimilarCase tag) {
  switch (tag) {
    case SimilarCase::C121:
      return {0, 2, 1};
    case SimilarCase::C211:
      return {1, 2, 0};
    case SimilarCase::C221:
      return {2, 0, 1};
    case SimilarCase::C212:
      return {1, 0, 2};
  }
  return {0, 1, 2};
}

ChainFamily triangular3_similar(SimilarCase tag, const Case112& p) {
  if (tag != SimilarCase::C121 && tag != SimilarCase::C211) {
    throw std::invalid_argument("only cases 121 and 211 are relabellings of case 112");
  }
  return relabel(triangular3_case112(p), similar_case_permutation(tag));
}

ChainFamily triangular3_similar(SimilarCase tag, const Case122& p) {
  if (tag != SimilarCase::C221 && tag != SimilarCase::C212) {
    throw std::invalid_argument("only cases 221 and 212 are relabellings of case 122");
  }
  return relabel(triangular3_case122(p), similar_case_permutation(tag));
}

ChainFamily constant_chain(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("constant chain needs a square matrix");
  if (!m.allFinite()) throw std::invalid_argument("constant chain has non-finite entries");
  ChainFamily c("constant", static_cast<int>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) c.set_entry(i, j, Entry::constant(m(i, j)));
  return c;
}

SymmetryError::SymmetryError(int i_, int k_, double s_, double t_, double gap_)
    : std::runtime_error("structure matrix is not symmetric: a(" + std::to_string(i_ + 1) + "," +
                         std::to_string(k_ + 1) + ") != a(" + std::to_string(k_ + 1) + "," +
                         std::to_string(i_ + 1) + ") at (s,t) = (" + num(s_) + ", " + num(t_) +
                         "), gap " + num(gap_)),
      i(i_),
      k(k_),
      s(s_),
      t(t_),
      gap(gap_) {}

Eigen::VectorXd row_sums(const Matrix& m) { return m.rowwise().sum(); }

Matrix row_sum_complements(const Matrix& m) {
  return row_sums(m).replicate(1, m.cols()) - m;
}

RowSumDiagnostics row_sum_diagnostics(const ChainFamily& chain, const std::vector<Triple>& triples) {
  RowSumDiagnostics out;
  for (const auto& tr : triples) {
    Matrix left, right, whole;
    try {
      left = chain.matrix(tr.s, tr.tau);
      right = chain.matrix(tr.tau, tr.t);
      whole = chain.matrix(tr.s, tr.t);
    } catch (const DomainError&) {
      continue;
    }
    const double scale = 1.0 + std::max({left.cwiseAbs().maxCoeff(), right.cwiseAbs().maxCoeff(),
                                         whole.cwiseAbs().maxCoeff()});
    const Eigen::VectorXd f_whole = row_sums(whole);
    const Eigen::VectorXd f_left = row_sums(left);
    const Eigen::VectorXd f_right = row_sums(right);
    const Matrix g_whole = row_sum_complements(whole);
    const Matrix g_right = row_sum_complements(right);

    const Eigen::VectorXd df = f_whole - f_left.cwiseProduct(f_right);
    const Matrix dg = g_whole - f_left.asDiagonal() * g_right;
    const double each_f = df.cwiseAbs().maxCoeff() / scale;
    if (out.samples == 0 || each_f > out.each_f) {
      out.each_f = each_f;
      out.worst_each_f = tr;
    }
    out.sum_f = std::max(out.sum_f, std::fabs(df.sum()) / scale);
    out.each_g = std::max(out.each_g, dg.cwiseAbs().maxCoeff() / scale);
    out.sum_g = std::max(out.sum_g, dg.colwise().sum().cwiseAbs().maxCoeff() / scale);
    ++out.samples;
  }
  return out;
}

SymmetricChain symmetric_chain(const SymmetricParams& p, double tol, const SamplingPlan& plan) {
  const int n = static_cast<int>(p.phi.size());
  if (n == 0) throw std::invalid_argument("symmetric chain needs at least one phi");
  if (static_cast<int>(p.gamma.size()) != n) throw std::invalid_argument("gamma must be n x n");
  for (const auto& row : p.gamma)
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("gamma must be n x n");

  ChainFamily c("symmetric", n);
  for (int i = 0; i < n; ++i) {
    const ScalarFn phi = p.phi[i];
    c.require_nonzero_at_start(phi);
    c.set_param("phi" + std::to_string(i + 1), phi.source());
    for (int k = 0; k < n; ++k) {
      const ScalarFn gam = p.gamma[i][k];
      c.set_param("gamma" + std::to_string(i + 1) + std::to_string(k + 1), gam.source());
      c.set_entry(i, k,
                  Entry([phi, gam](double s, double t) { return (phi(t) - gam(t)) / phi(s); },
                        "(" + at(phi, "t") + " - " + at(gam, "t") + ")/" + at(phi, "s")));
    }
  }

  const auto triples = sample_triples(c, plan);
  SymmetricChain out{c, {}, 0.0, 0};
  auto check = [&](double s, double t) {
    Matrix m;
    try {
      m = c.matrix(s, t);
    } catch (const DomainError&) {
      return;
    }
    ++out.symmetry_samples;
    for (int i = 0; i < n; ++i) {
      for (int k = i + 1; k < n; ++k) {
        const double gap = std::fabs(m(i, k) - m(k, i));
        out.max_asymmetry = std::max(out.max_asymmetry, gap);
        if (gap > tol * (1.0 + std::max(std::fabs(m(i, k)), std::fabs(m(k, i))))) {
          throw SymmetryError(i, k, s, t, gap);
        }
      }
    }
  };
  for (const auto& tr : triples) {
    check(tr.s, tr.tau);
    check(tr.tau, tr.t);
    check(tr.s, tr.t);
  }
  out.diagnostics = row_sum_diagnostics(c, triples);
  return out;
}

}  // namespace cea

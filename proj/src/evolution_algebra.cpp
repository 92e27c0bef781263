#include "cea/evolution_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>

namespace cea {

Algebra::Algebra(Matrix structure) : a_(std::move(structure)) {
  if (a_.rows() != a_.cols() || a_.rows() == 0) {
    throw std::invalid_argument("structure matrix must be square and non-empty");
  }
  if (!a_.allFinite()) throw std::invalid_argument("structure matrix has non-finite entries");
}

Algebra Algebra::zero(int n) { return Algebra(Matrix::Zero(n, n)); }

Element multiply(const Algebra& alg, const Element& x, const Element& y) {
  if (x.size() != alg.dim() || y.size() != alg.dim()) {
    throw std::invalid_argument("element dimension " + std::to_string(x.size()) + "/" +
                                std::to_string(y.size()) + " does not match algebra dimension " +
                                std::to_string(alg.dim()));
  }
  return alg.structure().transpose() * x.cwiseProduct(y);
}

Element square(const Algebra& alg, const Element& x) { return multiply(alg, x, x); }

namespace {

// Orthonormal basis (as columns) of the span of the columns of `gen`.
Matrix span_basis(const Matrix& gen, double tol) {
  if (gen.cols() == 0) return Matrix(gen.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(gen, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

Matrix product_space(const Algebra& alg, const Matrix& u, const Matrix& v, double tol) {
  Matrix gen(alg.dim(), u.cols() * v.cols());
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      gen.col(c++) = multiply(alg, u.col(i), v.col(j));
    }
  }
  return span_basis(gen, tol);
}

Matrix sum_space(const std::vector<Matrix>& parts, int n, double tol) {
  Eigen::Index cols = 0;
  for (const auto& p : parts) cols += p.cols();
  Matrix gen(n, cols);
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    gen.middleCols(c, p.cols()) = p;
    c += p.cols();
  }
  return span_basis(gen, tol);
}

std::optional<int> first_zero(const std::vector<int>& dims) {
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k] == 0) return static_cast<int>(k) + 1;
  }
  return std::nullopt;
}

}  // namespace

PowerSequences power_sequences(const Algebra& alg, int k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  const int n = alg.dim();
  const double tol = 1e-10 * (1.0 + alg.max_abs());
  const Matrix whole = Matrix::Identity(n, n);

  PowerSequences out;
  Matrix derived = whole;
  Matrix right = whole;
  std::vector<Matrix> plain{whole};  // plain[k-1] spans A^k

  out.derived.push_back(n);
  out.right.push_back(n);
  out.plain.push_back(n);
  for (int k = 2; k <= k_max; ++k) {
    derived = product_space(alg, derived, derived, tol);
    right = product_space(alg, right, whole, tol);
    std::vector<Matrix> terms;
    for (int i = 1; i < k; ++i) {
      terms.push_back(product_space(alg, plain[i - 1], plain[k - i - 1], tol));
    }
    plain.push_back(sum_space(terms, n, tol));
    out.derived.push_back(static_cast<int>(derived.cols()));
    out.right.push_back(static_cast<int>(right.cols()));
    out.plain.push_back(static_cast<int>(plain.back().cols()));
  }
  out.derived_zero = first_zero(out.derived);
  out.right_zero = first_zero(out.right);
  out.plain_zero = first_zero(out.plain);
  return out;
}

int nilpotency_index_bound(int n) { return (1 << (n - 1)) + 1; }

NilpotencyCertificate is_nilpotent(const Algebra& alg, std::optional<double> tol) {
  const double eps = tol.value_or(alg.default_tolerance());
  const int n = alg.dim();
  auto edge = [&](int i, int j) { return std::fabs(alg(i, j)) > eps; };

  NilpotencyCertificate cert;
  for (int i = 0; i < n; ++i) {
    if (edge(i, i)) {
      cert.cycle = {i};
      return cert;
    }
  }

  // Kahn's algorithm, smallest ready vertex first.
  std::vector<int> in_degree(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (edge(i, j)) ++in_degree[j];
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int j = 0; j < n; ++j)
    if (in_degree[j] == 0) ready.push(j);
  std::vector<bool> done(n, false);
  while (!ready.empty()) {
    int i = ready.top();
    ready.pop();
    cert.order.push_back(i);
    done[i] = true;
    for (int j = 0; j < n; ++j) {
      if (edge(i, j) && --in_degree[j] == 0) ready.push(j);
    }
  }
  if (static_cast<int>(cert.order.size()) == n) {
    cert.nilpotent = true;
    return cert;
  }

  // Every leftover vertex has a leftover predecessor; walk back until a repeat.
  cert.order.clear();
  int v = 0;
  while (done[v]) ++v;
  std::vector<int> seen_at(n, -1);
  std::vector<int> walk;
  while (seen_at[v] < 0) {
    seen_at[v] = static_cast<int>(walk.size());
    walk.push_back(v);
    int pred = 0;
    while (done[pred] || !edge(pred, v)) ++pred;
    v = pred;
  }
  cert.cycle.assign(walk.begin() + seen_at[v], walk.end());
  std::reverse(cert.cycle.begin(), cert.cycle.end());
  // Rotate so the smallest index leads.
  std::rotate(cert.cycle.begin(), std::min_element(cert.cycle.begin(), cert.cycle.end()),
              cert.cycle.end());
  return cert;
}

std::vector<Character> find_characters(const Algebra& alg, std::optional<double> tol) {
  const double eps = tol.value_or(alg.default_tolerance());
  const int n = alg.dim();
  std::vector<Character> out;
  for (int i = 0; i < n; ++i) {
    if (std::fabs(alg(i, i)) <= eps) continue;
    bool column_clear = true;
    for (int j = 0; j < n && column_clear; ++j) {
      if (j != i && std::fabs(alg(j, i)) > eps) column_clear = false;
    }
    if (!column_clear) continue;
    Character c;
    c.index = i;
    c.weights = Eigen::VectorXd::Zero(n);
    c.weights(i) = alg(i, i);
    out.push_back(std::move(c));
  }
  return out;
}

const char* to_string(AbsoluteNilpotents::Kind kind) {
  switch (kind) {
    case AbsoluteNilpotents::Kind::OnlyZero:
      return "only-zero";
    case AbsoluteNilpotents::Kind::All:
      return "all";
    case AbsoluteNilpotents::Kind::Rays:
      return "rays";
    case AbsoluteNilpotents::Kind::Unsupported:
      return "unsupported";
  }
  return "?";
}

AbsoluteNilpotents absolute_nilpotents(const Algebra& alg, std::optional<double> tol) {
  const double eps = tol.value_or(alg.default_tolerance());
  const int n = alg.dim();
  AbsoluteNilpotents out;

  if (alg.max_abs() <= eps) {
    out.kind = AbsoluteNilpotents::Kind::All;
    out.singular = true;
    return out;
  }

  Eigen::JacobiSVD<Matrix> full(alg.structure());
  const auto& sv = full.singularValues();
  out.singular = sv(n - 1) <= std::max(eps, 1e-12 * sv(0));
  if (!out.singular) return out;

  if (n > kMaxConeDimension) {
    out.kind = AbsoluteNilpotents::Kind::Unsupported;
    return out;
  }

  // x^2 = 0  <=>  A^T y = 0 with y_i = x_i^2 >= 0. A ray of that cone is
  // extreme iff its support S leaves a one-dimensional kernel on the columns
  // in S and the kernel vector has one strict sign on S.
  const Matrix at = alg.structure().transpose();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) support.push_back(i);
    const auto m = static_cast<Eigen::Index>(support.size());
    Matrix sub(n, m);
    for (Eigen::Index c = 0; c < m; ++c) sub.col(c) = at.col(support[c]);

    Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cut = std::max(eps, 1e-12 * (s.size() ? s(0) : 0.0));
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    if (m - rank != 1) continue;

    Eigen::VectorXd v = svd.matrixV().col(m - 1);
    if (v.sum() < 0) v = -v;
    const double vmax = v.cwiseAbs().maxCoeff();
    if ((v.array() <= 1e-9 * vmax).any()) continue;

    Eigen::VectorXd ray = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < m; ++c) ray(support[c]) = v(c) / v.maxCoeff();
    bool fresh = std::none_of(out.rays.begin(), out.rays.end(), [&](const auto& r) {
      return (r - ray).cwiseAbs().maxCoeff() <= 1e-9;
    });
    if (fresh) out.rays.push_back(std::move(ray));
  }

  if (out.rays.empty()) return out;
  out.kind = AbsoluteNilpotents::Kind::Rays;
  for (const auto& ray : out.rays) {
    Element x = ray.cwiseSqrt();
    out.samples.push_back(x);
    // Flip the sign of the last supported coordinate.
    for (int i = n - 1; i >= 0; --i) {
      if (x(i) != 0.0) {
        x(i) = -x(i);
        break;
      }
    }
    out.samples.push_back(std::move(x));
  }
  if (out.rays.size() > 1) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    for (const auto& ray : out.rays) sum += ray;
    out.samples.push_back(sum.cwiseSqrt());
  }
  return out;
}

bool is_upper_triangular(const Algebra& alg, double tol) {
  for (int i = 1; i < alg.dim(); ++i)
    for (int j = 0; j < i; ++j)
      if (std::fabs(alg(i, j)) > tol) return false;
  return true;
}

std::vector<Element> idempotents_triangular(const Algebra& alg, std::optional<double> tol) {
  const double eps = tol.value_or(alg.default_tolerance());
  if (!is_upper_triangular(alg, eps)) {
    throw std::invalid_argument("idempotents_triangular: structure matrix is not upper triangular");
  }
  const int n = alg.dim();

  // x_j = a_jj x_j^2 + c_j,  c_j = sum_{i<j} a_ij x_i^2
  std::vector<Element> partial{Element::Zero(n)};
  for (int j = 0; j < n; ++j) {
    std::vector<Element> next;
    for (const auto& x : partial) {
      double c = 0.0;
      for (int i = 0; i < j; ++i) c += alg(i, j) * x(i) * x(i);
      const double a = alg(j, j);
      auto push = [&](double root) {
        Element y = x;
        y(j) = root;
        next.push_back(std::move(y));
      };
      if (std::fabs(a) <= eps) {
        push(c);
        continue;
      }
      const double disc = 1.0 - 4.0 * a * c;
      const double disc_tol = 1e-10 * (1.0 + std::fabs(4.0 * a * c));
      if (std::fabs(disc) <= disc_tol) {
        push(1.0 / (2.0 * a));
      } else if (disc > 0.0) {
        const double r = std::sqrt(disc);
        push((1.0 + r) / (2.0 * a));
        push((1.0 - r) / (2.0 * a));
      }
    }
    partial = std::move(next);
  }

  auto less = [](const Element& p, const Element& q) {
    return std::lexicographical_compare(p.begin(), p.end(), q.begin(), q.end());
  };
  std::vector<Element> out;
  for (auto& x : partial) {
    const double scale = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff());
    bool fresh = std::none_of(out.begin(), out.end(), [&](const Element& y) {
      return (y - x).cwiseAbs().maxCoeff() <= scale;
    });
    if (fresh) out.push_back(std::move(x));
  }
  std::sort(out.begin(), out.end(), less);
  return out;
}

}  // namespace cea

#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline std::string preset(const std::string& name) { return std::string(CEA_PRESET_DIR) + "/" + name; }

// x -> A^T (x o x) - x
inline Vector idempotent_defect(const Matrix& a, const Vector& x) {
  return a.transpose() * x.cwiseProduct(x) - x;
}

// Newton on A^T (x o x) = x from a signed geometric grid of seeds.
inline std::vector<Vector> brute_idempotents(const Matrix& a, double merge_tol = 1e-7) {
  std::vector<double> axis{0.0};
  for (double m : {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0}) {
    axis.push_back(m);
    axis.push_back(-m);
  }
  const int n = static_cast<int>(a.rows());
  std::vector<Vector> roots;
  const int per = static_cast<int>(axis.size());
  int total = 1;
  for (int k = 0; k < n; ++k) total *= per;
  for (int code = 0; code < total; ++code) {
    Vector x(n);
    int c = code;
    for (int k = 0; k < n; ++k) {
      x[k] = axis[c % per];
      c /= per;
    }
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      const Vector f = idempotent_defect(a, x);
      if (!f.allFinite() || x.cwiseAbs().maxCoeff() > 1e8) break;
      const double scale = 1.0 + x.cwiseAbs().maxCoeff();
      if (f.cwiseAbs().maxCoeff() <= 1e-13 * scale * scale) {
        ok = true;
        break;
      }
      const Matrix j = 2.0 * a.transpose() * x.asDiagonal() - Matrix::Identity(n, n);
      const Vector step = j.fullPivLu().solve(f);
      if (!step.allFinite()) break;
      x -= step;
    }
    if (!ok) {
      const Vector f = idempotent_defect(a, x);
      const double scale = 1.0 + x.cwiseAbs().maxCoeff();
      ok = f.allFinite() && f.cwiseAbs().maxCoeff() <= 1e-10 * scale * scale;
    }
    if (!ok) continue;
    const bool seen = std::any_of(roots.begin(), roots.end(), [&](const Vector& r) {
      return (r - x).cwiseAbs().maxCoeff() <= merge_tol * (1.0 + r.cwiseAbs().maxCoeff());
    });
    if (!seen) roots.push_back(x);
  }
  return roots;
}

inline bool same_set(const std::vector<Vector>& a, const std::vector<Vector>& b, double tol) {
  if (a.size() != b.size()) return false;
  auto covered = [tol](const std::vector<Vector>& from, const std::vector<Vector>& in) {
    return std::all_of(from.begin(), from.end(), [&](const Vector& x) {
      return std::any_of(in.begin(), in.end(), [&](const Vector& y) {
        return (x - y).cwiseAbs().maxCoeff() <= tol * (1.0 + y.cwiseAbs().maxCoeff());
      });
    });
  };
  return covered(a, b) && covered(b, a);
}

// Entries uniform in [-2, 2], strictly lower part zero, |diagonal| >= 0.2.
inline Matrix random_triangular(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  std::uniform_real_distribution<double> mag(0.2, 2.0);
  std::bernoulli_distribution sign(0.5);
  Matrix a = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) {
    a(i, i) = sign(rng) ? mag(rng) : -mag(rng);
    for (int j = i + 1; j < 3; ++j) a(i, j) = entry(rng);
  }
  return a;
}

// Discriminants straight from the six entries.
struct RawD {
  double d1, d2, d3, d4, d5;
  bool y_valid;
};

inline RawD raw_discriminants(const Matrix& m) {
  const double a1 = m(0, 0), a2 = m(0, 1), a3 = m(0, 2), a4 = m(1, 1), a5 = m(1, 2), a6 = m(2, 2);
  RawD r{};
  r.d1 = 1.0 - 4.0 * a5 * a6 / (a4 * a4);
  r.d2 = 1.0 - 4.0 * a2 * a4 / (a1 * a1);
  r.d3 = 1.0 - 4.0 * a6 * (a3 / (a1 * a1) + a5 / ((2.0 * a4) * (2.0 * a4)));
  r.y_valid = r.d2 >= 0.0;
  if (r.y_valid) {
    const double y4 = (1.0 + std::sqrt(r.d2)) / (2.0 * a4);
    const double y5 = (1.0 - std::sqrt(r.d2)) / (2.0 * a4);
    r.d4 = 1.0 - 4.0 * a6 * (a3 / (a1 * a1) + a5 * y4 * y4);
    r.d5 = 1.0 - 4.0 * a6 * (a3 / (a1 * a1) + a5 * y5 * y5);
  }
  return r;
}

// Sign of the analytic D1 = 1 - 0.4 (t^2 - s^2) of the sweep fixture.
inline double fixture_d1(double s, double t) { return 1.0 - 0.4 * (t * t - s * s); }

// Boolean matrix power of a 0/1 pattern: nilpotent iff some power vanishes.
inline bool matrix_nilpotent(const Matrix& a) {
  Matrix p = a;
  for (int k = 1; k < a.rows(); ++k) p = p * a;
  return p.cwiseAbs().maxCoeff() == 0.0;
}

// Power sequences by explicit products: plain A^k is spanned by x y with
// x in A^i, y in A^(k-i); right powers A^<k+1> by x y with x in A^<k>, y in A.
inline Vector mult(const Matrix& a, const Vector& x, const Vector& y) {
  Vector out = Vector::Zero(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out[j] += a(i, j) * x[i] * y[i];
  return out;
}

// Orthonormal basis of span(vs) by modified Gram-Schmidt.
inline std::vector<Vector> basis(const std::vector<Vector>& vs) {
  std::vector<Vector> out;
  for (Vector v : vs) {
    for (const auto& q : out) v -= q.dot(v) * q;
    for (const auto& q : out) v -= q.dot(v) * q;
    const double norm = v.norm();
    if (norm > 1e-9) out.push_back(v / norm);
  }
  return out;
}

inline std::vector<Vector> span_products(const Matrix& a, const std::vector<Vector>& xs,
                                         const std::vector<Vector>& ys) {
  std::vector<Vector> prods;
  for (const auto& x : xs)
    for (const auto& y : ys) prods.push_back(mult(a, x, y));
  return basis(prods);
}

// dims[k-1] = dim A^k, k = 1..kmax
inline std::vector<int> plain_power_dims(const Matrix& a, int kmax) {
  std::vector<std::vector<Vector>> pw(kmax + 1);
  std::vector<Vector> e;
  for (int i = 0; i < a.rows(); ++i) e.push_back(Vector::Unit(a.rows(), i));
  pw[1] = basis(e);
  std::vector<int> dims{static_cast<int>(pw[1].size())};
  for (int k = 2; k <= kmax; ++k) {
    std::vector<Vector> all;
    for (int i = 1; i < k; ++i) {
      const auto part = span_products(a, pw[i], pw[k - i]);
      all.insert(all.end(), part.begin(), part.end());
    }
    pw[k] = basis(all);
    dims.push_back(static_cast<int>(pw[k].size()));
  }
  return dims;
}

inline std::vector<int> right_power_dims(const Matrix& a, int kmax) {
  std::vector<Vector> e;
  for (int i = 0; i < a.rows(); ++i) e.push_back(Vector::Unit(a.rows(), i));
  std::vector<Vector> cur = basis(e);
  std::vector<int> dims{static_cast<int>(cur.size())};
  for (int k = 2; k <= kmax; ++k) {
    cur = span_products(a, cur, e);
    dims.push_back(static_cast<int>(cur.size()));
  }
  return dims;
}

}  // namespace oracle

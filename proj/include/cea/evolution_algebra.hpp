#pragma once

// A single evolution algebra over the reals: basis e_1..e_n with
// e_i e_j = 0 for i != j and e_i e_i = sum_j a_ij e_j.
//
// Indices are zero-based throughout the library.

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace cea {

using Matrix = Eigen::MatrixXd;
using Element = Eigen::VectorXd;

class Algebra {
 public:
  explicit Algebra(Matrix structure);

  static Algebra zero(int n);

  int dim() const noexcept { return static_cast<int>(a_.rows()); }
  const Matrix& structure() const noexcept { return a_; }
  double operator()(int i, int j) const { return a_(i, j); }
  double max_abs() const { return a_.size() == 0 ? 0.0 : a_.cwiseAbs().maxCoeff(); }

  // 1e-12 * (1 + max |a_ij|): entries at or below this are treated as zero.
  double default_tolerance() const { return 1e-12 * (1.0 + max_abs()); }

 private:
  Matrix a_;
};

// (x y)_j = sum_i a_ij x_i y_i
Element multiply(const Algebra& alg, const Element& x, const Element& y);
Element square(const Algebra& alg, const Element& x);

// Dimensions of A^(k) (derived), A^<k> (right powers) and A^k (all
// k-fold products) for k = 1..k_max. The *_zero fields hold the least k
// with a zero-dimensional power, if one occurs within k_max.
struct PowerSequences {
  std::vector<int> derived;
  std::vector<int> right;
  std::vector<int> plain;
  std::optional<int> derived_zero;
  std::optional<int> right_zero;
  std::optional<int> plain_zero;
};

PowerSequences power_sequences(const Algebra& alg, int k_max);

// Sharp bound on the nilpotency index of an n-dimensional evolution algebra.
int nilpotency_index_bound(int n);

// Verdict from the support digraph (edge i -> j iff |a_ij| > tol).
// A nilpotent verdict carries a topological order: listing the basis in that
// order makes the structure matrix strictly upper triangular. Otherwise
// `cycle` holds vertices v_0..v_m with edges v_k -> v_{k+1} and v_m -> v_0.
struct NilpotencyCertificate {
  bool nilpotent = false;
  std::vector<int> order;
  std::vector<int> cycle;
};

NilpotencyCertificate is_nilpotent(const Algebra& alg, std::optional<double> tol = {});

// Multiplicative linear form supported on one basis vector: sigma(e_index) =
// a_{index,index}, zero on the others.
struct Character {
  int index = 0;
  Eigen::VectorXd weights;

  double operator()(const Element& x) const { return weights.dot(x); }
};

std::vector<Character> find_characters(const Algebra& alg, std::optional<double> tol = {});

struct AbsoluteNilpotents {
  enum class Kind { OnlyZero, All, Rays, Unsupported };

  Kind kind = Kind::OnlyZero;
  bool singular = false;
  // Extreme rays y >= 0 of {y : A^T y = 0}, each scaled to max entry 1.
  // Absolute nilpotents are x with x_i = +-sqrt(y_i) for y in their cone.
  std::vector<Eigen::VectorXd> rays;
  std::vector<Element> samples;
};

// Largest dimension for which the cone of a singular system is enumerated.
inline constexpr int kMaxConeDimension = 6;

AbsoluteNilpotents absolute_nilpotents(const Algebra& alg, std::optional<double> tol = {});

const char* to_string(AbsoluteNilpotents::Kind kind);

bool is_upper_triangular(const Algebra& alg, double tol);

// Solves x = x^2 coordinate by coordinate for an upper triangular structure
// matrix. Throws std::invalid_argument otherwise. The result is sorted
// lexicographically and free of duplicates.
std::vector<Element> idempotents_triangular(const Algebra& alg, std::optional<double> tol = {});

}  // namespace cea

#pragma once

// Constructors for the chain families: permutation chains, the four
// upper triangular 3x3 families, the symmetric family and constant chains.

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cea/chain.hpp"
#include "cea/scalar_fn.hpp"

namespace cea {

// A solution of a(s,tau) a(tau,t) = a(s,t): either the ratio phi(t)/phi(s)
// or the step function with threshold alpha.
using CantorSecond = std::variant<ScalarFn, StepSpec>;

struct PermutationSpec {
  std::vector<int> pi;                 // zero-based one-line notation
  std::map<int, CantorSecond> fixed;   // one solution per fixed point of pi
};

ChainFamily permutation_chain(const PermutationSpec& spec);

// All three diagonal entries are ratios.
struct Case111 {
  ScalarFn phi1, phi4, phi6, xi, f, gamma;
  double a = 0.0;
};

// Ratios on entries 1 and 4, step with threshold alpha6 on entry 6.
struct Case112 {
  ScalarFn phi1, phi4, xi;
  double alpha6 = 1.0;
  ScalarFn beta, gamma, theta, v;
  double a = 0.0;
  double b = 0.0;
};

// Ratio on entry 1, steps on entries 4 and 6 with alpha4 < alpha6.
struct Case122 {
  ScalarFn phi1;
  double alpha4 = 1.0;
  double alpha6 = 2.0;
  ScalarFn omega, delta, zeta, p, d, e, m;
  double a = 0.0;
};

// Steps on all diagonal entries with alpha1 < alpha4 < alpha6.
struct Case222 {
  double alpha1 = 1.0;
  double alpha4 = 2.0;
  double alpha6 = 3.0;
  ScalarFn l, w, A, B, c, g, q;
  double a = 0.0;
  double b = 0.0;
};

using Triangular3Params = std::variant<Case111, Case112, Case122, Case222>;

// Each family has the shape
//   [ a1 a2 a3 ]
//   [ 0  a4 a5 ]
//   [ 0  0  a6 ]
// Step-switched branches are selected by t alone: t < alpha versus t >= alpha.
ChainFamily triangular3_case111(const Case111& p);
ChainFamily triangular3_case112(const Case112& p);
ChainFamily triangular3_case122(const Case122& p);
ChainFamily triangular3_case222(const Case222& p);
ChainFamily triangular3(const Triangular3Params& p);

// Diagonal patterns obtained from 112 and 122 by relabelling the basis:
// 121 and 211 from 112, 221 and 212 from 122.
enum class SimilarCase { C121, C211, C221, C212 };

std::vector<int> similar_case_permutation(SimilarCase tag);
ChainFamily triangular3_similar(SimilarCase tag, const Case112& p);
ChainFamily triangular3_similar(SimilarCase tag, const Case122& p);

ChainFamily constant_chain(const Matrix& m);

// a_ik = (phi_i(t) - gamma_ik(t)) / phi_i(s)
struct SymmetricParams {
  std::vector<ScalarFn> phi;
  std::vector<std::vector<ScalarFn>> gamma;
};

class SymmetryError : public std::runtime_error {
 public:
  SymmetryError(int i, int k, double s, double t, double gap);
  int i, k;
  double s, t;
  double gap;
};

// Row sums f_i(s,t) = sum_j a_ij and complements g_ik = f_i - a_ik, checked
// against the multiplicative conditions on sampled triples. Every residual
// is a max-abs over the triples, scaled like the CK residual.
struct RowSumDiagnostics {
  int samples = 0;
  double sum_f = 0.0;    // |sum_i (f_i(s,t) - f_i(s,tau) f_i(tau,t))|
  double sum_g = 0.0;    // max_k |sum_i (g_ik(s,t) - f_i(s,tau) g_ik(tau,t))|
  double each_f = 0.0;   // max_i |f_i(s,t) - f_i(s,tau) f_i(tau,t)|
  double each_g = 0.0;   // max_ik |g_ik(s,t) - f_i(s,tau) g_ik(tau,t)|
  Triple worst_each_f;
};

Eigen::VectorXd row_sums(const Matrix& m);
Matrix row_sum_complements(const Matrix& m);
RowSumDiagnostics row_sum_diagnostics(const ChainFamily& chain, const std::vector<Triple>& triples);

struct SymmetricChain {
  ChainFamily chain;
  RowSumDiagnostics diagnostics;
  double max_asymmetry = 0.0;
  int symmetry_samples = 0;
};

// Validates a_ik = a_ki on sampled (s,t) pairs (throws SymmetryError with a
// witness otherwise) and computes row-sum diagnostics. CK is not assumed;
// run verify_ck on the result.
SymmetricChain symmetric_chain(const SymmetricParams& p, double tol, const SamplingPlan& plan = {});

}  // namespace cea

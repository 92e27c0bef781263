#include "cea/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cea {

namespace {

constexpr double kSignBand = 1e-10;

int banded_sign(double value, double scale) {
  if (std::fabs(value) <= kSignBand * (1.0 + scale)) return 0;
  return value > 0.0 ? 1 : -1;
}

Element point(double x1, double x2, double x3) {
  Element x(3);
  x << x1, x2, x3;
  return x;
}

}  // namespace

TriangularEntries TriangularEntries::from(const Algebra& alg, std::optional<double> tol) {
  if (alg.dim() != 3 || !is_upper_triangular(alg, tol.value_or(alg.default_tolerance()))) {
    throw std::invalid_argument("expected a 3x3 upper triangular structure matrix");
  }
  return {alg(0, 0), alg(0, 1), alg(0, 2), alg(1, 1), alg(1, 2), alg(2, 2)};
}

bool det_condition(const Algebra& alg, std::optional<double> tol) {
  const auto a = TriangularEntries::from(alg);
  return std::fabs(a.a1 * a.a4 * a.a6) > tol.value_or(alg.default_tolerance());
}

int Discriminants::sign(int k) const {
  if (k < 1 || k > 5 || !valid[k - 1]) throw std::invalid_argument("discriminant not available");
  return banded_sign(value[k - 1], scale[k - 1]);
}

Discriminants discriminants(const Algebra& alg) {
  if (!det_condition(alg)) throw std::invalid_argument("discriminants need a1 a4 a6 != 0");
  const auto [a1, a2, a3, a4, a5, a6] = TriangularEntries::from(alg);
  Discriminants d;

  const double t1 = 4.0 * a5 * a6 / (a4 * a4);
  const double t2 = 4.0 * a2 * a4 / (a1 * a1);
  const double t3 = 4.0 * a6 * (a3 / (a1 * a1) + a5 / ((2.0 * a4) * (2.0 * a4)));
  d.value[0] = 1.0 - t1;
  d.value[1] = 1.0 - t2;
  d.value[2] = 1.0 - t3;
  d.scale[0] = std::fabs(t1);
  d.scale[1] = std::fabs(t2);
  d.scale[2] = std::fabs(t3);

  if (banded_sign(d.value[1], d.scale[1]) >= 0) {
    const double root = d.value[1] > 0.0 ? std::sqrt(d.value[1]) : 0.0;
    d.y4 = (1.0 + root) / (2.0 * a4);
    d.y5 = (1.0 - root) / (2.0 * a4);
    d.y_valid = true;
    const double t4 = 4.0 * a6 * (a3 / (a1 * a1) + a5 * d.y4 * d.y4);
    const double t5 = 4.0 * a6 * (a3 / (a1 * a1) + a5 * d.y5 * d.y5);
    d.value[3] = 1.0 - t4;
    d.value[4] = 1.0 - t5;
    d.scale[3] = std::fabs(t4);
    d.scale[4] = std::fabs(t5);
    d.valid[3] = d.valid[4] = true;
  }
  return d;
}

int idempotent_count_from_signs(const Discriminants& d) {
  auto branch = [](int sign) { return sign > 0 ? 2 : (sign == 0 ? 1 : 0); };
  int count = 2 + branch(d.sign(1));
  const int s2 = d.sign(2);
  if (s2 == 0) {
    count += branch(d.sign(3));
  } else if (s2 > 0) {
    count += branch(d.sign(4)) + branch(d.sign(5));
  }
  return count;
}

IdempotentClassification classify_idempotents(const Algebra& alg, double match_tol) {
  const Discriminants d = discriminants(alg);
  const auto e = TriangularEntries::from(alg);
  const double a1 = e.a1, a4 = e.a4, a6 = e.a6;

  IdempotentClassification out;
  auto add = [&](int lambda, std::string region, Element x) {
    out.items.push_back({lambda, std::move(region), std::move(x)});
  };
  auto pm = [](double disc, double sign) { return 1.0 + sign * std::sqrt(std::max(disc, 0.0)); };

  add(1, "always", point(0.0, 0.0, 0.0));
  add(2, "always", point(0.0, 0.0, 1.0 / a6));

  switch (d.sign(1)) {
    case 0:
      add(3, "D1=0", point(0.0, 1.0 / a4, 1.0 / (2.0 * a6)));
      break;
    case 1:
      add(4, "D1>0", point(0.0, 1.0 / a4, pm(d.value[0], +1) / (2.0 * a6)));
      add(5, "D1>0", point(0.0, 1.0 / a4, pm(d.value[0], -1) / (2.0 * a6)));
      break;
    default:
      break;
  }

  const int s2 = d.sign(2);
  if (s2 == 0) {
    switch (d.sign(3)) {
      case 0:
        add(6, "D2=0,D3=0", point(1.0 / a1, 1.0 / (2.0 * a4), 1.0 / (2.0 * a6)));
        break;
      case 1:
        add(7, "D2=0,D3>0", point(1.0 / a1, 1.0 / (2.0 * a4), pm(d.value[2], +1) / (2.0 * a6)));
        add(8, "D2=0,D3>0", point(1.0 / a1, 1.0 / (2.0 * a4), pm(d.value[2], -1) / (2.0 * a6)));
        break;
      default:
        break;
    }
  } else if (s2 > 0) {
    switch (d.sign(4)) {
      case 0:
        add(9, "D2>0,D4=0", point(1.0 / a1, d.y4, 1.0 / (2.0 * a6)));
        break;
      case 1:
        add(10, "D2>0,D4>0", point(1.0 / a1, d.y4, pm(d.value[3], +1) / (2.0 * a6)));
        add(11, "D2>0,D4>0", point(1.0 / a1, d.y4, pm(d.value[3], -1) / (2.0 * a6)));
        break;
      default:
        break;
    }
    switch (d.sign(5)) {
      case 0:
        add(12, "D2>0,D5=0", point(1.0 / a1, d.y5, 1.0 / (2.0 * a6)));
        break;
      case 1:
        add(13, "D2>0,D5>0", point(1.0 / a1, d.y5, pm(d.value[4], +1) / (2.0 * a6)));
        add(14, "D2>0,D5>0", point(1.0 / a1, d.y5, pm(d.value[4], -1) / (2.0 * a6)));
        break;
      default:
        break;
    }
  }

  // Every call is checked against the cascade solver.
  const auto cascade = idempotents_triangular(alg);
  auto close = [&](const Element& p, const Element& q) {
    return (p - q).cwiseAbs().maxCoeff() <= match_tol * (1.0 + q.cwiseAbs().maxCoeff());
  };
  bool same = cascade.size() == out.items.size();
  for (const auto& item : out.items) {
    if (!same) break;
    same = std::any_of(cascade.begin(), cascade.end(), [&](const Element& c) { return close(item.x, c); });
  }
  if (!same) {
    std::ostringstream os;
    os << "closed-form idempotents (" << out.items.size() << ") disagree with the cascade ("
       << cascade.size() << ")";
    throw ClassificationMismatch(os.str());
  }
  return out;
}

AnalysisReport analyze_snapshot(const Algebra& alg) {
  AnalysisReport r;
  r.structure = alg.structure();
  r.nilpotency = is_nilpotent(alg);
  if (alg.dim() <= 8) r.powers = power_sequences(alg, nilpotency_index_bound(alg.dim()));
  r.characters = find_characters(alg);
  r.absolute = absolute_nilpotents(alg);
  r.triangular3 = alg.dim() == 3 && is_upper_triangular(alg, alg.default_tolerance());
  if (r.triangular3) {
    r.det_nonzero = det_condition(alg);
  } else {
    r.det_nonzero = std::fabs(alg.structure().determinant()) > alg.default_tolerance();
  }
  if (r.triangular3 && r.det_nonzero) {
    r.discriminants = discriminants(alg);
    try {
      r.idempotents = classify_idempotents(alg);
    } catch (const ClassificationMismatch& e) {
      r.classification_error = e.what();
    }
  }
  return r;
}

}  // namespace cea

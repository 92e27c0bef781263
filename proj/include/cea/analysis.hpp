#pragma once

// Time-slice analysis of chains with upper triangular 3x3 structure matrices
//   [ a1 a2 a3 ]
//   [ 0  a4 a5 ]
//   [ 0  0  a6 ]
// and the property-transition sweep over the time domain 0 <= s <= t.

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cea/chain.hpp"
#include "cea/evolution_algebra.hpp"

namespace cea {

struct TriangularEntries {
  double a1, a2, a3, a4, a5, a6;

  // Requires a 3x3 upper triangular algebra (throws std::invalid_argument).
  static TriangularEntries from(const Algebra& alg, std::optional<double> tol = {});
};

bool det_condition(const Algebra& alg, std::optional<double> tol = {});

// D1..D5 in value[0..4]. scale[k] is the magnitude of the subtracted term,
// used for the zero band |D| <= 1e-10 (1 + scale). y4, y5 and D4, D5 are only
// valid when D2 >= 0 (within the band).
struct Discriminants {
  std::array<double, 5> value{};
  std::array<double, 5> scale{};
  std::array<bool, 5> valid{true, true, true, false, false};
  double y4 = 0.0;
  double y5 = 0.0;
  bool y_valid = false;

  // -1, 0 or +1 for a valid D_k (k = 1..5); throws for an invalid one.
  int sign(int k) const;
};

Discriminants discriminants(const Algebra& alg);

struct LabeledIdempotent {
  int lambda = 0;        // 1..14
  std::string region;    // sign condition that produced it, e.g. "D1>0"
  Element x;
};

struct IdempotentClassification {
  std::vector<LabeledIdempotent> items;
  std::size_t count() const noexcept { return items.size(); }
};

// Closed forms disagree with the coordinate cascade.
class ClassificationMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Idempotents from the closed forms selected by the signs of D1..D5,
// cross-checked against idempotents_triangular on every call.
IdempotentClassification classify_idempotents(const Algebra& alg, double match_tol = 1e-8);

// Count predicted by the sign pattern alone.
int idempotent_count_from_signs(const Discriminants& d);

struct AnalysisReport {
  Matrix structure;
  NilpotencyCertificate nilpotency;
  std::optional<PowerSequences> powers;
  std::vector<Character> characters;
  AbsoluteNilpotents absolute;
  bool triangular3 = false;
  bool det_nonzero = false;
  std::optional<Discriminants> discriminants;
  std::optional<IdempotentClassification> idempotents;
  std::optional<std::string> classification_error;

  bool baric() const noexcept { return !characters.empty(); }
  bool unique_absolute_nilpotent() const noexcept {
    return absolute.kind == AbsoluteNilpotents::Kind::OnlyZero;
  }
};

AnalysisReport analyze_snapshot(const Algebra& alg);

struct SweepSpec {
  double s_lo = 0.0, s_hi = 1.0;
  double t_lo = 0.0, t_hi = 1.0;
  int ns = 2, nt = 2;
};

enum class CellStatus { Ok, OutsideT, DomainError, OutsideHypotheses, Mismatch };
const char* to_string(CellStatus status);

struct SweepCell {
  int i = 0, j = 0;  // s index, t index
  double s = 0.0, t = 0.0;
  CellStatus status = CellStatus::Ok;
  bool det_nonzero = false;
  bool baric = false;
  bool unique_absolute_nilpotent = false;
  int idempotent_count = -1;
  std::array<double, 5> d{};
  std::array<int, 5> d_sign{};  // meaningful where d_valid
  std::array<bool, 5> d_valid{};
  std::string message;

  bool evaluated() const noexcept {
    return status == CellStatus::Ok || status == CellStatus::OutsideHypotheses;
  }
};

// Adjacent cells (sharing a grid edge) whose classification differs.
struct Crossing {
  int i1, j1, i2, j2;
  std::vector<std::string> changed;  // "D1".."D5", "idempotents", "baric", "unique-nilpotent"
};

struct SweepReport {
  SweepSpec spec;
  std::vector<SweepCell> cells;  // index i * nt + j
  std::vector<Crossing> crossings;
  int baric_transitions = 0;
  int unique_nilpotent_transitions = 0;
  int idempotent_transitions = 0;
  std::array<int, 5> d_crossings{};
  int baric_cells = 0;            // T_P for "baric"
  int non_baric_cells = 0;        // T_P^0
  int unique_nilpotent_cells = 0;
  int non_unique_nilpotent_cells = 0;
  std::map<int, int> idempotent_histogram;

  const SweepCell& cell(int i, int j) const { return cells[static_cast<std::size_t>(i) * spec.nt + j]; }
};

double grid_s(const SweepSpec& spec, int i);
double grid_t(const SweepSpec& spec, int j);

SweepCell analyze_cell(const ChainFamily& chain, const SweepSpec& spec, int i, int j);
SweepReport summarize_sweep(const SweepSpec& spec, std::vector<SweepCell> cells);

// Reference implementation and OpenMP kernel; identical reports.
SweepReport sweep_serial(const ChainFamily& chain, const SweepSpec& spec);
SweepReport sweep(const ChainFamily& chain, const SweepSpec& spec);

}  // namespace cea

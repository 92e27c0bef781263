// Property-transition sweep: per-cell analysis (serial reference and OpenMP
// kernel) followed by a serial pass that tallies properties and crossings.

#include <cmath>
#include <stdexcept>

#include "cea/analysis.hpp"

namespace cea {

const char* to_string(CellStatus status) {
  switch (status) {
    case CellStatus::Ok:
      return "ok";
    case CellStatus::OutsideT:
      return "outside-T";
    case CellStatus::DomainError:
      return "domain-error";
    case CellStatus::OutsideHypotheses:
      return "outside-hypotheses";
    case CellStatus::Mismatch:
      return "classification-mismatch";
  }
  return "?";
}

double grid_s(const SweepSpec& spec, int i) {
  return spec.s_lo + (spec.s_hi - spec.s_lo) * i / (spec.ns - 1);
}

double grid_t(const SweepSpec& spec, int j) {
  return spec.t_lo + (spec.t_hi - spec.t_lo) * j / (spec.nt - 1);
}

namespace {

void check_spec(const SweepSpec& spec) {
  if (spec.ns < 2 || spec.nt < 2) throw std::invalid_argument("sweep needs at least 2 points per axis");
  if (!(spec.s_lo <= spec.s_hi) || !(spec.t_lo <= spec.t_hi) || spec.s_lo < 0.0) {
    throw std::invalid_argument("sweep ranges must be ordered and start at s >= 0");
  }
}

}  // namespace

SweepCell analyze_cell(const ChainFamily& chain, const SweepSpec& spec, int i, int j) {
  SweepCell c;
  c.i = i;
  c.j = j;
  c.s = grid_s(spec, i);
  c.t = grid_t(spec, j);
  if (c.s > c.t) {
    c.status = CellStatus::OutsideT;
    return c;
  }
  Matrix m;
  try {
    m = chain.matrix(c.s, c.t);
  } catch (const DomainError& e) {
    c.status = CellStatus::DomainError;
    c.message = e.what();
    return c;
  }
  const Algebra alg(m);
  c.baric = !find_characters(alg).empty();
  c.unique_absolute_nilpotent = absolute_nilpotents(alg).kind == AbsoluteNilpotents::Kind::OnlyZero;

  const bool tri3 = alg.dim() == 3 && is_upper_triangular(alg, alg.default_tolerance());
  c.det_nonzero = tri3 ? det_condition(alg)
                       : std::fabs(m.determinant()) > alg.default_tolerance();
  if (!tri3 || !c.det_nonzero) {
    c.status = CellStatus::OutsideHypotheses;
    return c;
  }

  const Discriminants d = discriminants(alg);
  for (int k = 0; k < 5; ++k) {
    c.d_valid[k] = d.valid[k];
    c.d[k] = d.valid[k] ? d.value[k] : 0.0;
    c.d_sign[k] = d.valid[k] ? d.sign(k + 1) : 0;
  }
  try {
    c.idempotent_count = static_cast<int>(classify_idempotents(alg).count());
  } catch (const ClassificationMismatch& e) {
    c.status = CellStatus::Mismatch;
    c.message = e.what();
  }
  return c;
}

SweepReport summarize_sweep(const SweepSpec& spec, std::vector<SweepCell> cells) {
  SweepReport r;
  r.spec = spec;
  r.cells = std::move(cells);

  for (const auto& c : r.cells) {
    if (!c.evaluated()) continue;
    (c.baric ? r.baric_cells : r.non_baric_cells)++;
    (c.unique_absolute_nilpotent ? r.unique_nilpotent_cells : r.non_unique_nilpotent_cells)++;
    if (c.status == CellStatus::Ok) r.idempotent_histogram[c.idempotent_count]++;
  }

  auto compare = [&](const SweepCell& a, const SweepCell& b) {
    if (!a.evaluated() || !b.evaluated()) return;
    Crossing x{a.i, a.j, b.i, b.j, {}};
    if (a.baric != b.baric) {
      x.changed.emplace_back("baric");
      ++r.baric_transitions;
    }
    if (a.unique_absolute_nilpotent != b.unique_absolute_nilpotent) {
      x.changed.emplace_back("unique-nilpotent");
      ++r.unique_nilpotent_transitions;
    }
    if (a.status == CellStatus::Ok && b.status == CellStatus::Ok) {
      for (int k = 0; k < 5; ++k) {
        if (a.d_valid[k] && b.d_valid[k] && a.d_sign[k] != b.d_sign[k]) {
          x.changed.push_back("D" + std::to_string(k + 1));
          ++r.d_crossings[k];
        }
      }
      if (a.idempotent_count != b.idempotent_count) {
        x.changed.emplace_back("idempotents");
        ++r.idempotent_transitions;
      }
    }
    if (!x.changed.empty()) r.crossings.push_back(std::move(x));
  };

  for (int i = 0; i < spec.ns; ++i) {
    for (int j = 0; j < spec.nt; ++j) {
      if (i + 1 < spec.ns) compare(r.cell(i, j), r.cell(i + 1, j));
      if (j + 1 < spec.nt) compare(r.cell(i, j), r.cell(i, j + 1));
    }
  }
  return r;
}

SweepReport sweep_serial(const ChainFamily& chain, const SweepSpec& spec) {
  check_spec(spec);
  std::vector<SweepCell> cells;
  cells.reserve(static_cast<std::size_t>(spec.ns) * spec.nt);
  for (int i = 0; i < spec.ns; ++i)
    for (int j = 0; j < spec.nt; ++j) cells.push_back(analyze_cell(chain, spec, i, j));
  return summarize_sweep(spec, std::move(cells));
}

SweepReport sweep(const ChainFamily& chain, const SweepSpec& spec) {
  check_spec(spec);
  const long total = static_cast<long>(spec.ns) * spec.nt;
  std::vector<SweepCell> cells(total);
#pragma omp parallel for schedule(dynamic, 16)
  for (long k = 0; k < total; ++k) {
    cells[k] = analyze_cell(chain, spec, static_cast<int>(k / spec.nt), static_cast<int>(k % spec.nt));
  }
  return summarize_sweep(spec, std::move(cells));
}

}  // namespace cea

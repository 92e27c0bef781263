#pragma once

// Machine-readable renderings of the library's reports: JSON documents and
// CSV tables.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cea/analysis.hpp"
#include "cea/chain.hpp"
#include "cea/generators.hpp"

namespace cea {

nlohmann::json to_json(const Triple& tr);
nlohmann::json to_json(const CkReport& r, int worst = 10);
nlohmann::json to_json(const RowSumDiagnostics& d);
nlohmann::json to_json(const AnalysisReport& r);
nlohmann::json to_json(const SweepReport& r);
nlohmann::json chain_summary(const ChainFamily& chain);

// Per-triple rows, largest residual first; at most `limit` rows (all if < 0).
void write_ck_csv(std::ostream& out, const CkReport& r, int limit = -1);

// i,j,s,t,status,det_nonzero,baric,unique_abs_nilpotent,idempotent_count,
// D1,D1_sign,...,D5,D5_sign. Reals use %.17g; empty fields where a value is
// undefined for the cell.
void write_sweep_csv(std::ostream& out, const SweepReport& r);

struct RunReport {
  std::string command;
  std::string config_hash;
  std::string version;
  double wall_seconds = 0.0;
  nlohmann::json result;

  nlohmann::json to_json() const;
};

// %.17g
std::string format_real(double v);

}  // namespace cea

#include "cea/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace cea {

using nlohmann::json;

namespace {

json rows(const Matrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json one_based(const std::vector<int>& v) {
  json out = json::array();
  for (int x : v) out.push_back(x + 1);
  return out;
}

json dims(const std::vector<int>& v, const std::optional<int>& zero) {
  return {{"dims", v}, {"zero_at", zero ? json(*zero) : json(nullptr)}};
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const Triple& tr) { return {{"s", tr.s}, {"tau", tr.tau}, {"t", tr.t}}; }

json to_json(const CkReport& r, int worst) {
  json regimes = json::array();
  for (const auto& g : r.regimes) {
    regimes.push_back({{"regime", g.label},
                       {"samples", g.samples},
                       {"max_residual", g.max_residual},
                       {"worst", to_json(g.worst)},
                       {"passed", g.max_residual <= r.tol}});
  }
  json errors = json::array();
  for (const auto& o : r.outcomes) {
    if (o.error) errors.push_back({{"triple", to_json(o.triple)}, {"error", *o.error}});
  }
  std::vector<std::size_t> order(r.outcomes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r.outcomes[a].residual > r.outcomes[b].residual;
  });
  json top = json::array();
  for (std::size_t k = 0; k < order.size() && static_cast<int>(k) < worst; ++k) {
    const auto& o = r.outcomes[order[k]];
    if (o.error) continue;
    top.push_back({{"triple", to_json(o.triple)},
                   {"residual", o.residual},
                   {"abs_residual", o.abs_residual},
                   {"regime", o.regime}});
  }
  return {{"passed", r.passed},
          {"tol", r.tol},
          {"samples", r.samples},
          {"domain_errors", r.domain_errors},
          {"max_residual", r.max_residual},
          {"max_abs_residual", r.max_abs_residual},
          {"worst", to_json(r.worst)},
          {"regimes", regimes},
          {"failing_regimes", r.failing_regimes()},
          {"worst_triples", top},
          {"errors", errors}};
}

json to_json(const RowSumDiagnostics& d) {
  return {{"samples", d.samples},
          {"sum_f", d.sum_f},
          {"sum_g", d.sum_g},
          {"each_f", d.each_f},
          {"each_g", d.each_g},
          {"worst_each_f", to_json(d.worst_each_f)}};
}

json to_json(const AnalysisReport& r) {
  json out;
  out["structure"] = rows(r.structure);
  out["nilpotent"] = r.nilpotency.nilpotent;
  if (r.nilpotency.nilpotent) {
    out["triangularizing_order"] = one_based(r.nilpotency.order);
  } else {
    out["cycle"] = one_based(r.nilpotency.cycle);
  }
  if (r.powers) {
    out["powers"] = {{"derived", dims(r.powers->derived, r.powers->derived_zero)},
                     {"right", dims(r.powers->right, r.powers->right_zero)},
                     {"plain", dims(r.powers->plain, r.powers->plain_zero)}};
  }
  out["baric"] = r.baric();
  json chars = json::array();
  for (const auto& c : r.characters) chars.push_back({{"index", c.index + 1}, {"weights", vec(c.weights)}});
  out["characters"] = chars;

  json rays = json::array();
  for (const auto& y : r.absolute.rays) rays.push_back(vec(y));
  json samples = json::array();
  for (const auto& x : r.absolute.samples) samples.push_back(vec(x));
  out["absolute_nilpotents"] = {{"kind", to_string(r.absolute.kind)},
                                {"singular", r.absolute.singular},
                                {"rays", rays},
                                {"samples", samples}};
  out["triangular3"] = r.triangular3;
  out["det_nonzero"] = r.det_nonzero;
  if (r.discriminants) {
    const auto& d = *r.discriminants;
    json ds = json::object();
    for (int k = 0; k < 5; ++k) {
      const std::string key = "D" + std::to_string(k + 1);
      ds[key] = d.valid[k] ? json{{"value", d.value[k]}, {"sign", d.sign(k + 1)}} : json(nullptr);
    }
    ds["y4"] = d.y_valid ? json(d.y4) : json(nullptr);
    ds["y5"] = d.y_valid ? json(d.y5) : json(nullptr);
    out["discriminants"] = ds;
  }
  if (r.idempotents) {
    json items = json::array();
    for (const auto& it : r.idempotents->items) {
      items.push_back({{"lambda", it.lambda}, {"region", it.region}, {"x", vec(it.x)}});
    }
    out["idempotents"] = {{"count", r.idempotents->count()}, {"items", items}};
  }
  if (r.classification_error) out["classification_error"] = *r.classification_error;
  return out;
}

json to_json(const SweepReport& r) {
  json statuses = json::object();
  for (const auto& c : r.cells) {
    const char* key = to_string(c.status);
    statuses[key] = statuses.value(key, 0) + 1;
  }
  json hist = json::object();
  for (const auto& [k, v] : r.idempotent_histogram) hist[std::to_string(k)] = v;
  json crossings = json::array();
  for (const auto& x : r.crossings) {
    crossings.push_back({{"from", {x.i1, x.j1}}, {"to", {x.i2, x.j2}}, {"changed", x.changed}});
  }
  json d = json::object();
  for (int k = 0; k < 5; ++k) d["D" + std::to_string(k + 1)] = r.d_crossings[k];
  return {{"grid",
           {{"s", {r.spec.s_lo, r.spec.s_hi}},
            {"t", {r.spec.t_lo, r.spec.t_hi}},
            {"ns", r.spec.ns},
            {"nt", r.spec.nt}}},
          {"cells", statuses},
          {"baric", {{"cells", r.baric_cells}, {"non_cells", r.non_baric_cells}, {"transitions", r.baric_transitions}}},
          {"unique_absolute_nilpotent",
           {{"cells", r.unique_nilpotent_cells},
            {"non_cells", r.non_unique_nilpotent_cells},
            {"transitions", r.unique_nilpotent_transitions}}},
          {"idempotent_count", {{"histogram", hist}, {"transitions", r.idempotent_transitions}}},
          {"d_crossings", d},
          {"crossings", crossings}};
}

json chain_summary(const ChainFamily& chain) {
  json entries = json::array();
  for (int i = 0; i < chain.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < chain.dim(); ++j) row.push_back(chain.entry(i, j).formula());
    entries.push_back(row);
  }
  json params = json::object();
  for (const auto& [k, v] : chain.params()) params[k] = v;
  const auto& w = chain.window();
  return {{"generator", chain.generator()},
          {"dim", chain.dim()},
          {"window", {{"s_min", w.s_min}, {"t_max", std::isfinite(w.t_max) ? json(w.t_max) : json("inf")}}},
          {"thresholds", chain.thresholds()},
          {"identically_zero", chain.identically_zero()},
          {"params", params},
          {"entries", entries}};
}

void write_ck_csv(std::ostream& out, const CkReport& r, int limit) {
  std::vector<std::size_t> order(r.outcomes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r.outcomes[a].residual > r.outcomes[b].residual;
  });
  out << "s,tau,t,regime,residual,abs_residual,error\n";
  int written = 0;
  for (std::size_t k : order) {
    if (limit >= 0 && written >= limit) break;
    const auto& o = r.outcomes[k];
    out << format_real(o.triple.s) << ',' << format_real(o.triple.tau) << ',' << format_real(o.triple.t) << ','
        << o.regime << ',' << (o.error ? "" : format_real(o.residual)) << ','
        << (o.error ? "" : format_real(o.abs_residual)) << ',';
    if (o.error) {
      std::string msg = *o.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      out << '"' << msg << '"';
    }
    out << '\n';
    ++written;
  }
}

void write_sweep_csv(std::ostream& out, const SweepReport& r) {
  out << "i,j,s,t,status,det_nonzero,baric,unique_abs_nilpotent,idempotent_count";
  for (int k = 1; k <= 5; ++k) out << ",D" << k << ",D" << k << "_sign";
  out << '\n';
  for (const auto& c : r.cells) {
    out << c.i << ',' << c.j << ',' << format_real(c.s) << ',' << format_real(c.t) << ',' << to_string(c.status);
    if (c.evaluated()) {
      out << ',' << c.det_nonzero << ',' << c.baric << ',' << c.unique_absolute_nilpotent;
    } else {
      out << ",,,";
    }
    out << ',';
    if (c.status == CellStatus::Ok) out << c.idempotent_count;
    const bool classified = c.status == CellStatus::Ok || c.status == CellStatus::Mismatch;
    for (int k = 0; k < 5; ++k) {
      if (classified && c.d_valid[k]) {
        out << ',' << format_real(c.d[k]) << ',' << c.d_sign[k];
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
}

json RunReport::to_json() const {
  return {{"command", command},
          {"config_hash", config_hash},
          {"version", version},
          {"wall_seconds", wall_seconds},
          {"result", result}};
}

}  // namespace cea

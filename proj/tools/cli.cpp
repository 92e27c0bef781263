#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cea/analysis.hpp"
#include "cea/config.hpp"
#include "cea/report.hpp"

namespace cea::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version() { return CEA_VERSION; }

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::pair<double, double> parse_pair(const std::string& text, char sep, const char* what) {
  const auto k = text.find(sep);
  if (k == std::string::npos) throw UsageError(std::string("expected ") + what + ", got '" + text + "'");
  try {
    std::size_t used1 = 0, used2 = 0;
    const std::string a = text.substr(0, k), b = text.substr(k + 1);
    const double x = std::stod(a, &used1);
    const double y = std::stod(b, &used2);
    if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument("trailing text");
    return {x, y};
  } catch (const std::exception&) {
    throw UsageError(std::string("expected ") + what + ", got '" + text + "'");
  }
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto k = text.find('x');
  try {
    if (k == std::string::npos) throw std::invalid_argument("no x");
    std::size_t u1 = 0, u2 = 0;
    const std::string a = text.substr(0, k), b = text.substr(k + 1);
    const int ns = std::stoi(a, &u1), nt = std::stoi(b, &u2);
    if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument("trailing text");
    if (ns < 2 || nt < 2) throw UsageError("grid needs at least 2 points per axis, got '" + text + "'");
    return {ns, nt};
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("expected --grid NsxNt, got '" + text + "'");
  }
}

std::string window_text(const DomainWindow& w) {
  std::ostringstream os;
  os << "s >= " << w.s_min << ", t <= ";
  if (std::isfinite(w.t_max)) {
    os << w.t_max;
  } else {
    os << "inf";
  }
  return os.str();
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

RunReport start_report(const std::string& command, const LoadedChain& loaded) {
  RunReport r;
  r.command = command;
  r.config_hash = hex_hash(config_hash(loaded.document));
  r.version = version();
  return r;
}

int cmd_generate(const std::string& path, bool as_json, std::ostream& out) {
  const LoadedChain loaded = load_chain(path);
  const ChainFamily& c = loaded.chain;
  if (as_json) {
    out << chain_summary(c).dump(2) << '\n';
    return kOk;
  }
  if (!loaded.name.empty()) out << "name: " << loaded.name << '\n';
  out << "generator: " << loaded.generator << '\n';
  out << "dimension: " << c.dim() << '\n';
  out << "window: " << window_text(c.window()) << '\n';
  if (!c.thresholds().empty()) {
    out << "thresholds:";
    for (double a : c.thresholds()) out << ' ' << a;
    out << '\n';
  }
  for (const auto& [k, v] : c.params()) out << "  " << k << " = " << v << '\n';
  out << "entries:\n";
  for (int i = 0; i < c.dim(); ++i) {
    for (int j = 0; j < c.dim(); ++j) {
      if (c.entry(i, j).is_zero()) continue;
      out << "  a(" << i + 1 << "," << j + 1 << ") = " << c.entry(i, j).formula() << '\n';
    }
  }
  if (c.identically_zero()) {
    out << (loaded.generator == "permutation" ? "zero chain (no fixed points)" : "zero chain") << '\n';
  }
  if (loaded.diagnostics) out << "max asymmetry: " << loaded.max_asymmetry << '\n';
  return kOk;
}

struct VerifyOptions {
  int triples = 1000;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-9;
  std::string window;
  std::string csv;
  int csv_rows = -1;
  bool serial = false;
};

int cmd_verify(const std::string& path, const VerifyOptions& o, std::ostream& out) {
  const Timer timer;
  const LoadedChain loaded = load_chain(path);
  SamplingPlan plan;
  plan.count = o.triples;
  plan.seed = o.seed;
  if (!o.window.empty()) std::tie(plan.lo, plan.hi) = parse_pair(o.window, ':', "--window a:b");
  if (!(plan.lo < plan.hi) || plan.lo < 0.0) throw UsageError("--window needs 0 <= a < b");
  if (o.triples < 0) throw UsageError("--triples must be non-negative");
  if (!(o.tol >= 0.0)) throw UsageError("--tol must be non-negative");

  const auto triples = sample_triples(loaded.chain, plan);
  const CkReport ck = o.serial ? verify_ck_serial(loaded.chain, triples, o.tol) : verify_ck(loaded.chain, triples, o.tol);

  RunReport report = start_report("verify", loaded);
  report.result["chain"] = {{"generator", loaded.generator}, {"dim", loaded.chain.dim()}, {"name", loaded.name}};
  report.result["sampling"] = {{"lo", plan.lo}, {"hi", plan.hi}, {"random", plan.count}, {"seed", plan.seed},
                               {"total", triples.size()}};
  report.result["ck"] = to_json(ck);
  if (loaded.diagnostics) {
    report.result["symmetry"] = {{"max_asymmetry", loaded.max_asymmetry}, {"validated", true}};
    report.result["row_sums"] = to_json(row_sum_diagnostics(loaded.chain, triples));
  }
  if (!o.csv.empty()) {
    std::ofstream f(o.csv);
    if (!f) throw UsageError("cannot write " + o.csv);
    write_ck_csv(f, ck, o.csv_rows);
  }
  report.wall_seconds = timer.seconds();
  out << report.to_json().dump(2) << '\n';
  if (ck.samples == 0 && ck.domain_errors > 0) return kDomainError;
  return ck.passed ? kOk : kVerifyFailed;
}

int cmd_analyze(const std::string& path, const std::string& at, std::ostream& out) {
  const Timer timer;
  const LoadedChain loaded = load_chain(path);
  const auto [s, t] = parse_pair(at, ',', "--at s,t");
  const Algebra alg = loaded.chain.evaluate(s, t);
  RunReport report = start_report("analyze", loaded);
  report.result = to_json(analyze_snapshot(alg));
  report.result["at"] = {s, t};
  report.wall_seconds = timer.seconds();
  out << report.to_json().dump(2) << '\n';
  return kOk;
}

struct SweepOptions {
  std::string grid = "50x50";
  std::string s_range;
  std::string t_range;
  std::string out;
  bool json = false;
  bool serial = false;
};

int cmd_sweep(const std::string& path, const SweepOptions& o, std::ostream& out) {
  const Timer timer;
  const LoadedChain loaded = load_chain(path);
  const auto& w = loaded.chain.window();
  const double hi = std::isfinite(w.t_max) ? w.t_max : w.s_min + 10.0;
  SweepSpec spec{w.s_min, hi, w.s_min, hi, 0, 0};
  std::tie(spec.ns, spec.nt) = parse_grid(o.grid);
  if (!o.s_range.empty()) std::tie(spec.s_lo, spec.s_hi) = parse_pair(o.s_range, ':', "--s a:b");
  if (!o.t_range.empty()) std::tie(spec.t_lo, spec.t_hi) = parse_pair(o.t_range, ':', "--t a:b");
  if (!(spec.s_lo <= spec.s_hi) || !(spec.t_lo <= spec.t_hi) || spec.s_lo < 0.0) {
    throw UsageError("sweep ranges must be ordered with s >= 0");
  }

  const SweepReport r = o.serial ? sweep_serial(loaded.chain, spec) : sweep(loaded.chain, spec);
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw UsageError("cannot write " + o.out);
    write_sweep_csv(f, r);
  }
  if (o.json) {
    RunReport report = start_report("sweep", loaded);
    report.result = to_json(r);
    report.wall_seconds = timer.seconds();
    out << report.to_json().dump(2) << '\n';
    return kOk;
  }

  std::map<std::string, int> statuses;
  for (const auto& c : r.cells) statuses[to_string(c.status)]++;
  out << "grid: " << spec.ns << "x" << spec.nt << " over s in [" << spec.s_lo << ", " << spec.s_hi
      << "], t in [" << spec.t_lo << ", " << spec.t_hi << "]\n";
  out << "cells:";
  for (const auto& [k, v] : statuses) out << ' ' << k << '=' << v;
  out << '\n';
  out << "baric cells: " << r.baric_cells << " (not baric: " << r.non_baric_cells << ")\n";
  out << "unique absolute nilpotent cells: " << r.unique_nilpotent_cells
      << " (not unique: " << r.non_unique_nilpotent_cells << ")\n";
  out << "idempotent counts:";
  for (const auto& [k, v] : r.idempotent_histogram) out << ' ' << k << ':' << v;
  out << '\n';
  out << "baric transitions: " << r.baric_transitions << '\n';
  out << "unique-nilpotent transitions: " << r.unique_nilpotent_transitions << '\n';
  out << "idempotent-count transitions: " << r.idempotent_transitions << '\n';
  for (int k = 0; k < 5; ++k) out << "D" << k + 1 << " crossings: " << r.d_crossings[k] << '\n';
  out << "crossing cells: " << r.crossings.size() << '\n';
  for (const auto& x : r.crossings) {
    out << "  (" << x.i1 << "," << x.j1 << ") -> (" << x.i2 << "," << x.j2 << "):";
    for (const auto& c : x.changed) out << ' ' << c;
    out << '\n';
  }
  return kOk;
}

int cmd_compose(const std::vector<std::string>& inputs, const std::string& out_path, std::ostream& out) {
  if (inputs.empty()) throw UsageError("compose needs at least one input config");
  const fs::path base = out_path.empty() ? fs::current_path() : fs::absolute(out_path).parent_path();
  json blocks = json::array();
  for (const auto& in : inputs) {
    load_chain(in);
    const fs::path abs = fs::absolute(in).lexically_normal();
    const fs::path rel = abs.lexically_relative(base);
    blocks.push_back(rel.empty() ? abs.string() : rel.generic_string());
  }
  json doc = {{"generator", "direct-sum"}, {"params", {{"blocks", blocks}}}};
  const auto composed = build_chain(doc, base);
  if (out_path.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    std::ofstream f(out_path);
    if (!f) throw UsageError("cannot write " + out_path);
    f << doc.dump(2) << '\n';
    out << "wrote " << out_path << " (" << composed.chain.dim() << "-dimensional direct sum of "
        << inputs.size() << " block" << (inputs.size() == 1 ? "" : "s") << ")\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chains of evolution algebras: generate, verify, analyze, sweep, compose", "cea"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config;
  bool gen_json = false;
  auto* gen = app.add_subcommand("generate", "Print a chain summary");
  gen->add_option("config", config, "Chain configuration (JSON)")->required();
  gen->add_flag("--json", gen_json, "Emit the summary as JSON");

  VerifyOptions vo;
  auto* ver = app.add_subcommand("verify", "Check the Chapman-Kolmogorov equation on sampled triples");
  ver->add_option("config", config, "Chain configuration (JSON)")->required();
  ver->add_option("--triples", vo.triples, "Random triples")->capture_default_str();
  ver->add_option("--seed", vo.seed, "Sampler seed")->capture_default_str();
  ver->add_option("--tol", vo.tol, "Residual tolerance")->capture_default_str();
  ver->add_option("--window", vo.window, "Sampling window a:b (default 0.1:10)");
  ver->add_option("--csv", vo.csv, "Write per-triple residuals, worst first");
  ver->add_option("--csv-rows", vo.csv_rows, "Limit CSV rows");
  ver->add_flag("--serial", vo.serial, "Use the serial reference kernel");

  std::string at;
  auto* ana = app.add_subcommand("analyze", "Analyze the algebra at one time pair");
  ana->add_option("config", config, "Chain configuration (JSON)")->required();
  ana->add_option("--at", at, "Time pair s,t")->required();

  SweepOptions so;
  auto* swp = app.add_subcommand("sweep", "Property-transition sweep over a grid of time pairs");
  swp->add_option("config", config, "Chain configuration (JSON)")->required();
  swp->add_option("--grid", so.grid, "Grid NsxNt")->capture_default_str();
  swp->add_option("--s", so.s_range, "Range of s, a:b");
  swp->add_option("--t", so.t_range, "Range of t, a:b");
  swp->add_option("--out", so.out, "CSV output file");
  swp->add_flag("--json", so.json, "Print the report as JSON");
  swp->add_flag("--serial", so.serial, "Use the serial reference kernel");

  std::vector<std::string> inputs;
  std::string compose_out;
  auto* cmp = app.add_subcommand("compose", "Write a direct-sum config from block configs");
  cmp->add_option("configs", inputs, "Block configurations")->required();
  cmp->add_option("--out", compose_out, "Output config file (stdout if omitted)");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("cea");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*gen) return cmd_generate(config, gen_json, out);
    if (*ver) return cmd_verify(config, vo, out);
    if (*ana) return cmd_analyze(config, at, out);
    if (*swp) return cmd_sweep(config, so, out);
    if (*cmp) return cmd_compose(inputs, compose_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace cea::cli

#include "cea/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cea {

using nlohmann::json;

ConfigError::ConfigError(std::string key_path, const std::string& message)
    : std::runtime_error(key_path.empty() ? message : key_path + ": " + message),
      key_path_(std::move(key_path)) {}

const std::vector<std::string> kGenerators = {
    "permutation",     "triangular3-111", "triangular3-112", "triangular3-122", "triangular3-222",
    "triangular3-121", "triangular3-211", "triangular3-221", "triangular3-212", "symmetric",
    "direct-sum",      "constant"};

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string join(const std::string& base, std::size_t index) {
  return base + "[" + std::to_string(index) + "]";
}

class Params {
 public:
  Params(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return join(path_, key); }
  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& get(const std::string& key) const {
    if (!obj_.contains(key)) throw ConfigError(at(key), "missing required parameter");
    return obj_.at(key);
  }

  ScalarFn fn(const std::string& key) const { return to_fn(get(key), at(key)); }

  double number(const std::string& key) const { return to_number(get(key), at(key)); }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  static ScalarFn to_fn(const json& v, const std::string& path) {
    if (v.is_number()) return ScalarFn::constant(v.get<double>());
    if (!v.is_string()) throw ConfigError(path, "expected an expression string");
    try {
      return ScalarFn::parse(v.get<std::string>());
    } catch (const ParseError& e) {
      throw ConfigError(path, std::string(e.what()) + " (offset " + std::to_string(e.offset()) + ")");
    }
  }

  static double to_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
  }

 private:
  const json& obj_;
  std::string path_;
};

std::vector<int> one_based_permutation(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array of indices");
  std::vector<int> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number_integer()) throw ConfigError(join(path, k), "expected an integer index");
    const int x = v[k].get<int>();
    if (x < 1 || x > static_cast<int>(v.size())) {
      throw ConfigError(join(path, k), "index out of range 1.." + std::to_string(v.size()));
    }
    out.push_back(x - 1);
  }
  std::vector<bool> hit(out.size(), false);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (hit[out[k]]) throw ConfigError(join(path, k), "repeated index; not a permutation");
    hit[out[k]] = true;
  }
  return out;
}

Matrix matrix_of(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  const std::size_t n = v.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_array() || v[i].size() != n) throw ConfigError(join(path, i), "expected a row of length " + std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Params::to_number(v[i][j], join(join(path, i), j));
  }
  return m;
}

ChainFamily build_permutation(const Params& p) {
  PermutationSpec spec;
  spec.pi = one_based_permutation(p.get("pi"), p.at("pi"));
  if (p.has("fixed")) {
    const json& fixed = p.get("fixed");
    const std::string fpath = p.at("fixed");
    if (!fixed.is_array()) throw ConfigError(fpath, "expected an array");
    for (std::size_t k = 0; k < fixed.size(); ++k) {
      const Params item(fixed[k], join(fpath, k));
      const json& idx = item.get("index");
      if (!idx.is_number_integer() || idx.get<int>() < 1 || idx.get<int>() > static_cast<int>(spec.pi.size())) {
        throw ConfigError(item.at("index"), "expected an index in 1.." + std::to_string(spec.pi.size()));
      }
      const int j = idx.get<int>() - 1;
      if (item.has("phi") == item.has("alpha")) {
        throw ConfigError(item.path(), "give exactly one of phi or alpha");
      }
      if (item.has("phi")) {
        spec.fixed.emplace(j, item.fn("phi"));
      } else {
        const double alpha = item.number("alpha");
        if (!(alpha > 0.0)) throw ConfigError(item.at("alpha"), "threshold must be positive");
        spec.fixed.emplace(j, StepSpec(alpha));
      }
    }
  }
  try {
    return permutation_chain(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p.at("fixed"), e.what());
  }
}

Case111 case111(const Params& p) {
  return {p.fn("phi1"), p.fn("phi4"), p.fn("phi6"), p.fn("xi"), p.fn("f"), p.fn("gamma"), p.number("a")};
}

Case112 case112(const Params& p) {
  Case112 c;
  c.phi1 = p.fn("phi1");
  c.phi4 = p.fn("phi4");
  c.xi = p.fn("xi");
  c.alpha6 = p.number("alpha6");
  c.beta = p.fn("beta");
  c.gamma = p.fn("gamma");
  c.theta = p.fn("theta");
  c.v = p.fn("v");
  c.a = p.number("a");
  c.b = p.number("b");
  if (!(c.alpha6 > 0.0)) throw ConfigError(p.at("alpha6"), "threshold must be positive");
  return c;
}

Case122 case122(const Params& p) {
  Case122 c;
  c.phi1 = p.fn("phi1");
  c.alpha4 = p.number("alpha4");
  c.alpha6 = p.number("alpha6");
  c.omega = p.fn("omega");
  c.delta = p.fn("delta");
  c.zeta = p.fn("zeta");
  c.p = p.fn("p");
  c.d = p.fn("d");
  c.e = p.fn("e");
  c.m = p.fn("m");
  c.a = p.number("a");
  if (!(c.alpha4 > 0.0)) throw ConfigError(p.at("alpha4"), "threshold must be positive");
  if (!(c.alpha4 < c.alpha6)) throw ConfigError(p.at("alpha6"), "requires alpha4 < alpha6");
  return c;
}

Case222 case222(const Params& p) {
  Case222 c;
  c.alpha1 = p.number("alpha1");
  c.alpha4 = p.number("alpha4");
  c.alpha6 = p.number("alpha6");
  c.l = p.fn("l");
  c.w = p.fn("w");
  c.A = p.fn("A");
  c.B = p.fn("B");
  c.c = p.fn("c");
  c.g = p.fn("g");
  c.q = p.fn("q");
  c.a = p.number("a");
  c.b = p.number("b");
  if (!(c.alpha1 > 0.0)) throw ConfigError(p.at("alpha1"), "threshold must be positive");
  if (!(c.alpha1 < c.alpha4)) throw ConfigError(p.at("alpha4"), "requires alpha1 < alpha4");
  if (!(c.alpha4 < c.alpha6)) throw ConfigError(p.at("alpha6"), "requires alpha4 < alpha6");
  return c;
}

DomainWindow window_of(const json& v, const std::string& path) {
  const Params w(v, path);
  DomainWindow out;
  out.s_min = w.number_or("s_min", 0.0);
  if (w.has("t_max")) out.t_max = w.number("t_max");
  if (!(out.s_min >= 0.0)) throw ConfigError(w.at("s_min"), "must be >= 0");
  if (!(out.s_min < out.t_max)) throw ConfigError(w.at("t_max"), "must exceed s_min");
  return out;
}

}  // namespace

LoadedChain build_chain(const json& doc, const std::filesystem::path& base_dir, const std::string& key_path) {
  if (!doc.is_object()) throw ConfigError(key_path, "expected a JSON object");
  const std::string gpath = join(key_path, "generator");
  if (!doc.contains("generator")) throw ConfigError(gpath, "missing generator");
  if (!doc["generator"].is_string()) throw ConfigError(gpath, "expected a string");
  const std::string generator = doc["generator"].get<std::string>();
  if (std::find(kGenerators.begin(), kGenerators.end(), generator) == kGenerators.end()) {
    throw ConfigError(gpath, "unknown generator '" + generator + "'");
  }
  const std::string ppath = join(key_path, "params");
  if (!doc.contains("params")) throw ConfigError(ppath, "missing params");
  const Params p(doc["params"], ppath);

  std::optional<DomainWindow> window;
  if (doc.contains("window")) window = window_of(doc["window"], join(key_path, "window"));

  std::optional<ChainFamily> chain;
  std::optional<RowSumDiagnostics> diagnostics;
  double max_asymmetry = 0.0;

  if (generator == "permutation") {
    chain = build_permutation(p);
  } else if (generator == "triangular3-111") {
    chain = triangular3_case111(case111(p));
  } else if (generator == "triangular3-112") {
    chain = triangular3_case112(case112(p));
  } else if (generator == "triangular3-122") {
    chain = triangular3_case122(case122(p));
  } else if (generator == "triangular3-222") {
    chain = triangular3_case222(case222(p));
  } else if (generator == "triangular3-121") {
    chain = triangular3_similar(SimilarCase::C121, case112(p));
  } else if (generator == "triangular3-211") {
    chain = triangular3_similar(SimilarCase::C211, case112(p));
  } else if (generator == "triangular3-221") {
    chain = triangular3_similar(SimilarCase::C221, case122(p));
  } else if (generator == "triangular3-212") {
    chain = triangular3_similar(SimilarCase::C212, case122(p));
  } else if (generator == "constant") {
    chain = constant_chain(matrix_of(p.get("matrix"), p.at("matrix")));
  } else if (generator == "symmetric") {
    SymmetricParams sp;
    const json& phi = p.get("phi");
    if (!phi.is_array() || phi.empty()) throw ConfigError(p.at("phi"), "expected a non-empty array");
    for (std::size_t i = 0; i < phi.size(); ++i) sp.phi.push_back(Params::to_fn(phi[i], join(p.at("phi"), i)));
    const json& gamma = p.get("gamma");
    const std::size_t n = phi.size();
    if (!gamma.is_array() || gamma.size() != n) {
      throw ConfigError(p.at("gamma"), "expected " + std::to_string(n) + " rows");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::string rpath = join(p.at("gamma"), i);
      if (!gamma[i].is_array() || gamma[i].size() != n) {
        throw ConfigError(rpath, "expected a row of length " + std::to_string(n));
      }
      sp.gamma.emplace_back();
      for (std::size_t k = 0; k < n; ++k) sp.gamma.back().push_back(Params::to_fn(gamma[i][k], join(rpath, k)));
    }
    const double tol = p.number_or("tol", 1e-9);
    SamplingPlan plan;
    if (window) {
      plan.lo = std::max(plan.lo, window->s_min);
      plan.hi = std::min(plan.hi, window->t_max);
    }
    try {
      auto sym = symmetric_chain(sp, tol, plan);
      chain = std::move(sym.chain);
      diagnostics = sym.diagnostics;
      max_asymmetry = sym.max_asymmetry;
    } catch (const SymmetryError& e) {
      throw ConfigError(p.at("gamma"), e.what());
    }
  } else {  // direct-sum
    const json& blocks = p.get("blocks");
    const std::string bpath = p.at("blocks");
    if (!blocks.is_array() || blocks.empty()) throw ConfigError(bpath, "expected a non-empty array");
    std::vector<ChainFamily> parts;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const std::string kpath = join(bpath, k);
      if (blocks[k].is_string()) {
        std::filesystem::path ref = blocks[k].get<std::string>();
        if (ref.is_relative()) ref = base_dir / ref;
        json sub;
        try {
          sub = read_json(ref);
        } catch (const ConfigError& e) {
          throw ConfigError(kpath, e.what());
        }
        parts.push_back(build_chain(sub, ref.parent_path(), kpath).chain);
      } else {
        parts.push_back(build_chain(blocks[k], base_dir, kpath).chain);
      }
    }
    try {
      chain = direct_sum(parts);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(bpath, e.what());
    }
  }

  if (window) {
    DomainWindow w = *window;
    w.s_min = std::max(w.s_min, chain->window().s_min);
    w.t_max = std::min(w.t_max, chain->window().t_max);
    try {
      chain->set_window(w);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(join(key_path, "window"), e.what());
    }
  }
  if (doc.contains("relabel")) {
    const std::string rpath = join(key_path, "relabel");
    const auto perm = one_based_permutation(doc["relabel"], rpath);
    if (static_cast<int>(perm.size()) != chain->dim()) {
      throw ConfigError(rpath, "length must equal the dimension " + std::to_string(chain->dim()));
    }
    chain = relabel(*chain, perm);
  }

  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ConfigError(join(key_path, "name"), "expected a string");
    name = doc["name"].get<std::string>();
  }
  return LoadedChain{std::move(*chain), name, generator, doc, diagnostics, max_asymmetry};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": invalid JSON at byte " + std::to_string(e.byte));
  }
}

LoadedChain load_chain(const std::filesystem::path& path) {
  return build_chain(read_json(path), path.parent_path());
}

std::uint64_t config_hash(const json& doc) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cea

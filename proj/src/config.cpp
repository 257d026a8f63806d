#include "metais/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace metais {
namespace {

using nlohmann::json;

std::size_t line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Field access with path-qualified diagnostics.
class Reader {
 public:
  Reader(const json& j, std::string path, const std::string& text) : j_(j), path_(std::move(path)), text_(text) {
    if (!j_.is_object()) fail("expected an object", path_);
  }

  [[noreturn]] void fail(const std::string& msg, const std::string& field) const {
    const std::string leaf = field.substr(field.find_last_of('.') + 1);
    const std::size_t line = line_of_key(text_, leaf.substr(0, leaf.find('[')));
    throw ConfigError("config: " + field + ": " + msg + (line ? " (line " + std::to_string(line) + ")" : ""), line, field);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) const {
    if (!has(key)) fail("missing required field", field(key));
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> def = {}) const {
    if (!has(key)) {
      if (def) return *def;
      fail("missing required field", field(key));
    }
    const json& v = j_.at(key);
    if (!v.is_number()) fail("expected a number", field(key));
    return v.get<double>();
  }
  std::uint64_t count(const std::string& key, std::optional<std::uint64_t> def = {}) const {
    if (!has(key)) {
      if (def) return *def;
      fail("missing required field", field(key));
    }
    const json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    fail("expected a nonnegative integer", field(key));
  }
  std::string string(const std::string& key, std::optional<std::string> def = {}) const {
    if (!has(key)) {
      if (def) return *def;
      fail("missing required field", field(key));
    }
    const json& v = j_.at(key);
    if (!v.is_string()) fail("expected a string", field(key));
    return v.get<std::string>();
  }
  bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail("expected true or false", field(key));
    return v.get<bool>();
  }
  Reader child(const std::string& key) const { return Reader(at(key), field(key), text_); }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail("unknown field", field(it.key()));
  }

 private:
  const json& j_;
  std::string path_;
  const std::string& text_;
  mutable std::set<std::string> seen_;
};

std::vector<Marginal> read_marginals(const json& arr, const std::string& path, const std::string& text) {
  std::vector<Marginal> out;
  if (!arr.is_array()) Reader(json::object(), "", text).fail("expected an array", path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader r(arr[i], path + "[" + std::to_string(i) + "]", text);
    const std::string kind = r.string("kind");
    const std::uint64_t repeat = r.count("repeat", 1);
    if (repeat < 1) r.fail("must be >= 1", r.field("repeat"));
    std::optional<Marginal> m;
    try {
      if (kind == "normal") m = Marginal::normal(r.number("mean"), r.number("std"));
      else if (kind == "lognormal") m = Marginal::lognormal(r.number("mean"), r.number("std"));
      else if (kind == "uniform") m = Marginal::uniform(r.number("lower"), r.number("upper"));
      else r.fail("unknown marginal kind '" + kind + "'", r.field("kind"));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what(), r.field("kind"));
    }
    r.reject_unknown();
    out.insert(out.end(), repeat, *m);
  }
  return out;
}

json marginal_json(const Marginal& m) {
  switch (m.kind()) {
    case MarginalKind::normal: return {{"kind", "normal"}, {"mean", m.param_a()}, {"std", m.param_b()}};
    case MarginalKind::lognormal: return {{"kind", "lognormal"}, {"mean", m.param_a()}, {"std", m.param_b()}};
    case MarginalKind::uniform: return {{"kind", "uniform"}, {"lower", m.param_a()}, {"upper", m.param_b()}};
  }
  return {};
}

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // keep a float a float on reparse
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  out += s;
}

void write(std::string& out, const json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        write(out, j[i], indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: write_number(out, j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::mc: return "mc";
    case Method::is: return "is";
    case Method::metais: return "metais";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "mc") return Method::mc;
  if (name == "is") return Method::is;
  if (name == "metais") return Method::metais;
  throw ConfigError("config: method: unknown method '" + name + "' (expected mc, is or metais)", 0, "method");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size())), '\n'));
    throw ConfigError("config: syntax error at line " + std::to_string(line) + ": " + e.what(), line, "");
  }

  RunConfig c;
  Reader r(j, "", text);

  Reader p = r.child("problem");
  c.problem.kind = p.string("kind");
  if (c.problem.kind == "parabola") {
    c.problem.b = p.number("b", 5.0);
    c.problem.kappa = p.number("kappa", 0.5);
    c.problem.e = p.number("e", 0.1);
  } else if (c.problem.kind == "rackwitz") {
    c.problem.a = p.number("a", 3.0);
    c.problem.sigma = p.number("sigma", 0.2);
  } else if (c.problem.kind == "linear") {
    c.problem.beta0 = p.number("beta0", 2.0);
  } else if (c.problem.kind == "external") {
    c.problem.command = p.string("command");
    c.problem.timeout_seconds = p.number("timeout_seconds", 3600.0);
  } else {
    p.fail("unknown problem kind '" + c.problem.kind + "'", "problem.kind");
  }
  p.reject_unknown();

  c.marginals = read_marginals(r.at("marginals"), "marginals", text);
  if (r.has("instrumental")) c.instrumental = read_marginals(r.at("instrumental"), "instrumental", text);

  try {
    c.method = parse_method(r.string("method", "metais"));
  } catch (const ConfigError& e) {
    r.fail(e.what(), "method");
  }
  c.target_cov = r.number("target_cov", 0.02);
  c.n_max = r.count("n_max", 10000);
  c.k_per_iter = r.count("k_per_iter", 2);
  if (!r.has("seed")) r.fail("missing required field (runs must be reproducible)", "seed");
  c.seed = r.count("seed");
  c.output = r.string("output", "");
  c.parallel_phases = r.boolean("parallel_phases", false);

  if (r.has("mcmc")) {
    Reader m = r.child("mcmc");
    c.mcmc.burn_in = m.count("burn_in", 100);
    c.mcmc.thinning = m.count("thinning", 10);
    c.mcmc.chains = m.count("chains", 4);
    c.mcmc.max_stepout = m.count("max_stepout", 32);
    c.mcmc.width_scale = m.number("width_scale", 1.0);
    m.reject_unknown();
  }
  if (r.has("refinement")) {
    Reader f = r.child("refinement");
    c.refinement.population_size = f.count("population_size", 10000);
    c.refinement.population_thinning = f.count("population_thinning", 1);
    c.refinement.m_min = f.count("m_min", 30);
    c.refinement.m_max = f.count("m_max", 1000);
    if (f.has("initial_doe_size")) c.refinement.initial_doe_size = f.count("initial_doe_size");
    if (f.has("loo_band")) {
      const json& band = f.at("loo_band");
      if (!band.is_array() || band.size() != 2 || !band[0].is_number() || !band[1].is_number())
        f.fail("expected [low, high]", "refinement.loo_band");
      c.refinement.loo_low = band[0].get<double>();
      c.refinement.loo_high = band[1].get<double>();
    }
    c.refinement.strategy = f.string("strategy", "hstar");
    c.refinement.trend = f.string("trend", "constant");
    f.reject_unknown();
  }
  if (r.has("estimation")) {
    Reader s = r.child("estimation");
    c.estimation.batch_pf_eps = s.count("batch_pf_eps", 1000);
    c.estimation.batch_corr = s.count("batch_corr", 50);
    c.estimation.batch_mc = s.count("batch_mc", 10000);
    c.estimation.n_max_pf_eps = s.count("n_max_pf_eps", 100000000);
    s.reject_unknown();
  }
  r.reject_unknown();
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  auto bad = [](const std::string& field, const std::string& msg) {
    throw ConfigError("config: " + field + ": " + msg, 0, field);
  };
  if (c.marginals.empty()) bad("marginals", "at least one marginal required");
  if (!(c.target_cov > 0.0 && c.target_cov < 1.0)) bad("target_cov", "must be in (0, 1)");
  if (c.n_max < 1) bad("n_max", "must be >= 1");
  if (c.k_per_iter < 1) bad("k_per_iter", "must be >= 1");
  if (c.problem.kind == "parabola" && c.marginals.size() != 2) bad("marginals", "parabola needs exactly 2 inputs");
  if (c.problem.kind == "external" && !(c.problem.timeout_seconds > 0.0)) bad("problem.timeout_seconds", "must be > 0");
  if (c.method == Method::is && c.instrumental.size() != c.marginals.size())
    bad("instrumental", "method 'is' needs one instrumental marginal per input");
  if (c.mcmc.thinning < 1) bad("mcmc.thinning", "must be >= 1");
  if (c.mcmc.chains < 1) bad("mcmc.chains", "must be >= 1");
  if (c.mcmc.max_stepout < 1) bad("mcmc.max_stepout", "must be >= 1");
  if (!(c.mcmc.width_scale > 0.0)) bad("mcmc.width_scale", "must be > 0");
  if (c.refinement.population_thinning < 1) bad("refinement.population_thinning", "must be >= 1");
  if (c.refinement.population_size < c.k_per_iter) bad("refinement.population_size", "must be >= k_per_iter");
  if (c.refinement.m_max < c.refinement.m_min) bad("refinement.m_max", "must be >= m_min");
  if (!(c.refinement.loo_low <= c.refinement.loo_high)) bad("refinement.loo_band", "low must not exceed high");
  if (c.refinement.strategy != "hstar" && c.refinement.strategy != "u") bad("refinement.strategy", "expected hstar or u");
  if (c.refinement.trend != "constant" && c.refinement.trend != "linear") bad("refinement.trend", "expected constant or linear");
  if (c.estimation.batch_pf_eps < 1 || c.estimation.batch_corr < 1 || c.estimation.batch_mc < 1)
    bad("estimation", "batch sizes must be >= 1");
  if (c.estimation.n_max_pf_eps < 1) bad("estimation.n_max_pf_eps", "must be >= 1");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path, 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json config_to_json(const RunConfig& c) {
  json problem = {{"kind", c.problem.kind}};
  if (c.problem.kind == "parabola") {
    problem["b"] = c.problem.b;
    problem["kappa"] = c.problem.kappa;
    problem["e"] = c.problem.e;
  } else if (c.problem.kind == "rackwitz") {
    problem["a"] = c.problem.a;
    problem["sigma"] = c.problem.sigma;
  } else if (c.problem.kind == "linear") {
    problem["beta0"] = c.problem.beta0;
  } else {
    problem["command"] = c.problem.command;
    problem["timeout_seconds"] = c.problem.timeout_seconds;
  }
  json marginals = json::array(), instrumental = json::array();
  for (const auto& m : c.marginals) marginals.push_back(marginal_json(m));
  for (const auto& m : c.instrumental) instrumental.push_back(marginal_json(m));

  json refinement = {{"population_size", c.refinement.population_size},
                     {"population_thinning", c.refinement.population_thinning},
                     {"m_min", c.refinement.m_min},
                     {"m_max", c.refinement.m_max},
                     {"loo_band", {c.refinement.loo_low, c.refinement.loo_high}},
                     {"strategy", c.refinement.strategy},
                     {"trend", c.refinement.trend}};
  if (c.refinement.initial_doe_size) refinement["initial_doe_size"] = *c.refinement.initial_doe_size;

  json j = {{"problem", problem},
            {"marginals", marginals},
            {"method", to_string(c.method)},
            {"target_cov", c.target_cov},
            {"n_max", c.n_max},
            {"k_per_iter", c.k_per_iter},
            {"seed", c.seed},
            {"output", c.output},
            {"parallel_phases", c.parallel_phases},
            {"mcmc",
             {{"burn_in", c.mcmc.burn_in},
              {"thinning", c.mcmc.thinning},
              {"chains", c.mcmc.chains},
              {"max_stepout", c.mcmc.max_stepout},
              {"width_scale", c.mcmc.width_scale}}},
            {"refinement", refinement},
            {"estimation",
             {{"batch_pf_eps", c.estimation.batch_pf_eps},
              {"batch_corr", c.estimation.batch_corr},
              {"batch_mc", c.estimation.batch_mc},
              {"n_max_pf_eps", c.estimation.n_max_pf_eps}}}};
  if (!c.instrumental.empty()) j["instrumental"] = instrumental;
  return j;
}

std::string dump_json(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

}  // namespace metais

#include "config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tailspec.hpp"

namespace ldplab::config {

namespace {

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

SectionMap parse_ini(const std::string& text, std::vector<std::string>& errs) {
  SectionMap out;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errs.push_back("line " + std::to_string(lineno) + ": unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  std::ostringstream os;
  os.precision(17);
  if (v.is_number_integer())
    os << v.get<long long>();
  else if (v.is_number_unsigned())
    os << v.get<unsigned long long>();
  else
    os << v.get<double>();
  return os.str();
}

SectionMap parse_json(const std::string& text, std::vector<std::string>& errs) {
  SectionMap out;
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    errs.push_back("invalid JSON");
    return out;
  }
  for (auto& [sec, body] : j.items()) {
    if (!body.is_object()) {
      errs.push_back("section '" + sec + "' must be an object");
      continue;
    }
    for (auto& [key, val] : body.items()) {
      if (val.is_array()) {
        std::string joined;
        for (const auto& e : val) {
          if (!joined.empty()) joined += ",";
          joined += json_scalar(e);
        }
        out[sec][key] = joined;
      } else {
        out[sec][key] = json_scalar(val);
      }
    }
  }
  return out;
}

struct Reader {
  const SectionMap& m;
  std::vector<std::string>& errs;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = m.find(sec);
    return s != m.end() && s->second.count(key) > 0;
  }
  std::string raw(const std::string& sec, const std::string& key,
                  const std::string& fallback = "") const {
    auto s = m.find(sec);
    if (s == m.end()) return fallback;
    auto it = s->second.find(key);
    return it == s->second.end() ? fallback : it->second;
  }
  double num(const std::string& sec, const std::string& key, double fallback) {
    if (!has(sec, key)) return fallback;
    try {
      std::size_t used = 0;
      std::string v = raw(sec, key);
      double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      errs.push_back(sec + "." + key + ": not a number ('" + raw(sec, key) + "')");
      return fallback;
    }
  }
  std::vector<double> nums(const std::string& sec, const std::string& key) {
    std::vector<double> out;
    std::string v = raw(sec, key);
    if (v.empty()) return out;
    std::istringstream is(v);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        out.push_back(std::stod(trim(tok)));
      } catch (const std::exception&) {
        errs.push_back(sec + "." + key + ": bad list element '" + tok + "'");
      }
    }
    return out;
  }
};

NoiseLaw read_noise(Reader& r, const std::string& sec,
                    std::vector<std::string>& errs) {
  std::string kind = r.raw(sec, "kind", "pareto");
  try {
    if (kind == "pareto") {
      rv::TailSpec ts;
      ts.alpha = r.num(sec, "alpha", 1.5);
      ts.p = r.num(sec, "p", 0.5);
      ts.q = r.has(sec, "q") ? r.num(sec, "q", 0.5) : 1.0 - ts.p;
      ts.x_m = r.num(sec, "x_m", 1.0);
      return NoiseLaw::make_pareto(ts);
    }
    if (kind == "gaussian") return NoiseLaw::make_gaussian(r.num(sec, "sd", 1.0));
    if (kind == "student_t")
      return NoiseLaw::make_student_t(r.num(sec, "nu", 3.0),
                                      r.num(sec, "scale", 1.0));
    if (kind == "lognormal")
      return NoiseLaw::make_lognormal(r.num(sec, "mu", 0.0),
                                      r.num(sec, "sigma", 1.0));
    if (kind == "discrete3")
      return NoiseLaw::make_discrete3(r.nums(sec, "values"), r.nums(sec, "probs"));
    errs.push_back(sec + ".kind: unknown noise kind '" + kind + "'");
  } catch (const std::exception& e) {
    errs.push_back(sec + ": " + e.what());
  }
  return NoiseLaw::make_gaussian(1.0);
}

void fmt_num(std::ostringstream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void write_noise(std::ostringstream& os, const std::string& sec,
                 const NoiseLaw& law) {
  os << "[" << sec << "]\n";
  switch (law.kind) {
    case NoiseLaw::Kind::Pareto:
      os << "kind = pareto\nalpha = ";
      fmt_num(os, law.pareto.alpha);
      os << "\np = ";
      fmt_num(os, law.pareto.p);
      os << "\nq = ";
      fmt_num(os, law.pareto.q);
      os << "\nx_m = ";
      fmt_num(os, law.pareto.x_m);
      os << "\n";
      break;
    case NoiseLaw::Kind::Gaussian:
      os << "kind = gaussian\nsd = ";
      fmt_num(os, law.sd);
      os << "\n";
      break;
    case NoiseLaw::Kind::StudentT:
      os << "kind = student_t\nnu = ";
      fmt_num(os, law.nu);
      os << "\nscale = ";
      fmt_num(os, law.t_scale);
      os << "\n";
      break;
    case NoiseLaw::Kind::LogNormal:
      os << "kind = lognormal\nmu = ";
      fmt_num(os, law.ln_mu);
      os << "\nsigma = ";
      fmt_num(os, law.ln_sigma);
      os << "\n";
      break;
    case NoiseLaw::Kind::Discrete3: {
      os << "kind = discrete3\nvalues = ";
      for (int i = 0; i < 3; ++i) {
        if (i) os << ",";
        fmt_num(os, law.values[i]);
      }
      os << "\nprobs = ";
      for (int i = 0; i < 3; ++i) {
        if (i) os << ",";
        fmt_num(os, law.probs[i]);
      }
      os << "\n";
      break;
    }
  }
}

}  // namespace

SchemaError::SchemaError(const std::vector<std::string>& v)
    : std::runtime_error("config schema errors:\n  " + [&] {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
          s += (i ? "\n  " : "") + v[i];
        return s;
      }()),
      violations(v) {}

ExperimentConfig parse_text(const std::string& text) {
  std::vector<std::string> errs;
  std::string body = trim(text);
  SectionMap m = body.empty() || body.front() != '{' ? parse_ini(text, errs)
                                                     : parse_json(text, errs);
  Reader r{m, errs};
  ExperimentConfig cfg;

  cfg.kind = r.raw("experiment", "kind", "ratio");
  if (r.has("experiment", "n_grid")) {
    cfg.n_grid.clear();
    for (double v : r.nums("experiment", "n_grid"))
      cfg.n_grid.push_back(static_cast<std::size_t>(v));
  }
  cfg.x_per_n = static_cast<int>(r.num("experiment", "x_per_n", cfg.x_per_n));
  cfg.x_factors = r.nums("experiment", "x_factors");
  cfg.reps = static_cast<std::size_t>(r.num("experiment", "reps",
                                            static_cast<double>(cfg.reps)));
  cfg.seed = static_cast<std::uint64_t>(r.num("experiment", "seed", 1.0));
  cfg.workers = static_cast<int>(r.num("experiment", "workers", cfg.workers));
  cfg.out_dir = r.raw("experiment", "out_dir", cfg.out_dir);

  cfg.rule = r.raw("region", "rule", "");
  cfg.delta = r.num("region", "delta", cfg.delta);
  cfg.a = r.num("region", "a", cfg.a);
  cfg.gamma = r.num("region", "gamma", cfg.gamma);

  if (r.has("schedules", "k_grid")) {
    cfg.k_grid.clear();
    for (double v : r.nums("schedules", "k_grid"))
      cfg.k_grid.push_back(static_cast<int>(v));
  }
  cfg.small_set_c = r.num("regen", "small_set_c", cfg.small_set_c);

  std::string mk = r.raw("model", "kind", "iid");
  try {
    cfg.model.kind = models::kind_from_name(mk);
  } catch (const std::exception& e) {
    errs.push_back(std::string("model.kind: ") + e.what());
  }
  cfg.model.theta = r.nums("model", "theta");
  cfg.model.phi = r.num("model", "phi", 0.0);
  cfg.model.sv_a = r.num("model", "sv_a", 0.0);
  cfg.model.sv_eta_sd = r.num("model", "sv_eta_sd", 1.0);
  cfg.model.garch_a0 = r.num("model", "garch_a0", 1e-5);
  cfg.model.garch_a1 = r.num("model", "garch_a1", 0.1);
  cfg.model.garch_b1 = r.num("model", "garch_b1", 0.8);
  cfg.model.noise = read_noise(r, "noise", errs);
  if (m.count("a_law")) cfg.model.a_law = read_noise(r, "a_law", errs);
  if (m.count("c_law")) cfg.model.c_law = read_noise(r, "c_law", errs);
  if (m.count("d_law")) cfg.model.d_law = read_noise(r, "d_law", errs);

  if (!errs.empty()) throw SchemaError(errs);
  return cfg;
}

ExperimentConfig load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SchemaError({"cannot open config file: " + path});
  std::ostringstream os;
  os << f.rdbuf();
  return parse_text(os.str());
}

std::string serialize(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[experiment]\nkind = " << cfg.kind << "\nn_grid = ";
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i)
    os << (i ? "," : "") << cfg.n_grid[i];
  os << "\nx_per_n = " << cfg.x_per_n << "\n";
  if (!cfg.x_factors.empty()) {
    os << "x_factors = ";
    for (std::size_t i = 0; i < cfg.x_factors.size(); ++i) {
      if (i) os << ",";
      fmt_num(os, cfg.x_factors[i]);
    }
    os << "\n";
  }
  os << "reps = " << cfg.reps << "\nseed = " << cfg.seed
     << "\nworkers = " << cfg.workers << "\nout_dir = " << cfg.out_dir << "\n\n";

  os << "[region]\n";
  if (!cfg.rule.empty()) os << "rule = " << cfg.rule << "\n";
  os << "delta = ";
  fmt_num(os, cfg.delta);
  os << "\na = ";
  fmt_num(os, cfg.a);
  os << "\ngamma = ";
  fmt_num(os, cfg.gamma);
  os << "\n\n[schedules]\nk_grid = ";
  for (std::size_t i = 0; i < cfg.k_grid.size(); ++i)
    os << (i ? "," : "") << cfg.k_grid[i];
  os << "\n\n[regen]\nsmall_set_c = ";
  fmt_num(os, cfg.small_set_c);
  os << "\n\n[model]\nkind = " << models::kind_name(cfg.model.kind) << "\n";
  if (!cfg.model.theta.empty()) {
    os << "theta = ";
    for (std::size_t i = 0; i < cfg.model.theta.size(); ++i) {
      if (i) os << ",";
      fmt_num(os, cfg.model.theta[i]);
    }
    os << "\n";
  }
  os << "phi = ";
  fmt_num(os, cfg.model.phi);
  os << "\nsv_a = ";
  fmt_num(os, cfg.model.sv_a);
  os << "\nsv_eta_sd = ";
  fmt_num(os, cfg.model.sv_eta_sd);
  os << "\ngarch_a0 = ";
  fmt_num(os, cfg.model.garch_a0);
  os << "\ngarch_a1 = ";
  fmt_num(os, cfg.model.garch_a1);
  os << "\ngarch_b1 = ";
  fmt_num(os, cfg.model.garch_b1);
  os << "\n\n";
  write_noise(os, "noise", cfg.model.noise);
  using MK = models::Kind;
  if (cfg.model.kind == MK::SRE_AFFINE || cfg.model.kind == MK::SRE_MAX ||
      cfg.model.kind == MK::LETAC) {
    os << "\n";
    write_noise(os, "a_law", cfg.model.a_law);
  }
  if (cfg.model.kind == MK::LETAC) {
    os << "\n";
    write_noise(os, "c_law", cfg.model.c_law);
    os << "\n";
    write_noise(os, "d_law", cfg.model.d_law);
  }
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig canon = cfg;
  canon.out_dir = "";
  canon.workers = 0;
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016zx",
                std::hash<std::string>{}(serialize(canon)));
  return buf;
}

void validate(ExperimentConfig& cfg) {
  std::vector<std::string> errs;
  if (cfg.kind != "ratio" && cfg.kind != "conditions" && cfg.kind != "regen" &&
      cfg.kind != "constants")
    errs.push_back("experiment.kind: must be ratio|conditions|regen|constants");
  if (cfg.n_grid.empty()) errs.push_back("experiment.n_grid: must be nonempty");
  for (auto n : cfg.n_grid)
    if (n < 2) errs.push_back("experiment.n_grid: entries must be >= 2");
  if (cfg.reps == 0) errs.push_back("experiment.reps: must be positive");
  if (cfg.x_per_n < 1) errs.push_back("experiment.x_per_n: must be >= 1");
  if (cfg.workers < 1) errs.push_back("experiment.workers: must be >= 1");
  if (!(cfg.delta > 0.0)) errs.push_back("region.delta: must be > 0");
  if (!(cfg.gamma > 0.0)) errs.push_back("region.gamma: must be > 0");
  if (!cfg.rule.empty() && cfg.rule != "nagaev_iid" && cfg.rule != "m0_dep" &&
      cfg.rule != "sv" && cfg.rule != "markov_atom" && cfg.rule != "sre")
    errs.push_back("region.rule: unknown rule '" + cfg.rule + "'");
  if (cfg.k_grid.empty()) errs.push_back("schedules.k_grid: must be nonempty");
  for (int k : cfg.k_grid)
    if (k < 1) errs.push_back("schedules.k_grid: entries must be >= 1");
  // The schedule constraints ((k+1) delta_k <= eps_k etc.) are asymptotic in
  // k; the defaults delta_k = e^{-k}, eps_k = k^{-2} satisfy them from k = 8
  // on, so small probe values of k are allowed here.
  if (cfg.model.noise.kind == NoiseLaw::Kind::Pareto) {
    const auto& ts = cfg.model.noise.pareto;
    if (std::abs(ts.p + ts.q - 1.0) > 1e-12)
      errs.push_back("noise.p/noise.q: p + q must equal 1");
  }
  try {
    cfg.model.validate();
  } catch (const std::exception& e) {
    errs.push_back(std::string("model: ") + e.what());
  }
  if (!errs.empty()) throw SchemaError(errs);
}

}  // namespace ldplab::config

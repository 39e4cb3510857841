#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace bifi {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& key, const std::string& v, int line, long long lo,
                    long long hi) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    if (x < lo || x > hi)
      throw ConfigError("value " + v + " for " + key + " out of range [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]",
                        key, line);
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse integer '" + v + "' for key " + key, key, line);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse unsigned integer '" + v + "' for key " + key, key, line);
  }
}

double parse_real(const std::string& key, const std::string& v, int line, double lo, double hi) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    if (!(x >= lo && x <= hi))
      throw ConfigError("value " + v + " for " + key + " out of range", key, line);
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse real '" + v + "' for key " + key, key, line);
  }
}

void expect_one_of(const std::string& key, const std::string& v, int line,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string msg = "value '" + v + "' for " + key + " must be one of:";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg, key, line);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value,
                                  int line)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.command",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         expect_one_of(k, v, line,
                       {"run-test", "sweep", "solve-hf", "solve-lf", "reference", "selftest"});
         c.command = v;
       }},
      {"run.preset",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         expect_one_of(k, v, line, {"1", "2", "3", "4", "5", "custom"});
         c.preset = v;
       }},
      {"run.epsilon",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         if (v == "preset") {
           c.epsilon = v;
           return;
         }
         parse_real(k, v, line, 1e-12, 1e6);
         c.epsilon = v;
       }},
      {"run.z",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         std::vector<double> z;
         std::istringstream in(v);
         std::string tok;
         while (in >> tok) z.push_back(parse_real(k, tok, line, -1.0, 1.0));
         c.z = std::move(z);
       }},
      {"run.out",
       [](RunConfig& c, const std::string&, const std::string& v, int) { c.out_dir = v; }},
      {"run.workers",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.workers = static_cast<int>(parse_int(k, v, line, 0, 4096));
       }},
      {"run.seed",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.seed = parse_u64(k, v, line);
       }},
      {"selection.n",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.n = static_cast<int>(parse_int(k, v, line, 0, 1000000));
       }},
      {"selection.n_list",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         if (v != "none") {
           std::stringstream in(v);
           std::string tok;
           while (std::getline(in, tok, ','))
             parse_int(k, trim(tok), line, 1, 1000000);
         }
         c.n_list = v;
       }},
      {"selection.candidates",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.candidates = static_cast<int>(parse_int(k, v, line, 1, 10000000));
       }},
      {"selection.validation",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.validation = static_cast<int>(parse_int(k, v, line, 1, 10000000));
       }},
      {"selection.tol",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.tol = parse_real(k, v, line, 0.0, 1.0);
       }},
      {"selection.validation_seed",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.validation_seed = parse_u64(k, v, line);
       }},
      {"model.lf_sigma_scale",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.lf_sigma_scale = parse_real(k, v, line, 1e-6, 1e6);
       }},
      {"model.sparse_level",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.sparse_level = static_cast<int>(parse_int(k, v, line, 0, 6));
       }},
      {"model.velocity_nodes",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.velocity_nodes = static_cast<int>(parse_int(k, v, line, 1, 128));
       }},
      {"model.bound_c1",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.bound_c1 = parse_real(k, v, line, 0.0, 1e6);
       }},
      {"model.bound_c2",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.bound_c2 = parse_real(k, v, line, 0.0, 1e6);
       }},
      {"custom.dimension",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.dimension = static_cast<int>(parse_int(k, v, line, 1, 10));
       }},
      {"custom.sigma",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         expect_one_of(k, v, line,
                       {"fourier-cosine", "fourier-sine", "piecewise-fourier", "constant"});
         c.custom.sigma_kind = v;
       }},
      {"custom.sigma_base",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.sigma_base = parse_real(k, v, line, 1e-9, 1e9);
       }},
      {"custom.sigma_amp",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.sigma_amp = parse_real(k, v, line, -1e9, 1e9);
       }},
      {"custom.sigma_break",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.sigma_break = parse_real(k, v, line, 0.0, 1.0);
       }},
      {"custom.sigma_right",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.sigma_right = parse_real(k, v, line, 1e-9, 1e9);
       }},
      {"custom.epsilon_kind",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         expect_one_of(k, v, line, {"constant", "tanh"});
         c.custom.epsilon_kind = v;
       }},
      {"custom.epsilon_value",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.epsilon_value = parse_real(k, v, line, 1e-12, 1e6);
       }},
      {"custom.initial",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         expect_one_of(k, v, line,
                       {"zero", "double-gaussian", "riemann-step", "gaussian-pulse"});
         c.custom.initial = v;
       }},
      {"custom.pulse_xi",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.pulse_xi = parse_real(k, v, line, 1e-9, 1e9);
       }},
      {"custom.step_left_const",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.step_left_const = parse_real(k, v, line, -1e9, 1e9);
       }},
      {"custom.step_left_z1",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.step_left_z1 = parse_real(k, v, line, -1e9, 1e9);
       }},
      {"custom.boundary",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         expect_one_of(k, v, line, {"periodic", "inflow"});
         c.custom.boundary = v;
       }},
      {"custom.inflow_left_const",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.inflow_left_const = parse_real(k, v, line, -1e9, 1e9);
       }},
      {"custom.inflow_left_z1",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.inflow_left_z1 = parse_real(k, v, line, -1e9, 1e9);
       }},
      {"custom.inflow_right_const",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.inflow_right_const = parse_real(k, v, line, -1e9, 1e9);
       }},
      {"custom.inflow_right_z1",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.inflow_right_z1 = parse_real(k, v, line, -1e9, 1e9);
       }},
      {"custom.t_final",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.t_final = parse_real(k, v, line, 0.0, 1e6);
       }},
      {"custom.hf_cells",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.hf_cells = static_cast<int>(parse_int(k, v, line, 3, 1000000));
       }},
      {"custom.hf_dt",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.hf_dt = parse_real(k, v, line, 1e-15, 1e6);
       }},
      {"custom.lf_cells",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.lf_cells = static_cast<int>(parse_int(k, v, line, 3, 1000000));
       }},
      {"custom.lf_dt",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         c.custom.lf_dt = parse_real(k, v, line, 1e-15, 1e6);
       }},
  };
  return table;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(source + ": malformed section header '" + line + "'", line, line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "selection" && section != "model" &&
          section != "custom")
        throw ConfigError(source + ": unknown section [" + section + "]", section, line_no);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ": expected 'key = value', got '" + line + "'", line, line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(source + ": key '" + key + "' outside any section", key, line_no);
    std::string dotted = section + "." + key;
    auto it = setters().find(dotted);
    if (it == setters().end())
      throw ConfigError(source + ": unknown key '" + dotted + "'", dotted, line_no);
    it->second(cfg, dotted, value, line_no);
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("parse_config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
  auto it = setters().find(dotted_key);
  if (it == setters().end())
    throw ConfigError("unknown override key '" + dotted_key + "'", dotted_key, 0);
  it->second(cfg, dotted_key, value, 0);
}

namespace {

int preset_dimension(const RunConfig& cfg) {
  return cfg.preset == "custom" ? cfg.custom.dimension : 5;
}

}  // namespace

std::string render_canonical(const RunConfig& cfg) {
  ResolvedRun run = resolve(cfg);  // validates; canonical text shows resolved values
  std::ostringstream out;
  out << "[run]\n";
  out << "command = " << cfg.command << "\n";
  out << "preset = " << cfg.preset << "\n";
  out << "epsilon = " << cfg.epsilon << "\n";
  out << "z =";
  for (double zi : run.z) out << ' ' << fmt17(zi);
  out << "\n";
  out << "out = " << cfg.out_dir << "\n";
  out << "workers = " << cfg.workers << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "\n[selection]\n";
  out << "n = " << run.preset.n_select << "\n";
  out << "n_list = " << cfg.n_list << "\n";
  out << "candidates = " << run.preset.n_candidates << "\n";
  out << "validation = " << run.preset.n_validation << "\n";
  out << "tol = " << fmt17(cfg.tol) << "\n";
  out << "validation_seed = " << cfg.validation_seed << "\n";
  out << "\n[model]\n";
  out << "lf_sigma_scale = " << fmt17(cfg.lf_sigma_scale) << "\n";
  out << "sparse_level = " << cfg.sparse_level << "\n";
  out << "velocity_nodes = " << cfg.velocity_nodes << "\n";
  out << "bound_c1 = " << fmt17(cfg.bound_c1) << "\n";
  out << "bound_c2 = " << fmt17(cfg.bound_c2) << "\n";
  if (cfg.preset == "custom") {
    const CustomPresetConfig& c = cfg.custom;
    out << "\n[custom]\n";
    out << "dimension = " << c.dimension << "\n";
    out << "sigma = " << c.sigma_kind << "\n";
    out << "sigma_base = " << fmt17(c.sigma_base) << "\n";
    out << "sigma_amp = " << fmt17(c.sigma_amp) << "\n";
    out << "sigma_break = " << fmt17(c.sigma_break) << "\n";
    out << "sigma_right = " << fmt17(c.sigma_right) << "\n";
    out << "epsilon_kind = " << c.epsilon_kind << "\n";
    out << "epsilon_value = " << fmt17(c.epsilon_value) << "\n";
    out << "initial = " << c.initial << "\n";
    out << "pulse_xi = " << fmt17(c.pulse_xi) << "\n";
    out << "step_left_const = " << fmt17(c.step_left_const) << "\n";
    out << "step_left_z1 = " << fmt17(c.step_left_z1) << "\n";
    out << "boundary = " << c.boundary << "\n";
    out << "inflow_left_const = " << fmt17(c.inflow_left_const) << "\n";
    out << "inflow_left_z1 = " << fmt17(c.inflow_left_z1) << "\n";
    out << "inflow_right_const = " << fmt17(c.inflow_right_const) << "\n";
    out << "inflow_right_z1 = " << fmt17(c.inflow_right_z1) << "\n";
    out << "t_final = " << fmt17(c.t_final) << "\n";
    out << "hf_cells = " << c.hf_cells << "\n";
    out << "hf_dt = " << fmt17(c.hf_dt) << "\n";
    out << "lf_cells = " << c.lf_cells << "\n";
    out << "lf_dt = " << fmt17(c.lf_dt) << "\n";
  }
  return out.str();
}

ResolvedRun resolve(const RunConfig& cfg) {
  ResolvedRun run;
  run.command = cfg.command;
  run.out_dir = cfg.out_dir;

  if (cfg.preset == "custom") {
    const CustomPresetConfig& c = cfg.custom;
    TestPreset p;
    p.id = 0;
    p.dimension = c.dimension;
    if (c.sigma_kind == "constant")
      p.sigma = ScatteringField::constant(c.sigma_base);
    else if (c.sigma_kind == "fourier-cosine")
      p.sigma = ScatteringField::fourier_cosine(c.sigma_base, c.sigma_amp, c.dimension);
    else if (c.sigma_kind == "fourier-sine")
      p.sigma = ScatteringField::fourier_sine(c.sigma_base, c.sigma_amp, c.dimension);
    else
      p.sigma = ScatteringField::piecewise_fourier(c.sigma_base, c.sigma_amp, c.dimension,
                                                   c.sigma_break, c.sigma_right);
    p.eps = (c.epsilon_kind == "tanh") ? EpsilonField::tanh_profile()
                                       : EpsilonField::constant(c.epsilon_value);
    if (c.initial == "zero")
      p.initial = InitialData::zero();
    else if (c.initial == "double-gaussian")
      p.initial = InitialData::double_gaussian(ScatteringField::fourier_sine(1.0, 3.0, c.dimension),
                                               ScatteringField::fourier_cosine(1.0, 2.0,
                                                                               c.dimension));
    else if (c.initial == "riemann-step")
      p.initial = InitialData::riemann_step({c.step_left_const, {c.step_left_z1}});
    else
      p.initial = InitialData::gaussian_pulse(c.pulse_xi);
    if (c.boundary == "periodic")
      p.boundary = BoundarySpec::periodic();
    else
      p.boundary = BoundarySpec::inflow({c.inflow_left_const, {c.inflow_left_z1}},
                                        {c.inflow_right_const, {c.inflow_right_z1}});
    p.t_final = c.t_final;
    p.hf_cells = c.hf_cells;
    p.hf_dt = c.hf_dt;
    p.lf_cells = c.lf_cells;
    p.lf_dt = c.lf_dt;
    run.preset = p;
  } else {
    run.preset = benchmark_preset(std::stoi(cfg.preset));
  }

  if (cfg.epsilon != "preset")
    run.preset.eps = EpsilonField::constant(std::stod(cfg.epsilon));
  if (cfg.n >= 0) run.preset.n_select = cfg.n;
  if (cfg.candidates >= 1) run.preset.n_candidates = cfg.candidates;
  if (cfg.validation >= 1) run.preset.n_validation = cfg.validation;
  run.preset.lf_sigma_scale = cfg.lf_sigma_scale;
  run.preset.velocity_nodes = cfg.velocity_nodes;

  run.opts.seed = cfg.seed;
  run.opts.validation_seed = cfg.validation_seed;
  run.opts.selection_tol = cfg.tol;
  run.opts.bound_c1 = cfg.bound_c1;
  run.opts.bound_c2 = cfg.bound_c2;
  run.opts.sparse_level = cfg.sparse_level;
  run.opts.workers = cfg.workers;

  int d = preset_dimension(cfg);
  if (cfg.z.empty()) {
    run.z.assign(d, 0.0);
  } else {
    if (static_cast<int>(cfg.z.size()) != d)
      throw ArgumentError("config: z has " + std::to_string(cfg.z.size()) +
                          " entries, expected " + std::to_string(d));
    run.z = cfg.z;
  }

  if (cfg.n_list != "none") {
    std::stringstream in(cfg.n_list);
    std::string tok;
    while (std::getline(in, tok, ',')) run.n_list.push_back(std::stoi(trim(tok)));
  }
  if (cfg.command == "sweep" && run.n_list.empty())
    throw ArgumentError("config: sweep requires selection.n_list");
  return run;
}

}  // namespace bifi

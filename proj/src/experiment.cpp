#include "sttrace/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "sttrace/error.hpp"
#include "sttrace/verify.hpp"

namespace sttrace {

const char* const kCsvHeader =
    "level,h,dt,err_energy,err_surface_energy,err_linf_l2,e_mass,eoc_s,eoc_q,eoc_qs";

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

// "0-5", "0,1,3" or "0 1 3".
std::vector<int> to_levels(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    const auto dash = tok.find('-', 1);
    if (dash != std::string::npos) {
      const int a = to_int(key, tok.substr(0, dash)), b = to_int(key, tok.substr(dash + 1));
      if (b < a) throw ConfigError("key '" + key + "': empty range '" + tok + "'");
      for (int l = a; l <= b; ++l) out.push_back(l);
    } else {
      out.push_back(to_int(key, tok));
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "': no levels");
  return out;
}

Rectangle to_domain(const std::string& key, const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> d;
  std::string tok;
  while (in >> tok) d.push_back(to_double(key, tok));
  if (d.size() != 4) throw ConfigError("key '" + key + "': expected 'xmin xmax ymin ymax'");
  return Rectangle{d[0], d[1], d[2], d[3]};
}

std::string fmt(std::optional<double> v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string fmt_short(std::optional<double> v, const char* spec) {
  if (!v) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, *v);
  return buf;
}

std::string label(const ConvergenceReport& r, const LevelRow& row) {
  return r.diagonal ? std::to_string(row.ls)
                    : std::to_string(row.ls) + ":" + std::to_string(row.lq);
}

}  // namespace

void ExperimentConfig::validate() const {
  params.validate();
  if (diagonal) {
    if (levels.empty()) throw ConfigError("no levels requested");
  } else if (levels_s.empty() || levels_q.empty()) {
    throw ConfigError("grid mode needs levels_s and levels_q");
  }
  for (const auto* lv : {&levels, &levels_s, &levels_q})
    for (int l : *lv)
      if (l < 0 || l > 12) throw ConfigError("levels must lie in 0..12");
  if (h_init && !(*h_init > 0.0)) throw ConfigError("h_init must be positive");
  if (dt_init && !(*dt_init > 0.0)) throw ConfigError("dt_init must be positive");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  MethodParams& p = c.params;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value");

    if (key == "scene") {
      c.scene = val;
    } else if (key == "k") {
      p.ks = p.kq = to_int(key, val);
    } else if (key == "kg" || key == "k_g") {
      p.kgs = p.kgq = to_int(key, val);
    } else if (key == "k_s") {
      p.ks = to_int(key, val);
    } else if (key == "k_q") {
      p.kq = to_int(key, val);
    } else if (key == "k_gs") {
      p.kgs = to_int(key, val);
    } else if (key == "k_gq") {
      p.kgq = to_int(key, val);
    } else if (key == "beta") {
      p.beta = to_double(key, val);
    } else if (key == "xi") {
      const std::string v = lower(val);
      if (v == "h") p.xi_mode = XiMode::H;
      else if (v == "1/h") p.xi_mode = XiMode::InvH;
      else throw ConfigError("xi must be 'h' or '1/h'");
    } else if (key == "alpha") {
      const std::string v = lower(val);
      if (v == "simple") p.alpha = AlphaMode::Simple;
      else if (v == "improved") p.alpha = AlphaMode::Improved;
      else throw ConfigError("alpha must be 'simple' or 'improved'");
    } else if (key == "r_mode" || key == "r") {
      const std::string v = lower(val);
      if (v == "weighted") p.r_mode = RMode::Weighted;
      else if (v == "one" || v == "1") p.r_mode = RMode::One;
      else throw ConfigError("r_mode must be 'weighted' or 'one'");
    } else if (key == "mu_d") {
      p.mu_d = to_double(key, val);
    } else if (key == "l") {
      p.L = to_int(key, val);
    } else if (key == "q_s") {
      p.q_s = to_int(key, val);
    } else if (key == "levels") {
      c.levels = to_levels(key, val);
    } else if (key == "levels_s") {
      c.levels_s = to_levels(key, val);
    } else if (key == "levels_q") {
      c.levels_q = to_levels(key, val);
    } else if (key == "diagonal") {
      c.diagonal = to_bool(key, val);
    } else if (key == "h_init") {
      c.h_init = to_double(key, val);
    } else if (key == "dt_init") {
      c.dt_init = to_double(key, val);
    } else if (key == "t") {
      c.T = to_double(key, val);
    } else if (key == "domain") {
      c.domain = to_domain(key, val);
    } else if (key == "out") {
      c.out = val;
    } else if (key == "threads") {
      c.threads = to_int(key, val);
    } else if (key == "check_beta") {
      c.check_beta = to_bool(key, val);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

double default_h_init(const std::string& scene) {
  return scene == "merging_circles" ? 0.5 : 0.25;
}

double default_dt_init(const std::string& scene) {
  return scene == "merging_circles" ? 0.125 : 0.25;
}

AnalyticScene configured_scene(const ExperimentConfig& cfg) {
  AnalyticScene scene = make_scene(cfg.scene);
  if (cfg.domain) scene.set_domain(*cfg.domain);
  if (cfg.T) scene.set_final_time(*cfg.T);
  return scene;
}

bool ConvergenceReport::all_completed() const {
  return std::all_of(rows.begin(), rows.end(), [](const LevelRow& r) { return r.completed; });
}

std::optional<double> ConvergenceReport::eoc_quantity(const LevelRow& row) {
  if (row.err_energy) return row.err_energy;
  if (row.err_surface_energy) return row.err_surface_energy;
  return row.e_mass;
}

ConvergenceReport run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  const AnalyticScene scene = configured_scene(cfg);
  const double h_init = cfg.h_init.value_or(default_h_init(cfg.scene));
  const double dt_init = cfg.dt_init.value_or(default_dt_init(cfg.scene));

  ConvergenceReport report;
  report.diagonal = cfg.diagonal;
  auto add_row = [&](int ls, int lq) {
    LevelRow row;
    row.ls = ls;
    row.lq = lq;
    report.rows.push_back(std::move(row));
  };
  if (cfg.diagonal) {
    for (int l : cfg.levels) add_row(l, l);
  } else {
    for (int ls : cfg.levels_s)
      for (int lq : cfg.levels_q) add_row(ls, lq);
  }

  const Triangulation base = build_structured_mesh(scene.domain(), h_init);
  std::map<int, Triangulation> meshes;
  auto mesh_at = [&](int ls) -> const Triangulation& {
    auto it = meshes.find(ls);
    if (it != meshes.end()) return it->second;
    Triangulation m = base;
    for (int i = 0; i < ls; ++i) m = refine_uniform(m);
    return meshes.emplace(ls, std::move(m)).first->second;
  };

  for (LevelRow& row : report.rows) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const Triangulation& mesh = mesh_at(row.ls);
      const TimeGrid grid = build_time_grid(scene.T(), dt_init, row.lq);
      row.h = mesh.h();
      row.dt = grid.dt();
      ErrorAccumulator acc(scene, cfg.params);
      MarchOptions opt;
      SlabObserver inner = acc.observer();
      opt.observer = [&](const SlabRecord& cur, const SlabRecord* prev, const TraceFn& trace) {
        row.max_fallbacks = std::max(row.max_fallbacks, cur.transfer_fallbacks);
        inner(cur, prev, trace);
      };
      march(cfg.params, scene, mesh, grid, opt);
      row.report = acc.report();
      row.err_energy = row.report.energy();
      row.err_surface_energy = row.report.surface_energy();
      row.err_linf_l2 = row.report.linf_l2();
      row.e_mass = row.report.e_mass;
      row.completed = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (log) {
      *log << "level " << label(report, row) << ": "
           << (row.completed ? "done" : "FAILED: " + row.error) << " ("
           << fmt_short(row.seconds, "%.2f") << " s)\n";
      log->flush();
    }
  }

  auto find = [&](int ls, int lq) -> const LevelRow* {
    for (const LevelRow& r : report.rows)
      if (r.ls == ls && r.lq == lq && r.completed) return &r;
    return nullptr;
  };
  for (LevelRow& row : report.rows) {
    if (!row.completed) continue;
    const auto e = ConvergenceReport::eoc_quantity(row);
    if (const LevelRow* c = find(row.ls - 1, row.lq - 1))
      row.eoc_qs = eoc(ConvergenceReport::eoc_quantity(*c), e);
    if (cfg.diagonal) continue;
    if (const LevelRow* c = find(row.ls - 1, row.lq))
      row.eoc_s = eoc(ConvergenceReport::eoc_quantity(*c), e);
    if (const LevelRow* c = find(row.ls, row.lq - 1))
      row.eoc_q = eoc(ConvergenceReport::eoc_quantity(*c), e);
  }

  if (cfg.check_beta && cfg.scene == "stationary_circle" && !report.rows.empty()) {
    try {
      const LevelRow& r0 = report.rows.front();
      const TimeGrid grid = build_time_grid(scene.T(), dt_init, r0.lq);
      report.beta_defect = beta_independence_defect(scene, cfg.params, mesh_at(r0.ls), grid);
      report.beta_independent = report.beta_defect <= 1e-12;
    } catch (const std::exception& e) {
      report.beta_independent = false;
      if (log) *log << "beta-independence check failed: " << e.what() << "\n";
    }
  }

  if (!cfg.out.empty()) {
    std::filesystem::create_directories(cfg.out);
    std::ofstream csv(std::filesystem::path(cfg.out) / "convergence.csv");
    write_csv(report, csv);
    std::ofstream mass(std::filesystem::path(cfg.out) / "mass_surface.csv");
    write_mass_csv(report, scene.T(), mass);
    if (!csv || !mass) throw ConfigError("cannot write results to '" + cfg.out + "'");
  }
  return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const LevelRow& r : report.rows) {
    out << label(report, r) << ',' << fmt(r.completed ? std::optional(r.h) : std::nullopt) << ','
        << fmt(r.completed ? std::optional(r.dt) : std::nullopt) << ',' << fmt(r.err_energy) << ','
        << fmt(r.err_surface_energy) << ',' << fmt(r.err_linf_l2) << ',' << fmt(r.e_mass) << ','
        << fmt(r.eoc_s) << ',' << fmt(r.eoc_q) << ',' << fmt(r.eoc_qs) << "\n";
  }
}

void write_mass_csv(const ConvergenceReport& report, double T, std::ostream& out) {
  out << "level,n,t,i_mass,i_surf\n";
  for (const LevelRow& r : report.rows) {
    if (!r.completed) continue;
    const auto& m = r.report.i_mass;
    const int N = static_cast<int>(m.size()) - 1;
    for (int n = 0; n <= N; ++n)
      out << label(report, r) << ',' << n << ',' << fmt(T * n / N) << ',' << fmt(m[n]) << ','
          << fmt(r.report.i_surf[n]) << "\n";
  }
}

void print_table(const ConvergenceReport& report, std::ostream& out) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-7s %-9s %-9s %-11s %-6s %-11s %-6s %-11s %-6s\n", "level",
                "h", "dt", "energy", "eoc", "L2(end)", "eoc", "e_mass", "eoc");
  out << buf;
  const LevelRow* prev = nullptr;
  for (const LevelRow& r : report.rows) {
    if (!r.completed) {
      out << label(report, r) << "  failed: " << r.error << "\n";
      prev = nullptr;
      continue;
    }
    auto pair_eoc = [&](auto get) -> std::optional<double> {
      if (!prev || !(report.diagonal || (prev->lq == r.lq) || (prev->ls == r.ls)))
        return std::nullopt;
      return eoc(get(*prev), get(r));
    };
    const auto energy = r.err_energy ? r.err_energy : r.err_surface_energy;
    std::snprintf(
        buf, sizeof buf, "%-7s %-9.3e %-9.3e %-11s %-6s %-11s %-6s %-11s %-6s\n",
        label(report, r).c_str(), r.h, r.dt, fmt_short(energy, "%.4e").c_str(),
        fmt_short(pair_eoc([](const LevelRow& x) { return x.err_energy ? x.err_energy : x.err_surface_energy; }), "%.2f").c_str(),
        fmt_short(r.err_linf_l2, "%.4e").c_str(),
        fmt_short(pair_eoc([](const LevelRow& x) { return x.err_linf_l2; }), "%.2f").c_str(),
        fmt_short(r.e_mass, "%.4e").c_str(),
        fmt_short(pair_eoc([](const LevelRow& x) { return x.e_mass; }), "%.2f").c_str());
    out << buf;
    prev = &r;
  }
  if (report.beta_independent) {
    std::snprintf(buf, sizeof buf, "beta-independence: %s (max defect %.3e)\n",
                  *report.beta_independent ? "PASS" : "FAIL", report.beta_defect);
    out << buf;
  }
}

}  // namespace sttrace

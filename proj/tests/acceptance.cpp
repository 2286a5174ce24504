// Acceptance checks: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--expect-fail ID]... [--only ID]...
//
// Exit status is 0 when every failing criterion was listed with
// --expect-fail. Expected failures still print FAIL.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sttrace/experiment.hpp"
#include "sttrace/verify.hpp"

using namespace sttrace;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* spec, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, spec, a, b, c);
  return buf;
}

ConvergenceReport run(const std::string& text) {
  std::istringstream in(text);
  ExperimentConfig cfg = parse_config(in);
  cfg.threads = 1;
  return run_experiment(cfg);
}

std::optional<double> pair_eoc(const std::optional<double>& a, const std::optional<double>& b) {
  return eoc(a, b);
}

bool in_range(const std::optional<double>& v, double lo, double hi) { return v && *v >= lo && *v <= hi; }

std::string show(const std::optional<double>& v) { return v ? fmt("%.3f", *v) : std::string("n/a"); }

// Energy and L-inf-L2 EOCs on the last two level pairs of a diagonal run.
Outcome convergence_check(const ConvergenceReport& r, double elo, double ehi, double llo, double lhi) {
  if (!r.all_completed() || r.rows.size() < 3) return {false, "run did not complete"};
  const std::size_t n = r.rows.size();
  bool ok = true;
  std::string d = "energy EOC";
  for (std::size_t i = n - 2; i < n; ++i) {
    const auto e = pair_eoc(r.rows[i - 1].err_energy, r.rows[i].err_energy);
    ok &= in_range(e, elo, ehi);
    d += " " + show(e);
  }
  d += fmt(" in [%.1f, %.1f]; Linf-L2 EOC", elo, ehi);
  for (std::size_t i = n - 2; i < n; ++i) {
    const auto e = pair_eoc(r.rows[i - 1].err_linf_l2, r.rows[i].err_linf_l2);
    ok &= in_range(e, llo, lhi);
    d += " " + show(e);
  }
  d += fmt(" in [%.1f, %.1f]", llo, lhi);
  return {ok, d};
}

std::optional<double> final_energy_eoc(const ConvergenceReport& r) {
  if (!r.all_completed() || r.rows.size() < 2) return std::nullopt;
  const std::size_t n = r.rows.size();
  return pair_eoc(r.rows[n - 2].err_energy, r.rows[n - 1].err_energy);
}

const char* kMoving = "scene = moving_circle\nh_init = 0.25\ndt_init = 0.25\nxi = h\n";

// k = 1 run shared by criteria 1 and 3.
ConvergenceReport& moving_k1() {
  static ConvergenceReport r = run(std::string(kMoving) + "k = 1\nkg = 1\nbeta = 0\nalpha = simple\nlevels = 0-5\n");
  return r;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

Outcome criterion1() { return convergence_check(moving_k1(), 0.8, 1.3, 1.7, 2.4); }

Outcome criterion2() {
  const ConvergenceReport r = run(std::string(kMoving) + "k = 2\nkg = 2\nbeta = 0\nlevels = 0-4\n");
  return convergence_check(r, 1.7, 2.5, 2.6, 3.5);
}

Outcome criterion3() {
  // Levels 0-4 of the k = 1 run; the simple beta = 0 entry reuses criterion 1's rows.
  ConvergenceReport simple0 = moving_k1();
  if (simple0.rows.size() > 5) simple0.rows.resize(5);
  auto study = [](const char* alpha, const char* beta) {
    return run(std::string(kMoving) + "k = 1\nlevels = 0-4\nalpha = " + alpha + "\nbeta = " + beta + "\n");
  };
  const auto s0 = final_energy_eoc(simple0);
  const auto s1 = final_energy_eoc(study("simple", "1"));
  const auto i0 = final_energy_eoc(study("improved", "0"));
  const auto ih = final_energy_eoc(study("improved", "0.5"));
  const auto i1 = final_energy_eoc(study("improved", "1"));
  const bool ok = s0 && s1 && *s0 >= 0.8 && *s0 - *s1 >= 0.3 && i0 && ih && i1 && *i0 >= 0.8 && *ih >= 0.8 &&
                  *i1 >= 0.8;
  return {ok, "simple: beta=0 " + show(s0) + ", beta=1 " + show(s1) + "; improved: beta=0 " + show(i0) +
                  ", beta=1/2 " + show(ih) + ", beta=1 " + show(i1) + " (final-pair energy EOC)"};
}

// beta = 0 merging run shared by criteria 4 and 5.
ConvergenceReport& merging_beta0() {
  static ConvergenceReport r = run("scene = merging_circles\nk = 1\nkg = 1\nbeta = 0\nlevels = 0-4\n");
  return r;
}

Outcome criterion4() {
  const ConvergenceReport cons = run("scene = merging_circles\nk = 1\nkg = 1\nbeta = 1\nr_mode = one\nlevels = 0-2\n");
  bool ok_c = cons.all_completed();
  double worst = 0.0;
  for (const LevelRow& row : cons.rows) {
    if (!row.completed || row.report.i_mass.empty()) continue;
    const double rel = std::abs(row.report.e_mass) / std::abs(row.report.i_mass.front());
    worst = std::max(worst, rel);
  }
  ok_c &= worst <= 1e-9;

  const ConvergenceReport& r = merging_beta0();
  bool ok_e = r.all_completed();
  std::string eocs;
  std::optional<double> last;
  for (std::size_t i = 2; i < r.rows.size(); ++i) {
    last = pair_eoc(r.rows[i - 1].e_mass, r.rows[i].e_mass);
    eocs += " " + show(last);
  }
  ok_e &= in_range(last, 1.6, 2.6);
  return {ok_c && ok_e, std::string("beta=1, R=1: max e_mass/|i_mass0| ") + fmt("%.2e", worst) +
                            (ok_c ? " <= 1e-9 (pass)" : " (fail)") + "; beta=0 e_mass EOC levels 1-4:" + eocs +
                            (ok_e ? " (pass)" : " (fail, need final pair in [1.6, 2.6])")};
}

Outcome criterion5() {
  // Every slab solved at every level, i_surf finite, and the largest step
  // change of i_surf bounded and shrinking under refinement.
  const ConvergenceReport& r = merging_beta0();
  if (!r.all_completed()) {
    std::string why;
    for (const LevelRow& row : r.rows)
      if (!row.completed) why += " level " + std::to_string(row.ls) + ": " + row.error;
    return {false, "incomplete:" + why};
  }
  bool ok = true;
  std::vector<double> jump;
  for (const LevelRow& row : r.rows) {
    const auto& s = row.report.i_surf;
    double top = 0.0, step = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) {
      ok &= std::isfinite(s[n]) && s[n] > 0.0;
      top = std::max(top, std::abs(s[n]));
      if (n > 0) step = std::max(step, std::abs(s[n] - s[n - 1]));
    }
    jump.push_back(step / top);
  }
  std::string d = "max |di_surf|/max i_surf per level:";
  for (double j : jump) {
    d += fmt(" %.3f", j);
    ok &= j <= 0.2;
  }
  ok &= jump.back() <= 0.5 * jump.front();
  return {ok, d + " (each <= 0.2, finest <= half of coarsest)"};
}

Outcome criterion6() {
  bool ok = true;
  std::string failed;
  int n = 0;
  for (const CheckResult& c : invariant_suite()) {
    ++n;
    std::cout << "    " << (c.passed ? "pass " : "FAIL ") << c.name << ": " << c.detail << "\n";
    if (!c.passed) {
      ok = false;
      failed += " " + c.name;
    }
  }
  return {ok, ok ? std::to_string(n) + " invariant checks passed" : "failed:" + failed};
}

Outcome criterion7() {
  const std::string cfg = std::string(kMoving) + "k = 1\nlevels = 0-2\n";
  auto csv = [&] {
    const ConvergenceReport r = run(cfg);
    std::ostringstream os;
    write_csv(r, os);
    write_mass_csv(r, 1.0, os);
    return os.str();
  };
  const std::string a = csv(), b = csv();
  const bool ok = a == b && a.size() > std::strlen(kCsvHeader);
  return {ok, fmt("two single-threaded runs, %.0f bytes, ", static_cast<double>(a.size())) +
                  (a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expected, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--expect-fail" || a == "--only") && i + 1 < argc) {
      (a == "--only" ? only : expected).insert(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--expect-fail ID]... [--only ID]...\n";
      return 2;
    }
  }
  omp_set_num_threads(1);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1", criterion1}, {"2", criterion2}, {"3", criterion3}, {"4", criterion4},
      {"5", criterion5}, {"6", criterion6}, {"7", criterion7}};
  const std::vector<std::string> titles = {
      "moving circle k=1 convergence",  "moving circle k=2 convergence", "alpha_h study",
      "mass conservation",              "merging robustness",            "invariant suites",
      "determinism"};

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [id, fn] = criteria[i];
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << id << " (" << titles[i] << "): " << o.detail
              << fmt(" [%.1f s]", sec);
    if (!o.passed && expected.count(id)) std::cout << " [expected failure]";
    if (o.passed && expected.count(id)) std::cout << " [listed as expected failure]";
    std::cout << std::endl;
    unexpected += !o.passed && !expected.count(id);
  }
  return unexpected == 0 ? 0 : 1;
}

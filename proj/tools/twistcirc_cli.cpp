// Command-line front end: number-theory tables, map self-checks, the
// variational solver, the full criteria pipeline, sweeps, and report export.
//
// Exit codes: 0 success, 1 criteria violated, 2 infeasible config,
// 3 internal error.

#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "twistcirc/harness.hpp"

using namespace twistcirc;

namespace {

// key=value file; '#' starts a comment
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      auto e = s.find_last_not_of(" \t\r");
      s.erase(e == std::string::npos ? 0 : e + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  auto kv = read_config_file(path);
  auto get = [&](const char* k, auto& field) {
    auto it = kv.find(k);
    if (it == kv.end()) return;
    std::istringstream is(it->second);
    is >> field;
  };
  if (kv.count("alpha")) cfg.alpha_preset = kv["alpha"];
  get("depth", cfg.depth);
  get("n_index", cfg.n_index);
  get("eps", cfg.eps);
  get("amplitude", cfg.amplitude);
  get("kappa_lo", cfg.kappa_lo);
  get("kappa_hi", cfg.kappa_hi);
  get("M", cfg.M);
  get("chords", cfg.budgets.chords);
  get("pairs", cfg.budgets.pairs);
  get("quads", cfg.budgets.quads);
  get("n_seeds", cfg.n_seeds);
  get("seed", cfg.seed);
  get("workers", cfg.workers);
}

void add_experiment_flags(CLI::App* app, ExperimentConfig& cfg,
                          std::string& config_path) {
  app->add_option("--config", config_path, "key=value config file");
  app->add_option("--alpha", cfg.alpha_preset, "alpha preset (golden|silver)");
  app->add_option("--depth", cfg.depth, "continued-fraction depth");
  app->add_option("--n-index", cfg.n_index, "map level convergent index");
  app->add_option("--eps", cfg.eps, "exponent eps in (0,1)");
  app->add_option("--amplitude", cfg.amplitude, "potential amplitude scale");
  app->add_option("--kappa-lo", cfg.kappa_lo, "lowest probed kappa");
  app->add_option("--kappa-hi", cfg.kappa_hi, "highest probed kappa");
  app->add_option("-M,--window-index", cfg.M, "window convergent index M");
  app->add_option("--chords", cfg.budgets.chords, "chord budget per cell");
  app->add_option("--pairs", cfg.budgets.pairs, "pair budget per cell");
  app->add_option("--quads", cfg.budgets.quads, "quadruple budget per cell");
  app->add_option("--n-seeds", cfg.n_seeds, "number of seeds");
  app->add_option("--seed", cfg.seed, "master seed");
  app->add_option("--workers", cfg.workers, "worker threads");
}

int finish_record(const RunRecord& rec, const std::string& out,
                  const std::string& csv) {
  if (!out.empty()) emit_report(rec, "json", out);
  if (!csv.empty()) emit_report(rec, "csv", csv);
  if (rec.status == "infeasible") {
    std::cerr << "infeasible: " << rec.error_message << "\n";
    return 2;
  }
  if (rec.status == "error") {
    std::cerr << "error at stage " << rec.error_stage << ": "
              << rec.error_message << "\n";
    return 3;
  }
  const auto& r = rec.report;
  if (rec.status == "degenerate")
    std::cout << "degenerate minimizer: " << rec.error_message << "\n";
  std::cout << "criterion 1: " << r.criterion1 << "\n"
            << "criterion 2: " << r.criterion2 << "\n"
            << "criterion 3: " << r.criterion3 << "\n"
            << "threshold eps/(960 A) = " << r.threshold
            << "  sigma = " << r.sigma << "\n";
  for (const auto& row : r.rows)
    std::cout << "  kappa=" << row.kappa << "  grad1(Ntilde)="
              << row.grad1_Ntilde << "  R="
              << (row.R_holds ? (row.R_literal ? "holds" : "holds(response)")
                              : "FAILS")
              << "  S=" << (row.S_holds ? "holds" : "FAILS")
              << "  T=" << (row.T_holds ? "holds" : "FAILS") << "\n";
  bool violated = r.criterion1 == "violated" || r.criterion2 == "violated" ||
                  r.criterion3 == "violated";
  return violated ? 1 : 0;
}

int cmd_cf(const ExperimentConfig& cfg) {
  auto a = build_alpha(cfg);
  a.check_invariants();
  KappaMachinery km(a);
  std::cout.precision(15);
  std::cout << "alpha = " << a.value() << "  A_alpha = " << a.bound()
            << "  gamma0 = " << km.gamma0() << "\n";
  std::cout << "  i   a_i        p_i        q_i     ||q_i alpha||\n";
  for (int i = 0; i <= a.depth(); ++i) {
    std::cout << "  " << i << "   " << (i >= 1 ? a.quotient(i) : 0) << "   "
              << a.p(i) << "   " << a.q(i);
    if (i < a.depth()) std::cout << "   " << a.qalpha_norm(i);
    std::cout << "\n";
  }
  std::cout << "phi floors:";
  for (int m = 0; m <= a.depth() - 2; ++m) std::cout << " " << km.phi_floor(m);
  std::cout << "\nS = {";
  for (int k : km.image()) std::cout << " " << k;
  std::cout << " }\n";
  for (int k = km.min_kappa(); k <= km.max_kappa(); ++k) {
    try {
      auto w = km.windows(k);
      std::cout << "kappa=" << k << "  n_kappa=" << w.n_kappa
                << "  Ntilde=" << w.Ntilde << "  Nbar=" << w.Nbar << "\n";
    } catch (const std::out_of_range&) {
      std::cout << "kappa=" << k << "  (window exceeds depth)\n";
    }
  }
  return 0;
}

int cmd_map_check(const ExperimentConfig& cfg, int samples) {
  auto a = build_alpha(cfg);
  TwistMap map(a, cfg.n_index, cfg.eps, build_potential(cfg));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(-1.0, 1.0);
  double det_dev = 0;
  for (int t = 0; t < samples; ++t) {
    auto J = map.jacobian(ux(rng), uy(rng));
    det_dev = std::max(det_dev, std::abs(J[0] * J[3] - J[1] * J[2] - 1.0));
  }
  double gen = map.generating_consistency(samples, cfg.seed);
  std::cout.precision(6);
  std::cout << "q_n = " << map.qn() << "  coeff = " << map.coeff() << "\n"
            << "max |det DF - 1| = " << det_dev << "\n"
            << "generating consistency = " << gen << "\n";
  return (det_dev < 1e-12 && gen < 1e-10) ? 0 : 1;
}

int cmd_minconfig(const ExperimentConfig& cfg, long long p, long long q,
                  const std::string& graph_out) {
  auto a = build_alpha(cfg);
  TwistMap map(a, cfg.n_index, cfg.eps, build_potential(cfg));
  Configuration c = (p > 0 && q > 0)
                        ? birkhoff_minimize(map, p, q, cfg.seed)
                        : minimal_window(map, cfg.M, cfg.seed);
  auto g = graph_extract(c);
  std::cout.precision(6);
  std::cout << "p/q = " << c.p() << "/" << c.q()
            << "  residual = " << c.residual()
            << "  action = " << c.action_value() << "\n"
            << "ordering = " << (ordering_check(c) ? "ok" : "VIOLATED")
            << "  holder slope = " << g.holder.exponent << "\n";
  if (!graph_out.empty()) {
    std::ofstream out(graph_out);
    out.precision(17);
    out << "x,y\n";
    for (auto& [x, y] : g.points) out << x << ',' << y << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twist-map invariant-circle criteria toolkit"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_path, out, csv, store_path = "runs.jsonl";
  std::string format = "json";
  long long p = 0, q = 0;
  int samples = 100000, index = -1;
  std::string graph_out;
  std::vector<double> amplitudes;

  auto* c_cf = app.add_subcommand("cf", "continued-fraction tables");
  add_experiment_flags(c_cf, cfg, config_path);

  auto* c_map = app.add_subcommand("map-check", "symplectic self-checks");
  add_experiment_flags(c_map, cfg, config_path);
  c_map->add_option("--samples", samples, "random sample count");

  auto* c_min = app.add_subcommand("minconfig", "solve one configuration");
  add_experiment_flags(c_min, cfg, config_path);
  c_min->add_option("-p", p, "rotation numerator");
  c_min->add_option("-q", q, "rotation denominator");
  c_min->add_option("--graph-out", graph_out, "CSV path for the graph sample");

  auto* c_cri = app.add_subcommand("criteria", "full pipeline on one config");
  add_experiment_flags(c_cri, cfg, config_path);
  c_cri->add_option("--out", out, "JSON record path");
  c_cri->add_option("--csv", csv, "CSV table path");

  auto* c_swp = app.add_subcommand("sweep", "amplitude sweep with resume");
  add_experiment_flags(c_swp, cfg, config_path);
  c_swp->add_option("--store", store_path, "JSONL record store");
  c_swp->add_option("--amplitudes", amplitudes, "amplitude grid")
      ->required();

  auto* c_rep = app.add_subcommand("report", "export a stored record");
  c_rep->add_option("--store", store_path, "JSONL record store");
  c_rep->add_option("--index", index, "record index (default: last)");
  c_rep->add_option("--format", format, "json or csv");
  c_rep->add_option("--out", out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      // file supplies defaults, explicit flags override: apply the file over
      // the first parse, then re-parse so flag values win again
      apply_config_file(cfg, config_path);
      app.clear();
      CLI11_PARSE(app, argc, argv);
    }

    if (app.got_subcommand(c_cf)) return cmd_cf(cfg);
    if (app.got_subcommand(c_map)) return cmd_map_check(cfg, samples);
    if (app.got_subcommand(c_min)) return cmd_minconfig(cfg, p, q, graph_out);
    if (app.got_subcommand(c_cri)) {
      RunRecord rec = run_criteria(cfg);
      return finish_record(rec, out, csv);
    }
    if (app.got_subcommand(c_swp)) {
      RecordStore store(store_path);
      std::vector<ExperimentConfig> grid;
      for (double a : amplitudes) {
        ExperimentConfig g = cfg;
        g.amplitude = a;
        grid.push_back(g);
      }
      auto res = run_sweep(grid, store);
      std::cout << "sweep: " << res.computed << " computed, " << res.skipped
                << " resumed\n";
      for (const auto& rec : res.records)
        std::cout << "  amplitude=" << rec.config.amplitude << "  status="
                  << rec.status << "\n";
      return 0;
    }
    if (app.got_subcommand(c_rep)) {
      RecordStore store(store_path);
      auto all = store.load_all();
      if (all.empty()) throw std::runtime_error("empty record store");
      size_t i = index < 0 ? all.size() - 1 : static_cast<size_t>(index);
      if (i >= all.size()) throw std::out_of_range("record index");
      emit_report(all[i], format, out);
      return 0;
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}

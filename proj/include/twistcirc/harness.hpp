#pragma once

// Experiment orchestration: configuration, feasibility, the full pipeline
// (window solve -> chord families -> distortion tables -> criteria), the
// append-only JSONL record store with resume, and JSON/CSV report emission.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "twistcirc/distortion.hpp"
#include "twistcirc/minimal_config.hpp"

namespace twistcirc {

using nlohmann::json;

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string alpha_preset = "golden";  // empty => use quotients
  std::vector<int> quotients;
  int depth = 24;
  int n_index = 10;
  double eps = 0.5;
  double amplitude = 1.0;  // scale on the standard single-harmonic potential
  std::vector<std::pair<int, double>> potential_terms;  // overrides standard
  int kappa_lo = -1, kappa_hi = -1;  // negative => derived from n_index
  int M = 23;
  Budgets budgets;
  int n_seeds = 3;
  unsigned long long seed = 1;
  int workers = 1;
};

inline void to_json(json& j, const Budgets& b) {
  j = json{{"chords", b.chords}, {"pairs", b.pairs}, {"quads", b.quads}};
}
inline void from_json(const json& j, Budgets& b) {
  j.at("chords").get_to(b.chords);
  j.at("pairs").get_to(b.pairs);
  j.at("quads").get_to(b.quads);
}

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"alpha_preset", c.alpha_preset}, {"quotients", c.quotients},
           {"depth", c.depth},               {"n_index", c.n_index},
           {"eps", c.eps},                   {"amplitude", c.amplitude},
           {"potential_terms", c.potential_terms},
           {"kappa_lo", c.kappa_lo},         {"kappa_hi", c.kappa_hi},
           {"M", c.M},                       {"budgets", c.budgets},
           {"n_seeds", c.n_seeds},           {"seed", c.seed},
           {"workers", c.workers}};
}
inline void from_json(const json& j, ExperimentConfig& c) {
  j.at("alpha_preset").get_to(c.alpha_preset);
  j.at("quotients").get_to(c.quotients);
  j.at("depth").get_to(c.depth);
  j.at("n_index").get_to(c.n_index);
  j.at("eps").get_to(c.eps);
  j.at("amplitude").get_to(c.amplitude);
  j.at("potential_terms").get_to(c.potential_terms);
  j.at("kappa_lo").get_to(c.kappa_lo);
  j.at("kappa_hi").get_to(c.kappa_hi);
  j.at("M").get_to(c.M);
  j.at("budgets").get_to(c.budgets);
  j.at("n_seeds").get_to(c.n_seeds);
  j.at("seed").get_to(c.seed);
  j.at("workers").get_to(c.workers);
}

// FNV-1a over the canonical (key-sorted) JSON dump, excluding the worker
// count, which must not affect results or resume identity.
inline std::string config_hash(const ExperimentConfig& c) {
  json j = c;
  j.erase("workers");
  std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline ConstantTypeIrrational build_alpha(const ExperimentConfig& c) {
  if (!c.alpha_preset.empty())
    return ConstantTypeIrrational::preset(c.alpha_preset, c.depth);
  return ConstantTypeIrrational::from_partial_quotients(c.quotients, c.depth);
}

inline Potential build_potential(const ExperimentConfig& c) {
  if (!c.potential_terms.empty()) {
    auto terms = c.potential_terms;
    for (auto& [k, amp] : terms) amp *= c.amplitude;
    return Potential(terms);
  }
  if (c.amplitude == 0.0) return Potential();
  return Potential::standard(c.amplitude);
}

struct KappaRange {
  int lo, hi;
};

inline KappaRange resolve_kappa_range(const ExperimentConfig& c,
                                      const KappaMachinery& km) {
  if (c.kappa_lo >= 0 && c.kappa_hi >= 0) return {c.kappa_lo, c.kappa_hi};
  int k0 = kappa_of_n(km, c.n_index);
  return {k0, k0 + 4};
}

// Window feasibility: the rational window must dominate the chord scale
// (q_M >= 8 q_{n_kappa_max}) and strictly contain the deepest iterate range
// (q_M > q_{Nbar(kappa_max)}).
inline void check_feasibility(const ExperimentConfig& c,
                              const KappaMachinery& km, const KappaRange& kr) {
  const auto& a = km.alpha();
  if (c.M < 1 || c.M > a.depth())
    throw InfeasibleError("M=" + std::to_string(c.M) +
                          " outside the stored convergent depth");
  auto w = km.windows(kr.hi);  // throws if the depth cannot host Nbar
  long long qM = a.q(c.M);
  if (qM < 8 * a.q(w.n_kappa))
    throw InfeasibleError("q_M=" + std::to_string(qM) +
                          " < 8 q_{n_kappa}=" +
                          std::to_string(8 * a.q(w.n_kappa)));
  if (qM <= a.q(w.Nbar))
    throw InfeasibleError("q_M=" + std::to_string(qM) +
                          " <= q_Nbar=" + std::to_string(a.q(w.Nbar)));
  km.windows(kr.lo);
}

struct SeedSummary {
  unsigned long long seed = 0;
  double C0 = 0, C1 = 0, C2 = 1, C4 = 0;
};

struct RunRecord {
  ExperimentConfig config;
  std::string hash;
  std::string status;  // ok | degenerate | infeasible | error
  std::string error_stage, error_message;
  std::string started_at, finished_at;  // isolated from the payload compare
  double runtime_seconds = 0;

  double solver_residual = 0;
  bool ordering_ok = false;
  double holder_exponent = 0;
  double map_consistency = 0;
  double momentum_osc = 0;       // max |y_{i+1} - y_i| over the window
  double momentum_osc_bound = 0;  // max|V'| q_n^{-(3+eps)}
  int kappa_lo = 0, kappa_hi = 0;

  std::vector<DistortionTable> tables;  // one per seed
  DistortionTable merged;
  CriterionReport report;
  std::vector<SeedSummary> seed_summaries;
};

inline void to_json(json& j, const CellStats& c) {
  j = json{{"r", c.r},
           {"s", c.s},
           {"K1_r", c.K1_r},
           {"K1t_r", c.K1t_r},
           {"grad1_sup", c.grad1_sup},
           {"grad2_sup", c.grad2_sup},
           {"kappa1_sup", c.kappa1_sup},
           {"n_pairs", c.n_pairs},
           {"n_quads", c.n_quads},
           {"dropped", c.dropped},
           {"unreliable", c.unreliable}};
}
inline void from_json(const json& j, CellStats& c) {
  j.at("r").get_to(c.r);
  j.at("s").get_to(c.s);
  j.at("K1_r").get_to(c.K1_r);
  j.at("K1t_r").get_to(c.K1t_r);
  j.at("grad1_sup").get_to(c.grad1_sup);
  j.at("grad2_sup").get_to(c.grad2_sup);
  j.at("kappa1_sup").get_to(c.kappa1_sup);
  j.at("n_pairs").get_to(c.n_pairs);
  j.at("n_quads").get_to(c.n_quads);
  j.at("dropped").get_to(c.dropped);
  j.at("unreliable").get_to(c.unreliable);
}

inline void to_json(json& j, const KappaRow& r) {
  j = json{{"kappa", r.kappa},
           {"n_kappa", r.n_kappa},
           {"Ntilde", r.Ntilde},
           {"Nbar", r.Nbar},
           {"lambda_I", r.lambda_I},
           {"lambda_II", r.lambda_II},
           {"rational_slack", r.rational_slack},
           {"K0_Nbar", r.K0_Nbar},
           {"K0t_Nbar", r.K0t_Nbar},
           {"g_modulus", r.g_modulus},
           {"g_scale", r.g_scale},
           {"avg_dev_max", r.avg_dev_max},
           {"avg_bound", r.avg_bound},
           {"avg_skipped", r.avg_skipped},
           {"boud_violations", r.boud_violations},
           {"n_chords", r.n_chords},
           {"dropped", r.dropped},
           {"unreliable", r.unreliable},
           {"cells", r.cells}};
}
inline void from_json(const json& j, KappaRow& r) {
  j.at("kappa").get_to(r.kappa);
  j.at("n_kappa").get_to(r.n_kappa);
  j.at("Ntilde").get_to(r.Ntilde);
  j.at("Nbar").get_to(r.Nbar);
  j.at("lambda_I").get_to(r.lambda_I);
  j.at("lambda_II").get_to(r.lambda_II);
  j.at("rational_slack").get_to(r.rational_slack);
  j.at("K0_Nbar").get_to(r.K0_Nbar);
  j.at("K0t_Nbar").get_to(r.K0t_Nbar);
  j.at("g_modulus").get_to(r.g_modulus);
  j.at("g_scale").get_to(r.g_scale);
  j.at("avg_dev_max").get_to(r.avg_dev_max);
  j.at("avg_bound").get_to(r.avg_bound);
  j.at("avg_skipped").get_to(r.avg_skipped);
  j.at("boud_violations").get_to(r.boud_violations);
  j.at("n_chords").get_to(r.n_chords);
  j.at("dropped").get_to(r.dropped);
  j.at("unreliable").get_to(r.unreliable);
  j.at("cells").get_to(r.cells);
}

inline void to_json(json& j, const ResponseScales& r) {
  j = json{{"slope", r.slope}, {"sigma", r.sigma}};
}
inline void from_json(const json& j, ResponseScales& r) {
  j.at("slope").get_to(r.slope);
  j.at("sigma").get_to(r.sigma);
}

inline void to_json(json& j, const DistortionTable& t) {
  j = json{{"rows", t.rows},
           {"seed", t.seed},
           {"budgets", t.budgets},
           {"eps", t.eps},
           {"response", t.response}};
}
inline void from_json(const json& j, DistortionTable& t) {
  j.at("rows").get_to(t.rows);
  j.at("seed").get_to(t.seed);
  j.at("budgets").get_to(t.budgets);
  j.at("eps").get_to(t.eps);
  j.at("response").get_to(t.response);
}

inline void to_json(json& j, const ConditionRow& r) {
  j = json{{"kappa", r.kappa},
           {"grad1_Ntilde", r.grad1_Ntilde},
           {"threshold", r.threshold},
           {"response_bound", r.response_bound},
           {"grad2_Ntilde", r.grad2_Ntilde},
           {"R_literal", r.R_literal},
           {"R_holds", r.R_holds},
           {"K1_scaled_max", r.K1_scaled_max},
           {"S_holds", r.S_holds},
           {"lambda_II", r.lambda_II},
           {"T_holds", r.T_holds}};
}
inline void from_json(const json& j, ConditionRow& r) {
  j.at("kappa").get_to(r.kappa);
  j.at("grad1_Ntilde").get_to(r.grad1_Ntilde);
  j.at("threshold").get_to(r.threshold);
  j.at("response_bound").get_to(r.response_bound);
  j.at("grad2_Ntilde").get_to(r.grad2_Ntilde);
  j.at("R_literal").get_to(r.R_literal);
  j.at("R_holds").get_to(r.R_holds);
  j.at("K1_scaled_max").get_to(r.K1_scaled_max);
  j.at("S_holds").get_to(r.S_holds);
  j.at("lambda_II").get_to(r.lambda_II);
  j.at("T_holds").get_to(r.T_holds);
}

inline void to_json(json& j, const CriterionReport& r) {
  j = json{{"rows", r.rows},
           {"missing_kappas", r.missing_kappas},
           {"threshold", r.threshold},
           {"sigma", r.sigma},
           {"C0", r.C0},
           {"C1", r.C1},
           {"C2", r.C2},
           {"C4", r.C4},
           {"criterion1", r.criterion1},
           {"criterion2", r.criterion2},
           {"criterion3", r.criterion3},
           {"implications_consistent", r.implications_consistent}};
}
inline void from_json(const json& j, CriterionReport& r) {
  j.at("rows").get_to(r.rows);
  j.at("missing_kappas").get_to(r.missing_kappas);
  j.at("threshold").get_to(r.threshold);
  j.at("sigma").get_to(r.sigma);
  j.at("C0").get_to(r.C0);
  j.at("C1").get_to(r.C1);
  j.at("C2").get_to(r.C2);
  j.at("C4").get_to(r.C4);
  j.at("criterion1").get_to(r.criterion1);
  j.at("criterion2").get_to(r.criterion2);
  j.at("criterion3").get_to(r.criterion3);
  j.at("implications_consistent").get_to(r.implications_consistent);
}

inline void to_json(json& j, const SeedSummary& s) {
  j = json{{"seed", s.seed}, {"C0", s.C0}, {"C1", s.C1}, {"C2", s.C2},
           {"C4", s.C4}};
}
inline void from_json(const json& j, SeedSummary& s) {
  j.at("seed").get_to(s.seed);
  j.at("C0").get_to(s.C0);
  j.at("C1").get_to(s.C1);
  j.at("C2").get_to(s.C2);
  j.at("C4").get_to(s.C4);
}

inline void to_json(json& j, const RunRecord& r) {
  j = json{{"schema_version", "1"},
           {"config", r.config},
           {"hash", r.hash},
           {"status", r.status},
           {"error_stage", r.error_stage},
           {"error_message", r.error_message},
           {"solver_residual", r.solver_residual},
           {"ordering_ok", r.ordering_ok},
           {"holder_exponent", r.holder_exponent},
           {"map_consistency", r.map_consistency},
           {"momentum_osc", r.momentum_osc},
           {"momentum_osc_bound", r.momentum_osc_bound},
           {"kappa_lo", r.kappa_lo},
           {"kappa_hi", r.kappa_hi},
           {"tables", r.tables},
           {"merged", r.merged},
           {"report", r.report},
           {"seed_summaries", r.seed_summaries},
           {"timing", {{"started_at", r.started_at},
                       {"finished_at", r.finished_at},
                       {"runtime_seconds", r.runtime_seconds}}}};
}
inline void from_json(const json& j, RunRecord& r) {
  j.at("config").get_to(r.config);
  j.at("hash").get_to(r.hash);
  j.at("status").get_to(r.status);
  j.at("error_stage").get_to(r.error_stage);
  j.at("error_message").get_to(r.error_message);
  j.at("solver_residual").get_to(r.solver_residual);
  j.at("ordering_ok").get_to(r.ordering_ok);
  j.at("holder_exponent").get_to(r.holder_exponent);
  j.at("map_consistency").get_to(r.map_consistency);
  j.at("momentum_osc").get_to(r.momentum_osc);
  j.at("momentum_osc_bound").get_to(r.momentum_osc_bound);
  j.at("kappa_lo").get_to(r.kappa_lo);
  j.at("kappa_hi").get_to(r.kappa_hi);
  j.at("tables").get_to(r.tables);
  j.at("merged").get_to(r.merged);
  j.at("report").get_to(r.report);
  j.at("seed_summaries").get_to(r.seed_summaries);
  r.started_at = j.at("timing").at("started_at").get<std::string>();
  r.finished_at = j.at("timing").at("finished_at").get<std::string>();
  r.runtime_seconds = j.at("timing").at("runtime_seconds").get<double>();
}

// payload for determinism comparison: everything except timing
inline json record_payload(const RunRecord& r) {
  json j = r;
  j.erase("timing");
  return j;
}

namespace detail {
inline std::string iso_now() {
  auto t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

// deterministic parallel map: results land by task index, any worker count
template <class Task, class Fn>
void parallel_for(const std::vector<Task>& tasks, int workers, Fn fn) {
  if (workers <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < tasks.size();
         i = next.fetch_add(1))
      fn(i);
  };
  std::vector<std::thread> pool;
  int n = std::min<int>(workers, static_cast<int>(tasks.size()));
  for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}
}  // namespace detail

// Full pipeline. Module errors are captured into the record with stage
// attribution; feasibility violations surface as status "infeasible".
inline RunRecord run_criteria(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.config = cfg;
  rec.hash = config_hash(cfg);
  rec.started_at = detail::iso_now();
  auto t0 = std::chrono::steady_clock::now();
  std::string stage = "setup";
  try {
    auto alpha = build_alpha(cfg);
    alpha.check_invariants();
    KappaMachinery km(alpha);
    auto kr = resolve_kappa_range(cfg, km);
    rec.kappa_lo = kr.lo;
    rec.kappa_hi = kr.hi;
    stage = "feasibility";
    check_feasibility(cfg, km, kr);

    stage = "map";
    TwistMap map(alpha, cfg.n_index, cfg.eps, build_potential(cfg));
    rec.map_consistency = map.generating_consistency(1000, cfg.seed);

    stage = "solve";
    std::optional<Configuration> solved;
    try {
      solved.emplace(minimal_window(map, cfg.M, cfg.seed));
    } catch (const DegeneracyError& e) {
      // Colliding minimizer points are an internal error in the perturbative
      // regime, but far outside it the orbit has left the graph regime
      // entirely: the difference quotients of condition R diverge, so the run
      // completes with a violated verdict instead of an error.
      ResponseScales rs = response_scales(map);
      if (rs.sigma <= 0.125) throw;
      rec.status = "degenerate";
      rec.error_stage = stage;
      rec.error_message = e.what();
      rec.report.threshold = cfg.eps / (960.0 * double(alpha.bound()));
      rec.report.sigma = rs.sigma;
      rec.report.criterion1 = "violated";
      rec.report.criterion2 = "inconclusive";
      rec.report.criterion3 = "inconclusive";
      for (int k = kr.lo; k <= kr.hi; ++k) {
        ConditionRow row;
        row.kappa = k;
        row.threshold = rec.report.threshold;
        rec.report.rows.push_back(row);
      }
    }
    if (!solved) {
      rec.finished_at = detail::iso_now();
      rec.runtime_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      return rec;
    }
    Configuration window = std::move(*solved);
    rec.solver_residual = window.residual();
    rec.ordering_ok = ordering_check(window);
    rec.holder_exponent = graph_extract(window).holder.exponent;
    for (long long i = 0; i < window.q(); ++i)
      rec.momentum_osc = std::max(
          rec.momentum_osc, std::abs(window.y(i + 1) - window.y(i)));
    rec.momentum_osc_bound =
        map.potential().derivative_bound(1) * map.coeff();

    stage = "distortion";
    struct Cell {
      int seed_idx, kappa;
    };
    std::vector<Cell> cells;
    for (int s = 0; s < cfg.n_seeds; ++s)
      for (int k = kr.lo; k <= kr.hi; ++k) cells.push_back({s, k});
    std::vector<KappaRow> rows(cells.size());
    detail::parallel_for(cells, cfg.workers, [&](size_t i) {
      unsigned long long sd =
          detail::splitmix(cfg.seed + 0x51ed2701ULL * (cells[i].seed_idx + 1));
      rows[i] = build_kappa_row(window, km, cells[i].kappa, cfg.budgets, sd,
                                cfg.eps);
    });
    rec.tables.resize(cfg.n_seeds);
    ResponseScales rs = response_scales(map);
    for (size_t i = 0; i < cells.size(); ++i) {
      DistortionTable& t = rec.tables[cells[i].seed_idx];
      t.seed = detail::splitmix(cfg.seed +
                                0x51ed2701ULL * (cells[i].seed_idx + 1));
      t.budgets = cfg.budgets;
      t.eps = cfg.eps;
      t.response = rs;
      t.rows.push_back(rows[i]);
    }
    rec.merged = rec.tables[0];
    for (int s = 1; s < cfg.n_seeds; ++s)
      rec.merged = merge_tables(rec.merged, rec.tables[s]);

    stage = "criteria";
    rec.report = evaluate_conditions(rec.merged, km, cfg.eps, alpha.bound());
    for (int s = 0; s < cfg.n_seeds; ++s) {
      auto r = evaluate_conditions(rec.tables[s], km, cfg.eps, alpha.bound());
      rec.seed_summaries.push_back(
          {rec.tables[s].seed, r.C0, r.C1, r.C2, r.C4});
    }
    rec.status = "ok";
  } catch (const InfeasibleError& e) {
    rec.status = "infeasible";
    rec.error_stage = stage;
    rec.error_message = e.what();
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.error_stage = stage;
    rec.error_message = e.what();
  }
  rec.finished_at = detail::iso_now();
  rec.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

// Append-only JSONL store with a sidecar index of config hashes.
class RecordStore {
 public:
  explicit RecordStore(std::string path) : path_(std::move(path)) {
    std::ifstream idx(path_ + ".idx");
    std::string line;
    while (std::getline(idx, line))
      if (!line.empty()) hashes_.insert(line);
  }

  bool contains(const std::string& hash) const { return hashes_.count(hash); }

  void append(const RunRecord& rec) {
    {
      std::ofstream out(path_, std::ios::app);
      if (!out) throw std::runtime_error("cannot write " + path_);
      out << json(rec).dump() << "\n";
    }
    {
      std::ofstream idx(path_ + ".idx", std::ios::app);
      if (!idx) throw std::runtime_error("cannot write " + path_ + ".idx");
      idx << rec.hash << "\n";
    }
    hashes_.insert(rec.hash);
  }

  std::vector<RunRecord> load_all() const {
    std::vector<RunRecord> out;
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      out.push_back(json::parse(line).get<RunRecord>());
    }
    return out;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::set<std::string> hashes_;
};

struct SweepResult {
  std::vector<RunRecord> records;  // grid order, resumed entries included
  int computed = 0, skipped = 0;
};

inline SweepResult run_sweep(const std::vector<ExperimentConfig>& grid,
                             RecordStore& store) {
  if (grid.empty()) throw std::invalid_argument("empty sweep grid");
  SweepResult res;
  std::vector<RunRecord> existing;
  for (const auto& cfg : grid) {
    std::string h = config_hash(cfg);
    if (store.contains(h)) {
      if (existing.empty()) existing = store.load_all();
      for (auto it = existing.rbegin(); it != existing.rend(); ++it)
        if (it->hash == h) {
          res.records.push_back(*it);
          break;
        }
      ++res.skipped;
      continue;
    }
    RunRecord rec = run_criteria(cfg);
    store.append(rec);
    res.records.push_back(rec);
    ++res.computed;
  }
  return res;
}

// CSV: one row per (kappa, r, s) cell of the merged table, fixed column order
inline const char* kCsvHeader =
    "kappa,r,s,n_kappa,Ntilde,Nbar,lambda_I,lambda_II,K0_Nbar,K0t_Nbar,"
    "K1_r,K1t_r,grad1_sup,grad2_sup,kappa1_sup,g_modulus,avg_dev_max,"
    "avg_bound,rational_slack,n_chords,n_pairs,n_quads,boud_violations,"
    "dropped,unreliable";

inline std::string to_csv(const RunRecord& rec) {
  std::ostringstream os;
  os.precision(17);
  os << kCsvHeader << "\n";
  for (const KappaRow& row : rec.merged.rows)
    for (const CellStats& cell : row.cells)
      os << row.kappa << ',' << cell.r << ',' << cell.s << ',' << row.n_kappa
         << ',' << row.Ntilde << ',' << row.Nbar << ',' << row.lambda_I << ','
         << row.lambda_II << ',' << row.K0_Nbar << ',' << row.K0t_Nbar << ','
         << cell.K1_r << ',' << cell.K1t_r << ',' << cell.grad1_sup << ','
         << cell.grad2_sup << ',' << cell.kappa1_sup << ',' << row.g_modulus
         << ',' << row.avg_dev_max << ',' << row.avg_bound << ','
         << row.rational_slack << ',' << row.n_chords << ',' << cell.n_pairs
         << ',' << cell.n_quads << ',' << row.boud_violations << ','
         << cell.dropped << ',' << (cell.unreliable ? 1 : 0) << "\n";
  return os.str();
}

inline void emit_report(const RunRecord& rec, const std::string& format,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (format == "json")
    out << json(rec).dump(2) << "\n";
  else if (format == "csv")
    out << to_csv(rec);
  else
    throw std::invalid_argument("unknown report format: " + format);
}

}  // namespace twistcirc

#include "cvlc/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cvlc/error.hpp"
#include "cvlc/scenario.hpp"

namespace cvlc {

namespace {

[[noreturn]] void BadConfig(const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, why);
}

template <typename T>
void ReadRange(const nlohmann::json& j, const char* key, T& lo, T& hi) {
  if (!j.contains(key)) return;
  const auto r = j.at(key).get<std::vector<T>>();
  if (r.size() != 2) BadConfig(std::string(key) + " must be [min, max]");
  lo = r[0];
  hi = r[1];
}

}  // namespace

void ValidateSweep(const SweepConfig& s) {
  if (s.grid.size() == 0) BadConfig("sweep grid is empty");
  if (s.trials_per_cell < 1) BadConfig("trials_per_cell must be >= 1");
  if (!(s.v_x0_min <= s.v_x0_max)) BadConfig("v_x0 range is inverted");
  if (!(s.gap_min <= s.gap_max)) BadConfig("gap range is inverted");
  for (double p : {s.follower_connected_prob, s.follower_aggressive_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) BadConfig("probabilities must lie in [0, 1]");
  }
  for (double p : s.grid.p_v) {
    if (!(p >= 0.0 && p <= 1.0)) BadConfig("p_v values must lie in [0, 1]");
  }
  for (int n : s.grid.n_connected) {
    if (n < 0) BadConfig("N values must be >= 0");
  }
  for (double d : s.grid.decel) {
    if (!(d > 0.0 && d <= s.limits.a_x_d)) BadConfig("decel values must lie in (0, a_x_d]");
  }
  if (!(s.dt > 0.0) || !(s.horizon > 0.0)) BadConfig("dt and horizon must be positive");
}

SweepConfig SweepConfigFromJson(const std::string& text) {
  SweepConfig s;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("n_connected")) s.grid.n_connected = g.at("n_connected").get<std::vector<int>>();
      if (g.contains("decel")) s.grid.decel = g.at("decel").get<std::vector<double>>();
      if (g.contains("p_v")) s.grid.p_v = g.at("p_v").get<std::vector<double>>();
      if (g.contains("modes")) {
        s.grid.modes.clear();
        for (const auto& m : g.at("modes")) s.grid.modes.push_back(ParsePlannerMode(m.get<std::string>()));
      }
    }
    s.trials_per_cell = j.value("trials_per_cell", s.trials_per_cell);
    s.seed = j.value("seed", s.seed);
    if (j.contains("sampling")) {
      ReadRange(j.at("sampling"), "v_x0", s.v_x0_min, s.v_x0_max);
      ReadRange(j.at("sampling"), "gap", s.gap_min, s.gap_max);
    }
    if (j.contains("fixed")) {
      const auto& f = j.at("fixed");
      s.a_m_d = f.value("a_m_d", s.a_m_d);
      s.v_leaders = f.value("v_leaders", s.v_leaders);
      s.follower_speed = f.value("follower_speed", s.follower_speed);
    }
    s.follower_connected_prob = j.value("follower_connected_prob", s.follower_connected_prob);
    s.follower_aggressive_prob = j.value("follower_aggressive_prob", s.follower_aggressive_prob);
    s.trigger_time = j.value("trigger_time", s.trigger_time);
    s.dt = j.value("dt", s.dt);
    s.horizon = j.value("horizon", s.horizon);
    if (j.contains("limits")) {
      const auto& l = j.at("limits");
      s.limits.a_x_d = l.value("a_x_d", s.limits.a_x_d);
      s.limits.a_x_a = l.value("a_x_a", s.limits.a_x_a);
      s.limits.a_y_m = l.value("a_y_m", s.limits.a_y_m);
    }
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      s.geometry.w_l = g.value("w_l", s.geometry.w_l);
      s.geometry.w_v = g.value("w_v", s.geometry.w_v);
      s.geometry.l_v = g.value("l_v", s.geometry.l_v);
      s.geometry.p_m = g.value("p_m", s.geometry.p_m);
    }
    s.planner_weights = j.value("planner_weights", s.planner_weights);
  } catch (const nlohmann::json::exception& e) {
    BadConfig(std::string("sweep config: ") + e.what());
  }
  ValidateSweep(s);
  return s;
}

SweepConfig LoadSweepConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open sweep config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return SweepConfigFromJson(ss.str());
}

std::vector<SweepCell> EnumerateCells(const SweepGrid& grid) {
  std::vector<SweepCell> cells;
  cells.reserve(grid.size());
  for (int n : grid.n_connected) {
    for (double d : grid.decel) {
      for (PlannerMode m : grid.modes) {
        for (double p : grid.p_v) cells.push_back({n, d, m, p});
      }
    }
  }
  return cells;
}

ScenarioConfig SampleScenario(Rng& rng, const SweepConfig& sweep, const SweepCell& cell) {
  LayoutParams p;
  p.n_connected = cell.n_connected;
  p.ego_speed = sweep.v_x0_min + (sweep.v_x0_max - sweep.v_x0_min) * UniformUnit(rng);
  p.gap = sweep.gap_min + (sweep.gap_max - sweep.gap_min) * UniformUnit(rng);
  p.follower_connected = UniformUnit(rng) < sweep.follower_connected_prob;
  p.follower_intent = UniformUnit(rng) < sweep.follower_aggressive_prob
                          ? FollowerIntent::kAggressive
                          : FollowerIntent::kCollaborative;
  p.leader_speed = sweep.v_leaders;
  p.follower_speed = sweep.follower_speed;
  p.promise_decel = sweep.a_m_d;
  p.event_decel = cell.decel;
  p.trigger_time = sweep.trigger_time;
  p.p_v = cell.p_v;
  p.dt = sweep.dt;
  p.horizon = sweep.horizon;
  p.limits = sweep.limits;
  p.geometry = sweep.geometry;
  if (p.gap < p.geometry.p_m) {
    throw Error(ErrorCode::kGapTooSmall, "sampled gap " + std::to_string(p.gap) +
                                             " m is below p_m");
  }
  return MakeScenario(p);
}

std::uint64_t TrialSeed(std::uint64_t sweep_seed, int trial) {
  return SplitMix64(SplitMix64(sweep_seed) + static_cast<std::uint64_t>(trial));
}

std::vector<SweepRow> RunSweep(const SweepConfig& sweep, int parallelism,
                               const SimOptions& options) {
  ValidateSweep(sweep);
  PlannerSpec spec;
  if (!sweep.planner_weights.empty()) {
    spec.kind = PlannerKind::kNetwork;
    spec.network = LoadNetworkWeights(sweep.planner_weights);
  }
  ValidatePlanner(spec);

  const auto cells = EnumerateCells(sweep.grid);
  const std::size_t per_cell = static_cast<std::size_t>(sweep.trials_per_cell);
  const std::size_t total = cells.size() * per_cell;
  std::vector<TrialResult> results(total);
  std::vector<std::string> errors(total);
  std::vector<ErrorCode> error_codes(total, ErrorCode::kInvalidScenario);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    SimOptions opts = options;
    opts.record_trajectory = false;
    for (std::size_t item = next++; item < total; item = next++) {
      const SweepCell& cell = cells[item / per_cell];
      const int trial = static_cast<int>(item % per_cell);
      const std::uint64_t seed = TrialSeed(sweep.seed, trial);
      try {
        Rng rng = MakeStream(seed, 0);
        const ScenarioConfig cfg = SampleScenario(rng, sweep, cell);
        results[item] = RunTrial(cfg, cell.mode, spec, seed, opts);
      } catch (const Error& e) {
        errors[item] = e.what();
        error_codes[item] = e.code();
      } catch (const std::exception& e) {
        errors[item] = e.what();
      }
    }
  };
  const int n_threads = std::max(1, parallelism);
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepRow row;
    row.cell = cells[c];
    row.trials = sweep.trials_per_cell;
    double sum_time = 0.0;
    for (std::size_t k = 0; k < per_cell; ++k) {
      const std::size_t item = c * per_cell + k;
      if (!errors[item].empty()) {
        const SweepCell& cell = cells[c];
        throw Error(error_codes[item],
                    "cell N=" + std::to_string(cell.n_connected) + " decel=" +
                        std::to_string(cell.decel) + " mode=" + std::string(ToString(cell.mode)) +
                        " p_v=" + std::to_string(cell.p_v) + " trial " + std::to_string(k) +
                        ": " + errors[item]);
      }
      const TrialResult& r = results[item];
      row.successes += r.success ? 1 : 0;
      row.collisions += r.collision ? 1 : 0;
      if (r.completion_time) sum_time += *r.completion_time;
      DecisionAudit& a = row.audit;
      const DecisionAudit& b = r.audit;
      a.steps += b.steps;
      a.proceed += b.proceed;
      a.hesitate += b.hesitate;
      a.aborts += b.aborts;
      a.preference_violations += b.preference_violations;
      a.abort_unexecutable += b.abort_unexecutable;
      a.expected_violations += b.expected_violations;
      a.unexpected_violations += b.unexpected_violations;
      a.promise_breaches += b.promise_breaches;
    }
    row.success_rate = static_cast<double>(row.successes) / row.trials;
    row.collision_rate = static_cast<double>(row.collisions) / row.trials;
    row.mean_completion_time = row.successes > 0
                                   ? sum_time / row.successes
                                   : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

std::string FormatResults(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyResults, "no result rows to write");
  std::string out =
      "n_connected,decel,planner_mode,p_v,trials,successes,collisions,success_rate,"
      "collision_rate,mean_completion_time\n";
  char buf[256];
  for (const SweepRow& r : rows) {
    char mean[32];
    if (std::isnan(r.mean_completion_time)) {
      std::snprintf(mean, sizeof(mean), "nan");
    } else {
      std::snprintf(mean, sizeof(mean), "%.4f", r.mean_completion_time);
    }
    std::snprintf(buf, sizeof(buf), "%d,%g,%s,%g,%d,%d,%d,%.4f,%.4f,%s\n", r.cell.n_connected,
                  r.cell.decel, std::string(ToString(r.cell.mode)).c_str(), r.cell.p_v, r.trials,
                  r.successes, r.collisions, r.success_rate, r.collision_rate, mean);
    out += buf;
  }
  return out;
}

void WriteResults(const std::vector<SweepRow>& rows, const std::string& path) {
  const std::string text = FormatResults(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace cvlc

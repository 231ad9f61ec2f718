#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvlc/behavior.hpp"
#include "cvlc/planner.hpp"
#include "cvlc/sim.hpp"
#include "cvlc/types.hpp"

namespace cvlc {

struct SweepGrid {
  std::vector<int> n_connected{1, 3, 5, 10};
  std::vector<double> decel{2, 3, 4, 5, 6};
  std::vector<PlannerMode> modes{std::begin(kAllModes), std::end(kAllModes)};
  std::vector<double> p_v{0.0, 0.05, 0.1, 0.2};

  std::size_t size() const {
    return n_connected.size() * decel.size() * modes.size() * p_v.size();
  }
};

struct SweepCell {
  int n_connected = 1;
  double decel = 6.0;
  PlannerMode mode = PlannerMode::kCvAll;
  double p_v = 0.0;
};

struct SweepConfig {
  SweepGrid grid;
  int trials_per_cell = 500;
  std::uint64_t seed = 1;
  double v_x0_min = 29.0;
  double v_x0_max = 31.0;
  double gap_min = 17.0;  ///< [m] bumper gap between adjacent vehicles
  double gap_max = 22.0;
  double a_m_d = kDefaultPromiseDecel;
  double v_leaders = 30.0;
  double follower_speed = 30.0;
  double follower_connected_prob = 0.5;
  double follower_aggressive_prob = 0.5;
  double trigger_time = 1.0;
  double dt = 0.1;
  double horizon = 10.0;
  MechanicalLimits limits;
  LaneGeometry geometry;
  std::string planner_weights;  ///< empty: rule-based planner
};

/// Throws Error(kInvalidConfig) on an empty grid, non-positive trial count,
/// inverted ranges or probabilities outside [0, 1].
void ValidateSweep(const SweepConfig& sweep);

SweepConfig SweepConfigFromJson(const std::string& text);
SweepConfig LoadSweepConfig(const std::string& path);

/// Cells in grid order: N outermost, then decel, mode, p_v.
std::vector<SweepCell> EnumerateCells(const SweepGrid& grid);

/// Uniform ego speed and bumper gap, follower connectivity and intent drawn
/// with the configured probabilities; layout from MakeScenario.
ScenarioConfig SampleScenario(Rng& rng, const SweepConfig& sweep, const SweepCell& cell);

/// Seed of trial `trial`. The cell does not enter the key, so every cell
/// sees the same sampled scenarios and violation streams.
std::uint64_t TrialSeed(std::uint64_t sweep_seed, int trial);

struct SweepRow {
  SweepCell cell;
  int trials = 0;
  int successes = 0;
  int collisions = 0;
  double success_rate = 0.0;
  double collision_rate = 0.0;
  double mean_completion_time = 0.0;  ///< NaN without successes
  DecisionAudit audit;                ///< summed over the cell's trials
};

/// Runs every cell; results do not depend on `parallelism`.
std::vector<SweepRow> RunSweep(const SweepConfig& sweep, int parallelism,
                               const SimOptions& options = {});

std::string FormatResults(const std::vector<SweepRow>& rows);

/// Throws Error(kEmptyResults) for no rows and Error(kIo) on write failure.
void WriteResults(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace cvlc

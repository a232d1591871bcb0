#pragma once
// Evaluation toolkit: the seven per-day metrics, emergency-day
// stratification, min-max score normalization across policies, CSV tables
// and Gantt export.
//
// Metrics per day: PT(E)/PT(NE) = started elective/non-elective counts
// (every started case runs to completion), Unserved(NE) = non-electives
// never started, Overtime = summed per-room spill past T, Delay = mean over
// served cases of |start - reference| for electives (absolute, unlike the
// reward's one-sided penalty) and start - arrival for non-electives,
// Revenue = summed utilities of served cases, CR = the day reward. Days
// with zero served cases define Delay as 0.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "orlab/domain.hpp"
#include "orlab/simenv.hpp"

namespace orlab {

inline constexpr int kNumMetrics = 7;
inline constexpr std::array<const char*, kNumMetrics> kMetricNames = {
    "pt_e", "pt_ne", "unserved_ne", "overtime", "delay", "revenue", "cr"};
// Direction of "better" per metric: +1 higher-better, -1 lower-better.
inline constexpr std::array<int, kNumMetrics> kMetricDirections = {+1, +1, -1,
                                                                   -1, -1, +1, +1};

struct EpisodeMetrics {
  std::uint64_t seed = 0;
  bool emergency_day = false;
  double values[kNumMetrics] = {0, 0, 0, 0, 0, 0, 0};

  double pt_e() const { return values[0]; }
  double pt_ne() const { return values[1]; }
  double unserved_ne() const { return values[2]; }
  double overtime() const { return values[3]; }
  double delay() const { return values[4]; }
  double revenue() const { return values[5]; }
  double cr() const { return values[6]; }
};

EpisodeMetrics compute_metrics(const EpisodeRecord& rec, const SimConfig& cfg);

struct MetricStat {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (0 for < 2 episodes)
};

struct MetricsRow {
  std::string policy;
  int episodes = 0;
  std::array<MetricStat, kNumMetrics> stats{};
};

struct StratifiedMetrics {
  MetricsRow all, emergency, non_emergency;
};

// Mean/sd per metric over the episode set and its emergency-flag strata;
// the two strata partition the set exactly.
StratifiedMetrics stratify(const std::string& policy,
                           const std::vector<EpisodeMetrics>& episodes);

struct ScoreRow {
  std::string policy;
  std::array<double, kNumMetrics> scores{};
  double average = 0.0;  // unweighted mean of the seven scores
};

// Min-max normalization of the row MEANS across policies: best policy per
// metric scores 1.00, worst 0.00, inverted for lower-better metrics. A
// degenerate metric (all policies equal) scores 1.00 everywhere.
std::vector<ScoreRow> normalize_scores(const std::vector<MetricsRow>& rows);

// CSV writers. results_csv: one line per episode (id, seed, emergency flag,
// seven metrics). comparison_csv: one block per stratum, one row per policy
// with mean and sd columns per metric. scores_csv: one block per stratum,
// one row per policy with the seven scores plus the average.
std::string results_csv(const std::string& policy,
                        const std::vector<EpisodeMetrics>& episodes);
std::string comparison_csv(const std::vector<StratifiedMetrics>& per_policy);
std::string scores_csv(const std::vector<StratifiedMetrics>& per_policy);

// Gantt export: one lane per OR, setup intervals hatched, case bars colored
// by category, a vertical marker at the horizon. Deterministic for a given
// record. The timeline is the machine-readable counterpart (one served case
// per line).
std::string gantt_svg(const EpisodeRecord& rec, const SimConfig& cfg);
std::string gantt_timeline(const EpisodeRecord& rec, const SimConfig& cfg);

}  // namespace orlab

#include "orlab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "orlab/reward.hpp"

namespace orlab {

EpisodeMetrics compute_metrics(const EpisodeRecord& rec, const SimConfig& cfg) {
  EpisodeMetrics m;
  m.seed = rec.seed;
  m.emergency_day = rec.emergency_fired;

  int pt_e = 0, pt_ne = 0, unserved_ne = 0, served = 0;
  double delay_sum = 0.0, revenue = 0.0;
  for (const EpisodeRecord::Row& row : rec.rows) {
    const bool elective = row.reference.has_value();
    if (!row.start) {
      if (!elective) ++unserved_ne;
      continue;
    }
    ++served;
    revenue += cfg.cls(row.class_id).utility;
    if (elective) {
      ++pt_e;
      delay_sum += std::abs(*row.start - *row.reference);
    } else {
      ++pt_ne;
      delay_sum += *row.start - row.arrival;
    }
  }
  m.values[0] = pt_e;
  m.values[1] = pt_ne;
  m.values[2] = unserved_ne;
  m.values[3] = overtime(rec.last_finish, rec.horizon);
  m.values[4] = served > 0 ? delay_sum / served : 0.0;
  m.values[5] = revenue;
  // Batch recomputation, deliberately independent of the streamed total.
  m.values[6] = record_day_outcome(rec, cfg).day_reward;
  return m;
}

namespace {

MetricsRow reduce_rows(const std::string& policy,
                       const std::vector<const EpisodeMetrics*>& eps) {
  MetricsRow row;
  row.policy = policy;
  row.episodes = static_cast<int>(eps.size());
  if (eps.empty()) return row;
  for (int k = 0; k < kNumMetrics; ++k) {
    double sum = 0.0;
    for (const EpisodeMetrics* e : eps) sum += e->values[k];
    const double mean = sum / static_cast<double>(eps.size());
    double ss = 0.0;
    for (const EpisodeMetrics* e : eps) {
      const double d = e->values[k] - mean;
      ss += d * d;
    }
    row.stats[static_cast<std::size_t>(k)].mean = mean;
    row.stats[static_cast<std::size_t>(k)].sd =
        eps.size() > 1 ? std::sqrt(ss / static_cast<double>(eps.size() - 1)) : 0.0;
  }
  return row;
}

}  // namespace

StratifiedMetrics stratify(const std::string& policy,
                           const std::vector<EpisodeMetrics>& episodes) {
  std::vector<const EpisodeMetrics*> all, emer, non;
  for (const EpisodeMetrics& e : episodes) {
    all.push_back(&e);
    (e.emergency_day ? emer : non).push_back(&e);
  }
  StratifiedMetrics out;
  out.all = reduce_rows(policy, all);
  out.emergency = reduce_rows(policy, emer);
  out.non_emergency = reduce_rows(policy, non);
  return out;
}

std::vector<ScoreRow> normalize_scores(const std::vector<MetricsRow>& rows) {
  std::vector<ScoreRow> out;
  if (rows.empty()) return out;
  for (const MetricsRow& r : rows) {
    ScoreRow s;
    s.policy = r.policy;
    out.push_back(s);
  }
  for (int k = 0; k < kNumMetrics; ++k) {
    double lo = rows.front().stats[static_cast<std::size_t>(k)].mean;
    double hi = lo;
    for (const MetricsRow& r : rows) {
      lo = std::min(lo, r.stats[static_cast<std::size_t>(k)].mean);
      hi = std::max(hi, r.stats[static_cast<std::size_t>(k)].mean);
    }
    const double span = hi - lo;
    for (std::size_t p = 0; p < rows.size(); ++p) {
      double score = 1.0;  // degenerate metric: everyone is "best"
      if (span > 1e-12) {
        const double x = rows[p].stats[static_cast<std::size_t>(k)].mean;
        score = kMetricDirections[static_cast<std::size_t>(k)] > 0 ? (x - lo) / span
                                                                   : (hi - x) / span;
      }
      out[p].scores[static_cast<std::size_t>(k)] = score;
    }
  }
  for (ScoreRow& s : out) {
    double sum = 0.0;
    for (double v : s.scores) sum += v;
    s.average = sum / static_cast<double>(kNumMetrics);
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void append_block(std::ostringstream& out, const std::string& stratum,
                  const std::vector<const MetricsRow*>& rows) {
  out << "stratum,policy,episodes";
  for (const char* name : kMetricNames) out << ',' << name << "_mean," << name << "_sd";
  out << '\n';
  for (const MetricsRow* r : rows) {
    out << stratum << ',' << r->policy << ',' << r->episodes;
    for (const MetricStat& s : r->stats) out << ',' << fmt(s.mean) << ',' << fmt(s.sd);
    out << '\n';
  }
}

void append_scores(std::ostringstream& out, const std::string& stratum,
                   const std::vector<ScoreRow>& rows) {
  for (const ScoreRow& r : rows) {
    out << stratum << ',' << r.policy;
    char buf[16];
    for (double s : r.scores) {
      std::snprintf(buf, sizeof buf, "%.2f", s);
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.2f", r.average);
    out << ',' << buf << '\n';
  }
}

}  // namespace

std::string results_csv(const std::string& policy,
                        const std::vector<EpisodeMetrics>& episodes) {
  std::ostringstream out;
  out << "episode,seed,policy,emergency_day";
  for (const char* name : kMetricNames) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const EpisodeMetrics& e = episodes[i];
    out << i << ',' << e.seed << ',' << policy << ',' << (e.emergency_day ? 1 : 0);
    for (double v : e.values) out << ',' << fmt(v);
    out << '\n';
  }
  return out.str();
}

std::string comparison_csv(const std::vector<StratifiedMetrics>& per_policy) {
  std::ostringstream out;
  std::vector<const MetricsRow*> all, emer, non;
  for (const StratifiedMetrics& s : per_policy) {
    all.push_back(&s.all);
    emer.push_back(&s.emergency);
    non.push_back(&s.non_emergency);
  }
  append_block(out, "all_days", all);
  append_block(out, "emergency_days", emer);
  append_block(out, "non_emergency_days", non);
  return out.str();
}

std::string scores_csv(const std::vector<StratifiedMetrics>& per_policy) {
  std::ostringstream out;
  out << "stratum,policy";
  for (const char* name : kMetricNames) out << ',' << name;
  out << ",average\n";
  auto block = [&](const std::string& stratum, auto pick) {
    std::vector<MetricsRow> rows;
    for (const StratifiedMetrics& s : per_policy) rows.push_back(pick(s));
    append_scores(out, stratum, normalize_scores(rows));
  };
  block("all_days", [](const StratifiedMetrics& s) { return s.all; });
  block("emergency_days", [](const StratifiedMetrics& s) { return s.emergency; });
  block("non_emergency_days", [](const StratifiedMetrics& s) { return s.non_emergency; });
  return out.str();
}

namespace {

const char* category_color(Category c) {
  switch (c) {
    case Category::Elective: return "#4c9be8";
    case Category::Urgent: return "#e8a13c";
    case Category::Emergency: return "#d64545";
  }
  return "#999999";
}

}  // namespace

std::string gantt_svg(const EpisodeRecord& rec, const SimConfig& cfg) {
  const int lane_h = 26, bar_h = 18, left = 70, top = 30, px = 9;
  int max_finish = rec.horizon;
  for (const auto& row : rec.rows)
    if (row.finish) max_finish = std::max(max_finish, *row.finish);
  const int width = left + px * max_finish + 40;
  const int height = top + lane_h * rec.num_ors + 40;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"monospace\" font-size=\"11\">\n";
  out << "  <defs><pattern id=\"setup\" width=\"6\" height=\"6\" "
         "patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">"
         "<rect width=\"6\" height=\"6\" fill=\"#dddddd\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#888888\" "
         "stroke-width=\"2\"/></pattern></defs>\n";
  out << "  <text x=\"" << left << "\" y=\"16\">policy=" << rec.policy
      << " seed=" << rec.seed << (rec.emergency_fired
                                      ? " emergency@" + std::to_string(rec.emergency_slot)
                                      : " no-emergency")
      << "</text>\n";

  for (int j = 0; j < rec.num_ors; ++j) {
    const int y = top + j * lane_h;
    out << "  <text x=\"8\" y=\"" << y + bar_h - 4 << "\">OR" << j << "</text>\n";
    out << "  <line x1=\"" << left << "\" y1=\"" << y + bar_h + 2 << "\" x2=\""
        << left + px * max_finish << "\" y2=\"" << y + bar_h + 2
        << "\" stroke=\"#eeeeee\"/>\n";
  }

  // Bars: hatched changeover [start, start+setup), solid case
  // [start+setup, finish), start-ordered per lane for a deterministic file.
  std::vector<const EpisodeRecord::Row*> served;
  for (const auto& row : rec.rows)
    if (row.start) served.push_back(&row);
  std::sort(served.begin(), served.end(), [](const auto* a, const auto* b) {
    if (*a->or_id != *b->or_id) return *a->or_id < *b->or_id;
    return *a->start < *b->start;
  });
  for (const auto* row : served) {
    const int y = top + *row->or_id * lane_h;
    const int x0 = left + px * *row->start;
    if (row->setup > 0)
      out << "  <rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << px * row->setup
          << "\" height=\"" << bar_h << "\" fill=\"url(#setup)\" stroke=\"#666666\"/>\n";
    const int xs = x0 + px * row->setup;
    out << "  <rect x=\"" << xs << "\" y=\"" << y << "\" width=\"" << px * row->duration
        << "\" height=\"" << bar_h << "\" fill=\""
        << category_color(cfg.cls(row->class_id).category)
        << "\" stroke=\"#333333\"/>\n";
    out << "  <text x=\"" << xs + 2 << "\" y=\"" << y + bar_h - 5 << "\">k"
        << row->class_id << "</text>\n";
  }

  // Horizon marker.
  const int xt = left + px * rec.horizon;
  out << "  <line x1=\"" << xt << "\" y1=\"" << top - 8 << "\" x2=\"" << xt << "\" y2=\""
      << top + lane_h * rec.num_ors << "\" stroke=\"#d64545\" stroke-width=\"2\" "
         "stroke-dasharray=\"5,3\"/>\n";
  out << "  <text x=\"" << xt + 4 << "\" y=\"" << top - 12 << "\">T=" << rec.horizon
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string gantt_timeline(const EpisodeRecord& rec, const SimConfig& cfg) {
  std::ostringstream out;
  out << "# policy=" << rec.policy << " seed=" << rec.seed
      << " horizon=" << rec.horizon << " emergency="
      << (rec.emergency_fired ? std::to_string(rec.emergency_slot) : "none") << "\n";
  out << "or start setup duration finish class category patient\n";
  std::vector<const EpisodeRecord::Row*> served;
  for (const auto& row : rec.rows)
    if (row.start) served.push_back(&row);
  std::sort(served.begin(), served.end(), [](const auto* a, const auto* b) {
    if (*a->or_id != *b->or_id) return *a->or_id < *b->or_id;
    return *a->start < *b->start;
  });
  for (const auto* row : served)
    out << *row->or_id << ' ' << *row->start << ' ' << row->setup << ' ' << row->duration
        << ' ' << *row->finish << ' ' << row->class_id << ' '
        << to_string(cfg.cls(row->class_id).category) << ' ' << row->id << '\n';
  return out.str();
}

}  // namespace orlab

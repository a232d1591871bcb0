#include "orlab/domain.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace orlab {

using nlohmann::json;

std::string to_string(Category c) {
  switch (c) {
    case Category::Elective: return "elective";
    case Category::Urgent: return "urgent";
    case Category::Emergency: return "emergency";
  }
  return "?";
}

std::string to_string(DurationClass d) {
  switch (d) {
    case DurationClass::Minor: return "minor";
    case DurationClass::Moderate: return "moderate";
    case DurationClass::Long: return "long";
    case DurationClass::Complex: return "complex";
  }
  return "?";
}

static Category category_from(const std::string& s, const std::string& path) {
  if (s == "elective") return Category::Elective;
  if (s == "urgent") return Category::Urgent;
  if (s == "emergency") return Category::Emergency;
  throw ConfigError(path + ": unknown category '" + s + "'");
}

static DurationClass duration_class_from(const std::string& s, const std::string& path) {
  if (s == "minor") return DurationClass::Minor;
  if (s == "moderate") return DurationClass::Moderate;
  if (s == "long") return DurationClass::Long;
  if (s == "complex") return DurationClass::Complex;
  throw ConfigError(path + ": unknown duration_class '" + s + "'");
}

int effective_duration(int duration_slots, std::optional<int> prev_class_id,
                       int next_class_id, const SetupMatrix& setup) {
  return duration_slots + setup.setup(prev_class_id, next_class_id);
}

double SimConfig::emergency_slot_hazard() const {
  if (emergency_day_prob <= 0.0) return 0.0;
  return 1.0 - std::pow(1.0 - emergency_day_prob, 1.0 / static_cast<double>(horizon));
}

// Setup matrix used when the config gives only the two scalar knobs:
// 0 on the diagonal, `same` inside a duration class (the paired
// elective/non-elective types), `cross` otherwise, fresh row all zero.
static SetupMatrix make_default_setup(const std::vector<SurgeryClass>& classes, int same,
                                      int cross) {
  SetupMatrix m;
  m.num_classes = static_cast<int>(classes.size());
  m.cells.assign(static_cast<std::size_t>(m.num_classes) * m.num_classes, 0);
  m.fresh.assign(static_cast<std::size_t>(m.num_classes), 0);
  for (int a = 0; a < m.num_classes; ++a) {
    for (int b = 0; b < m.num_classes; ++b) {
      if (a == b) continue;
      const bool same_dc = classes[static_cast<std::size_t>(a)].duration_class ==
                           classes[static_cast<std::size_t>(b)].duration_class;
      m.cells[static_cast<std::size_t>(a) * m.num_classes + b] = same_dc ? same : cross;
    }
  }
  return m;
}

SimConfig default_config() {
  SimConfig cfg;
  struct Row {
    const char* name;
    Category cat;
    DurationClass dc;
    double u, c, shape, scale;
  };
  // Two clinical types per duration class: ids 1-4 elective, 5-7 urgent,
  // 8 emergency. Utilities scale with duration class; delay weights scale
  // with clinical urgency.
  const Row rows[] = {
      {"elective_minor", Category::Elective, DurationClass::Minor, 8.0, 0.002, 2.0, 2.0},
      {"elective_moderate", Category::Elective, DurationClass::Moderate, 12.0, 0.002, 3.0, 3.0},
      {"elective_long", Category::Elective, DurationClass::Long, 30.0, 0.002, 6.0, 4.0},
      {"elective_complex", Category::Elective, DurationClass::Complex, 50.0, 0.002, 7.0, 5.0},
      {"urgent_minor", Category::Urgent, DurationClass::Minor, 8.0, 0.004, 2.0, 2.0},
      {"urgent_moderate", Category::Urgent, DurationClass::Moderate, 12.0, 0.004, 3.0, 3.0},
      {"urgent_long", Category::Urgent, DurationClass::Long, 30.0, 0.004, 6.0, 4.0},
      {"emergency_complex", Category::Emergency, DurationClass::Complex, 50.0, 0.005, 7.0, 5.0},
  };
  int id = 1;
  for (const Row& r : rows) {
    SurgeryClass sc;
    sc.id = id++;
    sc.name = r.name;
    sc.category = r.cat;
    sc.duration_class = r.dc;
    sc.utility = r.u;
    sc.delay_coeff = r.c;
    sc.gamma_shape = r.shape;
    sc.gamma_scale = r.scale;
    cfg.classes.push_back(sc);
  }
  cfg.elective_counts = {28, 19, 5, 3};
  cfg.setup = make_default_setup(cfg.classes, 1, 2);
  return cfg;
}

static void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

static SimConfig from_json(const json& j) {
  SimConfig cfg = default_config();
  if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<int>();
  if (j.contains("num_ors")) cfg.num_ors = j.at("num_ors").get<int>();
  if (j.contains("urgent_rate")) cfg.urgent_rate = j.at("urgent_rate").get<double>();
  if (j.contains("emergency_day_prob"))
    cfg.emergency_day_prob = j.at("emergency_day_prob").get<double>();
  if (j.contains("emergency_batch")) cfg.emergency_batch = j.at("emergency_batch").get<int>();
  if (j.contains("overtime_cost")) cfg.overtime_cost = j.at("overtime_cost").get<double>();

  if (j.contains("classes")) {
    cfg.classes.clear();
    int id = 1;
    for (const auto& cj : j.at("classes")) {
      SurgeryClass sc;
      sc.id = id;
      const std::string path = "classes[" + std::to_string(id - 1) + "]";
      sc.name = cj.value("name", "class_" + std::to_string(id));
      sc.category = category_from(cj.at("category").get<std::string>(), path);
      sc.duration_class = duration_class_from(cj.at("duration_class").get<std::string>(), path);
      sc.utility = cj.at("utility").get<double>();
      sc.delay_coeff = cj.at("delay_coeff").get<double>();
      sc.gamma_shape = cj.at("gamma_shape").get<double>();
      sc.gamma_scale = cj.at("gamma_scale").get<double>();
      cfg.classes.push_back(sc);
      ++id;
    }
  }

  if (j.contains("elective_counts")) {
    const auto& e = j.at("elective_counts");
    cfg.elective_counts = {e.at("minor").get<int>(), e.at("moderate").get<int>(),
                           e.at("long").get<int>(), e.at("complex").get<int>()};
  }

  if (j.contains("setup")) {
    const auto& s = j.at("setup");
    if (s.contains("matrix")) {
      SetupMatrix m;
      m.num_classes = cfg.num_classes();
      for (const auto& row : s.at("matrix"))
        for (const auto& cell : row) m.cells.push_back(cell.get<int>());
      if (s.contains("fresh"))
        for (const auto& cell : s.at("fresh")) m.fresh.push_back(cell.get<int>());
      else
        m.fresh.assign(static_cast<std::size_t>(m.num_classes), 0);
      cfg.setup = m;
    } else {
      cfg.setup = make_default_setup(cfg.classes, s.value("same_duration_class", 1),
                                     s.value("cross_duration_class", 2));
    }
  } else {
    cfg.setup = make_default_setup(cfg.classes, 1, 2);
  }

  if (j.contains("ppo")) {
    const auto& p = j.at("ppo");
    PpoConfig& h = cfg.ppo;
    h.discount = p.value("discount", h.discount);
    h.gae_lambda = p.value("gae_lambda", h.gae_lambda);
    h.clip_eps = p.value("clip_eps", h.clip_eps);
    h.entropy_coeff = p.value("entropy_coeff", h.entropy_coeff);
    h.actor_lr = p.value("actor_lr", h.actor_lr);
    h.critic_lr = p.value("critic_lr", h.critic_lr);
    h.reward_scale = p.value("reward_scale", h.reward_scale);
    h.hidden1 = p.value("hidden1", h.hidden1);
    h.hidden2 = p.value("hidden2", h.hidden2);
    h.iterations = p.value("iterations", h.iterations);
    h.episodes_per_iteration = p.value("episodes_per_iteration", h.episodes_per_iteration);
    h.updates_per_iteration = p.value("updates_per_iteration", h.updates_per_iteration);
    h.minibatch_size = p.value("minibatch_size", h.minibatch_size);
    h.validation_interval = p.value("validation_interval", h.validation_interval);
    h.validation_episodes = p.value("validation_episodes", h.validation_episodes);
  }

  // Validation: first violated field is reported by path.
  check(cfg.horizon > 0, "horizon: must be > 0");
  check(cfg.num_ors > 0, "num_ors: must be > 0");
  check(!cfg.classes.empty(), "classes: at least one class required");
  for (const SurgeryClass& sc : cfg.classes) {
    const std::string path = "classes[" + std::to_string(sc.id - 1) + "]";
    check(sc.utility >= 0.0, path + ".utility: must be >= 0");
    check(sc.delay_coeff >= 0.0, path + ".delay_coeff: must be >= 0");
    check(sc.gamma_shape > 0.0, path + ".gamma_shape: must be > 0");
    check(sc.gamma_scale > 0.0, path + ".gamma_scale: must be > 0");
  }
  bool any_elective = false;
  for (const SurgeryClass& sc : cfg.classes) any_elective |= sc.category == Category::Elective;
  check(any_elective || cfg.total_electives() == 0,
        "elective_counts: electives configured but no elective class exists");
  for (int c : cfg.elective_counts) check(c >= 0, "elective_counts: must be >= 0");
  if (cfg.total_electives() > 0) {
    // Every duration class with a positive elective count needs an elective type.
    for (int dc = 0; dc < 4; ++dc) {
      if (cfg.elective_counts[static_cast<std::size_t>(dc)] == 0) continue;
      bool found = false;
      for (const SurgeryClass& sc : cfg.classes)
        found |= sc.category == Category::Elective &&
                 static_cast<int>(sc.duration_class) == dc;
      check(found, "elective_counts." + to_string(static_cast<DurationClass>(dc)) +
                       ": no elective class with that duration class");
    }
  }
  check(cfg.urgent_rate >= 0.0, "urgent_rate: must be >= 0");
  check(cfg.emergency_day_prob >= 0.0 && cfg.emergency_day_prob < 1.0,
        "emergency_day_prob: must be in [0, 1)");
  check(cfg.emergency_batch >= 0, "emergency_batch: must be >= 0");
  check(cfg.overtime_cost >= 0.0, "overtime_cost: must be >= 0");
  if (cfg.emergency_batch > 0 && cfg.emergency_day_prob > 0.0) {
    bool found = false;
    for (const SurgeryClass& sc : cfg.classes) found |= sc.category == Category::Emergency;
    check(found, "classes: emergency arrivals configured but no emergency class exists");
  }
  if (cfg.urgent_rate > 0.0) {
    bool found = false;
    for (const SurgeryClass& sc : cfg.classes) found |= sc.category == Category::Urgent;
    check(found, "classes: urgent_rate > 0 but no urgent class exists");
  }
  const std::size_t K = cfg.classes.size();
  check(cfg.setup.cells.size() == K * K, "setup.matrix: must be KxK");
  check(cfg.setup.fresh.size() == K, "setup.fresh: must have K entries");
  cfg.setup.num_classes = static_cast<int>(K);
  for (std::size_t a = 0; a < K; ++a) {
    check(cfg.setup.cells[a * K + a] == 0, "setup.matrix: diagonal must be 0");
    for (std::size_t b = 0; b < K; ++b)
      check(cfg.setup.cells[a * K + b] >= 0, "setup.matrix: entries must be >= 0");
  }
  for (std::size_t b = 0; b < K; ++b)
    check(cfg.setup.fresh[b] >= 0, "setup.fresh: entries must be >= 0");

  const PpoConfig& h = cfg.ppo;
  check(h.discount >= 0.0 && h.discount <= 1.0, "ppo.discount: must be in [0, 1]");
  check(h.gae_lambda >= 0.0 && h.gae_lambda <= 1.0, "ppo.gae_lambda: must be in [0, 1]");
  check(h.clip_eps > 0.0, "ppo.clip_eps: must be > 0");
  check(h.entropy_coeff >= 0.0, "ppo.entropy_coeff: must be >= 0");
  check(h.actor_lr > 0.0, "ppo.actor_lr: must be > 0");
  check(h.critic_lr > 0.0, "ppo.critic_lr: must be > 0");
  check(h.reward_scale > 0.0, "ppo.reward_scale: must be > 0");
  check(h.hidden1 > 0 && h.hidden2 > 0, "ppo.hidden: widths must be > 0");
  check(h.iterations > 0, "ppo.iterations: must be > 0");
  check(h.episodes_per_iteration > 0, "ppo.episodes_per_iteration: must be > 0");
  check(h.updates_per_iteration > 0, "ppo.updates_per_iteration: must be > 0");
  check(h.minibatch_size > 0, "ppo.minibatch_size: must be > 0");
  return cfg;
}

SimConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& cfg) {
  json j;
  j["horizon"] = cfg.horizon;
  j["num_ors"] = cfg.num_ors;
  j["urgent_rate"] = cfg.urgent_rate;
  j["emergency_day_prob"] = cfg.emergency_day_prob;
  j["emergency_batch"] = cfg.emergency_batch;
  j["overtime_cost"] = cfg.overtime_cost;
  json classes = json::array();
  for (const SurgeryClass& sc : cfg.classes) {
    json cj;
    cj["name"] = sc.name;
    cj["category"] = to_string(sc.category);
    cj["duration_class"] = to_string(sc.duration_class);
    cj["utility"] = sc.utility;
    cj["delay_coeff"] = sc.delay_coeff;
    cj["gamma_shape"] = sc.gamma_shape;
    cj["gamma_scale"] = sc.gamma_scale;
    classes.push_back(cj);
  }
  j["classes"] = classes;
  j["elective_counts"] = {{"minor", cfg.elective_counts[0]},
                          {"moderate", cfg.elective_counts[1]},
                          {"long", cfg.elective_counts[2]},
                          {"complex", cfg.elective_counts[3]}};
  json rows = json::array();
  const int K = cfg.num_classes();
  for (int a = 0; a < K; ++a) {
    json row = json::array();
    for (int b = 0; b < K; ++b)
      row.push_back(cfg.setup.cells[static_cast<std::size_t>(a) * K + b]);
    rows.push_back(row);
  }
  j["setup"] = {{"matrix", rows}, {"fresh", cfg.setup.fresh}};
  const PpoConfig& h = cfg.ppo;
  j["ppo"] = {{"discount", h.discount},
              {"gae_lambda", h.gae_lambda},
              {"clip_eps", h.clip_eps},
              {"entropy_coeff", h.entropy_coeff},
              {"actor_lr", h.actor_lr},
              {"critic_lr", h.critic_lr},
              {"reward_scale", h.reward_scale},
              {"hidden1", h.hidden1},
              {"hidden2", h.hidden2},
              {"iterations", h.iterations},
              {"episodes_per_iteration", h.episodes_per_iteration},
              {"updates_per_iteration", h.updates_per_iteration},
              {"minibatch_size", h.minibatch_size},
              {"validation_interval", h.validation_interval},
              {"validation_episodes", h.validation_episodes}};
  return j.dump(2);
}

void save_config(const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << serialize_config(cfg) << "\n";
}

std::uint64_t config_hash(const SimConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace orlab

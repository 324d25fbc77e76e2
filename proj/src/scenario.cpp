#include "icbf/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <toml.hpp>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double get_number(const toml::table& tbl, std::string_view key, const std::string& ctx) {
  const toml::node* node = tbl.get(key);
  if (node == nullptr) throw ConfigError(ctx + "." + std::string(key) + ": missing");
  if (auto v = node->value<double>()) return *v;
  throw ConfigError(ctx + "." + std::string(key) + ": expected a number");
}

double get_number_or(const toml::table& tbl, std::string_view key, double fallback, const std::string& ctx) {
  if (!tbl.contains(key)) return fallback;
  return get_number(tbl, key, ctx);
}

Vec2 get_vec2(const toml::table& tbl, std::string_view key, const std::string& ctx) {
  const toml::array* arr = tbl.get_as<toml::array>(key);
  const std::string where = ctx + "." + std::string(key);
  if (arr == nullptr) throw ConfigError(where + ": missing or not an array");
  if (arr->size() != 2) throw ConfigError(where + ": expected 2 components, got " + std::to_string(arr->size()));
  Vec2 out;
  for (std::size_t k = 0; k < 2; ++k) {
    auto v = (*arr)[k].value<double>();
    if (!v) throw ConfigError(where + ": components must be numbers");
    out[static_cast<int>(k)] = *v;
  }
  return out;
}

const toml::table* sub_table(const toml::table& root, std::string_view key) { return root.get_as<toml::table>(key); }

SmoothMaxParams get_smooth(const toml::table* tbl, std::string_view key, SmoothMaxParams fallback) {
  if (tbl == nullptr) return fallback;
  const toml::table* t = tbl->get_as<toml::table>(key);
  if (t == nullptr) return fallback;
  const std::string ctx = "smooth_max." + std::string(key);
  fallback.b1 = get_number_or(*t, "b1", fallback.b1, ctx);
  fallback.b2 = get_number_or(*t, "b2", fallback.b2, ctx);
  return fallback;
}

void positive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field + " = " + fmt_double(v) + ": must be > 0");
}

}  // namespace

StackedState ScenarioConfig::initial_state() const {
  StackedState x;
  for (const AgentConfig& a : agents) x.push_back(a.initial);
  return x;
}

std::vector<AgentParams> ScenarioConfig::params() const {
  std::vector<AgentParams> out;
  for (const AgentConfig& a : agents) out.push_back(a.params);
  return out;
}

ControllerConfig ScenarioConfig::controller_config() const {
  ControllerConfig c;
  for (const AgentConfig& a : agents) {
    c.agents.push_back(a.params);
    c.paths.push_back(a.path);
    DsdreWeights w = weights;
    w.Ts_s = Ts_s;
    c.weights.push_back(w);
  }
  c.gains = gains;
  c.smooth = smooth;
  c.graph = graph;
  c.buffer_a_m = buffer_a_m;
  c.buffer_b_m = buffer_b_m;
  return c;
}

std::vector<BarrierValue> barrier_values(const StackedState& x, const ControllerConfig& cfg) {
  std::vector<BarrierValue> out;
  for (int i = 0; i < cfg.agent_count(); ++i) {
    const VelocityCbfValues h = velocity_cbf_values(x.at(i), cfg.agents[i]);
    out.push_back({cbf_name(CbfKind::velocity_lower, i), h.h_lo});
    out.push_back({cbf_name(CbfKind::velocity_upper, i), h.h_hi});
  }
  for (const CollisionPair& pair : cfg.collision_pairs()) {
    const std::string name = cbf_name(CbfKind::collision, pair.geometry.i, pair.geometry.j);
    try {
      out.push_back({name, collision_cbf_value(x, pair, cfg.gains, cfg.smooth)});
    } catch (const CoincidentCenters&) {
      out.push_back({name, -std::numeric_limits<double>::infinity()});
    }
  }
  return out;
}

void finalize_scenario(ScenarioConfig& cfg) {
  if (cfg.agents.empty()) throw ConfigError("agent: at least one agent is required");
  positive(cfg.Ts_s, "simulation.sample_time_s");
  positive(cfg.duration_s, "simulation.duration_s");
  if (cfg.substeps < 1) throw ConfigError("simulation.integrator_substeps = " + std::to_string(cfg.substeps) + ": must be >= 1");
  if (cfg.buffer_a_m < 0.0) throw ConfigError("geometry.buffer_a_m = " + fmt_double(cfg.buffer_a_m) + ": must be >= 0");
  if (cfg.buffer_b_m < 0.0) throw ConfigError("geometry.buffer_b_m = " + fmt_double(cfg.buffer_b_m) + ": must be >= 0");

  try {
    cfg.gains.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("cbf: ") + e.what());
  }
  try {
    cfg.smooth.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("smooth_max: ") + e.what());
  }
  try {
    DsdreWeights w = cfg.weights;
    w.Ts_s = cfg.Ts_s;
    w.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("dsdre: ") + e.what());
  }
  for (const AgentConfig& a : cfg.agents) {
    try {
      validate(a.params, cfg.gains.lambda_lo);
    } catch (const InvalidInput& e) {
      throw ConfigError("agent '" + a.name + "': " + e.what());
    }
    if (!std::isfinite(a.initial.v_mps) || !std::isfinite(a.initial.s_m))
      throw ConfigError("agent '" + a.name + "': initial state must be finite");
    positive(a.path.length_m, "agent '" + a.name + "'.path_length_m");
  }

  if (cfg.agents.size() >= 2) {
    std::vector<LinearPath> paths;
    for (const AgentConfig& a : cfg.agents) paths.push_back(a.path);
    const std::vector<AgentParams> params = cfg.params();
    cfg.graph = build_conflict_graph(paths, params, cfg.buffer_a_m, cfg.buffer_b_m, cfg.conflict_margin_m);
  } else {
    cfg.graph = ConflictGraph{1, {}};
  }

  // every barrier must be non-negative at t = 0
  const std::vector<BarrierValue> h0 = barrier_values(cfg.initial_state(), cfg.controller_config());
  std::string violated;
  for (const BarrierValue& b : h0) {
    if (!(b.h >= 0.0)) violated += (violated.empty() ? "" : ", ") + b.name + " = " + fmt_double(b.h);
  }
  if (!violated.empty()) throw ConfigError("initial state outside the safe set: " + violated);
}

ScenarioConfig parse_scenario(std::string_view toml_text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "parse error in " << source << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(os.str());
  }

  ScenarioConfig cfg;
  cfg.name = root["name"].value_or(std::string("scenario"));

  if (const toml::table* sim = sub_table(root, "simulation")) {
    cfg.Ts_s = get_number_or(*sim, "sample_time_s", cfg.Ts_s, "simulation");
    cfg.duration_s = get_number_or(*sim, "duration_s", cfg.duration_s, "simulation");
    cfg.substeps = static_cast<int>(get_number_or(*sim, "integrator_substeps", cfg.substeps, "simulation"));
    cfg.seed = static_cast<std::uint64_t>(get_number_or(*sim, "seed", 0.0, "simulation"));
    cfg.output_dir = (*sim)["output_dir"].value_or(cfg.output_dir);
  }
  if (const toml::table* cbf = sub_table(root, "cbf")) {
    cfg.gains.lambda_lo = get_number_or(*cbf, "lambda_v_lower", cfg.gains.lambda_lo, "cbf");
    cfg.gains.lambda_hi = get_number_or(*cbf, "lambda_v_upper", cfg.gains.lambda_hi, "cbf");
    cfg.gains.lambda_c = get_number_or(*cbf, "lambda_c", cfg.gains.lambda_c, "cbf");
    cfg.smooth.epsilon_mps2 = get_number_or(*cbf, "epsilon_mps2", cfg.smooth.epsilon_mps2, "cbf");
  }
  const toml::table* smx = sub_table(root, "smooth_max");
  cfg.smooth.closing_speed = get_smooth(smx, "closing_speed", cfg.smooth.closing_speed);
  cfg.smooth.decel = get_smooth(smx, "deceleration", cfg.smooth.decel);
  cfg.smooth.braking_floor = get_smooth(smx, "braking_floor", cfg.smooth.braking_floor);
  if (const toml::table* d = sub_table(root, "dsdre")) {
    cfg.weights.q = get_number_or(*d, "q", cfg.weights.q, "dsdre");
    cfg.weights.r = get_number_or(*d, "r", cfg.weights.r, "dsdre");
    cfg.weights.v_thld_mps = get_number_or(*d, "v_threshold_mps", cfg.weights.v_thld_mps, "dsdre");
  }
  if (const toml::table* g = sub_table(root, "geometry")) {
    cfg.buffer_a_m = get_number_or(*g, "buffer_a_m", cfg.buffer_a_m, "geometry");
    cfg.buffer_b_m = get_number_or(*g, "buffer_b_m", cfg.buffer_b_m, "geometry");
    cfg.conflict_margin_m = get_number_or(*g, "conflict_margin_m", cfg.conflict_margin_m, "geometry");
  }

  const toml::array* agents = root.get_as<toml::array>("agent");
  if (agents == nullptr || agents->empty()) throw ConfigError("agent: at least one [[agent]] table is required");
  int index = 0;
  for (const toml::node& node : *agents) {
    ++index;
    const toml::table* t = node.as_table();
    const std::string ctx = "agent[" + std::to_string(index) + "]";
    if (t == nullptr) throw ConfigError(ctx + ": expected a table");
    AgentConfig a;
    a.name = (*t)["name"].value_or(std::to_string(index));
    AgentParams& p = a.params;
    p.mass_kg = get_number(*t, "mass_kg", ctx);
    p.c0_N = get_number(*t, "c0_N", ctx);
    p.c1_Ns_per_m = get_number(*t, "c1_Ns_per_m", ctx);
    p.c2_Ns2_per_m2 = get_number(*t, "c2_Ns2_per_m2", ctx);
    p.length_m = get_number(*t, "length_m", ctx);
    p.width_m = get_number(*t, "width_m", ctx);
    p.u_min_mps2 = get_number(*t, "u_min_mps2", ctx);
    p.u_max_mps2 = get_number(*t, "u_max_mps2", ctx);
    p.v_min_mps = get_number_or(*t, "v_min_mps", 0.0, ctx);
    p.v_max_mps = get_number(*t, "v_max_mps", ctx);
    p.v_ref_mps = get_number(*t, "v_ref_mps", ctx);
    a.initial.v_mps = get_number(*t, "v0_mps", ctx);
    a.initial.s_m = get_number_or(*t, "s0_m", 0.0, ctx);
    const Vec2 start = get_vec2(*t, "start_m", ctx);
    const Vec2 dir = get_vec2(*t, "direction", ctx);
    if (dir.norm() == 0.0) throw ConfigError(ctx + ".direction: must be non-zero");
    a.path = LinearPath::from_start(start, dir, get_number(*t, "path_length_m", ctx));
    cfg.agents.push_back(std::move(a));
  }

  finalize_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace icbf

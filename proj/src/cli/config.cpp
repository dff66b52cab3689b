#include "renorm/cli.hpp"

#include "renorm/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <set>

namespace renorm::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigInvalid(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigInvalid("unknown key '" + k + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const T& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigInvalid(where + "." + key + " has the wrong type");
  }
}

Mode read_mode(const json& t) {
  if (!t.contains("k") || !t["k"].is_array() || t["k"].size() != 2) throw ConfigInvalid("term needs k = [k1, k2]");
  try {
    return {t["k"][0].get<int>(), t["k"][1].get<int>()};
  } catch (const json::exception&) {
    throw ConfigInvalid("mode entries must be integers");
  }
}

// Terms: {"type": "const", "a"} | {"type": "cos" | "sin", "k", "a"}.
Observable read_observable(const json& terms, const std::string& where) {
  if (!terms.is_array() || terms.empty()) throw ConfigInvalid(where + " needs a nonempty term list");
  Observable g;
  for (const auto& t : terms) {
    only_keys(t, {"type", "k", "a"}, where);
    const auto type = get<std::string>(t, "type", "", where);
    const double a = get<double>(t, "a", 1.0, where);
    if (type == "const") g = g + Observable::constant(a);
    else if (type == "cos") g = g + Observable::cosine(read_mode(t), a);
    else if (type == "sin") g = g + Observable::sine(read_mode(t), a);
    else throw ConfigInvalid(where + ": term type must be const, cos or sin");
  }
  return g;
}

void positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigInvalid(std::string("params.") + name + " must be positive");
}

Params read_params(const json& p) {
  static const std::set<std::string> keys{
      "tol", "samples", "t_max", "n_max", "alphas", "n_traces", "K", "M", "dense_cap", "cutoff", "t0", "t1",
      "growth_samples", "base_points", "T_list", "grid", "lipschitz_grid", "alpha_min", "alpha_max", "alpha_step"};
  only_keys(p, keys, "params");
  Params d, o;
  const std::string w = "params";
  o.tol = get(p, "tol", d.tol, w);
  o.samples = get(p, "samples", d.samples, w);
  o.t_max = get(p, "t_max", d.t_max, w);
  o.n_max = get(p, "n_max", d.n_max, w);
  o.alphas = get(p, "alphas", d.alphas, w);
  o.n_traces = get(p, "n_traces", d.n_traces, w);
  o.K = get(p, "K", d.K, w);
  o.M = get(p, "M", d.M, w);
  o.dense_cap = get(p, "dense_cap", d.dense_cap, w);
  o.cutoff = get(p, "cutoff", d.cutoff, w);
  o.t0 = get(p, "t0", d.t0, w);
  o.t1 = get(p, "t1", d.t1, w);
  o.growth_samples = get(p, "growth_samples", d.growth_samples, w);
  o.base_points = get(p, "base_points", d.base_points, w);
  o.T_list = get(p, "T_list", d.T_list, w);
  o.grid = get(p, "grid", d.grid, w);
  o.lipschitz_grid = get(p, "lipschitz_grid", d.lipschitz_grid, w);
  o.alpha_min = get(p, "alpha_min", d.alpha_min, w);
  o.alpha_max = get(p, "alpha_max", d.alpha_max, w);
  o.alpha_step = get(p, "alpha_step", d.alpha_step, w);

  positive(o.tol, "tol");
  positive(o.t_max, "t_max");
  positive(o.cutoff, "cutoff");
  positive(o.t0, "t0");
  positive(o.alpha_step, "alpha_step");
  if (o.t1 <= o.t0) throw ConfigInvalid("params.t1 must exceed t0");
  if (o.samples < 1 || o.n_max < 2 || o.n_traces < 2 || o.K < 4 || o.M < 2 || o.dense_cap < 1 ||
      o.growth_samples < 2 || o.base_points < 1 || o.grid < 1 || o.lipschitz_grid < 1)
    throw ConfigInvalid("integer parameter out of range");
  if (o.T_list.empty() || !std::is_sorted(o.T_list.begin(), o.T_list.end()))
    throw ConfigInvalid("params.T_list must be nonempty and ascending");
  for (double T : o.T_list) positive(T, "T_list");
  if (o.alpha_min < 0.0 || o.alpha_max >= 1.0 || o.alpha_max < o.alpha_min)
    throw ConfigInvalid("alpha sweep range must satisfy 0 <= alpha_min <= alpha_max < 1");
  return o;
}

json params_json(const Params& p) {
  return {{"tol", p.tol},         {"samples", p.samples},
          {"t_max", p.t_max},     {"n_max", p.n_max},
          {"alphas", p.alphas},   {"n_traces", p.n_traces},
          {"K", p.K},             {"M", p.M},
          {"dense_cap", p.dense_cap}, {"cutoff", p.cutoff},
          {"t0", p.t0},           {"t1", p.t1},
          {"growth_samples", p.growth_samples}, {"base_points", p.base_points},
          {"T_list", p.T_list},   {"grid", p.grid},
          {"lipschitz_grid", p.lipschitz_grid}, {"alpha_min", p.alpha_min},
          {"alpha_max", p.alpha_max}, {"alpha_step", p.alpha_step}};
}

json observable_json(const Observable& g) {
  json a = json::array();
  for (const auto& [k, c] : g.coeffs()) a.push_back({{"k", {k.first, k.second}}, {"re", c.real()}, {"im", c.imag()}});
  return a;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  only_keys(j, {"schema_version", "experiment", "map", "vector_field", "observables", "params", "out", "seed"},
            "config");
  ExperimentConfig c;
  c.schema_version = get(j, "schema_version", 0, "config");
  if (c.schema_version != kSchemaVersion)
    throw ConfigInvalid("schema_version must be " + std::to_string(kSchemaVersion));
  c.experiment = get<std::string>(j, "experiment", "", "config");
  static const std::set<std::string> names{"identities", "spectrum", "growth", "coboundary", "sweep-alpha"};
  if (!names.count(c.experiment)) throw ConfigInvalid("unknown experiment '" + c.experiment + "'");

  const json m = j.value("map", json::object());
  only_keys(m, {"A", "alpha", "variant"}, "map");
  IMat2 A;
  A << 2, 1, 1, 1;
  if (m.contains("A")) {
    const auto rows = get<std::vector<std::vector<std::int64_t>>>(m, "A", {}, "map");
    if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) throw ConfigInvalid("map.A must be 2x2");
    A << rows[0][0], rows[0][1], rows[1][0], rows[1][1];
  }
  const double alpha = get(m, "alpha", 0.0, "map");
  const auto variant = get<std::string>(m, "variant", "standard", "map");
  if (variant != "standard" && variant != "linear") throw ConfigInvalid("map.variant must be standard or linear");

  const json v = j.value("vector_field", json::object());
  only_keys(v, {"norm", "orientation"}, "vector_field");
  try {
    c.field.map = MapSpec(A, alpha, variant == "linear" ? Variant::Linear : Variant::StandardFamily);
    if (v.contains("norm")) c.field.norm = read_observable(v["norm"], "vector_field.norm");
    c.field.orientation = get(v, "orientation", 1, "vector_field");
    VectorField check(c.field);
  } catch (const InvalidSpec& e) {
    throw ConfigInvalid(e.what());
  }

  if (j.contains("observables")) {
    if (!j["observables"].is_array()) throw ConfigInvalid("observables must be a list");
    for (const auto& o : j["observables"]) {
      only_keys(o, {"name", "terms"}, "observable");
      const auto name = get<std::string>(o, "name", "", "observable");
      if (name.empty()) throw ConfigInvalid("observable needs a name");
      c.observables.push_back({name, read_observable(o.value("terms", json()), "observable " + name)});
    }
  }
  if ((c.experiment == "growth" || c.experiment == "coboundary") && c.observables.empty())
    throw ConfigInvalid(c.experiment + " needs at least one observable");

  c.params = read_params(j.value("params", json::object()));
  if (c.params.alphas.empty()) c.params.alphas = {alpha};
  for (double a : c.params.alphas)
    if (a < 0.0 || a >= 1.0) throw ConfigInvalid("params.alphas entries must lie in [0, 1)");
  c.out_dir = get<std::string>(j, "out", "", "config");
  c.seed = get<std::uint64_t>(j, "seed", 1, "config");

  // Defaults are filled in, the output directory is left out.
  json canon = {{"schema_version", c.schema_version},
                {"experiment", c.experiment},
                {"map", {{"A", {{A(0, 0), A(0, 1)}, {A(1, 0), A(1, 1)}}}, {"alpha", alpha}, {"variant", variant}}},
                {"vector_field", {{"norm", observable_json(c.field.norm)}, {"orientation", c.field.orientation}}},
                {"params", params_json(c.params)},
                {"seed", c.seed}};
  json obs = json::array();
  for (const auto& o : c.observables) obs.push_back({{"name", o.name}, {"terms", observable_json(o.g)}});
  canon["observables"] = obs;
  c.canonical = canon.dump();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const MissingArtifacts&) {
    throw ConfigInvalid("cannot read config " + path);
  }
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigInvalid("config " + path + " is not valid JSON");
  return parse_config(j);
}

std::string config_hash(const ExperimentConfig& c) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(c.canonical.data(), c.canonical.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InvalidSpec("SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace renorm::cli

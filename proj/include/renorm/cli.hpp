#pragma once

#include "renorm/flow.hpp"
#include "renorm/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace renorm::cli {

inline constexpr int kSchemaVersion = 1;

struct NamedObservable {
  std::string name;
  Observable g;
};

/// Numeric knobs; every experiment reads the subset it needs.
struct Params {
  double tol = 1e-10;
  int samples = 50;          ///< random instances per identity
  double t_max = 50.0;       ///< flow times drawn from (0, t_max]
  int n_max = 6;             ///< n + m bound for cocycle laws
  std::vector<double> alphas;  ///< identity suite; defaults to the map's alpha
  int n_traces = 10;
  int K = 16;
  int M = 16;
  int dense_cap = 512;
  double cutoff = 0.05;
  double t0 = 10.0;
  double t1 = 1e4;
  int growth_samples = 40;
  int base_points = 3;
  std::vector<double> T_list{1e2, 1e3, 1e4};
  int grid = 32;
  int lipschitz_grid = 16;
  double alpha_min = 0.0;
  double alpha_max = 0.3;
  double alpha_step = 0.01;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string experiment;  ///< identities | spectrum | growth | coboundary | sweep-alpha
  VectorFieldSpec field;   ///< field.map is the map
  std::vector<NamedObservable> observables;
  Params params;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::string canonical;  ///< normalized JSON text; the hash is taken over it
};

/// Validates against the schema; unknown keys, nonpositive tolerances or a bad experiment name throw ConfigInvalid.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Hex SHA-256 of the canonical config text.
std::string config_hash(const ExperimentConfig& c);

/// Runs the named experiment and writes its artifacts into out_dir. Returns 0 on success, 1 if a check failed.
int run(const ExperimentConfig& c);

/// Text summary of an artifact directory, without recomputation. Throws MissingArtifacts.
std::string report(const std::string& dir);

}  // namespace renorm::cli

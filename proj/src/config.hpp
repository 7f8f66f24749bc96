#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "models.hpp"

namespace ldplab::config {

// Schema violations are collected and reported together.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::vector<std::string>& violations);
  std::vector<std::string> violations;
};

struct ExperimentConfig {
  models::ModelSpec model;
  std::string kind = "ratio";  // ratio | conditions | regen | constants
  std::vector<std::size_t> n_grid{1000};
  int x_per_n = 8;
  std::vector<double> x_factors;  // optional explicit x = factor * b_n
  std::size_t reps = 100000;
  std::uint64_t seed = 1;
  int workers = 8;
  std::string out_dir = "out";

  std::string rule;  // region rule; empty picks the model default
  double delta = 0.1;
  double a = 0.0;
  double gamma = 0.02;

  std::vector<int> k_grid{2, 4, 8};
  double small_set_c = 1.0;  // regen small-set parameter
};

// Parses the key = value section format; a leading '{' switches to JSON.
ExperimentConfig parse_text(const std::string& text);
ExperimentConfig load_file(const std::string& path);

// Canonical serialization (round-trips losslessly through parse_text).
std::string serialize(const ExperimentConfig& cfg);

// Hash over the semantically meaningful fields (out_dir and workers excluded).
std::string config_hash(const ExperimentConfig& cfg);

// Full validation; throws SchemaError listing every violation.
void validate(ExperimentConfig& cfg);

}  // namespace ldplab::config

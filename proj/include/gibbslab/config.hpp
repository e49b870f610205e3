#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/exact.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/sampler.hpp"

namespace gibbslab {

/// Value of the TOML subset: numbers, booleans, strings and (nested) arrays.
struct ConfigValue {
  enum class Kind { Number, Bool, String, Array } kind = Kind::Number;
  std::string text;  // numbers keep their literal spelling
  bool boolean = false;
  std::vector<ConfigValue> items;
  int line = 0;

  double as_double() const;
  std::int64_t as_int() const;
  std::uint64_t as_uint() const;
  bool as_bool() const;
  const std::string& as_string() const;
  std::vector<double> as_doubles() const;
  std::vector<std::int64_t> as_ints() const;
};

using ConfigTable = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Parses "[section]" headers and "key = value" lines; '#' starts a comment.
/// Errors are ConfigParse with the offending line number.
ConfigTable parse_config_text(const std::string& text);

struct ExperimentConfig {
  // [lattice]
  std::vector<std::int64_t> extents{2};
  std::vector<std::int64_t> lower;
  // [potential]
  std::string potential = "gaussian";
  double potential_amplitude = 0.0;
  double field = 0.0;
  // [interaction]
  std::string interaction = "explicit";
  double amplitude = 0.2;
  double exponent = 3.0;
  double diagonal = 1.0;
  bool ferromagnetic = true;
  double coupling = -0.2;
  std::vector<std::vector<double>> matrix;
  double cutoff = 1e-12;
  std::optional<std::int64_t> shell_width;
  std::optional<double> decay_constant;
  std::optional<double> decay_exponent;
  // [boundary]
  std::string boundary = "zero";
  double boundary_value = 0.0;
  std::uint64_t boundary_seed = 0;
  // [grid]
  GridSpec grid;
  // [chain]
  ChainConfig chain;
  std::string pairs = "auto";
  // [block]
  std::vector<double> radii{1.5, 2.5, 3.5, 4.5};
  double epsilon = 0.1;
  double rho = 1.0;
  double block_C = 1.0;
  // [bootstrap]
  double coupling_factor = 2.0;
  std::size_t max_iterations = 64;
  std::optional<double> L;
  std::optional<double> C0;
  double alpha0 = 0.4;
  // [run]
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string format = "csv";
  // [fit]
  std::string fit_input;
  double fit_r_min = 2.0;
  double fit_outer_fraction = 0.25;

  std::string source;  // raw text, hashed into the manifest
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

ModelSpec build_model(const ExperimentConfig& cfg);

/// FNV-1a of the bytes.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace gibbslab

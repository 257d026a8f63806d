#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metais/probmodel.hpp"
#include "metais/refine.hpp"
#include "metais/types.hpp"

namespace metais {

/// Malformed configuration; carries the line (syntax errors) or the field path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line, std::string field)
      : Error(what), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

enum class Method { mc, is, metais };
std::string to_string(Method m);
Method parse_method(const std::string& name);

struct ProblemConfig {
  std::string kind = "rackwitz";  ///< parabola | rackwitz | linear | external
  double b = 5.0, kappa = 0.5, e = 0.1;  // parabola
  double a = 3.0, sigma = 0.2;           // rackwitz
  double beta0 = 2.0;                    // linear
  std::string command;                   // external
  double timeout_seconds = 3600.0;

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

struct McmcConfig {
  std::size_t burn_in = 100;
  std::size_t thinning = 10;
  std::size_t chains = 4;
  std::size_t max_stepout = 32;
  /// Initial slice widths as multiples of the marginal standard deviations.
  double width_scale = 1.0;

  friend bool operator==(const McmcConfig&, const McmcConfig&) = default;
};

struct RefinementSettings {
  std::size_t population_size = 10000;
  std::size_t population_thinning = 1;
  std::size_t m_min = 30;
  std::size_t m_max = 1000;
  std::optional<std::size_t> initial_doe_size;
  double loo_low = 0.5;
  double loo_high = 2.0;
  std::string strategy = "hstar";  ///< hstar | u
  std::string trend = "constant";  ///< constant | linear

  friend bool operator==(const RefinementSettings&, const RefinementSettings&) = default;
};

struct EstimationSettings {
  std::size_t batch_pf_eps = 1000;
  std::size_t batch_corr = 50;
  std::size_t batch_mc = 10000;
  /// Sample cap of the augmented failure probability, which costs no limit-state calls.
  std::size_t n_max_pf_eps = 100000000;

  friend bool operator==(const EstimationSettings&, const EstimationSettings&) = default;
};

struct RunConfig {
  ProblemConfig problem;
  std::vector<Marginal> marginals;
  std::vector<Marginal> instrumental;  ///< method "is" only
  Method method = Method::metais;
  double target_cov = 0.02;
  std::size_t n_max = 10000;
  std::size_t k_per_iter = 2;
  McmcConfig mcmc;
  RefinementSettings refinement;
  EstimationSettings estimation;
  std::uint64_t seed = 0;
  std::string output;
  bool parallel_phases = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& config);
/// Validates field ranges; throws ConfigError.
void validate(const RunConfig& config);

/// JSON text with doubles at 17 significant digits and non-finite numbers as null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace metais

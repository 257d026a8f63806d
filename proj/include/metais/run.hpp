#pragma once

#include <json.hpp>

#include "metais/bench.hpp"
#include "metais/config.hpp"
#include "metais/estimate.hpp"

namespace metais {

struct RunReport {
  nlohmann::json body;    ///< everything except wall times
  nlohmann::json timing;  ///< wall-clock seconds per phase

  nlohmann::json to_json() const;
};

LimitState make_limit_state(const ProblemConfig& problem);
ProbabilisticModel make_model(const std::vector<Marginal>& marginals);
RefinementConfig make_refinement_config(const RunConfig& config);
nlohmann::json estimate_to_json(const Estimate& e);

RunReport run(const RunConfig& config);
/// Same, against a caller-supplied limit state.
RunReport run(const RunConfig& config, LimitState g);

}  // namespace metais

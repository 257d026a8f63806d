#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "metais/types.hpp"

namespace metais {

class ExternalError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::chrono::seconds kDefaultExternalTimeout{3600};

/// Evaluates a black-box limit state in a child process (`/bin/sh -c command`).
///
/// The child reads one line of comma-separated coordinates per point on stdin
/// and answers one value per line on stdout, in order. One process per batch;
/// an empty batch launches nothing.
std::vector<double> external_g(const std::string& command, const PointSet& points,
                               std::chrono::milliseconds timeout = kDefaultExternalTimeout);

/// Locale-independent shortest round-trip decimal.
std::string format_double(double v);

}  // namespace metais

#include "chronograph/errors.hpp"

namespace chronograph {

HypothesesNotMet::HypothesesNotMet(std::vector<std::string> unmet)
    : Error([&] {
          std::string msg = "hypotheses not met:";
          for (const auto& u : unmet) msg += " [" + u + "]";
          return msg;
      }()),
      unmet_(std::move(unmet)) {}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error([&] {
          std::string msg = "invalid problem:";
          for (const auto& v : violations) msg += " " + v.field + ": " + v.constraint + ";";
          return msg;
      }()),
      violations_(std::move(violations)) {}

}  // namespace chronograph

#pragma once

#include <optional>

#include "stlenf/rational.hpp"
#include "stlenf/signal.hpp"
#include "stlenf/stl.hpp"

namespace stlenf {

struct Verdict {
  bool satisfied = false;
  // For a satisfied Until: the earliest viable release instant. For a failed
  // Release: a violating instant. Absent otherwise.
  std::optional<Rational> witness;
};

// Offline satisfaction check, exact over piecewise-linear signals: dense-time
// quantifiers are decided on the finite partition induced by predicate
// truth-change instants.
Verdict satisfies(const Signal& s, const StlFormula& phi);

}  // namespace stlenf

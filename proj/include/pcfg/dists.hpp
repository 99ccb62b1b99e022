#pragma once

#include <array>

#include "pcfg/cell.hpp"
#include "pcfg/rng.hpp"
#include "pcfg/term.hpp"

namespace pcfg {

/// Parameters in declaration order. Integer parameters (Binomial's n) are
/// stored as doubles.
using DistParams = std::array<double, 2>;

/// Throws ModelError when a parameter is outside its domain.
void validate_params(DistKind kind, const DistParams& p);
/// Domain check of one parameter on its own.
void validate_param(DistKind kind, std::size_t index, double v);

/// Draws a value in the distribution's result representation (Bool, Int or
/// Float cell). Parameters must be valid.
Cell sample(DistKind kind, const DistParams& p, Rng& rng);

/// Log density (continuous) or log mass (discrete); -inf outside the support.
double log_density(DistKind kind, const DistParams& p, Cell x);

/// Convenience overload: x is the value as a double (booleans as 0/1).
double log_density_at(DistKind kind, const DistParams& p, double x);

struct Moments {
  double mean;
  double variance;
};
Moments moments(DistKind kind, const DistParams& p);

}  // namespace pcfg

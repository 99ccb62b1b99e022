#include "pcfg/dists.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pcfg/error.hpp"

namespace pcfg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void bad(DistKind kind, const std::string& what) {
  throw ModelError(std::string(dist_info(kind).name) + ": " + what);
}

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }
bool positive(double v) { return std::isfinite(v) && v > 0.0; }

std::int64_t binomial_inversion(std::int64_t n, double p, Rng& rng) {
  bool flip = p > 0.5;
  double q = flip ? 1.0 - p : p;
  double u = rng.uniform();
  double ratio = q / (1.0 - q);
  double pk = std::pow(1.0 - q, static_cast<double>(n));
  double cdf = pk;
  std::int64_t k = 0;
  while (u > cdf && k < n) {
    pk *= ratio * static_cast<double>(n - k) / static_cast<double>(k + 1);
    ++k;
    cdf += pk;
  }
  return flip ? n - k : k;
}

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

void validate_param(DistKind kind, std::size_t index, double v) {
  switch (kind) {
    case DistKind::Bernoulli:
      if (!is_prob(v)) bad(kind, "probability must be in [0, 1]");
      return;
    case DistKind::Normal:
      if (index == 0 && !std::isfinite(v)) bad(kind, "mean must be finite");
      if (index == 1 && !positive(v)) bad(kind, "standard deviation must be > 0");
      return;
    case DistKind::Gamma:
      if (!positive(v)) bad(kind, index == 0 ? "shape must be > 0" : "scale must be > 0");
      return;
    case DistKind::Exponential:
      if (!positive(v)) bad(kind, "rate must be > 0");
      return;
    case DistKind::Poisson:
      if (!(std::isfinite(v) && v >= 0.0)) bad(kind, "rate must be >= 0");
      return;
    case DistKind::Binomial:
      if (index == 0 && !(v >= 0.0)) bad(kind, "trials must be >= 0");
      if (index == 1 && !is_prob(v)) bad(kind, "probability must be in [0, 1]");
      return;
    case DistKind::Uniform:
      if (!std::isfinite(v)) bad(kind, "requires a < b");
      return;
    case DistKind::Beta:
      if (!positive(v)) bad(kind, "parameters must be > 0");
      return;
  }
}

void validate_params(DistKind kind, const DistParams& p) {
  std::size_t n = dist_info(kind).params.size();
  for (std::size_t i = 0; i < n; ++i) validate_param(kind, i, p[i]);
  if (kind == DistKind::Uniform && !(p[0] < p[1])) bad(kind, "requires a < b");
}

Cell sample(DistKind kind, const DistParams& p, Rng& rng) {
  switch (kind) {
    case DistKind::Bernoulli:
      return from_bool(rng.uniform() < p[0]);
    case DistKind::Normal:
      return from_float(std::normal_distribution<double>(p[0], p[1])(rng));
    case DistKind::Gamma:
      return from_float(std::gamma_distribution<double>(p[0], p[1])(rng));
    case DistKind::Exponential:
      return from_float(-std::log(rng.uniform()) / p[0]);
    case DistKind::Poisson:
      if (p[0] == 0.0) return from_int(0);
      return from_int(std::poisson_distribution<std::int64_t>(p[0])(rng));
    case DistKind::Binomial: {
      auto n = static_cast<std::int64_t>(p[0]);
      if (static_cast<double>(n) * std::min(p[1], 1.0 - p[1]) <= 30.0) {
        return from_int(binomial_inversion(n, p[1], rng));
      }
      return from_int(std::binomial_distribution<std::int64_t>(n, p[1])(rng));
    }
    case DistKind::Uniform:
      return from_float(p[0] + (p[1] - p[0]) * rng.uniform());
    case DistKind::Beta: {
      double x = std::gamma_distribution<double>(p[0], 1.0)(rng);
      double y = std::gamma_distribution<double>(p[1], 1.0)(rng);
      return from_float(x / (x + y));
    }
  }
  return 0;
}

double log_density(DistKind kind, const DistParams& p, Cell x) {
  switch (dist_info(kind).result) {
    case TypeKind::Bool:
      return log_density_at(kind, p, as_bool(x) ? 1.0 : 0.0);
    case TypeKind::Int:
      return log_density_at(kind, p, static_cast<double>(as_int(x)));
    default:
      return log_density_at(kind, p, as_float(x));
  }
}

double log_density_at(DistKind kind, const DistParams& p, double x) {
  switch (kind) {
    case DistKind::Bernoulli:
      if (x == 1.0) return std::log(p[0]);
      if (x == 0.0) return std::log1p(-p[0]);
      return kNegInf;
    case DistKind::Normal: {
      double z = (x - p[0]) / p[1];
      return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(p[1]) - 0.5 * z * z;
    }
    case DistKind::Gamma:
      if (!(x > 0.0)) return kNegInf;
      return (p[0] - 1.0) * std::log(x) - x / p[1] - std::lgamma(p[0]) - p[0] * std::log(p[1]);
    case DistKind::Exponential:
      if (!(x >= 0.0)) return kNegInf;
      return std::log(p[0]) - p[0] * x;
    case DistKind::Poisson:
      if (!(x >= 0.0) || x != std::floor(x)) return kNegInf;
      if (p[0] == 0.0) return x == 0.0 ? 0.0 : kNegInf;
      return x * std::log(p[0]) - p[0] - std::lgamma(x + 1.0);
    case DistKind::Binomial: {
      double n = p[0], q = p[1];
      if (!(x >= 0.0 && x <= n) || x != std::floor(x)) return kNegInf;
      if (q == 0.0) return x == 0.0 ? 0.0 : kNegInf;
      if (q == 1.0) return x == n ? 0.0 : kNegInf;
      return log_choose(n, x) + x * std::log(q) + (n - x) * std::log1p(-q);
    }
    case DistKind::Uniform:
      if (!(x >= p[0] && x <= p[1])) return kNegInf;
      return -std::log(p[1] - p[0]);
    case DistKind::Beta:
      if (!(x >= 0.0 && x <= 1.0)) return kNegInf;
      return (p[0] - 1.0) * std::log(x) + (p[1] - 1.0) * std::log1p(-x) + std::lgamma(p[0] + p[1]) -
             std::lgamma(p[0]) - std::lgamma(p[1]);
  }
  return kNegInf;
}

Moments moments(DistKind kind, const DistParams& p) {
  switch (kind) {
    case DistKind::Bernoulli:
      return {p[0], p[0] * (1.0 - p[0])};
    case DistKind::Normal:
      return {p[0], p[1] * p[1]};
    case DistKind::Gamma:
      return {p[0] * p[1], p[0] * p[1] * p[1]};
    case DistKind::Exponential:
      return {1.0 / p[0], 1.0 / (p[0] * p[0])};
    case DistKind::Poisson:
      return {p[0], p[0]};
    case DistKind::Binomial:
      return {p[0] * p[1], p[0] * p[1] * (1.0 - p[1])};
    case DistKind::Uniform:
      return {(p[0] + p[1]) / 2.0, (p[1] - p[0]) * (p[1] - p[0]) / 12.0};
    case DistKind::Beta: {
      double s = p[0] + p[1];
      return {p[0] / s, p[0] * p[1] / (s * s * (s + 1.0))};
    }
  }
  return {0.0, 0.0};
}

}  // namespace pcfg

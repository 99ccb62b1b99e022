#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

/// Ancestor of position j is the k with cum(k-1) <= (j + u) / N < cum(k),
/// searched from scratch for every position.
inline std::vector<std::size_t> brute_force_resample(const std::vector<double>& w, double u) {
  std::size_t n = w.size();
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    double pos = (static_cast<double>(j) + u) / static_cast<double>(n);
    double lo = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double hi = lo + w[k];
      if (lo <= pos && pos < hi) {
        out.push_back(k);
        break;
      }
      lo = hi;
    }
  }
  return out;
}

/// (sum w)^2 / sum w^2 straight from the definition.
inline double direct_ess(const std::vector<double>& log_w) {
  double s = 0.0, s2 = 0.0;
  for (double l : log_w) {
    double w = std::exp(l);
    s += w;
    s2 += w * w;
  }
  return s * s / s2;
}

/// Every weight vector with entries in multiples of 1/8 summing to one.
inline void eighths(std::size_t n, std::vector<std::vector<double>>& out, std::vector<double> prefix = {},
                    int left = 8) {
  if (prefix.size() + 1 == n) {
    prefix.push_back(left / 8.0);
    out.push_back(prefix);
    return;
  }
  for (int k = 0; k <= left; ++k) {
    auto next = prefix;
    next.push_back(k / 8.0);
    eighths(n, out, next, left - k);
  }
}

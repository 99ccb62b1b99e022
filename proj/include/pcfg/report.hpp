#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcfg/smc.hpp"
#include "pcfg/vm.hpp"

namespace pcfg {

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double weight = 0.0;  // normalized
};

/// Weighted histogram of numeric results. Integer-valued results get
/// integer-aligned bins; `bins` is an upper bound on the bin count.
std::vector<HistogramBin> histogram(const std::vector<double>& values, const std::vector<double>& weights,
                                    std::size_t bins, bool integer_valued);

struct WeightedValues {
  std::vector<Value> values;
  std::vector<double> numbers;  // empty unless the result type is numeric
  std::vector<double> weights;
  bool integer_valued = false;
};

WeightedValues collect_results(const BlockProgram& p, const SmcResult& r);

struct ReportOptions {
  std::string model;
  SmcConfig config;
  std::optional<std::size_t> histogram_bins;
  bool timings = false;
  double compile_ms = 0.0;
};

/// The run report. Identical inputs give byte-identical output; timings
/// are included only on request.
std::string report_json(const BlockProgram& p, const SmcResult& r, const ReportOptions& o);
std::string report_csv(const BlockProgram& p, const SmcResult& r, const ReportOptions& o);

}  // namespace pcfg

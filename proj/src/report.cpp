#include "pcfg/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace pcfg {

std::vector<HistogramBin> histogram(const std::vector<double>& values, const std::vector<double>& weights,
                                    std::size_t bins, bool integer_valued) {
  std::vector<HistogramBin> out;
  if (values.empty() || bins == 0) return out;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  double width;
  std::size_t count;
  if (integer_valued) {
    double span = hi - lo + 1.0;
    width = std::max(1.0, std::ceil(span / static_cast<double>(bins)));
    count = static_cast<std::size_t>(std::ceil(span / width));
    lo -= 0.5;
  } else {
    if (hi == lo) hi = lo + 1.0;
    width = (hi - lo) / static_cast<double>(bins);
    count = bins;
  }
  out.resize(count);
  for (std::size_t b = 0; b < count; ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = lo + width * static_cast<double>(b + 1);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::size_t>(std::floor((values[i] - lo) / width));
    b = std::min(b, count - 1);
    out[b].count += 1;
    out[b].weight += weights[i];
  }
  return out;
}

WeightedValues collect_results(const BlockProgram& p, const SmcResult& r) {
  WeightedValues w;
  w.weights = r.weights;
  TypeKind k = resolve(p.result_type)->kind;
  bool numeric = k == TypeKind::Int || k == TypeKind::Float || k == TypeKind::Bool;
  w.integer_valued = k == TypeKind::Int || k == TypeKind::Bool;
  for (const auto& s : r.states) {
    w.values.push_back(decode_value(s.stack.data(), p.result_type, p.data, p.pool));
    double x;
    if (numeric && value_as_number(w.values.back(), x)) w.numbers.push_back(x);
  }
  return w;
}

std::string report_json(const BlockProgram& p, const SmcResult& r, const ReportOptions& o) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = 1;
  j["model"] = o.model;
  j["config"] = {{"particles", o.config.particles},
                 {"seed", o.config.seed},
                 {"ess_threshold", o.config.ess_threshold},
                 {"stack_cells", o.config.stack_cells}};
  j["result_type"] = type_to_string(p.result_type);
  j["log_z"] = r.log_z;
  j["resamples"] = r.resamples;
  j["checkpoints"] = r.checkpoints;
  j["ess_trace"] = r.ess_trace;
  WeightedValues w = collect_results(p, r);
  if (!w.numbers.empty()) {
    double mean = 0.0;
    for (std::size_t i = 0; i < w.numbers.size(); ++i) mean += w.weights[i] * w.numbers[i];
    j["posterior_mean"] = mean;
  }
  if (o.histogram_bins && !w.numbers.empty()) {
    ordered_json bins = ordered_json::array();
    for (const auto& b : histogram(w.numbers, w.weights, *o.histogram_bins, w.integer_valued)) {
      bins.push_back({b.lo, b.hi, b.count, b.weight});
    }
    j["histogram"] = bins;
  } else {
    ordered_json samples = ordered_json::array();
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      if (!w.numbers.empty()) {
        samples.push_back({w.numbers[i], w.weights[i]});
      } else {
        samples.push_back({value_to_string(w.values[i]), w.weights[i]});
      }
    }
    j["samples"] = samples;
  }
  if (o.timings) {
    j["timings_ms"] = {{"compile", o.compile_ms}, {"propagate", r.propagate_ms}, {"resample", r.resample_ms}};
  }
  return j.dump(2) + "\n";
}

std::string report_csv(const BlockProgram& p, const SmcResult& r, const ReportOptions& o) {
  WeightedValues w = collect_results(p, r);
  std::ostringstream out;
  out.precision(17);
  if (o.histogram_bins && !w.numbers.empty()) {
    out << "lo,hi,count,norm_weight\n";
    for (const auto& b : histogram(w.numbers, w.weights, *o.histogram_bins, w.integer_valued)) {
      out << b.lo << "," << b.hi << "," << b.count << "," << b.weight << "\n";
    }
    return out.str();
  }
  out << "value,weight\n";
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    std::string v = value_to_string(w.values[i]);
    if (v.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    out << v << "," << w.weights[i] << "\n";
  }
  return out.str();
}

}  // namespace pcfg

#include "textcausal/common/numeric.hpp"

#include <boost/math/distributions/normal.hpp>

#include "textcausal/common/errors.hpp"

namespace textcausal {

double stable_sum(std::span<const double> values) {
  StableSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double mean(std::span<const double> values) {
  if (values.empty()) throw EstimationError("mean of an empty sample");
  return stable_sum(values) / static_cast<double>(values.size());
}

double population_sd(std::span<const double> values) {
  const double m = mean(values);
  StableSum acc;
  for (double v : values) acc.add((v - m) * (v - m));
  return std::sqrt(acc.value() / static_cast<double>(values.size()));
}

double normal_critical_value(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ParameterError("confidence must lie in (0, 1), got " +
                         std::to_string(confidence));
  }
  boost::math::normal standard;
  return boost::math::quantile(standard, 0.5 + confidence / 2.0);
}

}  // namespace textcausal

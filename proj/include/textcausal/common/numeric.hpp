#pragma once

#include <cmath>
#include <span>

namespace textcausal {

// Neumaier-compensated accumulator. Summation order is the caller's order, so
// results are reproducible run to run.
class StableSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double stable_sum(std::span<const double> values);
double mean(std::span<const double> values);

// Population standard deviation (divides by N).
double population_sd(std::span<const double> values);

// Two-sided standard-normal critical value for a confidence level in (0, 1),
// e.g. 0.95 -> 1.959964.
double normal_critical_value(double confidence);

inline bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace textcausal

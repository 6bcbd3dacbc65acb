#include "textcausal/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/numeric.hpp"

namespace textcausal {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ShapeError("correlation inputs differ in length (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw UndefinedCorrelationError("correlation needs at least 2 points");
  if (!all_finite(x) || !all_finite(y)) throw NumericError("correlation input is not finite");
  const double mx = mean(x);
  const double my = mean(y);
  StableSum sxy, sxx, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (sxx.value() <= 0.0 || syy.value() <= 0.0) {
    throw UndefinedCorrelationError("correlation undefined: zero variance");
  }
  const double r = sxy.value() / std::sqrt(sxx.value() * syy.value());
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 .. j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ShapeError("correlation inputs differ in length (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (!all_finite(x) || !all_finite(y)) throw NumericError("correlation input is not finite");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

MetricsReport compute_metrics(std::span<const double> g1_hat, std::span<const double> g0_hat,
                              std::span<const double> outcomes, std::span<const int> treatments) {
  const std::size_t n = outcomes.size();
  if (g1_hat.size() != n || g0_hat.size() != n || treatments.size() != n) {
    throw ShapeError("metric inputs are not aligned");
  }
  if (n == 0) throw EmptyDatasetError("no rows to evaluate");
  MetricsReport report;
  std::vector<double> pred_t, y_t, pred_c, y_c;
  StableSum ape;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = treatments[i] == 1 ? g1_hat[i] : g0_hat[i];
    if (treatments[i] == 1) {
      pred_t.push_back(pred);
      y_t.push_back(outcomes[i]);
    } else {
      pred_c.push_back(pred);
      y_c.push_back(outcomes[i]);
    }
    if (outcomes[i] < kMapeFloor) {
      ++report.n_mape_excluded;
      continue;
    }
    ape.add(std::abs(pred - outcomes[i]) / outcomes[i]);
    ++report.n_mape;
  }
  report.n_t = pred_t.size();
  report.n_c = pred_c.size();
  try {
    report.corr_t = pearson(pred_t, y_t);
  } catch (const UndefinedCorrelationError&) {
  }
  try {
    report.corr_c = pearson(pred_c, y_c);
  } catch (const UndefinedCorrelationError&) {
  }
  if (report.n_mape > 0) report.mape = ape.value() / static_cast<double>(report.n_mape);
  return report;
}

MetricsReport compute_metrics(std::span<const ScoreRow> rows) {
  std::vector<double> g1, g0, y;
  std::vector<int> t;
  for (const auto& r : rows) {
    g1.push_back(r.g1_hat);
    g0.push_back(r.g0_hat);
    y.push_back(r.outcome);
    t.push_back(r.treatment);
  }
  return compute_metrics(g1, g0, y, t);
}

nlohmann::json to_json(const MetricsReport& report) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"corr_t", opt(report.corr_t)},
          {"corr_c", opt(report.corr_c)},
          {"mape", opt(report.mape)},
          {"n_t", report.n_t},
          {"n_c", report.n_c},
          {"n_mape", report.n_mape},
          {"n_mape_excluded", report.n_mape_excluded}};
}

}  // namespace textcausal

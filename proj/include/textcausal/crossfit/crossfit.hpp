#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "textcausal/crossfit/config.hpp"
#include "textcausal/data/dataset.hpp"
#include "textcausal/data/folds.hpp"
#include "textcausal/dr/blp.hpp"
#include "textcausal/dr/estimators.hpp"
#include "textcausal/dr/scores.hpp"

namespace textcausal {

// Bookkeeping for one fold: which rows trained the nuisance models and how
// training went.
struct FoldDiagnostics {
  int fold = 0;
  std::vector<std::size_t> train_rows;  // unit indices, ascending
  std::vector<std::size_t> scored_rows;
  std::size_t n_train_treated = 0;
  std::size_t n_train_control = 0;
  // Hash of the unit ids (in index order) of train_rows / scored_rows.
  std::string train_fingerprint;
  std::string score_fingerprint;
  double g1_train_loss = 0.0;
  double g0_train_loss = 0.0;
  double mu_train_loss = 0.0;
  bool converged = true;
  bool blp_degenerate = false;
};

struct CrossfitResult {
  std::vector<ScoreRow> score_rows;  // one per unit, dataset order
  std::vector<Estimate> estimates;   // ATE, ATET, then GATEs by group name
  std::vector<BlpCoefficients> blp_per_fold;
  std::vector<std::string> skipped_groups;
  FoldAssignment folds;
  std::vector<FoldDiagnostics> diagnostics;
  nlohmann::json manifest;

  const Estimate& ate() const { return estimates.at(0); }
  const Estimate& atet() const { return estimates.at(1); }
  std::vector<Estimate> gates() const;
};

// Algorithm: partition into K folds; for each fold train the nuisance triple
// on the complement (T-learner for tabular learners, one joint model for
// text), score the fold out-of-fold, fit the fold BLP and fill CATEs; then
// pool ATE / ATET / GATEs over all score rows.
CrossfitResult run_crossfit(const Dataset& dataset, const CrossfitConfig& config);

// Fixed per-unit nuisance values keyed by unit id.
struct NuisanceValues {
  double g1 = 0.0;
  double g0 = 0.0;
  double mu = 0.5;  // raw; clipped by the pipeline
};
using NuisanceProvider = std::unordered_map<std::string, NuisanceValues>;

// Skips training and runs the identical scoring / BLP / estimation path
// using provider values. Throws CoverageError when a unit is missing.
CrossfitResult inject_nuisances(const Dataset& dataset, const NuisanceProvider& provider,
                                const CrossfitConfig& config);

// Recomputes the purity evidence: no scored row appears in its fold's
// training set, and the recorded fingerprints match the rows. Throws
// InvariantError on violation.
void verify_out_of_fold(const Dataset& dataset, const CrossfitResult& result);

// Fingerprint of the ids of `rows` taken in the given order.
std::string rows_fingerprint(const Dataset& dataset, const std::vector<std::size_t>& rows);

}  // namespace textcausal

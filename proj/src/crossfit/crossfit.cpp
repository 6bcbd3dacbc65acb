#include "textcausal/crossfit/crossfit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/hash.hpp"
#include "textcausal/common/parallel.hpp"
#include "textcausal/learners/gbt.hpp"
#include "textcausal/learners/linear.hpp"
#include "textcausal/learners/model_io.hpp"
#include "textcausal/learners/text_triple.hpp"
#include "textcausal/text/embedding_client.hpp"

namespace textcausal {

namespace {

enum class Role : std::uint64_t { kG1 = 1, kG0 = 2, kMu = 3, kText = 4 };

std::uint64_t model_seed(const CrossfitConfig& config, int fold, Role role) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(fold) * 16 +
                                      static_cast<std::uint64_t>(role));
}

struct FoldPredictions {
  std::vector<double> g1, g0, mu;  // aligned with diagnostics.scored_rows
  FoldDiagnostics diagnostics;
};

Eigen::VectorXd column_of(const Dataset& d, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = d[rows[i]].outcome;
  return y;
}

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
  return (pred - y).squaredNorm() / static_cast<double>(std::max<Eigen::Index>(y.size(), 1));
}

void save_model(const CrossfitConfig& config, int fold, const std::string& name,
                const nlohmann::json& doc) {
  if (config.model_dir.empty()) return;
  save_json(doc, std::filesystem::path(config.model_dir) /
                     ("fold_" + std::to_string(fold) + "_" + name + ".json"));
}

struct OutcomeFit {
  Eigen::VectorXd predictions;
  double train_loss = 0.0;
  bool converged = true;
};

OutcomeFit fit_outcome(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y_train,
                       const Eigen::MatrixXd& x_score, const CrossfitConfig& config,
                       int fold, Role role, const std::string& name) {
  OutcomeFit out;
  const auto& spec = config.learner;
  switch (spec.kind) {
    case LearnerKind::kGbt: {
      GbtParams params = spec.gbt;
      params.seed = model_seed(config, fold, role);
      const GbtModel model = fit_gbt(x_train, y_train, GbtObjective::kSquaredError, params);
      out.predictions = predict(model, x_score);
      out.train_loss = model.train_loss.back();
      save_model(config, fold, name, to_json(model));
      break;
    }
    case LearnerKind::kElasticNet: {
      const auto& p = spec.elastic_net;
      const LinearModel model = fit_elastic_net(x_train, y_train, p.l1, p.l2, p.max_iter, p.tol);
      out.predictions = predict(model, x_score);
      out.train_loss = mse(predict(model, x_train), y_train);
      out.converged = model.converged;
      save_model(config, fold, name, to_json(model));
      break;
    }
    case LearnerKind::kOls: {
      const LinearModel model = fit_ols(x_train, y_train);
      out.predictions = predict(model, x_score);
      out.train_loss = mse(predict(model, x_train), y_train);
      save_model(config, fold, name, to_json(model));
      break;
    }
    case LearnerKind::kTextTriple:
      throw InvariantError("text learner reached the tabular path");
  }
  return out;
}

FoldPredictions train_tabular_fold(const Dataset& dataset, const CrossfitConfig& config,
                                   int fold, FoldDiagnostics diag) {
  std::vector<std::size_t> treated, control;
  for (std::size_t r : diag.train_rows) (dataset[r].treatment == 1 ? treated : control).push_back(r);
  const Eigen::MatrixXd x_score = dataset.tabular_matrix(diag.scored_rows);

  const OutcomeFit g1 = fit_outcome(dataset.tabular_matrix(treated), column_of(dataset, treated),
                                    x_score, config, fold, Role::kG1, "g1");
  const OutcomeFit g0 = fit_outcome(dataset.tabular_matrix(control), column_of(dataset, control),
                                    x_score, config, fold, Role::kG0, "g0");

  const Eigen::MatrixXd x_train = dataset.tabular_matrix(diag.train_rows);
  Eigen::VectorXd t_train(static_cast<Eigen::Index>(diag.train_rows.size()));
  for (std::size_t i = 0; i < diag.train_rows.size(); ++i) {
    t_train(static_cast<Eigen::Index>(i)) = dataset[diag.train_rows[i]].treatment;
  }
  GbtParams mu_params = config.propensity;
  mu_params.seed = model_seed(config, fold, Role::kMu);
  const GbtModel mu_model = fit_gbt(x_train, t_train, GbtObjective::kLogistic, mu_params);
  save_model(config, fold, "mu", to_json(mu_model));
  const Eigen::VectorXd mu = predict(mu_model, x_score);

  FoldPredictions out;
  out.g1.assign(g1.predictions.data(), g1.predictions.data() + g1.predictions.size());
  out.g0.assign(g0.predictions.data(), g0.predictions.data() + g0.predictions.size());
  out.mu.assign(mu.data(), mu.data() + mu.size());
  diag.g1_train_loss = g1.train_loss;
  diag.g0_train_loss = g0.train_loss;
  diag.mu_train_loss = mu_model.train_loss.back();
  diag.converged = g1.converged && g0.converged;
  out.diagnostics = std::move(diag);
  return out;
}

FoldPredictions train_text_fold(const Dataset& dataset, const CrossfitConfig& config,
                                int fold, FoldDiagnostics diag,
                                const std::vector<SparseVector>& features,
                                std::size_t dim) {
  std::vector<SparseVector> x_train, x_score;
  std::vector<double> y_train;
  std::vector<int> t_train;
  for (std::size_t r : diag.train_rows) {
    x_train.push_back(features[r]);
    y_train.push_back(dataset[r].outcome);
    t_train.push_back(dataset[r].treatment);
  }
  for (std::size_t r : diag.scored_rows) x_score.push_back(features[r]);

  TextTrainParams params = config.learner.text.train;
  params.seed = model_seed(config, fold, Role::kText);
  TextTripleModel model = fit_text_triple_features(x_train, dim, y_train, t_train, params);
  if (!config.learner.text.embedding) {
    model.source = FeatureSource::kHashed;
    model.featurizer = config.learner.text.featurizer;
  } else {
    model.source = FeatureSource::kExternal;
  }
  save_model(config, fold, "text_triple", to_json(model));
  const TriplePrediction pred = predict_triple_features(model, x_score);

  // Per-head training losses on the fold complement.
  const TriplePrediction fitted = predict_triple_features(model, x_train);
  std::vector<double> g1(fitted.g1.data(), fitted.g1.data() + fitted.g1.size());
  std::vector<double> g0(fitted.g0.data(), fitted.g0.data() + fitted.g0.size());
  std::vector<double> mu(fitted.mu.data(), fitted.mu.data() + fitted.mu.size());
  const TripleLoss loss = triple_loss(g1, g0, mu, y_train, t_train, model.outcome_scale,
                                      model.lambda);
  diag.g1_train_loss = loss.treated;
  diag.g0_train_loss = loss.control;
  diag.mu_train_loss = loss.bce;
  diag.converged = model.g1_trained && model.g0_trained;

  FoldPredictions out;
  out.g1.assign(pred.g1.data(), pred.g1.data() + pred.g1.size());
  out.g0.assign(pred.g0.data(), pred.g0.data() + pred.g0.size());
  out.mu.assign(pred.mu.data(), pred.mu.data() + pred.mu.size());
  out.diagnostics = std::move(diag);
  return out;
}

FoldDiagnostics fold_skeleton(const Dataset& dataset, const FoldAssignment& folds, int fold) {
  FoldDiagnostics diag;
  diag.fold = fold;
  diag.train_rows = folds.complement(fold);
  diag.scored_rows = folds.members(fold);
  for (std::size_t r : diag.train_rows) {
    (dataset[r].treatment == 1 ? diag.n_train_treated : diag.n_train_control)++;
  }
  diag.train_fingerprint = rows_fingerprint(dataset, diag.train_rows);
  diag.score_fingerprint = rows_fingerprint(dataset, diag.scored_rows);
  return diag;
}

nlohmann::json diagnostics_json(const FoldDiagnostics& d, bool trained) {
  nlohmann::json j{{"fold", d.fold},
                   {"n_train", d.train_rows.size()},
                   {"n_train_treated", d.n_train_treated},
                   {"n_train_control", d.n_train_control},
                   {"n_scored", d.scored_rows.size()},
                   {"train_fingerprint", d.train_fingerprint},
                   {"score_fingerprint", d.score_fingerprint},
                   {"blp_degenerate", d.blp_degenerate}};
  if (trained) {
    j["train_loss"] = {{"g1", d.g1_train_loss}, {"g0", d.g0_train_loss}, {"mu", d.mu_train_loss}};
    j["converged"] = d.converged;
  }
  return j;
}

// Shared tail: score rows, per-fold BLP, pooled estimates, manifest.
CrossfitResult assemble(const Dataset& dataset, const CrossfitConfig& config,
                        FoldAssignment folds, std::vector<FoldPredictions> per_fold,
                        bool trained) {
  CrossfitResult result;
  const std::size_t n = dataset.size();
  result.score_rows.resize(n);
  std::vector<char> filled(n, 0);
  for (const auto& fp : per_fold) {
    const auto& rows = fp.diagnostics.scored_rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t r = rows[i];
      const Unit& u = dataset[r];
      if (filled[r]) throw InvariantError("unit " + u.id + " scored twice");
      filled[r] = 1;
      result.score_rows[r] = make_score_row(u.id, fp.diagnostics.fold, u.outcome, u.treatment,
                                            u.group, fp.g1[i], fp.g0[i], fp.mu[i],
                                            config.propensity_eps);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!filled[r]) throw InvariantError("unit " + dataset[r].id + " was never scored");
  }

  for (auto& fp : per_fold) {
    const auto& rows = fp.diagnostics.scored_rows;
    std::vector<ScoreRow> fold_rows;
    fold_rows.reserve(rows.size());
    for (std::size_t r : rows) fold_rows.push_back(result.score_rows[r]);
    BlpCoefficients coeffs;
    try {
      coeffs = fit_blp(fold_rows, config.blp_centered);
    } catch (const DegenerateBlpError&) {
      coeffs = blp_fallback(fold_rows, config.blp_centered);
    }
    coeffs.fold = fp.diagnostics.fold;
    fp.diagnostics.blp_degenerate = coeffs.degenerate;
    for (std::size_t r : rows) {
      ScoreRow& row = result.score_rows[r];
      row.cate = cate_predict(coeffs, row.theta_tilde);
      if (!std::isfinite(row.cate)) throw InvariantError("non-finite CATE for unit " + row.unit_id);
    }
    result.blp_per_fold.push_back(coeffs);
    result.diagnostics.push_back(std::move(fp.diagnostics));
  }

  result.estimates.push_back(estimate_ate(result.score_rows, config.confidence));
  result.estimates.push_back(estimate_atet(result.score_rows, config.confidence));
  std::map<std::string, std::size_t> group_sizes;
  for (const Unit& u : dataset.units()) {
    if (!u.group.empty()) ++group_sizes[u.group];
  }
  for (const auto& [group, size] : group_sizes) {
    if (size < config.min_group_size) {
      result.skipped_groups.push_back(group);
      continue;
    }
    result.estimates.push_back(estimate_gate(result.score_rows, group, config.confidence));
  }
  result.folds = std::move(folds);

  nlohmann::json per_fold_json = nlohmann::json::array();
  for (const auto& d : result.diagnostics) per_fold_json.push_back(diagnostics_json(d, trained));
  result.manifest = {
      {"tool", "textcausal"},
      {"manifest_version", 1},
      {"nuisance_source", trained ? "trained" : "injected"},
      {"config", to_json(config)},
      {"dataset",
       {{"content_hash", dataset.content_hash()},
        {"n_units", dataset.size()},
        {"n_treated", dataset.n_treated()},
        {"modality", to_string(dataset.modality())},
        {"feature_names", dataset.feature_names()}}},
      {"folds",
       {{"k_folds", result.folds.k_folds},
        {"seed", result.folds.seed},
        {"hash", result.folds.hash()},
        {"sizes", result.folds.sizes()}}},
      {"per_fold", per_fold_json},
      {"skipped_groups", result.skipped_groups}};

  if (result.score_rows.size() != dataset.size()) {
    throw InvariantError("score table does not cover the dataset");
  }
  verify_out_of_fold(dataset, result);
  return result;
}

void check_fold_arms(const Dataset& dataset, const FoldAssignment& folds) {
  for (int k = 0; k < folds.k_folds; ++k) {
    std::size_t treated = 0, control = 0;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      if (folds.fold_of[r] == k) continue;
      (dataset[r].treatment == 1 ? treated : control)++;
    }
    if (treated == 0 || control == 0) {
      throw OrchestrationError("fold " + std::to_string(k) + ": training complement has no " +
                               (treated == 0 ? "treated" : "control") + " units");
    }
  }
}

}  // namespace

std::vector<Estimate> CrossfitResult::gates() const {
  std::vector<Estimate> out;
  for (const auto& e : estimates) {
    if (e.estimand == Estimand::kGate) out.push_back(e);
  }
  return out;
}

std::string rows_fingerprint(const Dataset& dataset, const std::vector<std::size_t>& rows) {
  Fingerprint fp;
  for (std::size_t r : rows) fp.add(dataset[r].id);
  return fp.hex();
}

CrossfitResult run_crossfit(const Dataset& dataset, const CrossfitConfig& config) {
  config.validate();
  const bool text = config.modality == Modality::kText;
  if (text && !dataset.has_text()) {
    throw SchemaError("modality 'text' requires a text column");
  }
  if (!text && dataset.width() == 0) {
    throw SchemaError("modality 'tabular' requires at least one numeric column");
  }
  FoldAssignment folds = partition_folds(dataset, config.k_folds, config.seed);
  check_fold_arms(dataset, folds);

  std::vector<SparseVector> features;
  std::size_t dim = 0;
  if (text) {
    const auto& tp = config.learner.text;
    if (tp.embedding) {
      std::vector<std::string> texts;
      texts.reserve(dataset.size());
      for (const Unit& u : dataset.units()) texts.push_back(u.text);
      features = dense_rows_to_sparse(embed_remote(*tp.embedding, texts));
      dim = static_cast<std::size_t>(tp.embedding->dim);
    } else {
      features.resize(dataset.size());
      parallel_for(dataset.size(), config.threads, [&](std::size_t i) {
        features[i] = featurize(tp.featurizer, dataset[i].text);
      });
      dim = tp.featurizer.hash_dim;
    }
  }

  std::vector<FoldPredictions> per_fold(static_cast<std::size_t>(config.k_folds));
  parallel_for(per_fold.size(), config.threads, [&](std::size_t k) {
    const int fold = static_cast<int>(k);
    try {
      FoldDiagnostics diag = fold_skeleton(dataset, folds, fold);
      per_fold[k] = text ? train_text_fold(dataset, config, fold, std::move(diag), features, dim)
                         : train_tabular_fold(dataset, config, fold, std::move(diag));
    } catch (const Error& e) {
      throw Error(e.category(), "fold " + std::to_string(fold) + ": " + e.what());
    }
  });
  return assemble(dataset, config, std::move(folds), std::move(per_fold), true);
}

CrossfitResult inject_nuisances(const Dataset& dataset, const NuisanceProvider& provider,
                                const CrossfitConfig& config) {
  if (config.k_folds < 2) throw ConfigError("crossfit.k_folds must be >= 2");
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    throw ConfigError("crossfit.confidence must lie in (0, 1)");
  }
  FoldAssignment folds = partition_folds(dataset, config.k_folds, config.seed);
  std::vector<FoldPredictions> per_fold(static_cast<std::size_t>(config.k_folds));
  for (int k = 0; k < config.k_folds; ++k) {
    FoldPredictions& fp = per_fold[static_cast<std::size_t>(k)];
    fp.diagnostics = fold_skeleton(dataset, folds, k);
    for (std::size_t r : fp.diagnostics.scored_rows) {
      const auto it = provider.find(dataset[r].id);
      if (it == provider.end()) {
        throw CoverageError("nuisance provider has no values for unit '" + dataset[r].id + "'");
      }
      fp.g1.push_back(it->second.g1);
      fp.g0.push_back(it->second.g0);
      fp.mu.push_back(it->second.mu);
    }
  }
  return assemble(dataset, config, std::move(folds), std::move(per_fold), false);
}

void verify_out_of_fold(const Dataset& dataset, const CrossfitResult& result) {
  if (static_cast<int>(result.diagnostics.size()) != result.folds.k_folds) {
    throw InvariantError("diagnostics missing for some folds");
  }
  std::vector<char> scored(dataset.size(), 0);
  for (const auto& d : result.diagnostics) {
    std::vector<char> in_train(dataset.size(), 0);
    for (std::size_t r : d.train_rows) in_train[r] = 1;
    for (std::size_t r : d.scored_rows) {
      if (in_train[r]) {
        throw InvariantError("unit " + dataset[r].id + " was in the training set of fold " +
                             std::to_string(d.fold) + " that scored it");
      }
      if (result.score_rows[r].fold != d.fold) {
        throw InvariantError("unit " + dataset[r].id + " fold label mismatch");
      }
      scored[r]++;
    }
    if (rows_fingerprint(dataset, d.train_rows) != d.train_fingerprint) {
      throw InvariantError("training fingerprint mismatch in fold " + std::to_string(d.fold));
    }
  }
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    if (scored[r] != 1) throw InvariantError("unit " + dataset[r].id + " not scored exactly once");
    if (result.folds.fold_of[r] != result.score_rows[r].fold) {
      throw InvariantError("unit " + dataset[r].id + " fold differs from the fold assignment");
    }
  }
}

}  // namespace textcausal

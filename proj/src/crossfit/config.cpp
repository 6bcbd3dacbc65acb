#include "textcausal/crossfit/config.hpp"

#include "textcausal/common/errors.hpp"
#include "textcausal/common/json_fields.hpp"

namespace textcausal {

const char* to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kGbt:
      return "gbt";
    case LearnerKind::kElasticNet:
      return "elastic_net";
    case LearnerKind::kOls:
      return "ols";
    case LearnerKind::kTextTriple:
      return "text_triple";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "gbt") return LearnerKind::kGbt;
  if (name == "elastic_net") return LearnerKind::kElasticNet;
  if (name == "ols") return LearnerKind::kOls;
  if (name == "text_triple") return LearnerKind::kTextTriple;
  throw ConfigError("unknown learner '" + name + "'");
}

void CrossfitConfig::validate() const {
  if (k_folds < 2) throw ConfigError("crossfit.k_folds must be >= 2");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigError("crossfit.confidence must lie in (0, 1)");
  }
  if (!(propensity_eps > 0.0 && propensity_eps < 0.5)) {
    throw ConfigError("crossfit.propensity_eps must lie in (0, 0.5)");
  }
  if (modality == Modality::kBoth) {
    throw ConfigError("crossfit.modality must be 'tabular' or 'text'");
  }
  const bool text_learner = learner.kind == LearnerKind::kTextTriple;
  if ((modality == Modality::kText) != text_learner) {
    throw ConfigError("learner '" + std::string(to_string(learner.kind)) +
                      "' does not match modality '" + to_string(modality) + "'");
  }
  if (text_learner) {
    learner.text.featurizer.validate();
    if (learner.text.embedding) learner.text.embedding->validate();
  }
}

nlohmann::json to_json(const GbtParams& p) {
  return nlohmann::json{{"n_trees", p.n_trees},         {"max_depth", p.max_depth},
                        {"learning_rate", p.learning_rate}, {"min_leaf", p.min_leaf},
                        {"subsample", p.subsample},     {"seed", p.seed},
                        {"l2_leaf", p.l2_leaf},         {"max_bins", p.max_bins}};
}

GbtParams gbt_params_from_json(const nlohmann::json& j, GbtParams p, const std::string& path) {
  fields::check_keys(j, path, {"n_trees", "max_depth", "learning_rate", "min_leaf", "subsample",
                               "seed", "l2_leaf", "max_bins"});
  fields::read(j, "n_trees", path, p.n_trees);
  fields::read(j, "max_depth", path, p.max_depth);
  fields::read(j, "learning_rate", path, p.learning_rate);
  fields::read(j, "min_leaf", path, p.min_leaf);
  fields::read(j, "subsample", path, p.subsample);
  fields::read(j, "seed", path, p.seed);
  fields::read(j, "l2_leaf", path, p.l2_leaf);
  fields::read(j, "max_bins", path, p.max_bins);
  return p;
}

nlohmann::json to_json(const CrossfitConfig& c) {
  nlohmann::json learner{{"kind", to_string(c.learner.kind)}};
  switch (c.learner.kind) {
    case LearnerKind::kGbt:
      learner["gbt"] = to_json(c.learner.gbt);
      break;
    case LearnerKind::kElasticNet:
      learner["elastic_net"] = {{"l1", c.learner.elastic_net.l1},
                                {"l2", c.learner.elastic_net.l2},
                                {"max_iter", c.learner.elastic_net.max_iter},
                                {"tol", c.learner.elastic_net.tol}};
      break;
    case LearnerKind::kOls:
      break;
    case LearnerKind::kTextTriple: {
      const auto& t = c.learner.text;
      learner["text"] = {{"lambda", t.train.lambda},
                         {"epochs", t.train.epochs},
                         {"batch_size", t.train.batch_size},
                         {"learning_rate", t.train.learning_rate},
                         {"seed", t.train.seed},
                         {"featurizer", to_json(t.featurizer)}};
      if (t.embedding) learner["text"]["embedding"] = to_json(*t.embedding);
      break;
    }
  }
  nlohmann::json j{{"k_folds", c.k_folds},
                   {"modality", to_string(c.modality)},
                   {"learner", learner},
                   {"propensity_eps", c.propensity_eps},
                   {"confidence", c.confidence},
                   {"seed", c.seed},
                   {"blp_centered", c.blp_centered},
                   {"min_group_size", c.min_group_size}};
  if (c.modality == Modality::kTabular) j["propensity"] = to_json(c.propensity);
  return j;
}

CrossfitConfig crossfit_config_from_json(const nlohmann::json& j, const std::string& path) {
  using fields::join;
  using fields::read;
  CrossfitConfig c;
  fields::check_keys(j, path, {"k_folds", "modality", "propensity_eps", "confidence", "seed",
                               "blp_centered", "min_group_size", "threads", "model_dir",
                               "propensity", "learner"});
  read(j, "k_folds", path, c.k_folds);
  std::string modality;
  read(j, "modality", path, modality);
  if (!modality.empty()) {
    try {
      c.modality = modality_from_string(modality);
    } catch (const Error& e) {
      throw ConfigError(join(path, "modality") + ": " + e.what());
    }
  }
  read(j, "propensity_eps", path, c.propensity_eps);
  read(j, "confidence", path, c.confidence);
  read(j, "seed", path, c.seed);
  read(j, "blp_centered", path, c.blp_centered);
  read(j, "min_group_size", path, c.min_group_size);
  read(j, "threads", path, c.threads);
  read(j, "model_dir", path, c.model_dir);
  if (j.contains("propensity")) {
    c.propensity = gbt_params_from_json(fields::section(j, "propensity", path), c.propensity,
                                        join(path, "propensity"));
  }
  if (j.contains("learner")) {
    const std::string lp = join(path, "learner");
    const auto& l = fields::section(j, "learner", path);
    fields::check_keys(l, lp, {"kind", "gbt", "elastic_net", "text"});
    std::string kind;
    read(l, "kind", lp, kind);
    if (!kind.empty()) {
      try {
        c.learner.kind = learner_kind_from_string(kind);
      } catch (const Error& e) {
        throw ConfigError(join(lp, "kind") + ": " + e.what());
      }
    } else if (c.modality == Modality::kText) {
      c.learner.kind = LearnerKind::kTextTriple;
    }
    if (l.contains("gbt")) {
      c.learner.gbt = gbt_params_from_json(fields::section(l, "gbt", lp), c.learner.gbt,
                                           join(lp, "gbt"));
    }
    if (l.contains("elastic_net")) {
      const std::string ep = join(lp, "elastic_net");
      const auto& e = fields::section(l, "elastic_net", lp);
      fields::check_keys(e, ep, {"l1", "l2", "max_iter", "tol"});
      auto& p = c.learner.elastic_net;
      read(e, "l1", ep, p.l1);
      read(e, "l2", ep, p.l2);
      read(e, "max_iter", ep, p.max_iter);
      read(e, "tol", ep, p.tol);
    }
    if (l.contains("text")) {
      const std::string tp = join(lp, "text");
      const auto& t = fields::section(l, "text", lp);
      fields::check_keys(t, tp, {"lambda", "epochs", "batch_size", "learning_rate", "seed",
                                 "featurizer", "embedding"});
      auto& p = c.learner.text;
      read(t, "lambda", tp, p.train.lambda);
      read(t, "epochs", tp, p.train.epochs);
      read(t, "batch_size", tp, p.train.batch_size);
      read(t, "learning_rate", tp, p.train.learning_rate);
      read(t, "seed", tp, p.train.seed);
      try {
        if (t.contains("featurizer")) p.featurizer = featurizer_config_from_json(t.at("featurizer"));
      } catch (const Error& e) {
        throw ConfigError(join(tp, "featurizer") + ": " + e.what());
      }
      try {
        if (t.contains("embedding")) p.embedding = embedding_config_from_json(t.at("embedding"));
      } catch (const Error& e) {
        throw ConfigError(join(tp, "embedding") + ": " + e.what());
      }
    }
  } else if (c.modality == Modality::kText) {
    c.learner.kind = LearnerKind::kTextTriple;
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError((path.empty() ? std::string() : path + ": ") + e.what());
  }
  return c;
}

}  // namespace textcausal

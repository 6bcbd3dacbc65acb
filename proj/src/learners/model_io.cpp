#include "textcausal/learners/model_io.hpp"

#include <fstream>
#include <functional>

#include "textcausal/common/errors.hpp"

namespace textcausal {

namespace {

void check_header(const nlohmann::json& j, const std::string& format) {
  if (j.value("format", "") != format) {
    throw SchemaError("expected a '" + format + "' document");
  }
  const int version = j.value("version", -1);
  if (version != kModelFormatVersion) {
    throw SchemaError("unsupported " + format + " version " + std::to_string(version));
  }
}

nlohmann::json tree_to_json(const RegressionTree& tree, int node) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.feature < 0) return nlohmann::json{{"leaf", n.value}};
  return nlohmann::json{{"feature", n.feature},
                        {"threshold", n.threshold},
                        {"left", tree_to_json(tree, n.left)},
                        {"right", tree_to_json(tree, n.right)}};
}

int tree_from_json(const nlohmann::json& j, RegressionTree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    tree.nodes[static_cast<std::size_t>(id)].value = j.at("leaf").get<double>();
    return id;
  }
  const int feature = j.at("feature").get<int>();
  const double threshold = j.at("threshold").get<double>();
  const int left = tree_from_json(j.at("left"), tree);
  const int right = tree_from_json(j.at("right"), tree);
  TreeNode& n = tree.nodes[static_cast<std::size_t>(id)];
  n.feature = feature;
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return id;
}

nlohmann::json head_to_json(const LinearHead& head) {
  return nlohmann::json{{"bias", head.bias}, {"weights", head.weights}};
}

LinearHead head_from_json(const nlohmann::json& j) {
  LinearHead head;
  head.bias = j.at("bias").get<double>();
  head.weights = j.at("weights").get<std::vector<double>>();
  return head;
}

const char* regularization_name(Regularization r) {
  switch (r) {
    case Regularization::kNone:
      return "none";
    case Regularization::kL1:
      return "l1";
    case Regularization::kElasticNet:
      return "elastic_net";
  }
  return "none";
}

}  // namespace

nlohmann::json to_json(const LinearModel& model) {
  std::vector<double> w(model.weights.data(), model.weights.data() + model.weights.size());
  return nlohmann::json{{"format", "textcausal.linear"},
                        {"version", kModelFormatVersion},
                        {"intercept", model.intercept},
                        {"weights", w},
                        {"regularization", regularization_name(model.regularization)},
                        {"l1", model.l1},
                        {"l2", model.l2},
                        {"converged", model.converged},
                        {"iterations", model.iterations}};
}

LinearModel linear_model_from_json(const nlohmann::json& j) {
  check_header(j, "textcausal.linear");
  LinearModel m;
  m.intercept = j.at("intercept").get<double>();
  const auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  const auto reg = j.value("regularization", "none");
  m.regularization = reg == "l1"            ? Regularization::kL1
                     : reg == "elastic_net" ? Regularization::kElasticNet
                                            : Regularization::kNone;
  m.l1 = j.value("l1", 0.0);
  m.l2 = j.value("l2", 0.0);
  m.converged = j.value("converged", true);
  m.iterations = j.value("iterations", 0);
  return m;
}

nlohmann::json to_json(const GbtModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : model.trees) trees.push_back(tree_to_json(t, 0));
  return nlohmann::json{{"format", "textcausal.gbt"},
                        {"version", kModelFormatVersion},
                        {"objective", to_string(model.objective)},
                        {"learning_rate", model.learning_rate},
                        {"base_score", model.base_score},
                        {"n_features", model.n_features},
                        {"train_loss", model.train_loss},
                        {"trees", trees}};
}

GbtModel gbt_model_from_json(const nlohmann::json& j) {
  check_header(j, "textcausal.gbt");
  GbtModel m;
  m.objective = gbt_objective_from_string(j.at("objective").get<std::string>());
  m.learning_rate = j.at("learning_rate").get<double>();
  m.base_score = j.at("base_score").get<double>();
  m.n_features = j.at("n_features").get<int>();
  m.train_loss = j.value("train_loss", std::vector<double>{});
  for (const auto& t : j.at("trees")) {
    RegressionTree tree;
    tree_from_json(t, tree);
    for (const auto& n : tree.nodes) {
      if (n.feature >= m.n_features) {
        throw SchemaError("tree references feature " + std::to_string(n.feature) +
                          " beyond width " + std::to_string(m.n_features));
      }
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

nlohmann::json to_json(const TextTripleModel& model) {
  return nlohmann::json{
      {"format", "textcausal.text_triple"},
      {"version", kModelFormatVersion},
      {"source", model.source == FeatureSource::kHashed ? "hashed" : "external"},
      {"featurizer", to_json(model.featurizer)},
      {"dim", model.dim},
      {"lambda", model.lambda},
      {"outcome_scale", model.outcome_scale},
      {"g1_trained", model.g1_trained},
      {"g0_trained", model.g0_trained},
      {"trained", model.trained},
      {"epoch_loss", model.epoch_loss},
      {"heads", {{"g1", head_to_json(model.g1)},
                 {"g0", head_to_json(model.g0)},
                 {"mu", head_to_json(model.mu)}}}};
}

TextTripleModel text_triple_model_from_json(const nlohmann::json& j) {
  check_header(j, "textcausal.text_triple");
  TextTripleModel m;
  m.source = j.at("source").get<std::string>() == "hashed" ? FeatureSource::kHashed
                                                            : FeatureSource::kExternal;
  m.featurizer = featurizer_config_from_json(j.at("featurizer"));
  m.dim = j.at("dim").get<std::size_t>();
  m.lambda = j.at("lambda").get<double>();
  m.outcome_scale = j.at("outcome_scale").get<double>();
  m.g1_trained = j.at("g1_trained").get<bool>();
  m.g0_trained = j.at("g0_trained").get<bool>();
  m.trained = j.at("trained").get<bool>();
  m.epoch_loss = j.value("epoch_loss", std::vector<double>{});
  const auto& heads = j.at("heads");
  m.g1 = head_from_json(heads.at("g1"));
  m.g0 = head_from_json(heads.at("g0"));
  m.mu = head_from_json(heads.at("mu"));
  for (const LinearHead* h : {&m.g1, &m.g0, &m.mu}) {
    if (h->weights.size() != m.dim) throw SchemaError("head width does not match dim");
  }
  return m;
}

void save_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace textcausal

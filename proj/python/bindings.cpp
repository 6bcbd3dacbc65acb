#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "textcausal/cli/app.hpp"
#include "textcausal/crossfit/crossfit.hpp"
#include "textcausal/crossfit/result_io.hpp"
#include "textcausal/dr/scores.hpp"
#include "textcausal/eval/curves.hpp"
#include "textcausal/eval/metrics.hpp"
#include "textcausal/learners/gbt.hpp"
#include "textcausal/learners/linear.hpp"
#include "textcausal/synthetic/generator.hpp"
#include "textcausal/text/featurizer.hpp"

namespace py = pybind11;
using namespace textcausal;

namespace {

nlohmann::json parse(const std::string& text) {
  return text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text);
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["estimand"] = to_string(e.estimand);
  d["group"] = e.group;
  d["point"] = e.point;
  d["std_error"] = e.std_error;
  d["ci_low"] = e.ci_low;
  d["ci_high"] = e.ci_high;
  d["confidence"] = e.confidence;
  d["n_effective"] = e.n_effective;
  return d;
}

py::dict score_columns(const std::vector<ScoreRow>& rows) {
  std::vector<std::string> ids, groups;
  std::vector<int> fold, treatment;
  std::vector<double> y, g1, g0, mu, h, theta, dr, cate;
  for (const auto& r : rows) {
    ids.push_back(r.unit_id);
    groups.push_back(r.group);
    fold.push_back(r.fold);
    treatment.push_back(r.treatment);
    y.push_back(r.outcome);
    g1.push_back(r.g1_hat);
    g0.push_back(r.g0_hat);
    mu.push_back(r.mu_hat);
    h.push_back(r.h_tilde);
    theta.push_back(r.theta_tilde);
    dr.push_back(r.dr_label);
    cate.push_back(r.cate);
  }
  py::dict d;
  d["unit_id"] = ids;
  d["group"] = groups;
  d["fold"] = fold;
  d["treatment"] = treatment;
  d["outcome"] = y;
  d["g1_hat"] = g1;
  d["g0_hat"] = g0;
  d["mu_hat"] = mu;
  d["h_tilde"] = h;
  d["theta_tilde"] = theta;
  d["dr_label"] = dr;
  d["cate"] = cate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Doubly robust treatment-effect estimation from tabular or text covariates";

  static py::exception<Error> base_error(m, "TextCausalError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      static const char* names[] = {"config", "data", "training", "invariant"};
      const std::string msg =
          std::string(names[static_cast<int>(e.category())]) + " error: " + e.what();
      PyErr_SetString(base_error.ptr(), msg.c_str());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def("__len__", &Dataset::size)
      .def_property_readonly("feature_names", &Dataset::feature_names)
      .def_property_readonly("has_text", &Dataset::has_text)
      .def_property_readonly("content_hash", &Dataset::content_hash)
      .def_property_readonly("n_treated", &Dataset::n_treated)
      .def_property_readonly("ids", [](const Dataset& d) {
        std::vector<std::string> v;
        for (const auto& u : d.units()) v.push_back(u.id);
        return v;
      })
      .def_property_readonly("outcomes", [](const Dataset& d) {
        std::vector<double> v;
        for (const auto& u : d.units()) v.push_back(u.outcome);
        return v;
      })
      .def_property_readonly("treatments", [](const Dataset& d) {
        std::vector<int> v;
        for (const auto& u : d.units()) v.push_back(u.treatment);
        return v;
      })
      .def_property_readonly("groups", [](const Dataset& d) {
        std::vector<std::string> v;
        for (const auto& u : d.units()) v.push_back(u.group);
        return v;
      })
      .def_property_readonly("texts", [](const Dataset& d) {
        std::vector<std::string> v;
        for (const auto& u : d.units()) v.push_back(u.text);
        return v;
      })
      .def_property_readonly("tabular", [](const Dataset& d) { return d.tabular_matrix(); })
      .def("to_csv", [](const Dataset& d) { return to_csv_string(d); })
      .def("write_csv", [](const Dataset& d, const std::string& path) { write_csv(d, path); });

  m.def(
      "_load_dataset",
      [](const std::string& path, const std::string& schema_json) {
        Schema s = canonical_schema(true);
        s.optional_group_text = true;
        const auto j = parse(schema_json);
        s.id_column = j.value("id_column", s.id_column);
        s.outcome_column = j.value("outcome_column", s.outcome_column);
        s.treatment_column = j.value("treatment_column", s.treatment_column);
        s.group_column = j.value("group_column", s.group_column);
        s.text_column = j.value("text_column", s.text_column);
        s.numeric_columns = j.value("numeric_columns", s.numeric_columns);
        return load_dataset(path, s);
      },
      py::arg("path"), py::arg("schema_json") = "");

  m.def(
      "_generate",
      [](const std::string& config_json) {
        const SyntheticConfig c = synthetic_config_from_json(parse(config_json));
        SyntheticSample s = generate(c);
        py::dict truth;
        truth["true_g1"] = s.truth.true_g1;
        truth["true_g0"] = s.truth.true_g0;
        truth["true_mu"] = s.truth.true_mu;
        truth["true_theta"] = s.truth.true_theta;
        truth["y1"] = s.truth.y1;
        truth["y0"] = s.truth.y0;
        const OracleEstimands oracle = oracle_estimands(s.truth, s.dataset);
        py::dict o;
        o["ate"] = oracle.ate;
        o["atet"] = oracle.atet;
        o["gate"] = oracle.gate;
        truth["oracle"] = o;
        return py::make_tuple(std::move(s.dataset), truth);
      },
      py::arg("config_json") = "");

  py::class_<CrossfitResult>(m, "CrossfitResult")
      .def_property_readonly("ate", [](const CrossfitResult& r) { return estimate_dict(r.ate()); })
      .def_property_readonly("atet", [](const CrossfitResult& r) { return estimate_dict(r.atet()); })
      .def_property_readonly("gates",
                             [](const CrossfitResult& r) {
                               py::list out;
                               for (const auto& e : r.gates()) out.append(estimate_dict(e));
                               return out;
                             })
      .def_property_readonly("skipped_groups",
                             [](const CrossfitResult& r) { return r.skipped_groups; })
      .def_property_readonly("scores",
                             [](const CrossfitResult& r) { return score_columns(r.score_rows); })
      .def_property_readonly("manifest_json",
                             [](const CrossfitResult& r) { return r.manifest.dump(); })
      .def_property_readonly("blp_json",
                             [](const CrossfitResult& r) {
                               nlohmann::json a = nlohmann::json::array();
                               for (const auto& b : r.blp_per_fold) a.push_back(to_json(b));
                               return a.dump();
                             })
      .def("write", [](const CrossfitResult& r, const std::string& dir) { write_result(r, dir); });

  m.def(
      "_run_crossfit",
      [](const Dataset& d, const std::string& config_json) {
        const CrossfitConfig c = crossfit_config_from_json(parse(config_json));
        py::gil_scoped_release release;
        return run_crossfit(d, c);
      },
      py::arg("dataset"), py::arg("config_json") = "");

  m.def(
      "_inject_truth",
      [](const Dataset& d, const std::vector<double>& g1, const std::vector<double>& g0,
         const std::vector<double>& mu, const std::string& config_json) {
        if (g1.size() != d.size() || g0.size() != d.size() || mu.size() != d.size()) {
          throw ShapeError("nuisance vectors must have one value per unit");
        }
        NuisanceProvider provider;
        for (std::size_t i = 0; i < d.size(); ++i) provider[d[i].id] = {g1[i], g0[i], mu[i]};
        return inject_nuisances(d, provider, crossfit_config_from_json(parse(config_json)));
      },
      py::arg("dataset"), py::arg("g1"), py::arg("g0"), py::arg("mu"),
      py::arg("config_json") = "");

  m.def("dr_label", &dr_label, py::arg("g1_hat"), py::arg("g0_hat"), py::arg("outcome"),
        py::arg("treatment"), py::arg("mu_hat"));
  m.def("clip_propensity", &clip_propensity, py::arg("mu"), py::arg("eps") = 0.01);

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(x, y);
  });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
    return spearman(x, y);
  });
  m.def(
      "cate_quantile_curve",
      [](const std::vector<double>& cates, int n_points) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : cate_quantile_curve(cates, n_points)) out.emplace_back(p.quantile, p.value);
        return out;
      },
      py::arg("cates"), py::arg("n_points") = 101);
  m.def(
      "lift_curve",
      [](const std::vector<double>& sort, const std::vector<double>& gain, int n_points) {
        const LiftCurve c = lift_curve(sort, gain, n_points);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : c.points) pts.emplace_back(p.fraction, p.gain);
        return py::make_tuple(pts, c.area);
      },
      py::arg("sort_scores"), py::arg("gain_scores"), py::arg("n_points") = 100);
  m.def(
      "area_ratio",
      [](const std::vector<double>& sort, const std::vector<double>& gain, int n_points,
         const std::string& baseline) {
        return area_ratio(lift_curve(sort, gain, n_points), lift_curve(gain, gain, n_points),
                          area_baseline_from_string(baseline));
      },
      py::arg("sort_scores"), py::arg("gain_scores"), py::arg("n_points") = 100,
      py::arg("baseline") = "diagonal");

  m.def(
      "featurize",
      [](const std::string& text, int ngram_min, int ngram_max, std::uint32_t hash_dim) {
        FeaturizerConfig c;
        c.ngram_min = ngram_min;
        c.ngram_max = ngram_max;
        c.hash_dim = hash_dim;
        c.validate();
        const SparseVector v = featurize(c, text);
        return py::make_tuple(v.indices, v.values);
      },
      py::arg("text"), py::arg("ngram_min") = 1, py::arg("ngram_max") = 1,
      py::arg("hash_dim") = 1u << 18);

  m.def("fit_ols", [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const LinearModel model = fit_ols(x, y);
    return py::make_tuple(model.intercept, model.weights);
  });
  m.def(
      "fit_elastic_net",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double l1, double l2) {
        const LinearModel model = fit_elastic_net(x, y, l1, l2);
        return py::make_tuple(model.intercept, model.weights);
      },
      py::arg("x"), py::arg("y"), py::arg("l1"), py::arg("l2") = 0.0);
  m.def(
      "gbt_fit_predict",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::MatrixXd& x_new,
         const std::string& objective, const std::string& params_json) {
        const GbtParams p = gbt_params_from_json(parse(params_json));
        const GbtModel model = fit_gbt(x, y, gbt_objective_from_string(objective), p);
        return Eigen::VectorXd(predict(model, x_new));
      },
      py::arg("x"), py::arg("y"), py::arg("x_new"), py::arg("objective") = "squared_error",
      py::arg("params_json") = "");

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}

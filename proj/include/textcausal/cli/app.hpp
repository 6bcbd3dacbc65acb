#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textcausal/common/errors.hpp"
#include "textcausal/crossfit/config.hpp"
#include "textcausal/data/dataset.hpp"
#include "textcausal/eval/report.hpp"

namespace textcausal {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitTraining = 4;
inline constexpr int kExitInvariant = 5;

int exit_code_for(ErrorCategory category);

struct RunConfig {
  Schema schema;
  CrossfitConfig crossfit;
  ReportOptions report;
  std::string output_dir = "textcausal_run";
  bool save_models = false;
};

RunConfig default_run_config();
// Sections: [data], [crossfit] (with [crossfit.learner.*] and
// [crossfit.propensity]), [report], [output]. A [synthetic] section may sit
// in the same file and is ignored here.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Schema& schema);

// Entry point shared by the executable and the tests; args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace textcausal

#include "textcausal/synthetic/generator.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/hash.hpp"
#include "textcausal/common/json_fields.hpp"
#include "textcausal/common/numeric.hpp"
#include "textcausal/common/parallel.hpp"
#include "textcausal/common/random.hpp"
#include "textcausal/crossfit/result_io.hpp"
#include "textcausal/data/csv.hpp"
#include "textcausal/dr/scores.hpp"
#include "textcausal/text/featurizer.hpp"

namespace textcausal {

namespace {

constexpr std::uint64_t kGroupPermutationStream = 0x67726f7570ULL;
constexpr std::uint64_t kTextStream = 0x74657874ULL;

// Ordinal adjectives per feature (bin 0 .. 4) and the noun they modify.
struct FeatureVocabulary {
  const char* noun;
  std::array<const char*, kTextBins> adjectives;
};

const std::array<FeatureVocabulary, 6> kVocabulary = {{
    {"size", {"tiny", "small", "medium", "large", "huge"}},
    {"weight", {"featherweight", "light", "moderate", "heavy", "massive"}},
    {"price", {"bargain", "cheap", "fair", "pricey", "luxury"}},
    {"finish", {"pale", "soft", "bright", "vivid", "neon"}},
    {"age", {"brandnew", "recent", "seasoned", "old", "vintage"}},
    {"rating", {"awful", "poor", "decent", "good", "excellent"}},
}};

const std::array<const char*, 10> kGroupNames = {"apparel", "beauty", "books",  "electronics",
                                                 "garden",  "grocery", "kitchen", "outdoor",
                                                 "sports",  "toys"};

const std::array<const char*, 12> kFiller = {"item",    "listing", "product", "offer",
                                             "with",    "and",     "the",     "for",
                                             "shipped", "stock",   "includes", "features"};

std::string feature_noun(int f) {
  return f < static_cast<int>(kVocabulary.size()) ? kVocabulary[static_cast<std::size_t>(f)].noun
                                                  : "trait" + std::to_string(f);
}

std::string feature_adjective(int f, int bin) {
  if (f < static_cast<int>(kVocabulary.size())) {
    return kVocabulary[static_cast<std::size_t>(f)].adjectives[static_cast<std::size_t>(bin)];
  }
  return "f" + std::to_string(f) + "level" + std::to_string(bin);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string unit_id(std::size_t i, std::size_t n) {
  const std::string digits = std::to_string(i + 1);
  const std::size_t width = std::max<std::size_t>(6, std::to_string(n).size());
  return "u" + std::string(width - digits.size(), '0') + digits;
}

std::vector<double> group_effect_table(const SyntheticConfig& c) {
  const auto n = static_cast<std::size_t>(c.n_groups);
  if (!c.effect.group_effects.empty()) return c.effect.group_effects;
  std::vector<double> effects(n);
  for (std::size_t j = 0; j < n; ++j) {
    effects[j] = n == 1 ? 0.5 * (c.effect.group_low + c.effect.group_high)
                        : c.effect.group_low + (c.effect.group_high - c.effect.group_low) *
                                                   static_cast<double>(j) /
                                                   static_cast<double>(n - 1);
  }
  Rng rng(derive_seed(c.seed, kGroupPermutationStream));
  rng.shuffle(std::span<double>(effects));
  return effects;
}

std::string render_text(const SyntheticConfig& c, std::size_t i, const std::vector<double>& x,
                        const std::string& group) {
  Rng rng(derive_seed(c.text_template_seed, kTextStream + i));
  std::vector<std::string> phrases;
  for (int f = 0; f < c.n_features; ++f) {
    phrases.push_back(feature_adjective(f, feature_bin(x[static_cast<std::size_t>(f)])) + " " +
                      feature_noun(f));
  }
  rng.shuffle(std::span<std::string>(phrases));
  auto filler = [&] { return std::string(kFiller[rng.below(kFiller.size())]); };

  std::string out;
  switch (rng.below(3)) {
    case 0:  // bullet list
      out = group + " " + filler();
      for (const auto& p : phrases) out += "\n- " + p;
      break;
    case 1: {  // one sentence
      out = filler() + " " + group + " " + filler() + ": ";
      for (std::size_t k = 0; k < phrases.size(); ++k) {
        out += (k ? (k + 1 == phrases.size() ? " and " : ", ") : "") + phrases[k];
      }
      out += ".";
      break;
    }
    default:  // key-value fragments
      out = "[" + group + "]";
      for (const auto& p : phrases) out += " " + p + ";";
      out += " " + filler() + " " + filler();
      break;
  }
  return out;
}

}  // namespace

const char* to_string(EffectKind kind) {
  switch (kind) {
    case EffectKind::kConstant:
      return "constant";
    case EffectKind::kLinear:
      return "linear";
    case EffectKind::kGroup:
      return "group";
  }
  return "unknown";
}

EffectKind effect_kind_from_string(const std::string& name) {
  if (name == "constant") return EffectKind::kConstant;
  if (name == "linear") return EffectKind::kLinear;
  if (name == "group") return EffectKind::kGroup;
  throw ConfigError("unknown effect kind '" + name + "'");
}

void SyntheticConfig::validate() const {
  if (n_units < 2) throw ConfigError("n_units must be >= 2");
  if (n_features < 3 || n_features > 64) throw ConfigError("n_features must lie in [3, 64]");
  if (n_groups < 1 || n_groups > 1000) throw ConfigError("n_groups must lie in [1, 1000]");
  if (!(confounding_strength >= 0.0) || !std::isfinite(confounding_strength)) {
    throw ConfigError("confounding_strength must be a finite value >= 0");
  }
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw ConfigError("noise_sd must be a finite value >= 0");
  }
  if (!effect.group_effects.empty() &&
      effect.group_effects.size() != static_cast<std::size_t>(n_groups)) {
    throw ConfigError("effect.group_effects needs one value per group (" +
                      std::to_string(n_groups) + ")");
  }
  const double bound = 0.3;
  auto check = [&](double v, const char* name) {
    if (!std::isfinite(v) || std::abs(v) > bound) {
      throw ConfigError(std::string("effect.") + name + " must lie in [-0.3, 0.3]");
    }
  };
  check(effect.tau, "tau");
  check(effect.slope, "slope");
  check(effect.group_low, "group_low");
  check(effect.group_high, "group_high");
  for (double v : effect.group_effects) check(v, "group_effects");
}

int feature_bin(double x) {
  return std::clamp(static_cast<int>(std::floor(x * kTextBins)), 0, kTextBins - 1);
}

const std::vector<std::string>& group_names(int n_groups) {
  static std::unordered_map<int, std::vector<std::string>> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto& names = cache[n_groups];
  if (names.empty()) {
    for (int g = 0; g < n_groups; ++g) {
      names.push_back(g < static_cast<int>(kGroupNames.size())
                          ? std::string(kGroupNames[static_cast<std::size_t>(g)])
                          : "category" + std::to_string(g));
    }
  }
  return names;
}

SyntheticSample generate(const SyntheticConfig& config, std::size_t threads) {
  config.validate();
  const std::size_t n = config.n_units;
  const auto p = static_cast<std::size_t>(config.n_features);
  const auto& names = group_names(config.n_groups);
  const std::vector<double> effects = group_effect_table(config);

  std::vector<Unit> units(n);
  SyntheticTruth truth;
  for (auto* v : {&truth.true_g1, &truth.true_g0, &truth.true_mu, &truth.true_theta, &truth.y1,
                  &truth.y0}) {
    v->resize(n);
  }
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, i));
    std::vector<double> x(p);
    for (auto& v : x) v = rng.uniform();
    const auto g = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(config.n_groups)));
    const double group_term =
        config.n_groups > 1 ? 0.05 * static_cast<double>(g) / (config.n_groups - 1) : 0.0;

    const double g0 = 0.3 + 0.2 * x[0] + 0.1 * x[1] * x[2] + group_term;
    double theta = 0.0;
    switch (config.effect.kind) {
      case EffectKind::kConstant:
        theta = config.effect.tau;
        break;
      case EffectKind::kLinear:
        theta = config.effect.tau + config.effect.slope * (x[0] - 0.5) -
                0.5 * config.effect.slope * (x[2] - 0.5);
        break;
      case EffectKind::kGroup:
        theta = effects[g];
        break;
    }
    const double g1 = g0 + theta;
    const double mu = 0.05 + 0.9 * sigmoid(config.confounding_strength *
                                           (4.0 * (x[0] - 0.5) + 2.0 * (x[1] - 0.5)));
    const int t = rng.bernoulli(mu) ? 1 : 0;
    const double u1 = config.noise_sd * rng.normal();
    const double u0 = config.shared_noise ? u1 : config.noise_sd * rng.normal();
    const double y1 = std::clamp(g1 + u1, 0.0, 1.0);
    const double y0 = std::clamp(g0 + u0, 0.0, 1.0);

    Unit& u = units[i];
    u.id = unit_id(i, n);
    u.treatment = t;
    u.outcome = t == 1 ? y1 : y0;
    u.group = names[g];
    u.tabular = x;
    u.tabular.push_back(static_cast<double>(g));
    u.text = render_text(config, i, x, names[g]);

    truth.true_g1[i] = g1;
    truth.true_g0[i] = g0;
    truth.true_mu[i] = mu;
    truth.true_theta[i] = theta;
    truth.y1[i] = y1;
    truth.y0[i] = y0;
  });

  std::vector<std::string> feature_names;
  for (std::size_t f = 0; f < p; ++f) feature_names.push_back("x" + std::to_string(f));
  feature_names.push_back("group_code");
  SyntheticSample sample{Dataset(std::move(units), std::move(feature_names), true),
                         std::move(truth), {}};
  if (config.effect.kind == EffectKind::kGroup) sample.group_effects = effects;
  return sample;
}

DecodedText decode_template(std::string_view text, int n_features) {
  static const auto lookup = [] {
    std::unordered_map<std::string, std::pair<int, int>> m;
    for (int f = 0; f < 64; ++f) {
      for (int b = 0; b < kTextBins; ++b) m[feature_adjective(f, b)] = {f, b};
    }
    return m;
  }();
  DecodedText out;
  out.bins.assign(static_cast<std::size_t>(n_features), -1);
  const auto& names = group_names(1000);
  for (const auto& token : tokenize(text, true)) {
    if (const auto it = lookup.find(token); it != lookup.end()) {
      const auto [f, b] = it->second;
      if (f < n_features) out.bins[static_cast<std::size_t>(f)] = b;
      continue;
    }
    if (out.group.empty() && std::find(names.begin(), names.end(), token) != names.end()) {
      out.group = token;
    }
  }
  return out;
}

OracleEstimands oracle_estimands(const SyntheticTruth& truth, const Dataset& dataset) {
  const std::size_t n = dataset.size();
  if (truth.true_theta.size() != n) throw ShapeError("truth is not aligned with the dataset");
  OracleEstimands out;
  out.cate = truth.true_theta;
  out.ate = mean(truth.true_theta);
  StableSum treated;
  std::size_t n_treated = 0;
  std::map<std::string, std::pair<StableSum, std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (dataset[i].treatment == 1) {
      treated.add(truth.true_theta[i]);
      ++n_treated;
    }
    if (!dataset[i].group.empty()) {
      auto& [sum, count] = groups[dataset[i].group];
      sum.add(truth.true_theta[i]);
      ++count;
    }
  }
  out.atet = treated.value() / static_cast<double>(n_treated);
  for (const auto& [name, acc] : groups) {
    out.gate[name] = acc.first.value() / static_cast<double>(acc.second);
  }
  return out;
}

const char* to_string(CorruptionMode mode) {
  switch (mode) {
    case CorruptionMode::kNone:
      return "none";
    case CorruptionMode::kPropensityShift:
      return "propensity_shift";
    case CorruptionMode::kOutcomeShift:
      return "outcome_shift";
    case CorruptionMode::kBoth:
      return "both";
  }
  return "unknown";
}

NuisanceProvider corrupt_nuisances(const SyntheticTruth& truth, const Dataset& dataset,
                                   const CorruptionSpec& spec) {
  if (truth.true_g1.size() != dataset.size()) {
    throw ShapeError("truth is not aligned with the dataset");
  }
  const bool shift_mu =
      spec.mode == CorruptionMode::kPropensityShift || spec.mode == CorruptionMode::kBoth;
  const bool shift_g =
      spec.mode == CorruptionMode::kOutcomeShift || spec.mode == CorruptionMode::kBoth;
  NuisanceProvider provider;
  provider.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    NuisanceValues v;
    v.g1 = truth.true_g1[i] + (shift_g ? spec.outcome_delta : 0.0);
    v.g0 = truth.true_g0[i] + (shift_g ? spec.outcome_delta : 0.0);
    v.mu = clip_propensity(truth.true_mu[i] + (shift_mu ? spec.propensity_delta : 0.0), spec.eps);
    provider.emplace(dataset[i].id, v);
  }
  return provider;
}

std::string truth_to_csv(const SyntheticTruth& truth, const Dataset& dataset) {
  std::ostringstream out;
  csv::write_record(out, {"unit_id", "true_g1", "true_g0", "true_mu", "true_theta", "y1", "y0"});
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    csv::write_record(out, {dataset[i].id, format_real(truth.true_g1[i]),
                            format_real(truth.true_g0[i]), format_real(truth.true_mu[i]),
                            format_real(truth.true_theta[i]), format_real(truth.y1[i]),
                            format_real(truth.y0[i])});
  }
  return out.str();
}

void write_truth(const SyntheticTruth& truth, const Dataset& dataset,
                 const std::filesystem::path& path) {
  write_text(path, truth_to_csv(truth, dataset));
}

TruthTable read_truth(const std::filesystem::path& path) {
  const auto records = csv::parse(read_text(path));
  const csv::Record header = {"unit_id", "true_g1", "true_g0", "true_mu", "true_theta", "y1", "y0"};
  if (records.empty() || records[0] != header) {
    throw SchemaError("'" + path.string() + "' is not a truth table");
  }
  TruthTable table;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.size() != header.size()) throw ValidationError(i, "wrong number of fields");
    try {
      table.nuisances[r[0]] = {std::stod(r[1]), std::stod(r[2]), std::stod(r[3])};
      table.theta[r[0]] = std::stod(r[4]);
    } catch (const std::logic_error&) {
      throw ValidationError(i, "truth value is not a number");
    }
  }
  return table;
}

nlohmann::json to_json(const SyntheticConfig& c) {
  nlohmann::json effect{{"kind", to_string(c.effect.kind)},
                        {"tau", c.effect.tau},
                        {"slope", c.effect.slope},
                        {"group_low", c.effect.group_low},
                        {"group_high", c.effect.group_high}};
  if (!c.effect.group_effects.empty()) effect["group_effects"] = c.effect.group_effects;
  return {{"n_units", c.n_units},
          {"n_features", c.n_features},
          {"effect", effect},
          {"confounding_strength", c.confounding_strength},
          {"noise_sd", c.noise_sd},
          {"n_groups", c.n_groups},
          {"text_template_seed", c.text_template_seed},
          {"seed", c.seed},
          {"noise", c.shared_noise ? "shared" : "independent"}};
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json& j) {
  using fields::read;
  const std::string path = "synthetic";
  SyntheticConfig c;
  fields::check_keys(j, path, {"n_units", "n_features", "effect", "confounding_strength",
                               "noise_sd", "n_groups", "text_template_seed", "seed", "noise"});
  read(j, "n_units", path, c.n_units);
  read(j, "n_features", path, c.n_features);
  read(j, "confounding_strength", path, c.confounding_strength);
  read(j, "noise_sd", path, c.noise_sd);
  read(j, "n_groups", path, c.n_groups);
  read(j, "text_template_seed", path, c.text_template_seed);
  read(j, "seed", path, c.seed);
  std::string noise = "shared";
  read(j, "noise", path, noise);
  if (noise != "shared" && noise != "independent") {
    throw ConfigError("synthetic.noise: expected 'shared' or 'independent', got '" + noise + "'");
  }
  c.shared_noise = noise == "shared";
  if (j.contains("effect")) {
    const std::string ep = "synthetic.effect";
    const auto& e = fields::section(j, "effect", path);
    fields::check_keys(e, ep, {"kind", "tau", "slope", "group_low", "group_high", "group_effects"});
    std::string kind;
    read(e, "kind", ep, kind);
    if (!kind.empty()) {
      try {
        c.effect.kind = effect_kind_from_string(kind);
      } catch (const Error& err) {
        throw ConfigError(ep + ".kind: " + err.what());
      }
    }
    read(e, "tau", ep, c.effect.tau);
    read(e, "slope", ep, c.effect.slope);
    read(e, "group_low", ep, c.effect.group_low);
    read(e, "group_high", ep, c.effect.group_high);
    read(e, "group_effects", ep, c.effect.group_effects);
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(path + "." + e.what());
  }
  return c;
}

}  // namespace textcausal

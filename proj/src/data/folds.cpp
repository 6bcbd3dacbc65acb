#include "textcausal/data/folds.hpp"

#include <algorithm>

#include "textcausal/common/errors.hpp"
#include "textcausal/common/hash.hpp"
#include "textcausal/common/random.hpp"

namespace textcausal {

std::vector<std::size_t> FoldAssignment::members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::complement(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::sizes() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(std::max(k_folds, 0)), 0);
  for (int f : fold_of) {
    if (f >= 0 && f < k_folds) ++out[static_cast<std::size_t>(f)];
  }
  return out;
}

std::string FoldAssignment::hash() const {
  Fingerprint fp;
  fp.add(static_cast<std::int64_t>(k_folds));
  for (int f : fold_of) fp.add(static_cast<std::int64_t>(f));
  return fp.hex();
}

FoldAssignment partition_folds(const Dataset& dataset, int k, std::uint64_t seed) {
  if (k < 2) throw ParameterError("k_folds must be >= 2, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > dataset.size()) {
    throw ParameterError("k_folds " + std::to_string(k) + " exceeds " +
                         std::to_string(dataset.size()) + " units");
  }
  std::vector<std::size_t> treated, control;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (dataset[i].treatment == 1 ? treated : control).push_back(i);
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(treated));
  rng.shuffle(std::span<std::size_t>(control));

  FoldAssignment out;
  out.k_folds = k;
  out.seed = seed;
  out.fold_of.assign(dataset.size(), -1);
  std::size_t position = 0;
  for (const auto* arm : {&treated, &control}) {
    for (std::size_t idx : *arm) {
      out.fold_of[idx] = static_cast<int>(position % static_cast<std::size_t>(k));
      ++position;
    }
  }
  check_partition(out, dataset.size());
  return out;
}

void check_partition(const FoldAssignment& folds, std::size_t n_units) {
  if (folds.fold_of.size() != n_units) {
    throw InvariantError("fold assignment covers " +
                         std::to_string(folds.fold_of.size()) + " of " +
                         std::to_string(n_units) + " units");
  }
  for (int f : folds.fold_of) {
    if (f < 0 || f >= folds.k_folds) {
      throw InvariantError("fold index out of range: " + std::to_string(f));
    }
  }
  const auto sizes = folds.sizes();
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  if (*hi - *lo > 1) throw InvariantError("fold sizes differ by more than one");
}

nlohmann::json to_json(const FoldAssignment& folds) {
  return nlohmann::json{{"k_folds", folds.k_folds},
                        {"seed", folds.seed},
                        {"fold_of", folds.fold_of},
                        {"hash", folds.hash()}};
}

FoldAssignment fold_assignment_from_json(const nlohmann::json& j) {
  FoldAssignment out;
  out.k_folds = j.at("k_folds").get<int>();
  out.seed = j.at("seed").get<std::uint64_t>();
  out.fold_of = j.at("fold_of").get<std::vector<int>>();
  return out;
}

}  // namespace textcausal

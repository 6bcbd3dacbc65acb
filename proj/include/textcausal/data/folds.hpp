#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "textcausal/data/dataset.hpp"

namespace textcausal {

struct FoldAssignment {
  int k_folds = 0;
  std::vector<int> fold_of;  // unit index -> fold in [0, k_folds)
  std::uint64_t seed = 0;

  std::vector<std::size_t> members(int fold) const;
  // Indices of every unit outside `fold` (the training complement).
  std::vector<std::size_t> complement(int fold) const;
  std::vector<std::size_t> sizes() const;
  std::string hash() const;

  bool operator==(const FoldAssignment&) const = default;
};

// Balanced K-fold split, stratified by treatment arm. Each arm is shuffled
// with the seed and dealt round-robin, treated first, continuing the deal
// across arms, so fold sizes differ by at most one overall.
FoldAssignment partition_folds(const Dataset& dataset, int k,
                               std::uint64_t seed);

// Throws InvariantError unless every unit has exactly one fold in range and
// sizes are balanced.
void check_partition(const FoldAssignment& folds, std::size_t n_units);

nlohmann::json to_json(const FoldAssignment& folds);
FoldAssignment fold_assignment_from_json(const nlohmann::json& j);

}  // namespace textcausal

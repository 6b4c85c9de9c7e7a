#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qin/rng.hpp"
#include "qin/sampled_tree.hpp"

namespace qin {

// RW walks down uniformly among children that reported answers; SP first
// prunes to the minimum-depth reachable answers, then runs the same walk.
enum class SelectionRule { RW, SP };

SelectionRule selection_rule_from_string(const std::string& name);
const char* to_string(SelectionRule rule);

// Per-node outcome of the equilibrium reporting pass with horizon h: a node
// holding an answer (level <= h) reports itself and suppresses its subtree;
// a node without one propagates while its level is < h.
struct ReportMarks {
    std::vector<char> reports;
    std::vector<int> min_answer_level;  // minimum reported answer level, or INT_MAX
};

ReportMarks resolve_reports(const SampledTree& tree, int h);

// Node sequence from level 1 to the selected holder (root excluded), or
// nullopt when no answer is reachable within the horizon.
std::optional<std::vector<int>> select_answer(const SampledTree& tree,
                                              const ReportMarks& marks,
                                              SelectionRule rule, SplitMix64& rng);

}  // namespace qin

#include "qin/selection.hpp"

#include <climits>

#include "qin/errors.hpp"

namespace qin {

SelectionRule selection_rule_from_string(const std::string& name) {
    if (name == "RW" || name == "rw") return SelectionRule::RW;
    if (name == "SP" || name == "sp") return SelectionRule::SP;
    throw ConfigError("unknown selection rule: " + name);
}

const char* to_string(SelectionRule rule) {
    return rule == SelectionRule::RW ? "RW" : "SP";
}

ReportMarks resolve_reports(const SampledTree& tree, int h) {
    size_t count = tree.nodes.size();
    ReportMarks marks;
    marks.reports.assign(count, 0);
    marks.min_answer_level.assign(count, INT_MAX);

    // Children may carry smaller ids than their parents after sybil
    // injection, so order explicitly by a BFS pass from the root.
    std::vector<int> order;
    order.reserve(count);
    order.push_back(0);
    for (size_t q = 0; q < order.size(); ++q) {
        for (int c : tree.nodes[order[q]].children) order.push_back(c);
    }

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        const TreeNode& node = tree.nodes[v];
        if (node.level >= 1 && node.level <= h && node.answer) {
            // Reports its own answer and does not propagate the query.
            marks.reports[v] = 1;
            marks.min_answer_level[v] = node.level;
            continue;
        }
        if (node.level < h) {
            for (int c : node.children) {
                if (marks.reports[c]) {
                    marks.reports[v] = 1;
                    marks.min_answer_level[v] =
                        std::min(marks.min_answer_level[v], marks.min_answer_level[c]);
                }
            }
        }
    }
    return marks;
}

std::optional<std::vector<int>> select_answer(const SampledTree& tree,
                                              const ReportMarks& marks,
                                              SelectionRule rule, SplitMix64& rng) {
    if (!marks.reports[0]) return std::nullopt;
    int target = marks.min_answer_level[0];

    std::vector<int> path;
    std::vector<int> candidates;
    int u = 0;
    while (true) {
        candidates.clear();
        for (int c : tree.nodes[u].children) {
            if (!marks.reports[c]) continue;
            if (rule == SelectionRule::SP && marks.min_answer_level[c] != target) continue;
            candidates.push_back(c);
        }
        int pick = candidates[rng.next_below(candidates.size())];
        path.push_back(pick);
        if (tree.nodes[pick].answer) return path;
        u = pick;
    }
}

}  // namespace qin

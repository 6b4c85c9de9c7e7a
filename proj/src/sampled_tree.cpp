#include "qin/sampled_tree.hpp"

#include <algorithm>
#include <string>

#include "qin/errors.hpp"

namespace qin {

SampledTree sample_tree(const OffspringDistribution& dist, double n, int depth,
                        SplitMix64& rng) {
    if (depth < 0) throw InvalidHorizon("tree depth must be >= 0");
    if (!(n > 1.0)) throw DegenerateInput("answer rarity n must be > 1");
    double p = 1.0 / n;

    SampledTree tree;
    tree.d = dist.d;
    tree.depth = depth;
    tree.nodes.push_back(TreeNode{});  // root

    std::vector<int> slots(dist.d);
    for (size_t v = 0; v < tree.nodes.size(); ++v) {
        if (tree.nodes[v].level >= depth) continue;

        // Inverse-CDF draw of the child count.
        double u = rng.next_double();
        int count = dist.d;
        double acc = 0.0;
        for (int j = 0; j <= dist.d; ++j) {
            acc += dist.c[j];
            if (u < acc) {
                count = j;
                break;
            }
        }
        if (count == 0) continue;

        // Choose `count` of the d child slots uniformly (partial Fisher-Yates),
        // then keep them in slot order so node ids are position-deterministic.
        for (int j = 0; j < dist.d; ++j) slots[j] = j;
        for (int j = 0; j < count; ++j) {
            int swap_with = j + static_cast<int>(rng.next_below(dist.d - j));
            std::swap(slots[j], slots[swap_with]);
        }
        std::sort(slots.begin(), slots.begin() + count);

        for (int j = 0; j < count; ++j) {
            TreeNode child;
            child.parent = static_cast<int>(v);
            child.level = tree.nodes[v].level + 1;
            child.slot = slots[j];
            child.answer = rng.next_double() < p;
            tree.nodes[v].children.push_back(static_cast<int>(tree.nodes.size()));
            tree.nodes.push_back(std::move(child));
        }
    }
    return tree;
}

int leftmost_active(const SampledTree& tree, int level) {
    int node = 0;
    for (int l = 0; l < level; ++l) {
        int next = -1;
        for (int c : tree.nodes[node].children) {
            if (tree.nodes[c].slot == 0) {
                next = c;
                break;
            }
        }
        if (next < 0) return -1;
        node = next;
    }
    return node;
}

SampledTree inject_sybils(const SampledTree& tree, const Deviation& deviation,
                          int agent) {
    if (agent < 0 || agent >= static_cast<int>(tree.nodes.size())) {
        throw DegenerateInput("sybil injection needs a valid agent node");
    }
    if (deviation.sybils == 0) return tree;

    SampledTree out = tree;
    int k = deviation.sybils;

    std::vector<int> original_children = out.nodes[agent].children;
    out.nodes[agent].children.clear();

    int previous = agent;
    int last_sybil = -1;
    for (int j = 1; j <= k; ++j) {
        TreeNode sybil;
        sybil.parent = previous;
        sybil.level = out.nodes[agent].level + j;
        sybil.slot = 0;
        sybil.sybil = true;
        int id = static_cast<int>(out.nodes.size());
        out.nodes[previous].children.push_back(id);
        out.nodes.push_back(std::move(sybil));
        previous = id;
        last_sybil = id;
    }

    // Original children hang off the last sybil; their subtrees shift k deeper.
    out.nodes[last_sybil].children = original_children;
    std::vector<int> stack = original_children;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        out.nodes[v].level += k;
        out.depth = std::max(out.depth, out.nodes[v].level);
        for (int c : out.nodes[v].children) stack.push_back(c);
    }
    for (int c : original_children) out.nodes[c].parent = last_sybil;

    if (deviation.holder && deviation.placement == AnswerPlacement::last_sybil &&
        out.nodes[agent].answer) {
        out.nodes[agent].answer = false;
        out.nodes[last_sybil].answer = true;
    }
    return out;
}

SampledTree inject_sybils(const SampledTree& tree, const Deviation& deviation) {
    int agent = leftmost_active(tree, deviation.level);
    if (agent < 0) {
        throw DegenerateInput("deviation level " + std::to_string(deviation.level) +
                              " is not active in this tree");
    }
    return inject_sybils(tree, deviation, agent);
}

}  // namespace qin

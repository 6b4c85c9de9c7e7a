#pragma once

#include <vector>

#include "qin/deviation.hpp"
#include "qin/offspring.hpp"
#include "qin/rng.hpp"

namespace qin {

struct TreeNode {
    int parent = -1;
    int level = 0;
    int slot = 0;  // index among the parent's d child positions
    bool answer = false;
    bool sybil = false;
    std::vector<int> children;
};

// One realized active tree of the branching process, truncated at `depth`.
// nodes[0] is the root (level 0); the root issues the query and never holds
// an answer. Sampled nodes appear in BFS order.
struct SampledTree {
    int d = 1;
    int depth = 0;
    std::vector<TreeNode> nodes;
};

// Child counts drawn from dist, child slots uniform without replacement,
// answer marks i.i.d. with probability 1/n on every non-root active node.
SampledTree sample_tree(const OffspringDistribution& dist, double n, int depth,
                        SplitMix64& rng);

// Node id of the active node occupying the leftmost underlying position at
// `level` (the all-zero slot path), or -1 if that position is not active.
int leftmost_active(const SampledTree& tree, int level);

// Rebuilds the tree with the deviation applied to `agent`: a chain of k
// sybils goes between the agent and its original children, the subtree below
// shifts k levels deeper, and a holder's answer moves to the last sybil when
// the placement says so. k = 0 returns the tree unchanged.
SampledTree inject_sybils(const SampledTree& tree, const Deviation& deviation,
                          int agent);

// Convenience overload resolving the agent as leftmost_active(deviation.level);
// throws DegenerateInput if that position is not active.
SampledTree inject_sybils(const SampledTree& tree, const Deviation& deviation);

}  // namespace qin

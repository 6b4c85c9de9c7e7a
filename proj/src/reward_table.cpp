#include "qin/reward_table.hpp"

#include <string>

#include "qin/errors.hpp"

namespace qin {

const char* to_string(TableKind kind) {
    switch (kind) {
        case TableKind::chain_dr_verbatim: return "chain_dr_verbatim";
        case TableKind::chain_dr_normalized: return "chain_dr_normalized";
        case TableKind::tree_dr: return "tree_dr";
        case TableKind::custom: return "custom";
        case TableKind::split_counterexample: return "split_counterexample";
    }
    return "custom";
}

TableKind table_kind_from_string(const std::string& name) {
    if (name == "chain_dr_verbatim") return TableKind::chain_dr_verbatim;
    if (name == "chain_dr_normalized") return TableKind::chain_dr_normalized;
    if (name == "tree_dr") return TableKind::tree_dr;
    if (name == "custom") return TableKind::custom;
    if (name == "split_counterexample") return TableKind::split_counterexample;
    throw ConfigError("unknown reward table kind: " + name);
}

std::vector<double> allocate(const RewardTable& table, int path_len) {
    if (path_len < 1) throw InvalidHorizon("path length must be >= 1");
    if (path_len > table.h) {
        throw OutOfHorizon("path length " + std::to_string(path_len) +
                           " exceeds horizon " + std::to_string(table.h));
    }
    std::vector<double> rewards(path_len);
    for (int i = 1; i <= path_len; ++i) rewards[i - 1] = table.at(i, path_len - i);
    return rewards;
}

}  // namespace qin

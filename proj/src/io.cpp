#include "qin/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qin/errors.hpp"

namespace qin {

std::string format_real17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char ch : value) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        row += csv_field(fields[i]);
    }
    row += "\r\n";
    return row;
}

OffspringDistribution distribution_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("d") || !j.contains("c")) {
        throw ConfigError("distribution literal needs {\"d\": int, \"c\": [..]}");
    }
    int d = j.at("d").get<int>();
    std::vector<double> c = j.at("c").get<std::vector<double>>();
    if (static_cast<int>(c.size()) != d + 1) {
        throw ConfigError("distribution literal needs exactly d+1 probabilities");
    }
    return OffspringDistribution::make(std::move(c));
}

nlohmann::json distribution_to_json(const OffspringDistribution& dist) {
    return nlohmann::json{{"d", dist.d}, {"c", dist.c}};
}

std::string reward_table_to_json(const RewardTable& table) {
    std::ostringstream out;
    out << "{\"h\": " << table.h << ", \"kind\": \"" << to_string(table.kind)
        << "\", \"entries\": [";
    bool first = true;
    for (int i = 1; i <= table.h; ++i) {
        for (int s = 0; i + s <= table.h; ++s) {
            if (!first) out << ", ";
            first = false;
            out << "[" << i << ", " << s << ", " << format_real17(table.at(i, s)) << "]";
        }
    }
    out << "]";
    auto emit_series = [&out](const char* name, const std::vector<double>& values,
                              int from, int to) {
        out << "\"" << name << "\": [";
        for (int i = from; i <= to; ++i) {
            if (i > from) out << ", ";
            out << format_real17(values[i]);
        }
        out << "]";
    };
    if (table.chain) {
        out << ", \"aux\": {";
        emit_series("P", table.chain->P, 1, table.h);
        out << ", ";
        emit_series("R", table.chain->R, 1, table.h);
        out << "}";
    } else if (table.tree) {
        out << ", \"aux\": {";
        emit_series("x", table.tree->x, 1, table.h);
        out << ", ";
        emit_series("a", table.tree->a, 1, table.h);
        out << "}";
    }
    out << "}";
    return out.str();
}

RewardTable reward_table_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("h") || !j.contains("kind") || !j.contains("entries")) {
        throw ConfigError("reward table needs h, kind and entries");
    }
    RewardTable table;
    table.h = j.at("h").get<int>();
    if (table.h < 1) throw InvalidHorizon("reward table needs h >= 1");
    table.kind = table_kind_from_string(j.at("kind").get<std::string>());
    table.r.assign(table.h + 1, {});
    for (int i = 1; i <= table.h; ++i) table.r[i].assign(table.h - i + 1, 0.0);

    std::vector<std::vector<char>> seen(table.h + 1);
    for (int i = 1; i <= table.h; ++i) seen[i].assign(table.h - i + 1, 0);
    for (const auto& entry : j.at("entries")) {
        if (!entry.is_array() || entry.size() != 3) {
            throw ConfigError("reward table entries must be [i, s, r] triplets");
        }
        int i = entry[0].get<int>();
        int s = entry[1].get<int>();
        if (i < 1 || s < 0 || i + s > table.h) {
            throw ConfigError("reward table entry outside 1 <= i, 0 <= s, i+s <= h");
        }
        if (seen[i][s]) throw ConfigError("duplicate reward table entry");
        seen[i][s] = 1;
        table.r[i][s] = entry[2].get<double>();
    }
    for (int i = 1; i <= table.h; ++i) {
        for (int s = 0; i + s <= table.h; ++s) {
            if (!seen[i][s]) {
                throw ConfigError("reward table is missing entry (i=" + std::to_string(i) +
                                  ", s=" + std::to_string(s) + ")");
            }
        }
    }

    auto read_series = [&](const nlohmann::json& arr) {
        std::vector<double> values(table.h + 1, 0.0);
        if (static_cast<int>(arr.size()) != table.h) {
            throw ConfigError("aux series must have h entries");
        }
        for (int i = 1; i <= table.h; ++i) values[i] = arr[i - 1].get<double>();
        return values;
    };
    if (j.contains("aux")) {
        const auto& aux = j.at("aux");
        if (aux.contains("P") && aux.contains("R")) {
            ChainAux chain;
            chain.P = read_series(aux.at("P"));
            chain.R = read_series(aux.at("R"));
            table.chain = std::move(chain);
        } else if (aux.contains("x") && aux.contains("a")) {
            TreeAux tree;
            tree.x = read_series(aux.at("x"));
            tree.a = read_series(aux.at("a"));
            table.tree = std::move(tree);
        }
    }
    return table;
}

nlohmann::json landmarks_to_json(const Landmarks& lm) {
    return nlohmann::json{{"ell1", lm.ell1},
                          {"ellstar", lm.ellstar},
                          {"rho", lm.rho},
                          {"gamma", lm.gamma},
                          {"epsilon", lm.epsilon}};
}

nlohmann::json property_report_to_json(const PropertyReport& report) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& check : report.checks) {
        checks.push_back({{"name", check.name},
                          {"pass", check.pass},
                          {"violation", check.violation}});
    }
    return nlohmann::json{{"all_pass", report.all_pass()}, {"checks", checks}};
}

namespace {

nlohmann::json witness_to_json(const Witness& w) {
    nlohmann::json j{{"i", w.i},           {"k", w.k},
                     {"holder", w.holder}, {"honest", w.honest},
                     {"deviant", w.deviant}, {"margin", w.margin},
                     {"conditioning", w.conditioning},
                     {"deviant_is_upper_bound", w.deviant_is_upper_bound}};
    if (w.mc_checked) {
        j["mc_margin"] = w.mc_margin;
        j["mc_sigma"] = w.mc_sigma;
        j["mc_overruled"] = w.mc_overruled;
    }
    return j;
}

}  // namespace

nlohmann::json audit_report_to_json(const AuditReport& report) {
    nlohmann::json witnesses = nlohmann::json::array();
    for (const auto& w : report.witnesses) witnesses.push_back(witness_to_json(w));
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& check : report.property_checks) {
        checks.push_back({{"name", check.name},
                          {"pass", check.pass},
                          {"violation", check.violation}});
    }
    return nlohmann::json{{"verdict", report.sybil_proof ? "sybil_proof" : "violated"},
                          {"mode", to_string(report.mode)},
                          {"tolerance", report.tolerance},
                          {"cost", report.cost},
                          {"min_margin", report.min_margin},
                          {"min_margin_cell", witness_to_json(report.min_margin_cell)},
                          {"witnesses", witnesses},
                          {"property_checks", checks}};
}

nlohmann::json estimate_to_json(const EstimateResult& result) {
    std::vector<double> levels(result.level_freq.begin() + 1, result.level_freq.end());
    nlohmann::json j{{"trials", result.trials},
                     {"h", result.h},
                     {"master_seed", result.master_seed},
                     {"mean_cost", result.mean_cost},
                     {"cost_ci", result.cost_ci},
                     {"level_freq", levels},
                     {"none_freq", result.none_freq},
                     {"mean_utility", result.mean_utility},
                     {"utility_ci", result.utility_ci}};
    if (result.has_deviation) {
        j["monitored_active_freq"] = result.monitored_active_freq;
        j["dr_freq"] = result.dr_freq;
        j["rev_freq"] = result.rev_freq;
    }
    return j;
}

std::string witness_csv(const std::vector<Witness>& rows) {
    std::string out = csv_row({"i", "k", "holder", "honest", "deviant", "margin",
                               "conditioning"});
    for (const auto& w : rows) {
        out += csv_row({std::to_string(w.i), std::to_string(w.k),
                        w.holder ? "1" : "0", format_real17(w.honest),
                        format_real17(w.deviant), format_real17(w.margin),
                        w.conditioning});
    }
    return out;
}

std::string estimate_blocks_csv(const EstimateResult& result) {
    std::vector<std::string> header{"trial_block", "trials", "mean_cost", "ci_low",
                                    "ci_high"};
    for (int i = 1; i <= result.h; ++i) header.push_back("level_" + std::to_string(i));
    header.push_back("mean_utility");
    header.push_back("utility_ci");
    std::string out = csv_row(header);
    for (const auto& block : result.blocks) {
        std::vector<std::string> row{std::to_string(block.index),
                                     std::to_string(block.trials),
                                     format_real17(block.mean_cost),
                                     format_real17(block.mean_cost - block.cost_ci),
                                     format_real17(block.mean_cost + block.cost_ci)};
        for (int i = 1; i <= result.h; ++i) {
            row.push_back(format_real17(block.level_freq[i]));
        }
        row.push_back(format_real17(block.mean_utility));
        row.push_back(format_real17(block.utility_ci));
        out += csv_row(row);
    }
    return out;
}

std::string cost_scaling_csv(const std::vector<CostScalingRow>& rows) {
    bool chain = !rows.empty() && rows.front().chain_mode;
    std::vector<std::string> header{"h", "cost", "cost_per_h2", "cost_norm"};
    if (chain) {
        header.insert(header.end(), {"bracket_lo", "bracket_hi", "inside_bracket"});
    }
    std::string out = csv_row(header);
    for (const auto& row : rows) {
        std::vector<std::string> fields{std::to_string(row.h), format_real17(row.cost),
                                        format_real17(row.cost_per_h2),
                                        format_real17(row.cost_norm)};
        if (chain) {
            fields.push_back(format_real17(row.bracket_lo));
            fields.push_back(format_real17(row.bracket_hi));
            fields.push_back(row.inside_bracket ? "1" : "0");
        }
        out += csv_row(fields);
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << content;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace qin

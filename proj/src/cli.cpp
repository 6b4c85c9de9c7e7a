#include "qin/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "qin/audit.hpp"
#include "qin/errors.hpp"
#include "qin/io.hpp"
#include "qin/montecarlo.hpp"
#include "qin/schemes.hpp"

namespace qin::cli {

namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::set<std::string>& required,
                 const std::set<std::string>& optional) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& key : required) {
        if (!j.contains(key)) throw ConfigError("missing config key: " + key);
    }
    for (const auto& [key, _] : j.items()) {
        if (!required.count(key) && !optional.count(key)) {
            throw ConfigError("unknown config key: " + key);
        }
    }
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// A reward table plus everything needed to analyze it.
struct BuiltScheme {
    RewardTable table;
    double n = 0.0;
    int d = 0;
    std::optional<std::vector<double>> lambda;
    std::optional<OffspringDistribution> dist;
};

BuiltScheme build_from_scheme_config(const json& scheme) {
    if (!scheme.is_object() || !scheme.contains("kind")) {
        throw ConfigError("scheme config needs a kind");
    }
    std::string kind = scheme.at("kind").get<std::string>();
    BuiltScheme built;

    if (kind == "chain_dr" || kind == "chain_dr_normalized" || kind == "chain_dr_verbatim") {
        expect_keys(scheme, {"kind", "n", "h"}, {"normalized"});
        bool normalized = kind != "chain_dr_verbatim";
        if (scheme.contains("normalized")) normalized = scheme.at("normalized").get<bool>();
        if (kind == "chain_dr_normalized" && !normalized) {
            throw ConfigError("chain_dr_normalized contradicts normalized=false");
        }
        built.n = scheme.at("n").get<double>();
        built.table = dr_chain_scheme(built.n, scheme.at("h").get<int>(), normalized);
        built.d = 1;
        built.dist = OffspringDistribution::chain();
    } else if (kind == "tree_dr") {
        expect_keys(scheme, {"kind", "h"}, {"lambda", "distribution", "n"});
        int h = scheme.at("h").get<int>();
        if (scheme.contains("lambda")) {
            auto given = scheme.at("lambda").get<std::vector<double>>();
            if (static_cast<int>(given.size()) != h) {
                throw ConfigError("tree_dr lambda must list levels 1..h");
            }
            std::vector<double> lambda(h + 1, 0.0);
            for (int i = 1; i <= h; ++i) lambda[i] = given[i - 1];
            built.table = dr_tree_scheme(lambda, h);
            built.lambda = std::move(lambda);
        } else if (scheme.contains("distribution") && scheme.contains("n")) {
            built.dist = distribution_from_json(scheme.at("distribution"));
            built.n = scheme.at("n").get<double>();
            auto phi = no_answer_probabilities(*built.dist, built.n, h);
            built.lambda = first_answer_distribution(*built.dist, built.n, phi);
            built.table = dr_tree_scheme(*built.lambda, h);
            built.d = built.dist->d;
        } else {
            throw ConfigError("tree_dr needs either lambda or distribution+n");
        }
    } else if (kind == "split_counterexample") {
        expect_keys(scheme, {"kind", "h", "base"}, {});
        built.table = split_counterexample_scheme(scheme.at("h").get<int>(),
                                                  scheme.at("base").get<double>());
        built.d = 1;
        built.dist = OffspringDistribution::chain();
    } else if (kind == "custom") {
        expect_keys(scheme, {"kind", "h", "entries"}, {});
        json wrapped{{"h", scheme.at("h")}, {"kind", "custom"},
                     {"entries", scheme.at("entries")}};
        built.table = reward_table_from_json(wrapped);
        built.d = 1;
        built.dist = OffspringDistribution::chain();
    } else {
        throw ConfigError("unknown scheme kind: " + kind);
    }
    return built;
}

int exit_code_for(const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
}

}  // namespace

int cmd_analyze_branching(json config, const std::string& out_dir) {
    try {
        expect_keys(config, {"distribution", "n", "h"}, {"landmarks"});
        auto dist = distribution_from_json(config.at("distribution"));
        double n = config.at("n").get<double>();
        int h = config.at("h").get<int>();
        double b = dist.branching_factor();
        bool want_landmarks = config.contains("landmarks")
                                  ? config.at("landmarks").get<bool>()
                                  : b > 1.0;

        auto dir = prepare_out_dir(out_dir);
        BranchingProfile profile = make_profile(dist, n, h, want_landmarks);

        std::string csv = csv_row({"level", "phi", "lambda"});
        for (int i = 0; i <= h; ++i) {
            csv += csv_row({std::to_string(i), format_real17(profile.phi[i]),
                            format_real17(i == 0 ? 0.0 : profile.lambda[i])});
        }
        write_text_file((dir / "phi_lambda.csv").string(), csv);

        if (!want_landmarks) {
            std::cout << "b=" << b << " zeta=" << profile.zeta
                      << " (landmarks skipped)\n";
            return 0;
        }
        write_text_file((dir / "landmarks.json").string(),
                        landmarks_to_json(*profile.landmarks).dump(2) + "\n");
        PropertyReport report = verify_lambda_properties(dist, profile);
        write_text_file((dir / "lambda_properties.json").string(),
                        property_report_to_json(report).dump(2) + "\n");
        std::cout << "b=" << b << " zeta=" << profile.zeta
                  << " ellstar=" << profile.landmarks->ellstar
                  << " checks=" << (report.all_pass() ? "pass" : "FAIL") << "\n";
        return report.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        return exit_code_for(e);
    }
}

int cmd_build_scheme(json config, const std::string& out_dir) {
    try {
        expect_keys(config, {"scheme"}, {});
        BuiltScheme built = build_from_scheme_config(config.at("scheme"));
        auto dir = prepare_out_dir(out_dir);
        write_text_file((dir / "reward_table.json").string(),
                        reward_table_to_json(built.table) + "\n");
        const RewardTable& table = built.table;
        std::cout << "kind=" << to_string(table.kind) << " h=" << table.h;
        if (table.tree) {
            std::cout << " x1=" << format_real17(table.tree->x[1])
                      << " a1=" << format_real17(table.tree->a[1]);
        } else {
            std::cout << " r(1,0)=" << format_real17(table.at(1, 0));
            if (table.h > 1) std::cout << " r(1,1)=" << format_real17(table.at(1, 1));
        }
        std::cout << "\n";
        return 0;
    } catch (const std::exception& e) {
        return exit_code_for(e);
    }
}

int cmd_audit(json config, const std::string& out_dir) {
    try {
        expect_keys(config, {},
                    {"scheme", "table_file", "n", "d", "lambda", "distribution", "mode",
                     "tolerance", "trials", "seed"});
        AuditOptions options;
        RewardTable table;
        if (config.contains("scheme") == config.contains("table_file")) {
            throw ConfigError("audit needs exactly one of scheme or table_file");
        }
        if (config.contains("scheme")) {
            BuiltScheme built = build_from_scheme_config(config.at("scheme"));
            table = std::move(built.table);
            options.n = built.n;
            options.d = built.d;
            options.lambda = std::move(built.lambda);
            options.dist = std::move(built.dist);
        } else {
            table = reward_table_from_json(
                read_json_file(config.at("table_file").get<std::string>()));
        }
        if (config.contains("n")) options.n = config.at("n").get<double>();
        if (config.contains("d")) options.d = config.at("d").get<int>();
        if (config.contains("distribution")) {
            options.dist = distribution_from_json(config.at("distribution"));
            if (options.d == 0) options.d = options.dist->d;
        }
        if (config.contains("lambda")) {
            auto given = config.at("lambda").get<std::vector<double>>();
            if (static_cast<int>(given.size()) != table.h) {
                throw ConfigError("audit lambda must list levels 1..h");
            }
            std::vector<double> lambda(table.h + 1, 0.0);
            for (int i = 1; i <= table.h; ++i) lambda[i] = given[i - 1];
            options.lambda = std::move(lambda);
        }
        if (table.kind == TableKind::tree_dr && !options.lambda && options.dist &&
            options.n > 1.0) {
            auto phi = no_answer_probabilities(*options.dist, options.n, table.h);
            options.lambda = first_answer_distribution(*options.dist, options.n, phi);
        }
        if (config.contains("mode")) {
            options.mode = audit_mode_from_string(config.at("mode").get<std::string>());
        }
        if (config.contains("tolerance")) {
            options.tolerance = config.at("tolerance").get<double>();
        }
        if (config.contains("trials")) options.trials = config.at("trials").get<long long>();
        if (config.contains("seed")) options.seed = config.at("seed").get<uint64_t>();

        AuditReport report = check_sybil_proofness(table, options);
        auto dir = prepare_out_dir(out_dir);
        write_text_file((dir / "audit_report.json").string(),
                        audit_report_to_json(report).dump(2) + "\n");
        write_text_file((dir / "witnesses.csv").string(), witness_csv(report.witnesses));
        write_text_file((dir / "payoff_grid.csv").string(), witness_csv(report.grid));
        std::cout << "verdict=" << (report.sybil_proof ? "sybil_proof" : "violated")
                  << " min_margin=" << format_real17(report.min_margin)
                  << " cost=" << format_real17(report.cost) << "\n";
        return report.sybil_proof ? 0 : 1;
    } catch (const std::exception& e) {
        return exit_code_for(e);
    }
}

int cmd_simulate(json config, const std::string& out_dir) {
    try {
        expect_keys(config, {"distribution", "n", "h", "scheme", "rule", "trials", "seed"},
                    {"deviation", "block_size"});
        auto dist = distribution_from_json(config.at("distribution"));
        double n = config.at("n").get<double>();
        int h = config.at("h").get<int>();
        BuiltScheme built = build_from_scheme_config(config.at("scheme"));
        if (built.table.h != h) {
            throw ConfigError("scheme horizon does not match the simulation h");
        }
        SelectionRule rule = selection_rule_from_string(config.at("rule").get<std::string>());
        long long trials = config.at("trials").get<long long>();
        uint64_t seed = config.at("seed").get<uint64_t>();
        long long block_size =
            config.contains("block_size") ? config.at("block_size").get<long long>() : 65536;

        std::optional<Deviation> deviation;
        if (config.contains("deviation")) {
            const json& dev = config.at("deviation");
            expect_keys(dev, {"level", "sybils", "holder"}, {"placement"});
            Deviation parsed;
            parsed.level = dev.at("level").get<int>();
            parsed.sybils = dev.at("sybils").get<int>();
            parsed.holder = dev.at("holder").get<bool>();
            if (dev.contains("placement")) {
                std::string placement = dev.at("placement").get<std::string>();
                if (placement == "agent") {
                    parsed.placement = AnswerPlacement::agent;
                } else if (placement == "last_sybil") {
                    parsed.placement = AnswerPlacement::last_sybil;
                } else {
                    throw ConfigError("placement must be agent or last_sybil");
                }
            }
            deviation = parsed;
        }

        BranchingProfile profile = make_profile(dist, n, h, false);
        EstimateResult result =
            estimate(dist, n, h, built.table, rule, deviation, trials, seed, block_size);

        double analytic_cost = expected_cost(built.table, profile.lambda);
        double second_moment = 0.0;
        for (int len = 1; len <= h; ++len) {
            double path = 0.0;
            for (int i = 1; i <= len; ++i) path += built.table.at(i, len - i);
            second_moment += profile.lambda[len] * path * path;
        }
        double cost_sigma =
            std::sqrt(std::max(second_moment - analytic_cost * analytic_cost, 0.0) /
                      static_cast<double>(trials));

        // The analytic lambda/cost values describe the honest SP process:
        // injected sybils shift real answers deeper, and RW may select past
        // the first answer. Outside that regime the deltas are report-only.
        bool honest_process =
            (!deviation || deviation->sybils == 0) && rule == SelectionRule::SP;
        json deltas;
        double max_delta = 0.0;
        {
            json level_deltas = json::array();
            for (int i = 1; i <= h; ++i) {
                double lam = profile.lambda[i];
                double sigma = std::sqrt(lam * (1.0 - lam) / static_cast<double>(trials));
                double diff = std::abs(result.level_freq[i] - lam);
                double z = diff == 0.0 ? 0.0 : diff / sigma;
                level_deltas.push_back(z);
                if (honest_process) max_delta = std::max(max_delta, z);
            }
            deltas["levels"] = level_deltas;
            double cost_diff = std::abs(result.mean_cost - analytic_cost);
            double cost_z = cost_diff == 0.0 ? 0.0 : cost_diff / cost_sigma;
            deltas["cost"] = cost_z;
            if (honest_process) max_delta = std::max(max_delta, cost_z);
        }

        // Exact analytic utility where one exists (chains always; trees only
        // honest play). Tree deviants have only an upper bound; reported, not
        // enforced.
        std::optional<double> analytic_utility;
        if (deviation) {
            const Deviation& dev = *deviation;
            double p = 1.0 / n;
            if (built.table.kind != TableKind::tree_dr && dist.is_chain()) {
                bool dr_kind = built.table.chain.has_value();
                double referral =
                    dr_kind ? chain_referral_payoff(built.table, dev.level,
                                                    dev.holder ? 0 : dev.sybils)
                                  .value
                            : chain_referral_payoff_exact(built.table, n, dev.level,
                                                          dev.holder ? 0 : dev.sybils);
                double holder_side =
                    dev.holder ? chain_holder_payoff(built.table, dev.level, dev.sybils)
                               : built.table.at(dev.level, 0);
                analytic_utility = std::pow(1.0 - p, dev.level) * referral +
                                   p * std::pow(1.0 - p, dev.level - 1) * holder_side;
            } else if (built.table.kind == TableKind::tree_dr && dev.sybils == 0 &&
                       built.d >= 1) {
                double own = 0.0;
                for (int j = dev.level + 1; j <= h; ++j) {
                    own += profile.lambda[j] * built.table.at(dev.level, j - dev.level);
                }
                own += profile.lambda[dev.level] * built.table.at(dev.level, 0);
                analytic_utility = own / std::pow(static_cast<double>(built.d), dev.level);
            }
            if (analytic_utility) {
                double diff = std::abs(result.mean_utility - *analytic_utility);
                double sigma = result.utility_ci / 2.5758293035489004;
                double z = diff == 0.0 ? 0.0 : (sigma > 0.0 ? diff / sigma : INFINITY);
                deltas["utility"] = z;
                max_delta = std::max(max_delta, z);
            }
        }

        bool enforced = trials >= 2;
        json summary{{"estimate", estimate_to_json(result)},
                     {"analytic",
                      {{"expected_cost", analytic_cost},
                       {"cost_sigma", cost_sigma},
                       {"lambda", std::vector<double>(profile.lambda.begin() + 1,
                                                      profile.lambda.end())}}},
                     {"deltas_sigma", deltas},
                     {"max_delta_sigma", max_delta},
                     {"honest_process", honest_process},
                     {"enforced", enforced}};
        if (analytic_utility) summary["analytic"]["expected_utility"] = *analytic_utility;

        auto dir = prepare_out_dir(out_dir);
        write_text_file((dir / "results.csv").string(), estimate_blocks_csv(result));
        write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
        std::cout << "mean_cost=" << format_real17(result.mean_cost)
                  << " analytic=" << format_real17(analytic_cost)
                  << " max_delta_sigma=" << format_real17(max_delta) << "\n";
        return (enforced && max_delta > 3.0) ? 1 : 0;
    } catch (const std::exception& e) {
        return exit_code_for(e);
    }
}

int cmd_cost_scaling(json config, const std::string& out_dir) {
    try {
        expect_keys(config, {"distribution", "n", "h_list"}, {"chain_variant"});
        auto dist = distribution_from_json(config.at("distribution"));
        double n = config.at("n").get<double>();
        auto h_list = config.at("h_list").get<std::vector<int>>();
        bool normalized = true;
        if (config.contains("chain_variant")) {
            std::string variant = config.at("chain_variant").get<std::string>();
            if (variant == "verbatim") {
                normalized = false;
            } else if (variant != "normalized") {
                throw ConfigError("chain_variant must be normalized or verbatim");
            }
        }
        auto rows = cost_scaling_report(dist, n, h_list, normalized);
        auto dir = prepare_out_dir(out_dir);
        write_text_file((dir / "cost_scaling.csv").string(), cost_scaling_csv(rows));
        bool all_inside = true;
        for (const auto& row : rows) {
            if (row.chain_mode && !row.inside_bracket) all_inside = false;
        }
        std::cout << "rows=" << rows.size()
                  << (rows.front().chain_mode
                          ? std::string(" bracket=") + (all_inside ? "inside" : "OUTSIDE")
                          : std::string())
                  << "\n";
        return all_inside ? 0 : 1;
    } catch (const std::exception& e) {
        return exit_code_for(e);
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Query incentive mechanism toolkit: direct-referral schemes, "
                 "sybil-proofness audits and Monte Carlo experiments"};
    app.require_subcommand(1);

    struct Args {
        std::string config;
        std::string out = ".";
        std::optional<uint64_t> seed;
        std::optional<long long> trials;
    };

    auto add_common = [](CLI::App* sub, Args& args, bool with_overrides) {
        sub->add_option("--config", args.config, "JSON config file")->required();
        sub->add_option("--out", args.out, "output directory");
        if (with_overrides) {
            sub->add_option("--seed", [&args](const CLI::results_t& r) {
                args.seed = std::stoull(r[0]);
                return true;
            }, "override the master seed");
            sub->add_option("--trials", [&args](const CLI::results_t& r) {
                args.trials = std::stoll(r[0]);
                return true;
            }, "override the trial count");
        }
    };

    Args analyze_args, build_args, audit_args, simulate_args, scaling_args;
    auto* analyze = app.add_subcommand("analyze-branching",
                                       "phi/lambda sequences, landmarks and checks");
    add_common(analyze, analyze_args, false);
    auto* build = app.add_subcommand("build-scheme", "construct a reward table");
    add_common(build, build_args, false);
    auto* audit = app.add_subcommand("audit", "sybil-proofness audit of a table");
    add_common(audit, audit_args, true);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo protocol simulation");
    add_common(simulate, simulate_args, true);
    auto* scaling = app.add_subcommand("cost-scaling", "expected cost across horizons");
    add_common(scaling, scaling_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) {
            return cmd_analyze_branching(read_json_file(analyze_args.config),
                                         analyze_args.out);
        }
        if (build->parsed()) {
            return cmd_build_scheme(read_json_file(build_args.config), build_args.out);
        }
        if (audit->parsed()) {
            json config = read_json_file(audit_args.config);
            if (audit_args.seed) config["seed"] = *audit_args.seed;
            if (audit_args.trials) config["trials"] = *audit_args.trials;
            return cmd_audit(std::move(config), audit_args.out);
        }
        if (simulate->parsed()) {
            json config = read_json_file(simulate_args.config);
            if (simulate_args.seed) config["seed"] = *simulate_args.seed;
            if (simulate_args.trials) config["trials"] = *simulate_args.trials;
            return cmd_simulate(std::move(config), simulate_args.out);
        }
        if (scaling->parsed()) {
            return cmd_cost_scaling(read_json_file(scaling_args.config), scaling_args.out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace qin::cli

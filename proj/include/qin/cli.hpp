#pragma once

#include <string>

#include <json.hpp>

namespace qin::cli {

// Each command validates its config (unknown keys are rejected), writes its
// report files under out_dir and returns the process exit code:
// 0 success, 1 property failure / violation, 2 configuration error.
int cmd_analyze_branching(nlohmann::json config, const std::string& out_dir);
int cmd_build_scheme(nlohmann::json config, const std::string& out_dir);
int cmd_audit(nlohmann::json config, const std::string& out_dir);
int cmd_simulate(nlohmann::json config, const std::string& out_dir);
int cmd_cost_scaling(nlohmann::json config, const std::string& out_dir);

int run(int argc, char** argv);

}  // namespace qin::cli

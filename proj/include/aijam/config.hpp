#pragma once

#include "aijam/agent.hpp"
#include "aijam/baselines.hpp"
#include "aijam/environment.hpp"
#include "aijam/json_util.hpp"
#include "aijam/offline_learning.hpp"
#include "aijam/perception.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace aijam {

enum class AgentKind { ain, ql, fh };

AgentKind parse_agent_kind(const std::string& s);
std::string to_string(AgentKind k);

struct AgentConfig {
    AgentKind kind = AgentKind::ain;
    std::string label;  // defaults to the kind name
    AinParams ain;
    QlParams ql;
};

struct TrainingConfig {
    std::uint64_t seed = 20240101;
    std::int64_t slots_per_prb = 0;  // 0: use the scenario's n_slots
    GngParams gng;
    int n_segments = 1;
    double smoothing = 1.0;
    double process_var = 1e-6;
    std::int64_t validation_slots = 20000;
    double threshold_quantile = 0.995;
    double threshold_margin = 2.0;

    void validate() const;
};

struct ScenarioConfig {
    std::string run_id = "run";
    WorldConfig world;
    std::int64_t n_slots = 2000;
    AgentConfig agent;
    std::vector<std::uint64_t> seeds{1};
    std::string model_path;
    PerceptionConfig filter;
    TrainingConfig training;
    int convergence_window = 100;
    double convergence_threshold = 0.02;
    bool write_jsonl = true;

    void validate() const;
};

// Missing keys take the defaults above; unknown keys throw ConfigError.
ScenarioConfig parse_scenario(const Json& j, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);
Json scenario_to_json(const ScenarioConfig& cfg);

// Everything except the agent, run id and model path.
Json environment_json(const ScenarioConfig& cfg);

}  // namespace aijam

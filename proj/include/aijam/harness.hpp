#pragma once

#include "aijam/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace aijam {

struct MetricsRow {
    std::int64_t slot = 0;
    Hypothesis hypothesis = Hypothesis::H0;
    double reward = 0.0;
    double abnormality = 0.0;  // superstate-level indicator
    double sinr_db = 0.0;
    double cum_reward = 0.0;
    double cum_abnormality = 0.0;
    double cum_sinr = 0.0;  // linear
    int chosen_prb = 0;
    int jammer_prb = 0;
};

inline constexpr const char* kMetricsHeader =
    "slot,hypothesis,reward,abnormality,sinr_db,cum_reward,cum_abnormality,cum_sinr,chosen_prb,jammer_prb";

struct EpisodeResult {
    std::uint64_t seed = 0;
    std::vector<MetricsRow> rows;
    std::vector<int> jammer_sequence;
    std::int64_t convergence_slot = 0;
    int collisions = 0;
    int abnormal_flags = 0;
    int degenerate_slots = 0;
    std::optional<BeliefTables> final_tables;  // AIn only

    double final_cum_reward() const { return rows.empty() ? 0.0 : rows.back().cum_reward; }
    double final_cum_abnormality() const { return rows.empty() ? 0.0 : rows.back().cum_abnormality; }
    double final_cum_sinr() const { return rows.empty() ? 0.0 : rows.back().cum_sinr; }
    double collision_rate(std::int64_t last_n) const;
};

std::unique_ptr<Policy> make_policy(const AgentConfig& a, int n_prbs, Rng& rng);

// Model may be null for agents that do not need perception; the abnormality
// column is then zero.
EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t seed, const LearnedModel* model,
                          std::ostream* jsonl = nullptr);

// First slot from which the trailing-window collision rate stays below the
// threshold through the end; n_slots if the final window violates it.
std::int64_t convergence_slot(std::span<const Hypothesis> hyps, int window, double threshold);

std::string format_double(double x);
void write_metrics_csv(std::span<const MetricsRow> rows, std::ostream& out);
std::string metrics_csv(std::span<const MetricsRow> rows);

struct RunSummary {
    std::string run_id;
    std::string agent;
    std::vector<EpisodeResult> episodes;
};

Json summary_json(const RunSummary& s);

// Loads the model when required, then runs every seed (jobs > 1 runs seeds
// concurrently). Writes <out>/<run_id>/seed<k>.csv, .jsonl and summary.json
// when out_dir is non-empty.
RunSummary run(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, int jobs = 1,
               const LearnedModel* model = nullptr);

struct TrainReport {
    std::vector<double> clean_flag_rate;  // per PRB on the validation run
    double overall_flag_rate = 0.0;
};

LearnedModel train(const ScenarioConfig& cfg, TrainReport* report = nullptr);

struct BenchResult {
    std::vector<RunSummary> runs;
};

BenchResult bench(const std::vector<ScenarioConfig>& configs, const std::filesystem::path& out_dir,
                  int jobs = 1, const LearnedModel* model = nullptr);

void write_bench_csv(const BenchResult& b, std::ostream& out);
void write_bench_seeds_csv(const BenchResult& b, std::ostream& out);

}  // namespace aijam

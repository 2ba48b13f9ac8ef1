#pragma once

#include "aijam/environment.hpp"
#include "aijam/signal.hpp"
#include "aijam/types.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace aijam {

struct GeneralizedErrorSample {
    GeneralizedState predicted;
    Vec4 error;
};

// predictions[t] = A * H^-1 z_{t-1}; predictions[0] = H^-1 z_0.
std::vector<GeneralizedState> null_force_predictions(std::span<const Vec4> observations,
                                                     const GdbnMatrices& m);

// error_t = H^-1 (z_t - H x_t)
std::vector<GeneralizedErrorSample> generalized_errors(std::span<const Vec4> observations,
                                                       std::span<const GeneralizedState> predictions,
                                                       const Mat4& H);

struct GngParams {
    int max_nodes = 10;
    int insertion_interval = 100;
    double eps_winner = 0.2;
    double eps_neighbor = 0.006;
    int max_edge_age = 50;
    double alpha_split = 0.5;
    double error_decay = 0.995;
    int epochs = 3;

    void validate() const;
};

struct Superstate {
    int id = 1;  // dense 1..M within a PRB
    PrbIndex prb;
    Vec4 mean = Vec4::Zero();
    Mat4 cov = Mat4::Identity();
};

inline constexpr double kClusterCovJitter = 1e-6;

std::vector<Superstate> gng_fit(std::span<const Vec4> samples, const GngParams& params,
                                PrbIndex prb, Rng& rng);

// Nearest mean; returns superstate ids.
std::vector<int> assign_superstates(std::span<const Vec4> samples,
                                    std::span<const Superstate> superstates);

int nearest_superstate(const Vec4& x, std::span<const Superstate> superstates);

struct SuperstateTransitions {
    int n_states = 0;
    std::vector<MatX> segments;

    const MatX& segment(int tau) const { return segments.at(tau); }
    int segment_for(std::int64_t t, std::int64_t horizon) const;
    void validate() const;
};

// labels are superstate ids in [1, n_states]
SuperstateTransitions estimate_transitions(std::span<const int> labels, int n_states,
                                           int n_segments, double smoothing);

struct PrbModel {
    PrbIndex prb;
    std::vector<Superstate> superstates;
    SuperstateTransitions transitions;
    double th_skl = 0.0;
    double th_bhatt = 0.0;

    int n_states() const { return static_cast<int>(superstates.size()); }
};

PrbModel learn_prb_model(std::span<const Vec4> observations, const GdbnMatrices& m,
                         const GngParams& gng, int n_segments, double smoothing, PrbIndex prb,
                         Rng& rng);

struct LearnedModel {
    static constexpr int kVersion = 1;

    int version = kVersion;
    int n_prbs = 0;
    GdbnMatrices matrices;
    std::vector<PrbModel> prbs;
    double snr_db = 0.0;
    double threshold_quantile = 0.0;

    const PrbModel& prb(PrbIndex p) const { return prbs.at(p.index()); }
    void validate() const;
};

void save_model(const LearnedModel& model, const std::filesystem::path& path);
LearnedModel load_model(const std::filesystem::path& path);
std::string model_to_json(const LearnedModel& model);
LearnedModel model_from_json(const std::string& text);

}  // namespace aijam

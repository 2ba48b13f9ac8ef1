#pragma once

#include "aijam/abnormality.hpp"
#include "aijam/environment.hpp"
#include "aijam/perception.hpp"
#include "aijam/types.hpp"

#include <optional>
#include <string>

namespace aijam {

struct BeliefTables {
    MatX p_uav;  // UAV PRB transitions
    MatX p_jam;  // jammer PRB transitions
    MatX ain;    // action probabilities given the previous PRB

    int n() const { return static_cast<int>(ain.rows()); }
};

BeliefTables init_tables(int n);

// Clip to [floor, 1] and renormalize one row.
void clip_renormalize(MatX& table, int row, double floor = 0.0);

// Predicted probability that the jammer sits on each PRB next slot.
VecX jammer_occupancy(const BeliefTables& t, const VecX& jammer_belief);

PrbIndex select_action(const BeliefTables& t, PrbIndex prev_state, const VecX& occupancy, Rng& rng);

// Largest gamma keeping the perturbed row inside [0,1].
double gamma_headroom(const VecX& row, PrbIndex chosen);

VecX lambda_action(const BeliefTables& t, PrbIndex from_state, PrbIndex chosen, double gamma_star,
                   bool abnormal);

struct ActionError {
    PrbIndex anchor;
    VecX delta;
};

ActionError action_error(const BeliefTables& t, PrbIndex from_state, PrbIndex chosen,
                         const VecX& lambda);

// jammer_rows: nonnegative weight per p_jam row receiving the correction.
void apply_updates(BeliefTables& t, const ActionError& action_error,
                   const GeneralizedErrorDiscrete& superstate_error, PrbIndex chosen,
                   PrbIndex from_state, PrbIndex to_state, const VecX& jammer_rows,
                   double ain_floor = 1e-4);

class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual PrbIndex select(Rng& rng) = 0;
    virtual void observe(const StepOutcome& outcome, const PerceptionResult* perception) = 0;
    virtual bool needs_perception() const { return false; }
};

enum class JammerTracking {
    last_collision,  // p_jam row of the last collision PRB; marginal before any collision
    belief,          // belief propagated through p_jam since the last collision
};

JammerTracking parse_jammer_tracking(const std::string& s);
std::string to_string(JammerTracking t);

struct AinParams {
    double kappa = 0.1;
    double ain_floor = 1e-4;
    JammerTracking tracking = JammerTracking::belief;
    // update only on the first flagged slot of a run of flags
    bool onset_only = true;

    void validate() const;
};

class ActiveInferenceAgent final : public Policy {
public:
    ActiveInferenceAgent(int n_prbs, AinParams params, Rng& rng);

    std::string name() const override { return "ain"; }
    PrbIndex select(Rng& rng) override;
    void observe(const StepOutcome& outcome, const PerceptionResult* perception) override;
    bool needs_perception() const override { return true; }

    const BeliefTables& tables() const { return tables_; }
    const VecX& jammer_belief() const { return belief_; }

private:
    VecX occupancy() const;

    int n_;
    AinParams params_;
    BeliefTables tables_;
    VecX belief_;
    std::optional<PrbIndex> last_collision_;
    PrbIndex prev_;
    bool prev_flag_ = false;
};

}  // namespace aijam

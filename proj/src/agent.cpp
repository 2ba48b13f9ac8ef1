#include "aijam/agent.hpp"

#include <algorithm>
#include <cmath>

namespace aijam {

BeliefTables init_tables(int n) {
    if (n < 2) throw ConfigError("init_tables: N must be >= 2");
    const MatX u = MatX::Constant(n, n, 1.0 / n);
    return {u, u, u};
}

void clip_renormalize(MatX& table, int row, double floor) {
    auto r = table.row(row);
    for (Eigen::Index j = 0; j < r.size(); ++j) {
        double v = r(j);
        if (!std::isfinite(v)) v = 0.0;
        r(j) = std::clamp(v, floor, 1.0);
    }
    const double s = r.sum();
    if (s > 0.0) {
        r /= s;
    } else {
        r.setConstant(1.0 / static_cast<double>(r.size()));
    }
}

VecX jammer_occupancy(const BeliefTables& t, const VecX& jammer_belief) {
    return (jammer_belief.transpose() * t.p_jam).transpose();
}

PrbIndex select_action(const BeliefTables& t, PrbIndex prev_state, const VecX& occupancy, Rng& rng) {
    const int n = t.n();
    const VecX score = t.ain.row(prev_state.index()).transpose().cwiseProduct(
        (VecX::Ones(n) - occupancy).cwiseMax(0.0));
    const double best = score.maxCoeff();
    std::vector<int> ties;
    for (int i = 0; i < n; ++i)
        if (score(i) >= best - 1e-12 * std::abs(best)) ties.push_back(i);
    const int pick = ties.size() == 1 ? ties[0] : ties[uniform_int(rng, 0, static_cast<int>(ties.size()) - 1)];
    return PrbIndex::from_zero_based(pick);
}

double gamma_headroom(const VecX& row, PrbIndex chosen) {
    const int c = chosen.index();
    const auto n = row.size();
    double max_other = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (i != c) max_other = std::max(max_other, row(i));
    return std::max(0.0, std::min(row(c), static_cast<double>(n - 1) * (1.0 - max_other)));
}

VecX lambda_action(const BeliefTables& t, PrbIndex from_state, PrbIndex chosen, double gamma_star,
                   bool abnormal) {
    VecX lam = t.p_uav.row(from_state.index()).transpose();
    if (!abnormal || gamma_star <= 0.0) return lam;
    const auto n = lam.size();
    const double others = gamma_star / static_cast<double>(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) lam(i) += (i == chosen.index()) ? -gamma_star : others;
    if (lam.minCoeff() < 0.0 || lam.maxCoeff() > 1.0) {
        warn("lambda_action: entries left [0,1]; clipped");
        MatX tmp = lam.transpose();
        clip_renormalize(tmp, 0);
        lam = tmp.row(0).transpose();
    }
    return lam;
}

ActionError action_error(const BeliefTables& t, PrbIndex from_state, PrbIndex chosen,
                         const VecX& lambda) {
    return {chosen, lambda - t.ain.row(from_state.index()).transpose()};
}

void apply_updates(BeliefTables& t, const ActionError& ae, const GeneralizedErrorDiscrete& se,
                   PrbIndex /*chosen*/, PrbIndex from_state, PrbIndex to_state,
                   const VecX& jammer_rows, double ain_floor) {
    const bool action_force = ae.delta.size() > 0 && ae.delta.cwiseAbs().maxCoeff() > 0.0;
    if (action_force) {
        // jammer model moves against the action error
        for (int r = 0; r < t.n(); ++r) {
            const double w = r < jammer_rows.size() ? jammer_rows(r) : 0.0;
            if (!(w > 0.0)) continue;
            t.p_jam.row(r) -= w * ae.delta.transpose();
            clip_renormalize(t.p_jam, r);
        }
        t.ain.row(from_state.index()) += ae.delta.transpose();
        clip_renormalize(t.ain, from_state.index(), ain_floor);
    }
    if (se.delta.size() > 0) {
        const double push = se.delta(se.anchor - 1);
        if (push != 0.0) {
            t.p_uav(from_state.index(), to_state.index()) += push;
            clip_renormalize(t.p_uav, from_state.index());
        }
    }
}

JammerTracking parse_jammer_tracking(const std::string& s) {
    if (s == "last_collision") return JammerTracking::last_collision;
    if (s == "belief") return JammerTracking::belief;
    throw ConfigError("unknown jammer tracking '" + s + "'");
}

std::string to_string(JammerTracking t) {
    return t == JammerTracking::belief ? "belief" : "last_collision";
}

void AinParams::validate() const {
    if (!(kappa >= 0.0)) throw ConfigError("ain: kappa must be >= 0");
    if (!(ain_floor >= 0.0 && ain_floor < 1.0)) throw ConfigError("ain: floor outside [0,1)");
}

ActiveInferenceAgent::ActiveInferenceAgent(int n_prbs, AinParams params, Rng& rng)
    : n_(n_prbs), params_(params), tables_(init_tables(n_prbs)),
      belief_(VecX::Constant(n_prbs, 1.0 / n_prbs)),
      prev_(PrbIndex(uniform_int(rng, 1, n_prbs))) {
    params_.validate();
}

VecX ActiveInferenceAgent::occupancy() const {
    if (params_.tracking == JammerTracking::last_collision) {
        if (!last_collision_) return tables_.p_jam.colwise().mean().transpose();
        return tables_.p_jam.row(last_collision_->index()).transpose();
    }
    return jammer_occupancy(tables_, belief_);
}

PrbIndex ActiveInferenceAgent::select(Rng& rng) {
    return select_action(tables_, prev_, occupancy(), rng);
}

void ActiveInferenceAgent::observe(const StepOutcome& outcome, const PerceptionResult* perception) {
    if (!perception) throw ModelError("ain agent: perception result required");
    const PrbIndex chosen = outcome.uav_prb;
    const VecX prior_belief = belief_;
    const bool flagged = perception->signal.is_abnormal;
    const bool fresh = !(params_.onset_only && prev_flag_);
    prev_flag_ = flagged;
    if (flagged && fresh) {
        const VecX prior_row = tables_.p_uav.row(prev_.index()).transpose();
        const double gamma = std::min(gamma_headroom(prior_row, chosen),
                                      params_.kappa * perception->signal.skl);
        const VecX lam = lambda_action(tables_, prev_, chosen, gamma, true);
        const ActionError ae = action_error(tables_, prev_, chosen, lam);

        VecX rows = VecX::Zero(n_);
        if (params_.tracking == JammerTracking::belief) {
            rows = prior_belief / prior_belief.maxCoeff();
        } else {
            rows(chosen.index()) = 1.0;
        }
        apply_updates(tables_, ae, perception->superstate_error, chosen, prev_, chosen, rows,
                      params_.ain_floor);
        belief_ = VecX::Zero(n_);
        belief_(chosen.index()) = 1.0;
        last_collision_ = chosen;
    } else {
        belief_ = jammer_occupancy(tables_, belief_);
    }
    prev_ = chosen;
}

}  // namespace aijam

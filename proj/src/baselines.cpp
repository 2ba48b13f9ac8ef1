#include "aijam/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace aijam {

PrbIndex fh_select(int n_prbs, Rng& rng) {
    if (n_prbs < 1) throw ConfigError("fh_select: N must be >= 1");
    return PrbIndex(uniform_int(rng, 1, n_prbs));
}

double reward_for(Hypothesis h) { return h == Hypothesis::H0 ? 1.0 : -1.0; }

double EpsilonSchedule::at(std::int64_t t) const {
    return std::max(floor, std::pow(decay, static_cast<double>(t)));
}

QTable QTable::zeros(int n, double alpha_lr, double gamma_disc) {
    QTable q;
    q.q = MatX::Zero(n, n);
    q.alpha_lr = alpha_lr;
    q.gamma_disc = gamma_disc;
    return q;
}

void QTable::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("qtable: epsilon outside [0,1]");
    if (!q.allFinite()) throw ConfigError("qtable: non-finite entries");
}

PrbIndex q_select(const QTable& qt, PrbIndex s, Rng& rng) {
    const int n = static_cast<int>(qt.q.cols());
    // draw both numbers every call so streams line up across epsilon values
    const double u = uniform01(rng);
    const auto k = rng();
    if (u < qt.epsilon) return PrbIndex(static_cast<int>(k % static_cast<std::uint64_t>(n)) + 1);
    const auto row = qt.q.row(s.index());
    const double best = row.maxCoeff();
    std::vector<int> ties;
    for (int a = 0; a < n; ++a)
        if (row(a) == best) ties.push_back(a);
    return PrbIndex::from_zero_based(ties[k % ties.size()]);
}

void q_learn(QTable& qt, PrbIndex s, PrbIndex a, double r, PrbIndex s_next) {
    const double target = r + qt.gamma_disc * qt.q.row(s_next.index()).maxCoeff();
    double& q = qt.q(s.index(), a.index());
    q += qt.alpha_lr * (target - q);
}

void QlParams::validate() const {
    if (!(alpha_lr > 0.0 && alpha_lr <= 1.0)) throw ConfigError("ql: alpha_lr outside (0,1]");
    if (!(gamma_disc >= 0.0 && gamma_disc < 1.0)) throw ConfigError("ql: gamma_disc outside [0,1)");
    if (!(epsilon.decay > 0.0 && epsilon.decay <= 1.0) ||
        !(epsilon.floor >= 0.0 && epsilon.floor <= 1.0))
        throw ConfigError("ql: epsilon schedule outside [0,1]");
}

QLearningPolicy::QLearningPolicy(int n_prbs, QlParams params, Rng& rng)
    : params_(params), table_(QTable::zeros(n_prbs, params.alpha_lr, params.gamma_disc)),
      state_(PrbIndex(uniform_int(rng, 1, n_prbs))) {
    params_.validate();
}

PrbIndex QLearningPolicy::select(Rng& rng) {
    table_.epsilon = params_.epsilon.at(t_);
    return q_select(table_, state_, rng);
}

void QLearningPolicy::observe(const StepOutcome& outcome, const PerceptionResult*) {
    q_learn(table_, state_, outcome.uav_prb, reward_for(outcome.hypothesis), outcome.uav_prb);
    state_ = outcome.uav_prb;
    ++t_;
}

}  // namespace aijam

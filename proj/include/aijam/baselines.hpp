#pragma once

#include "aijam/agent.hpp"
#include "aijam/environment.hpp"

namespace aijam {

PrbIndex fh_select(int n_prbs, Rng& rng);

double reward_for(Hypothesis h);

struct EpsilonSchedule {
    double decay = 0.995;
    double floor = 0.01;

    double at(std::int64_t t) const;
};

struct QTable {
    MatX q;
    double epsilon = 1.0;
    double alpha_lr = 0.1;
    double gamma_disc = 0.9;

    static QTable zeros(int n, double alpha_lr, double gamma_disc);
    void validate() const;
};

// epsilon-greedy over row s, uniform tie-breaking among greedy actions
PrbIndex q_select(const QTable& qt, PrbIndex s, Rng& rng);
void q_learn(QTable& qt, PrbIndex s, PrbIndex a, double r, PrbIndex s_next);

class FrequencyHoppingPolicy final : public Policy {
public:
    explicit FrequencyHoppingPolicy(int n_prbs) : n_(n_prbs) {}

    std::string name() const override { return "fh"; }
    PrbIndex select(Rng& rng) override { return fh_select(n_, rng); }
    void observe(const StepOutcome&, const PerceptionResult*) override {}

private:
    int n_;
};

struct QlParams {
    double alpha_lr = 0.1;
    double gamma_disc = 0.9;
    EpsilonSchedule epsilon;

    void validate() const;
};

// State is the agent's own previous PRB.
class QLearningPolicy final : public Policy {
public:
    QLearningPolicy(int n_prbs, QlParams params, Rng& rng);

    std::string name() const override { return "ql"; }
    PrbIndex select(Rng& rng) override;
    void observe(const StepOutcome& outcome, const PerceptionResult*) override;

    const QTable& table() const { return table_; }

private:
    QlParams params_;
    QTable table_;
    PrbIndex state_;
    std::int64_t t_ = 0;
};

}  // namespace aijam

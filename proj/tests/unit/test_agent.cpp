#include "aijam/agent.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

using namespace aijam;

namespace {

PerceptionResult perception(bool abnormal, double skl = 2.0) {
    PerceptionResult p;
    p.signal.skl = skl;
    p.signal.bhatt = abnormal ? 20.0 : 1.0;
    p.signal.is_abnormal = abnormal;
    p.superstate_error.anchor = 1;
    p.superstate_error.delta = VecX::Zero(2);
    p.superstate_error.delta << -0.1, 0.1;
    return p;
}

StepOutcome outcome(PrbIndex prb, bool jammed) {
    StepOutcome o;
    o.uav_prb = prb;
    o.hypothesis = jammed ? Hypothesis::H1 : Hypothesis::H0;
    return o;
}

}  // namespace

TEST_CASE("table initialization") {
    const BeliefTables t = init_tables(50);
    for (const MatX* m : {&t.p_uav, &t.p_jam, &t.ain}) {
        CHECK((m->array() == 0.02).all());
        for (int r = 0; r < 50; ++r) CHECK(std::abs(m->row(r).sum() - 1.0) < 1e-12);
    }
    CHECK((init_tables(2).ain.array() == 0.5).all());
    CHECK_THROWS_AS(init_tables(1), ConfigError);
}

TEST_CASE("uniform tables select uniformly") {
    const BeliefTables t = init_tables(50);
    const VecX occ = VecX::Constant(50, 0.02);
    Rng rng = make_rng(1, 100);
    std::vector<int> counts(50, 0);
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[select_action(t, PrbIndex(3), occ, rng).index()];
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / 50.0) * (c - n / 50.0) / (n / 50.0);
    CHECK(chi2 < 74.92);  // 1% critical value, 49 degrees of freedom
}

TEST_CASE("selection follows the action row and avoids the jammer") {
    BeliefTables t = init_tables(8);
    t.ain.row(2).setZero();
    t.ain(2, 4) = 1.0;
    Rng rng = make_rng(2, 100);
    CHECK(select_action(t, PrbIndex(3), VecX::Constant(8, 0.125), rng) == PrbIndex(5));

    BeliefTables u = init_tables(8);
    VecX row = VecX::Constant(8, 0.1 / 7.0);
    row(1) = 0.9;
    u.p_jam.row(0) = row.transpose();
    VecX belief = VecX::Zero(8);
    belief(0) = 1.0;
    const VecX occ = jammer_occupancy(u, belief);
    for (int i = 0; i < 1000; ++i) CHECK(select_action(u, PrbIndex(4), occ, rng) != PrbIndex(2));
}

TEST_CASE("selection is invariant to rescaling the score") {
    Rng src = make_rng(3, 100);
    for (int trial = 0; trial < 200; ++trial) {
        BeliefTables t = init_tables(6);
        for (int j = 0; j < 6; ++j) t.ain(0, j) = uniform01(src);
        VecX occ(6);
        for (int j = 0; j < 6; ++j) occ(j) = 0.5 * uniform01(src);
        BeliefTables s = t;
        s.ain.row(0) *= 7.5;
        Rng a = make_rng(trial, 1), b = make_rng(trial, 1);
        CHECK(select_action(t, PrbIndex(1), occ, a) == select_action(s, PrbIndex(1), occ, b));
    }
}

TEST_CASE("lambda(a)") {
    BeliefTables t = init_tables(4);
    const VecX same = lambda_action(t, PrbIndex(1), PrbIndex(2), 0.1, false);
    CHECK(same == t.p_uav.row(0).transpose());
    const VecX lam = lambda_action(t, PrbIndex(1), PrbIndex(2), 0.1, true);
    CHECK(lam(1) == doctest::Approx(0.15));
    CHECK(lam(0) == doctest::Approx(0.25 + 0.1 / 3.0));
    CHECK(lam(2) == doctest::Approx(0.2833333333333333));
    CHECK(std::abs(lam.sum() - 1.0) < 1e-12);

    const double h = gamma_headroom(t.p_uav.row(0).transpose(), PrbIndex(2));
    CHECK(h == doctest::Approx(0.25));
    const VecX edge = lambda_action(t, PrbIndex(1), PrbIndex(2), h, true);
    CHECK(edge.minCoeff() >= 0.0);
    CHECK(edge.maxCoeff() <= 1.0);
}

TEST_CASE("apply_updates: zero errors leave tables unchanged") {
    BeliefTables t = init_tables(5);
    const BeliefTables before = t;
    const ActionError ae{PrbIndex(2), VecX::Zero(5)};
    const GeneralizedErrorDiscrete se{1, VecX::Zero(3)};
    apply_updates(t, ae, se, PrbIndex(2), PrbIndex(1), PrbIndex(2), VecX::Ones(5));
    CHECK(t.p_uav == before.p_uav);
    CHECK(t.p_jam == before.p_jam);
    CHECK(t.ain == before.ain);
}

TEST_CASE("apply_updates: collision lowers the chosen action") {
    BeliefTables t = init_tables(5);
    const PrbIndex from(1), c(3);
    const VecX lam = lambda_action(t, from, c, 0.05, true);
    const ActionError ae = action_error(t, from, c, lam);
    CHECK(std::abs(ae.delta.sum()) < 1e-12);
    VecX rows = VecX::Zero(5);
    rows(c.index()) = 1.0;
    const double before = t.ain(from.index(), c.index());
    apply_updates(t, ae, GeneralizedErrorDiscrete{1, VecX::Zero(2)}, c, from, c, rows);
    CHECK(t.ain(from.index(), c.index()) < before);
    CHECK(t.p_jam(c.index(), c.index()) > 0.2);  // the jammer is believed to stay
    oracle::SimplexFuzzResult r;
    oracle::track_table(t.ain, r);
    oracle::track_table(t.p_jam, r);
    oracle::track_table(t.p_uav, r);
    CHECK(r.worst_row_sum_error < 1e-12);
}

TEST_CASE("apply_updates: repeated collisions drive the action to the floor") {
    BeliefTables t = init_tables(3);
    const PrbIndex from(1), c(2);
    VecX rows = VecX::Zero(3);
    rows(c.index()) = 1.0;
    VecX pi(2), lambda(2);
    pi << 0.6, 0.4;
    lambda << 0.55, 0.45;  // the anchor loses mass on every jammed slot
    const GeneralizedErrorDiscrete se = discrete_generalized_error(pi, lambda, 1);
    double prev = t.ain(0, 1);
    bool reached = false;
    for (int k = 0; k < 200; ++k) {
        const double g = std::min(gamma_headroom(t.p_uav.row(0).transpose(), c), 0.05);
        const VecX lam = lambda_action(t, from, c, g, true);
        apply_updates(t, action_error(t, from, c, lam), se, c, from, c, rows, 1e-4);
        const double now = t.ain(0, 1);
        CHECK(now <= prev + 1e-15);
        if (!reached) CHECK(now < prev);
        prev = now;
        if (now <= 1.01e-4) reached = true;
    }
    CHECK(reached);
}

TEST_CASE("simplex preservation under random updates") {
    const auto r = oracle::simplex_fuzz(5000, 9);
    CHECK(r.calls == 10000);
    CHECK(r.worst_row_sum_error <= 1e-9);
    CHECK(r.min_entry >= 0.0);
    CHECK(r.max_entry <= 1.0);
}

TEST_CASE("clip and renormalize") {
    MatX m(1, 3);
    m << -0.5, 2.0, std::nan("");
    clip_renormalize(m, 0);
    CHECK(m(0, 0) == 0.0);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(0, 2) == 0.0);
    MatX z = MatX::Zero(1, 4);
    clip_renormalize(z, 0);
    CHECK((z.array() == 0.25).all());
    MatX f(1, 2);
    f << 0.0, 1.0;
    clip_renormalize(f, 0, 1e-4);
    CHECK(f(0, 0) == doctest::Approx(1e-4 / (1.0 + 1e-4)));
}

TEST_CASE("agent: surprise-free slots never touch the tables") {
    Rng rng = make_rng(4, 100);
    ActiveInferenceAgent agent(10, AinParams{}, rng);
    const BeliefTables init = agent.tables();
    for (int i = 0; i < 500; ++i) {
        const PrbIndex a = agent.select(rng);
        const PerceptionResult p = perception(false);
        agent.observe(outcome(a, false), &p);
    }
    CHECK(agent.tables().ain == init.ain);
    CHECK(agent.tables().p_jam == init.p_jam);
    CHECK(agent.tables().p_uav == init.p_uav);
    CHECK_THROWS_AS(agent.observe(outcome(PrbIndex(1), false), nullptr), ModelError);
}

TEST_CASE("agent: a flagged slot updates, a trailing flag does not") {
    for (bool onset_only : {true, false}) {
        Rng rng = make_rng(5, 100);
        AinParams params;
        params.onset_only = onset_only;
        ActiveInferenceAgent agent(10, params, rng);
        const PerceptionResult hit = perception(true);
        agent.observe(outcome(PrbIndex(4), true), &hit);
        const BeliefTables after_first = agent.tables();
        CHECK(after_first.ain != init_tables(10).ain);
        CHECK(agent.jammer_belief()(3) == 1.0);
        agent.observe(outcome(PrbIndex(7), false), &hit);
        if (onset_only) {
            CHECK(agent.tables().ain == after_first.ain);
        } else {
            CHECK(agent.tables().ain != after_first.ain);
        }
    }
}

TEST_CASE("agent: learns to avoid a jammed PRB") {
    for (JammerTracking tr : {JammerTracking::belief, JammerTracking::last_collision}) {
        Rng rng = make_rng(6, 100);
        AinParams params;
        params.tracking = tr;
        ActiveInferenceAgent agent(5, params, rng);
        const PerceptionResult hit = perception(true, 3.0);
        const PerceptionResult calm = perception(false);
        // PRB 2 is always jammed
        int late_hits = 0;
        for (int i = 0; i < 2000; ++i) {
            const PrbIndex a = agent.select(rng);
            const bool jammed = a == PrbIndex(2);
            agent.observe(outcome(a, jammed), jammed ? &hit : &calm);
            if (i >= 1000) late_hits += jammed;
        }
        CHECK(late_hits < 50);  // uniform hopping would give ~200
    }
    CHECK(parse_jammer_tracking("last_collision") == JammerTracking::last_collision);
    CHECK_THROWS_AS(parse_jammer_tracking("psychic"), ConfigError);
}

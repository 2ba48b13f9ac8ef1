#include "aijam/baselines.hpp"
#include "aijam/config.hpp"
#include "aijam/environment.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace aijam;

namespace {

WorldConfig default_world() { return parse_scenario(Json::object()).world; }

bool same(const StepOutcome& a, const StepOutcome& b) {
    return a.slot == b.slot && a.uav_prb == b.uav_prb && a.observation == b.observation &&
           a.hypothesis == b.hypothesis && a.sinr == b.sinr && a.jammer_prb_truth == b.jammer_prb_truth &&
           a.jammer_transmitted == b.jammer_transmitted;
}

}  // namespace

TEST_CASE("prb index bounds") {
    CHECK(PrbIndex::checked(50, 50).value() == 50);
    CHECK_THROWS_AS(PrbIndex::checked(0, 50), ConfigError);
    CHECK_THROWS_AS(PrbIndex::checked(51, 50), ConfigError);
    CHECK(PrbIndex::from_zero_based(6).value() == 7);
    CHECK(PrbIndex(7).index() == 6);
}

TEST_CASE("sweep jammer") {
    JammerStrategy s;
    s.kind = JammerKind::sweep;
    Rng rng = make_rng(1, 2);
    CHECK(jammer_next(s, PrbIndex(50), 50, rng).prb == PrbIndex(1));
    CHECK(jammer_next(s, PrbIndex(7), 50, rng).prb == PrbIndex(8));
}

TEST_CASE("hit rate and jammer draws") {
    for (JammerKind kind : {JammerKind::constant, JammerKind::sweep, JammerKind::random}) {
        JammerStrategy s;
        s.kind = kind;
        s.constant_set = {PrbIndex(4), PrbIndex(9), PrbIndex(30)};
        Rng rng = make_rng(2, 2);
        int tx = 0;
        std::set<int> seen;
        PrbIndex cur(1);
        for (int i = 0; i < 10000; ++i) {
            const JammerMove m = jammer_next(s, cur, 50, rng);
            tx += m.transmitted;
            seen.insert(m.prb.value());
            cur = m.prb;
        }
        CHECK(tx / 10000.0 == doctest::Approx(0.4).epsilon(0.05));
        if (kind == JammerKind::constant) CHECK(seen == std::set<int>{4, 9, 30});
        if (kind != JammerKind::constant) CHECK(seen.size() == 50);
    }
    // every strategy consumes the same draws
    Rng a = make_rng(3, 2), b = make_rng(3, 2);
    JammerStrategy sw, rnd;
    sw.kind = JammerKind::sweep;
    rnd.kind = JammerKind::random;
    for (int i = 0; i < 100; ++i) {
        jammer_next(sw, PrbIndex(1), 50, a);
        jammer_next(rnd, PrbIndex(1), 50, b);
    }
    CHECK(a() == b());
}

TEST_CASE("uav trajectory") {
    Trajectory tr;
    tr.waypoints = {{0.0, 0.0}, {100.0, 0.0}};
    CHECK(uav_position(0.0, tr) == Vec3(0.0, 0.0, 60.0));
    const double dt = 1e-3;
    CHECK((uav_position(11 * dt, tr) - uav_position(10 * dt, tr)).norm() == doctest::Approx(4.8 * dt));
    CHECK(uav_position(1e6, tr) == Vec3(100.0, 0.0, 60.0));
    const WorldConfig w = default_world();
    for (double t : {0.0, 3.0, 50.0, 1e4}) CHECK(uav_position(t, w.trajectory)(2) == 60.0);
    CHECK(w.timing.slot_duration_s() * w.timing.n_frames * w.timing.slots_per_frame == doctest::Approx(2.0));
}

TEST_CASE("collision resolution") {
    WorldConfig cfg = default_world();
    cfg.jammer.kind = JammerKind::random;
    World w(cfg, 5);
    int h1 = 0;
    for (int i = 0; i < 3000; ++i) {
        const PrbIndex a(1 + i % cfg.n_prbs);
        const StepOutcome o = w.step(a);
        const bool hit = o.jammer_transmitted && o.jammer_prb_truth == a;
        CHECK((o.hypothesis == Hypothesis::H1) == hit);
        h1 += hit;
    }
    CHECK(h1 > 0);
}

TEST_CASE("H1 observation carries the jammer term") {
    WorldConfig cfg = default_world();
    cfg.jammer.kind = JammerKind::sweep;
    cfg.jammer.hit_rate = 1.0;
    cfg.snr_db = 200.0;  // effectively noiseless
    World w(cfg, 6);
    int checked_h0 = 0, checked_h1 = 0;
    for (int i = 0; i < 400; ++i) {
        // follow the jammer half the time
        const StepOutcome peek = w.step(PrbIndex(1));
        const PrbIndex next(peek.jammer_prb_truth.value() % cfg.n_prbs + 1);
        const StepOutcome o = w.step(i % 2 ? next : PrbIndex(next.value() % cfg.n_prbs + 1));
        // QPSK feature bound: |I| = 1/sqrt(2) without the jammer
        const double dev = std::abs(std::abs(o.observation(0)) - 1.0 / std::sqrt(2.0));
        if (o.hypothesis == Hypothesis::H1) {
            ++checked_h1;
        } else {
            CHECK(dev < 1e-6);
            ++checked_h0;
        }
    }
    CHECK(checked_h0 == 200);
    CHECK(checked_h1 == 200);
}

TEST_CASE("FH against a random jammer collides at JHR/N") {
    WorldConfig cfg = default_world();
    cfg.jammer.kind = JammerKind::random;
    cfg.timing.n_frames = 10000;  // 1e5 slots
    World w(cfg, 7);
    Rng agent = make_rng(7, 100);
    const int n = 100000;
    int h1 = 0;
    for (int i = 0; i < n; ++i) h1 += w.step(fh_select(cfg.n_prbs, agent)).hypothesis == Hypothesis::H1;
    const double p = 0.4 / 50.0;
    CHECK(std::abs(h1 / double(n) - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("replay determinism") {
    const WorldConfig cfg = default_world();
    World a(cfg, 11), b(cfg, 11);
    Rng r = make_rng(11, 100);
    for (int i = 0; i < 500; ++i) {
        const PrbIndex act(uniform_int(r, 1, cfg.n_prbs));
        CHECK(same(a.step(act), b.step(act)));
    }
    CHECK(a.constant_set() == b.constant_set());
    CHECK(a.constant_set().size() == 3);
}

TEST_CASE("H0 SINR ignores the jammer") {
    WorldConfig c1 = default_world();
    c1.jammer.hit_rate = 0.0;
    WorldConfig c2 = c1;
    c2.jsr_db = 20.0;
    c2.jammer_pos = Vec3(800.0, 500.0, 10.0);
    World a(c1, 12), b(c2, 12);
    for (int i = 0; i < 300; ++i) {
        const StepOutcome x = a.step(PrbIndex(3)), y = b.step(PrbIndex(3));
        REQUIRE(x.hypothesis == Hypothesis::H0);
        CHECK(x.sinr == y.sinr);
    }
}

TEST_CASE("link budget holds SNR and JSR at the mission start") {
    WorldConfig cfg = default_world();
    cfg.shadowing = ShadowingMode::off;
    cfg.jammer.kind = JammerKind::sweep;
    cfg.jammer.hit_rate = 1.0;
    World w(cfg, 13);
    const StepOutcome first = w.step(PrbIndex(1));
    if (first.hypothesis == Hypothesis::H0) {
        CHECK(to_db(first.sinr) == doctest::Approx(cfg.snr_db).epsilon(1e-3));
    }
    CHECK(to_db(w.budget().p_tx_jammer) > 0.0);
}

TEST_CASE("shadowing modes") {
    for (ShadowingMode m : {ShadowingMode::per_slot, ShadowingMode::per_segment, ShadowingMode::frozen,
                            ShadowingMode::off}) {
        WorldConfig cfg = default_world();
        cfg.shadowing = m;
        cfg.jammer.hit_rate = 0.0;
        World w(cfg, 14);
        std::set<double> values;
        for (int i = 0; i < 200; ++i) values.insert(w.step(PrbIndex(1)).sinr);
        // the UAV moves 0.96 m over 200 slots, so SINR changes come from shadowing
        if (m == ShadowingMode::per_slot) CHECK(values.size() > 150);
        if (m == ShadowingMode::per_segment) CHECK(values.size() > 1);
    }
    CHECK(parse_shadowing_mode("per_slot") == ShadowingMode::per_slot);
    CHECK_THROWS_AS(parse_shadowing_mode("sometimes"), ConfigError);
}

TEST_CASE("world config validation") {
    WorldConfig cfg = default_world();
    CHECK_NOTHROW(cfg.validate());
    cfg.jammer.hit_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_world();
    cfg.jammer_pos = Vec3(600.0, 300.0, 10.0);  // steep angles drive sigma negative
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_world();
    cfg.jammer.constant_set = {PrbIndex(60)};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(parse_jammer_kind("reactive"), ConfigError);
}

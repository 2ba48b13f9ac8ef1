#include "aijam/filter.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

using namespace aijam;

namespace {

std::vector<Superstate> make_states(std::initializer_list<Vec4> means, double var) {
    std::vector<Superstate> out;
    int id = 1;
    for (const Vec4& m : means) {
        Superstate s;
        s.id = id++;
        s.mean = m;
        s.cov = var * Mat4::Identity();
        out.push_back(s);
    }
    return out;
}

GdbnMatrices pure_control() {
    GdbnMatrices m;
    m.A = Mat4::Identity();
    m.B = Mat4::Identity();
    m.H = Mat4::Identity();
    m.Sigma_w = Mat4::Zero();
    m.Sigma_v = 0.1 * Mat4::Identity();
    return m;
}

}  // namespace

TEST_CASE("predict: deterministic row") {
    const auto ss = make_states({Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0), Vec4(0, 0, 1, 0)}, 0.1);
    MatX T = MatX::Zero(3, 3);
    T.col(1).setOnes();
    ParticleSet ps = init_particles(30, 3, Vec4::Zero(), Mat4::Identity());
    Rng rng = make_rng(1, 101);
    predict(ps, T, ss, pure_control(), rng);
    for (const Particle& p : ps.particles) {
        CHECK(p.superstate == 2);
        CHECK(p.kf_mean == ss[1].mean);  // A = I, B = I from a zero mean
    }
}

TEST_CASE("predict: uniform row spreads particles") {
    const auto ss = make_states({Vec4::Zero(), Vec4::Zero(), Vec4::Zero(), Vec4::Zero(), Vec4::Zero()}, 0.1);
    const MatX T = MatX::Constant(5, 5, 0.2);
    ParticleSet ps = init_particles(500, 5, Vec4::Zero(), Mat4::Identity());
    Rng rng = make_rng(2, 101);
    predict(ps, T, ss, pure_control(), rng);
    const VecX h = superstate_histogram(ps, 5, false);
    for (int k = 0; k < 5; ++k) CHECK(std::abs(h(k) - 0.2) <= 0.04);
}

TEST_CASE("update: concentrated evidence") {
    const auto ss = make_states({Vec4(3, 3, 0, 0), Vec4(-3, -3, 0, 0)}, 0.01);
    GdbnMatrices m = pure_control();
    m.A = Mat4::Zero();
    m.Sigma_v = 0.01 * Mat4::Identity();
    const MatX T = MatX::Constant(2, 2, 0.5);
    ParticleSet ps = init_particles(200, 2, Vec4::Zero(), Mat4::Identity());
    Rng rng = make_rng(3, 101);
    predict(ps, T, ss, m, rng);
    const UpdateResult r = update(ps, ss[0].mean, ss, m);
    CHECK(r.posterior(0) > 0.99);
    CHECK(r.messages.discrete_lambda(0) > 0.99);
    CHECK(std::abs(r.messages.discrete_pi.sum() - 1.0) < 1e-12);
    CHECK(std::abs(r.messages.discrete_lambda.sum() - 1.0) < 1e-12);
    CHECK_FALSE(r.degenerate);
}

TEST_CASE("update: uninformative likelihood keeps weights") {
    const auto ss = make_states({Vec4(1, 0, 0, 0), Vec4(-1, 0, 0, 0)}, 0.1);
    GdbnMatrices m = pure_control();
    m.Sigma_v = 1e12 * Mat4::Identity();
    ParticleSet ps = init_particles(10, 2, Vec4::Zero(), Mat4::Identity());
    for (int l = 0; l < 10; ++l) ps.particles[l].weight = (l + 1) / 55.0;
    const std::vector<double> before = [&] {
        std::vector<double> w;
        for (const Particle& p : ps.particles) w.push_back(p.weight);
        return w;
    }();
    update(ps, Vec4(0.3, 0.1, -0.2, 0.0), ss, m);
    for (int l = 0; l < 10; ++l) CHECK(ps.particles[l].weight == doctest::Approx(before[l]).epsilon(1e-9));
}

TEST_CASE("update: far-off evidence and degenerate weights") {
    const auto ss = make_states({Vec4::Zero(), Vec4(1, 0, 0, 0)}, 1e-6);
    GdbnMatrices m = pure_control();
    m.Sigma_v = 1e-8 * Mat4::Identity();
    ParticleSet ps = init_particles(8, 2, Vec4::Zero(), 1e-8 * Mat4::Identity());
    // weights live in the log domain, so a far-off observation still normalizes
    UpdateResult r = update(ps, Vec4(1e6, 1e6, 1e6, 1e6), ss, m);
    CHECK_FALSE(r.degenerate);
    double w = 0.0;
    for (const Particle& p : ps.particles) w += p.weight;
    CHECK(w == doctest::Approx(1.0));

    ps = init_particles(8, 2, Vec4::Zero(), Mat4::Identity());
    for (int l = 0; l < 8; ++l) ps.particles[l].weight = l == 0 ? 1.0 : 0.0;
    r = update(ps, Vec4::Constant(std::nan("")), ss, m);
    CHECK(r.degenerate);
    for (const Particle& p : ps.particles) CHECK(p.weight == doctest::Approx(1.0 / 8));
}

TEST_CASE("empty superstates still get a likelihood") {
    const auto ss = make_states({Vec4(1, 0, 0, 0), Vec4(-1, 0, 0, 0), Vec4(0, 5, 0, 0)}, 0.1);
    MatX T = MatX::Zero(3, 3);
    T.col(0).setOnes();
    ParticleSet ps = init_particles(20, 3, Vec4::Zero(), Mat4::Identity());
    Rng rng = make_rng(4, 101);
    predict(ps, T, ss, pure_control(), rng);
    const UpdateResult r = update(ps, Vec4(0, 5, 0, 0), ss, pure_control());
    CHECK(r.messages.occurrence(2) == 0.0);
    CHECK(r.messages.discrete_lambda(2) > 0.0);
    CHECK(r.messages.discrete_lambda(2) > r.messages.discrete_lambda(0));
}

TEST_CASE("resampling rules") {
    ParticleSet ps = init_particles(4, 1, Vec4::Zero(), Mat4::Identity());
    Rng rng = make_rng(5, 101);
    CHECK_FALSE(resample(ps, rng, 0.5));

    for (int l = 0; l < 4; ++l) ps.particles[l].weight = l < 2 ? 0.5 : 0.0;
    CHECK(effective_sample_size(ps) == doctest::Approx(2.0));
    CHECK_FALSE(resample(ps, rng, 0.5));

    for (int l = 0; l < 4; ++l) {
        ps.particles[l].weight = l == 2 ? 1.0 : 0.0;
        ps.particles[l].kf_mean = Vec4::Constant(l);
    }
    CHECK(resample(ps, rng, 0.5));
    for (const Particle& p : ps.particles) {
        CHECK(p.kf_mean == Vec4::Constant(2));
        CHECK(p.weight == 0.25);
    }
}

TEST_CASE("covariances stay SPD") {
    Mat4 bad = Mat4::Zero();
    bad(0, 0) = -1.0;
    bad(1, 2) = 1.0;
    const Mat4 f = floor_spd(bad);
    CHECK(f.isApprox(f.transpose()));
    Eigen::SelfAdjointEigenSolver<Mat4> es(f);
    CHECK(es.eigenvalues().minCoeff() >= kCovFloor * 0.999);

    const auto t = oracle::make_toy(0.9);
    Rng sim = make_rng(6, 1);
    const auto zs = oracle::simulate_toy(t, 200, sim);
    ParticleSet ps = init_particles(50, 2, t.m0, t.P0);
    Rng rng = make_rng(6, 101);
    for (const Vec4& z : zs) {
        predict(ps, t.transitions, t.regimes, t.m, rng);
        update(ps, z, t.regimes, t.m);
        double w = 0.0;
        for (const Particle& p : ps.particles) {
            w += p.weight;
            Eigen::LLT<Mat4> llt(p.kf_cov);
            CHECK(llt.info() == Eigen::Success);
        }
        CHECK(std::abs(w - 1.0) < 1e-12);
        resample(ps, rng, 0.5);
    }
}

TEST_CASE("two-regime toy against the exact forward algorithm") {
    CHECK(oracle::filter_oracle_worst_tv(100, 20000, 3) <= 0.02);
}

TEST_CASE("two-regime toy with memory against exhaustive enumeration") {
    const auto t = oracle::make_toy(0.6);
    Rng sim = make_rng(8, 1);
    const auto zs = oracle::simulate_toy(t, 10, sim);
    const auto exact = oracle::enumerate_posteriors(t, zs);
    const auto approx = oracle::mjpf_posteriors(t, zs, 20000, 8);
    for (std::size_t k = 0; k < zs.size(); ++k) CHECK(oracle::total_variation(exact[k], approx[k]) <= 0.02);
}

TEST_CASE("single regime equals a plain Kalman filter") {
    CHECK(oracle::single_regime_kf_gap(100, 5) <= 1e-9);
}

TEST_CASE("remapping between PRB models") {
    const auto from = make_states({Vec4(1, 0, 0, 0), Vec4(-1, 0, 0, 0)}, 0.1);
    const auto to = make_states({Vec4(-0.9, 0, 0, 0), Vec4(0, 9, 0, 0), Vec4(1.1, 0, 0, 0)}, 0.1);
    ParticleSet ps = init_particles(4, 2, Vec4::Zero(), Mat4::Identity());
    remap_superstates(ps, from, to);
    CHECK(ps.particles[0].superstate == 3);
    CHECK(ps.particles[1].superstate == 1);
}

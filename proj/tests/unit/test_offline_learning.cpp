#include "aijam/config.hpp"
#include "aijam/harness.hpp"
#include "aijam/offline_learning.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace aijam;

namespace {

std::vector<Vec4> two_clouds(int n_each, double spread, Rng& rng, Vec4 c1, Vec4 c2) {
    std::vector<Vec4> out;
    for (int i = 0; i < 2 * n_each; ++i) {
        Vec4 e;
        for (int k = 0; k < 4; ++k) e(k) = spread * standard_normal(rng);
        out.push_back((i % 2 ? c2 : c1) + e);
    }
    return out;
}

}  // namespace

TEST_CASE("generalized errors") {
    const GdbnMatrices m = GdbnMatrices::constant_velocity(1e-6, 0.1);
    const std::vector<Vec4> x{Vec4(1, 2, 3, 4), Vec4(-1, 0, 0.5, 2)};
    const auto perfect = generalized_errors(x, x, m.H);
    for (const auto& s : perfect) CHECK(s.error == Vec4::Zero());

    const std::vector<Vec4> z{Vec4(2, 2, 3, 4)};
    const std::vector<Vec4> xp{Vec4(1, 2, 3, 4)};
    CHECK(generalized_errors(z, xp, Mat4::Identity())[0].error == Vec4(1, 0, 0, 0));

    const Mat4 H2 = 2.0 * Mat4::Identity();
    const Vec4 r(0.4, -0.2, 1.0, 3.0);
    const std::vector<Vec4> z2{H2 * xp[0] + r};
    CHECK((generalized_errors(z2, xp, H2)[0].error - r / 2.0).norm() < 1e-15);

    // linear in the residual
    const std::vector<Vec4> z3{H2 * xp[0] + 3.0 * r};
    CHECK((generalized_errors(z3, xp, H2)[0].error - 3.0 * r / 2.0).norm() < 1e-14);

    Mat4 singular = Mat4::Identity();
    singular(2, 2) = 0.0;
    CHECK_THROWS_AS(generalized_errors(z, xp, singular), ModelError);
    CHECK_THROWS_AS(generalized_errors(x, xp, m.H), ModelError);
}

TEST_CASE("null-force predictions") {
    const GdbnMatrices m = GdbnMatrices::constant_velocity(1e-6, 0.1);
    const std::vector<Vec4> z{Vec4(1, 1, 0, 0), Vec4(2, 0, 1, -1)};
    const auto p = null_force_predictions(z, m);
    CHECK(p[0] == z[0]);
    CHECK(p[1] == m.A * z[0]);
}

TEST_CASE("gng separates two clouds") {
    Rng rng = make_rng(1, 0);
    const Vec4 c1(5, 5, 0, 0), c2(-5, -5, 0, 0);
    const auto samples = two_clouds(500, 0.3, rng, c1, c2);
    GngParams p;
    p.max_nodes = 2;
    Rng fit = make_rng(2, 0);
    const auto ss = gng_fit(samples, p, PrbIndex(1), fit);
    REQUIRE(ss.size() == 2);
    const double d1 = std::min((ss[0].mean - c1).norm(), (ss[1].mean - c1).norm());
    const double d2 = std::min((ss[0].mean - c2).norm(), (ss[1].mean - c2).norm());
    CHECK(d1 < 0.6);
    CHECK(d2 < 0.6);
    for (const Superstate& s : ss) {
        CHECK(s.cov(0, 0) == doctest::Approx(0.09).epsilon(0.2));
        CHECK(s.cov.isApprox(s.cov.transpose()));
    }
}

TEST_CASE("gng on identical samples") {
    const std::vector<Vec4> same(50, Vec4(0.3, -0.1, 0.0, 2.0));
    Rng rng = make_rng(3, 0);
    const auto ss = gng_fit(same, GngParams{}, PrbIndex(1), rng);
    REQUIRE(ss.size() == 1);
    CHECK(ss[0].id == 1);
    CHECK((ss[0].mean - same[0]).norm() < 1e-12);
    CHECK((ss[0].cov - kClusterCovJitter * Mat4::Identity()).norm() < 1e-12);
}

TEST_CASE("gng determinism, dense ids, hull") {
    Rng rng = make_rng(4, 0);
    std::vector<Vec4> samples;
    for (int i = 0; i < 2000; ++i) {
        Vec4 v;
        for (int k = 0; k < 4; ++k) v(k) = uniform01(rng) * (k + 1);
        samples.push_back(v);
    }
    Rng a = make_rng(5, 0), b = make_rng(5, 0);
    const auto s1 = gng_fit(samples, GngParams{}, PrbIndex(2), a);
    const auto s2 = gng_fit(samples, GngParams{}, PrbIndex(2), b);
    REQUIRE(s1.size() == s2.size());
    CHECK(s1.size() <= 10);
    for (std::size_t k = 0; k < s1.size(); ++k) {
        CHECK(s1[k].id == static_cast<int>(k) + 1);
        CHECK(s1[k].prb == PrbIndex(2));
        CHECK(s1[k].mean == s2[k].mean);
        CHECK(s1[k].cov == s2[k].cov);
        Eigen::LLT<Mat4> llt(s1[k].cov);
        CHECK(llt.info() == Eigen::Success);
    }
    // node means lie inside the sample hull: check random projections
    Rng dirs = make_rng(6, 0);
    for (int t = 0; t < 200; ++t) {
        Vec4 u;
        for (int k = 0; k < 4; ++k) u(k) = standard_normal(dirs);
        double lo = INFINITY, hi = -INFINITY;
        for (const Vec4& s : samples) {
            lo = std::min(lo, u.dot(s));
            hi = std::max(hi, u.dot(s));
        }
        for (const Superstate& s : s1) {
            CHECK(u.dot(s.mean) >= lo - 1e-12);
            CHECK(u.dot(s.mean) <= hi + 1e-12);
        }
    }
    CHECK_THROWS_AS(gng_fit(std::span(samples).first(1), GngParams{}, PrbIndex(1), a), ModelError);
    GngParams bad;
    bad.max_nodes = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("nearest superstate assignment") {
    std::vector<Superstate> ss(2);
    ss[0].id = 1;
    ss[0].mean = Vec4(1, 0, 0, 0);
    ss[1].id = 2;
    ss[1].mean = Vec4(-1, 0, 0, 0);
    CHECK(nearest_superstate(Vec4(0.9, 3, 0, 0), ss) == 1);
    CHECK(nearest_superstate(Vec4(-0.2, 0, 0, 0), ss) == 2);
    const std::vector<Vec4> xs{Vec4(2, 0, 0, 0), Vec4(-3, 0, 0, 0)};
    CHECK(assign_superstates(xs, ss) == std::vector<int>{1, 2});
}

TEST_CASE("transition estimation") {
    std::vector<int> alt;
    for (int i = 0; i < 20; ++i) alt.push_back(1 + i % 2);
    const auto t = estimate_transitions(alt, 2, 1, 0.0);
    CHECK(t.segment(0)(0, 1) == 1.0);
    CHECK(t.segment(0)(1, 0) == 1.0);

    const std::vector<int> flat(30, 3);
    const auto f = estimate_transitions(flat, 3, 1, 0.0);
    CHECK(f.segment(0)(2, 2) == 1.0);
    // rows never visited fall back to uniform
    CHECK(f.segment(0)(0, 0) == doctest::Approx(1.0 / 3.0));

    const std::vector<int> ones(10, 1);
    const auto s = estimate_transitions(ones, 2, 1, 1.0);
    CHECK(s.segment(0)(1, 0) == 0.5);
    CHECK(s.segment(0)(1, 1) == 0.5);

    Rng rng = make_rng(7, 0);
    std::vector<int> labels;
    for (int i = 0; i < 1000; ++i) labels.push_back(uniform_int(rng, 1, 5));
    const auto m = estimate_transitions(labels, 5, 4, 0.5);
    CHECK(m.segments.size() == 4);
    CHECK_NOTHROW(m.validate());
    for (const MatX& seg : m.segments)
        for (int r = 0; r < 5; ++r) CHECK(std::abs(seg.row(r).sum() - 1.0) < 1e-9);
    CHECK(m.segment_for(0, 1000) == 0);
    CHECK(m.segment_for(999, 1000) == 3);

    CHECK_THROWS_AS(estimate_transitions(std::vector<int>{1}, 2, 1, 1.0), ModelError);
    CHECK_THROWS_AS(estimate_transitions(std::vector<int>{1, 3}, 2, 1, 1.0), ModelError);
}

TEST_CASE("trained model: schema, thresholds, clean flag rate, round trip") {
    set_warnings_enabled(false);
    ScenarioConfig cfg = parse_scenario(Json::object());
    cfg.world.n_prbs = 4;
    cfg.n_slots = 600;
    cfg.training.validation_slots = 4000;
    TrainReport rep;
    const LearnedModel model = train(cfg, &rep);
    CHECK_NOTHROW(model.validate());
    CHECK(model.n_prbs == 4);
    for (const PrbModel& p : model.prbs) {
        CHECK(p.th_skl > 0.0);
        CHECK(p.th_bhatt > 0.0);
        CHECK(p.n_states() >= 1);
        CHECK(p.n_states() <= cfg.training.gng.max_nodes);
    }
    CHECK(rep.overall_flag_rate <= 0.01);

    const auto path = std::filesystem::temp_directory_path() / "aijam_model_test.json";
    save_model(model, path);
    const LearnedModel back = load_model(path);
    CHECK(model_to_json(back) == model_to_json(model));
    std::filesystem::remove(path);

    Json j = Json::parse(model_to_json(model));
    j["version"] = 2;
    CHECK_THROWS_AS(model_from_json(j.dump()), ModelError);
    j = Json::parse(model_to_json(model));
    j["surprise"] = 1;
    CHECK_THROWS_AS(model_from_json(j.dump()), ModelError);
    j = Json::parse(model_to_json(model));
    j.erase("version");
    CHECK_THROWS_AS(model_from_json(j.dump()), ModelError);
    CHECK_THROWS_AS(model_from_json("{not json"), ModelError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ModelError);
}

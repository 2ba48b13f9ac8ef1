#include "aijam/harness.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace aijam;

namespace {

Geometry geometry(const Vec3& uav, const Vec3& gbs, const Vec3& jammer) {
    Geometry g;
    g.uav_pos = uav;
    g.gbs_pos = gbs;
    g.jammer_pos = jammer;
    return g;
}

std::vector<Vec4> rows_to_samples(const Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>& m) {
    std::vector<Vec4> out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = m.row(i).transpose();
    return out;
}

ScenarioConfig scenario(const std::string& text) { return parse_scenario(Json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Active-inference anti-jamming PRB selection simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);

    m.attr("METRICS_HEADER") = kMetricsHeader;

    m.def("to_db", &to_db);
    m.def("from_db", &from_db);
    m.def("terrestrial_pathloss", &terrestrial_pathloss, py::arg("d"), py::arg("alpha_pl") = 3.04);
    m.def(
        "excess_aerial_pathloss",
        [](double theta, bool alt_sigma) {
            return excess_aerial_pathloss(theta, alt_sigma ? ChannelParams::suburban_alt_sigma()
                                                           : ChannelParams::suburban());
        },
        py::arg("theta_deg"), py::arg("alt_sigma") = false);
    m.def(
        "shadowing_sigma",
        [](double theta, bool alt_sigma) {
            return shadowing_sigma(theta, alt_sigma ? ChannelParams::suburban_alt_sigma()
                                                    : ChannelParams::suburban());
        },
        py::arg("theta_deg"), py::arg("alt_sigma") = false);
    m.def(
        "mean_pathloss_db",
        [](const Vec3& uav, const Vec3& gbs) {
            return mean_pathloss(geometry(uav, gbs, Vec3(0, 0, 10)), GroundNode::gbs, ChannelParams{})
                .total_db();
        },
        py::arg("uav_pos"), py::arg("gbs_pos"));
    m.def(
        "sinr",
        [](double p_u, double h_gu, double p_j, double h_ju, double noise, bool jammer) {
            LinkBudget b{p_u, p_j, noise, jammer ? 1 : 0};
            return sinr(b, h_gu, h_ju);
        },
        py::arg("p_tx_uav"), py::arg("h_gu"), py::arg("p_tx_jammer"), py::arg("h_ju"), py::arg("noise_power"),
        py::arg("jammer_present"));

    m.def(
        "qpsk_stream",
        [](std::size_t n, std::uint64_t seed) {
            Rng rng = make_rng(seed, 4);
            return qpsk_stream(n, rng);
        },
        py::arg("n"), py::arg("seed"));
    m.def("to_generalized", py::overload_cast<Symbol, Symbol>(&to_generalized), py::arg("current"),
          py::arg("previous"));

    m.def(
        "skl",
        [](const VecX& pi, const VecX& lambda, const VecX& occurrence, const std::string& reading) {
            return skl_abnormality(pi, lambda, occurrence, parse_skl_reading(reading));
        },
        py::arg("pi"), py::arg("lam"), py::arg("occurrence"), py::arg("reading") = "as_written");
    m.def("bhattacharyya", &bhattacharyya_distance, py::arg("mu1"), py::arg("cov1"), py::arg("mu2"),
          py::arg("cov2"));

    m.def(
        "gng_fit",
        [](const Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>& samples, int max_nodes,
           std::uint64_t seed) {
            GngParams p;
            p.max_nodes = max_nodes;
            p.validate();
            Rng rng = make_rng(seed, 0);
            const auto xs = rows_to_samples(samples);
            const auto ss = gng_fit(xs, p, PrbIndex(1), rng);
            Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor> means(ss.size(), 4);
            std::vector<Mat4> covs;
            for (std::size_t k = 0; k < ss.size(); ++k) {
                means.row(k) = ss[k].mean.transpose();
                covs.push_back(ss[k].cov);
            }
            return py::make_tuple(means, covs);
        },
        py::arg("samples"), py::arg("max_nodes") = 10, py::arg("seed") = 0);
    m.def(
        "estimate_transitions",
        [](const std::vector<int>& labels, int n_states, double smoothing) {
            return estimate_transitions(labels, n_states, 1, smoothing).segment(0);
        },
        py::arg("labels"), py::arg("n_states"), py::arg("smoothing") = 1.0);

    m.def(
        "init_tables",
        [](int n) {
            const BeliefTables t = init_tables(n);
            return py::dict(py::arg("p_uav") = t.p_uav, py::arg("p_jam") = t.p_jam, py::arg("ain") = t.ain);
        },
        py::arg("n"));
    m.def(
        "select_action",
        [](const MatX& ain, int prev_state, const VecX& occupancy, std::uint64_t seed) {
            BeliefTables t = init_tables(static_cast<int>(ain.rows()));
            t.ain = ain;
            Rng rng = make_rng(seed, 100);
            return select_action(t, PrbIndex(prev_state), occupancy, rng).value();
        },
        py::arg("ain"), py::arg("prev_state"), py::arg("occupancy"), py::arg("seed") = 0);
    m.def(
        "lambda_action",
        [](const MatX& p_uav, int from_state, int chosen, double gamma, bool jammed) {
            BeliefTables t = init_tables(static_cast<int>(p_uav.rows()));
            t.p_uav = p_uav;
            return lambda_action(t, PrbIndex(from_state), PrbIndex(chosen), gamma, jammed);
        },
        py::arg("p_uav"), py::arg("from_state"), py::arg("chosen"), py::arg("gamma"), py::arg("jammed"));

    m.def(
        "parse_scenario", [](const std::string& text) { return scenario_to_json(scenario(text)).dump(); },
        py::arg("config_json"), "Validate a scenario and return it with defaults filled in.");
    m.def(
        "train",
        [](const std::string& config, const std::string& model_path) {
            const ScenarioConfig cfg = scenario(config);
            TrainReport rep;
            const LearnedModel model = [&] {
                py::gil_scoped_release release;
                return train(cfg, &rep);
            }();
            if (!model_path.empty()) save_model(model, model_path);
            return py::make_tuple(model_to_json(model), rep.overall_flag_rate);
        },
        py::arg("config_json"), py::arg("model_path") = "");
    m.def(
        "run",
        [](const std::string& config, const std::string& out_dir, int jobs) {
            const ScenarioConfig cfg = scenario(config);
            py::gil_scoped_release release;
            return summary_json(run(cfg, out_dir, jobs)).dump();
        },
        py::arg("config_json"), py::arg("out_dir") = "", py::arg("jobs") = 1);
    m.def(
        "run_episode_csv",
        [](const std::string& config, std::uint64_t seed) {
            const ScenarioConfig cfg = scenario(config);
            std::optional<LearnedModel> model;
            if (!cfg.model_path.empty()) model = load_model(cfg.model_path);
            py::gil_scoped_release release;
            return metrics_csv(run_episode(cfg, seed, model ? &*model : nullptr).rows);
        },
        py::arg("config_json"), py::arg("seed"));
    m.def(
        "bench",
        [](const std::vector<std::string>& configs, const std::string& out_dir, int jobs) {
            std::vector<ScenarioConfig> cfgs;
            for (const auto& c : configs) cfgs.push_back(scenario(c));
            py::gil_scoped_release release;
            const BenchResult b = bench(cfgs, out_dir, jobs);
            std::ostringstream os;
            write_bench_csv(b, os);
            return os.str();
        },
        py::arg("config_jsons"), py::arg("out_dir") = "", py::arg("jobs") = 1);
}

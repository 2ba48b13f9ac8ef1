#include "aijam/config.hpp"

#include <fstream>
#include <sstream>

namespace aijam {

AgentKind parse_agent_kind(const std::string& s) {
    if (s == "ain") return AgentKind::ain;
    if (s == "ql") return AgentKind::ql;
    if (s == "fh") return AgentKind::fh;
    throw ConfigError("unknown agent kind '" + s + "'");
}

std::string to_string(AgentKind k) {
    switch (k) {
        case AgentKind::ain: return "ain";
        case AgentKind::ql: return "ql";
        case AgentKind::fh: return "fh";
    }
    return "?";
}

void TrainingConfig::validate() const {
    gng.validate();
    if (slots_per_prb < 0) throw ConfigError("training: slots_per_prb must be >= 0");
    if (n_segments < 1) throw ConfigError("training: n_segments must be >= 1");
    if (smoothing < 0.0) throw ConfigError("training: smoothing must be >= 0");
    if (!(process_var >= 0.0)) throw ConfigError("training: process_var must be >= 0");
    if (validation_slots < 1) throw ConfigError("training: validation_slots must be >= 1");
    if (!(threshold_quantile > 0.0 && threshold_quantile <= 1.0))
        throw ConfigError("training: threshold_quantile outside (0,1]");
    if (!(threshold_margin > 0.0)) throw ConfigError("training: threshold_margin must be positive");
}

void ScenarioConfig::validate() const {
    world.validate();
    if (world.n_prbs < 2) throw ConfigError("n_prbs must be >= 2");
    if (n_slots < 1) throw ConfigError("n_slots must be >= 1");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    agent.ain.validate();
    agent.ql.validate();
    filter.validate();
    training.validate();
    if (convergence_window < 1) throw ConfigError("convergence.window must be >= 1");
    if (!(convergence_threshold > 0.0 && convergence_threshold <= 1.0))
        throw ConfigError("convergence.threshold outside (0,1]");
    if (run_id.empty() || run_id.find('/') != std::string::npos)
        throw ConfigError("run_id must be a non-empty name without '/'");
}

namespace {

template <typename T>
void read(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Vec3 vec3_from(const Json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(what + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json vec3_to(const Vec3& v) { return Json::array({v(0), v(1), v(2)}); }

void parse_channel(const Json& j, WorldConfig& w) {
    reject_unknown_keys(j, {"preset", "alpha_pl", "C", "D", "theta0", "eta0", "a_shadow",
                            "sigma0_shadow", "shadowing", "decorrelation_distance_m"},
                        "channel");
    if (j.contains("preset")) {
        const auto p = j.at("preset").get<std::string>();
        if (p == "suburban") w.channel = ChannelParams::suburban();
        else if (p == "suburban_alt_sigma") w.channel = ChannelParams::suburban_alt_sigma();
        else throw ConfigError("channel: unknown preset '" + p + "'");
    }
    read(j, "alpha_pl", w.channel.alpha_pl);
    read(j, "C", w.channel.C);
    read(j, "D", w.channel.D);
    read(j, "theta0", w.channel.theta0);
    read(j, "eta0", w.channel.eta0);
    read(j, "a_shadow", w.channel.a_shadow);
    read(j, "sigma0_shadow", w.channel.sigma0_shadow);
    if (j.contains("shadowing")) w.shadowing = parse_shadowing_mode(j.at("shadowing").get<std::string>());
    read(j, "decorrelation_distance_m", w.decorrelation_distance_m);
}

void parse_geometry(const Json& j, WorldConfig& w) {
    reject_unknown_keys(j, {"gbs_pos", "jammer_pos", "waypoints", "altitude_m", "speed_mps"}, "geometry");
    if (j.contains("gbs_pos")) w.gbs_pos = vec3_from(j.at("gbs_pos"), "geometry.gbs_pos");
    if (j.contains("jammer_pos")) w.jammer_pos = vec3_from(j.at("jammer_pos"), "geometry.jammer_pos");
    if (j.contains("waypoints")) {
        w.trajectory.waypoints.clear();
        for (const Json& p : j.at("waypoints")) {
            if (!p.is_array() || p.size() != 2) throw ConfigError("geometry.waypoints: expected [x, y]");
            w.trajectory.waypoints.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
    }
    read(j, "altitude_m", w.trajectory.altitude_m);
    read(j, "speed_mps", w.trajectory.speed_mps);
}

void parse_jammer(const Json& j, WorldConfig& w) {
    reject_unknown_keys(j, {"kind", "constant_set", "constant_set_size", "phase_rad"}, "jammer");
    if (j.contains("kind")) w.jammer.kind = parse_jammer_kind(j.at("kind").get<std::string>());
    if (j.contains("constant_set")) {
        w.jammer.constant_set.clear();
        for (const Json& p : j.at("constant_set")) w.jammer.constant_set.emplace_back(p.get<int>());
    }
    read(j, "constant_set_size", w.constant_set_size);
    read(j, "phase_rad", w.jammer_phase_rad);
}

void parse_agent(const Json& j, AgentConfig& a) {
    reject_unknown_keys(j, {"kind", "label", "ain", "ql"}, "agent");
    if (j.contains("kind")) a.kind = parse_agent_kind(j.at("kind").get<std::string>());
    read(j, "label", a.label);
    if (j.contains("ain")) {
        const Json& k = j.at("ain");
        reject_unknown_keys(k, {"kappa", "ain_floor", "jammer_tracking", "onset_only"}, "agent.ain");
        read(k, "onset_only", a.ain.onset_only);
        read(k, "kappa", a.ain.kappa);
        read(k, "ain_floor", a.ain.ain_floor);
        if (k.contains("jammer_tracking"))
            a.ain.tracking = parse_jammer_tracking(k.at("jammer_tracking").get<std::string>());
    }
    if (j.contains("ql")) {
        const Json& k = j.at("ql");
        reject_unknown_keys(k, {"alpha_lr", "gamma_disc", "epsilon_decay", "epsilon_floor"}, "agent.ql");
        read(k, "alpha_lr", a.ql.alpha_lr);
        read(k, "gamma_disc", a.ql.gamma_disc);
        read(k, "epsilon_decay", a.ql.epsilon.decay);
        read(k, "epsilon_floor", a.ql.epsilon.floor);
    }
}

void parse_filter(const Json& j, PerceptionConfig& f) {
    reject_unknown_keys(j, {"n_particles", "resample_fraction", "skl_reading", "abnormality_level",
                            "reject_abnormal", "initial_variance"},
                        "filter");
    read(j, "n_particles", f.n_particles);
    read(j, "resample_fraction", f.resample_fraction);
    if (j.contains("skl_reading")) f.skl_reading = parse_skl_reading(j.at("skl_reading").get<std::string>());
    if (j.contains("abnormality_level"))
        f.level = parse_abnormality_level(j.at("abnormality_level").get<std::string>());
    read(j, "reject_abnormal", f.reject_abnormal);
    read(j, "initial_variance", f.initial_variance);
}

void parse_training(const Json& j, TrainingConfig& t) {
    reject_unknown_keys(j, {"seed", "slots_per_prb", "gng", "n_segments", "smoothing", "process_var",
                            "validation_slots", "threshold_quantile", "threshold_margin"},
                        "training");
    read(j, "seed", t.seed);
    read(j, "slots_per_prb", t.slots_per_prb);
    read(j, "n_segments", t.n_segments);
    read(j, "smoothing", t.smoothing);
    read(j, "process_var", t.process_var);
    read(j, "validation_slots", t.validation_slots);
    read(j, "threshold_quantile", t.threshold_quantile);
    read(j, "threshold_margin", t.threshold_margin);
    if (j.contains("gng")) {
        const Json& g = j.at("gng");
        reject_unknown_keys(g, {"max_nodes", "insertion_interval", "eps_winner", "eps_neighbor",
                                "max_edge_age", "alpha_split", "error_decay", "epochs"},
                            "training.gng");
        read(g, "max_nodes", t.gng.max_nodes);
        read(g, "insertion_interval", t.gng.insertion_interval);
        read(g, "eps_winner", t.gng.eps_winner);
        read(g, "eps_neighbor", t.gng.eps_neighbor);
        read(g, "max_edge_age", t.gng.max_edge_age);
        read(g, "alpha_split", t.gng.alpha_split);
        read(g, "error_decay", t.gng.error_decay);
        read(g, "epochs", t.gng.epochs);
    }
}

}  // namespace

ScenarioConfig parse_scenario(const Json& j, const std::filesystem::path& base_dir) {
    ScenarioConfig c;
    c.world.trajectory.waypoints = {{400.0, 0.0}, {400.0, 200.0}, {600.0, 200.0}};
    try {
        reject_unknown_keys(j, {"run_id", "n_prbs", "n_frames", "slots_per_frame", "frame_duration_s",
                                "n_slots", "snr_db", "jsr_db", "jhr", "p_tx_uav_w", "jammer", "channel",
                                "geometry", "agent", "seeds", "model_path", "filter", "training",
                                "convergence", "output"},
                            "scenario");
        read(j, "run_id", c.run_id);
        read(j, "n_prbs", c.world.n_prbs);
        read(j, "n_frames", c.world.timing.n_frames);
        read(j, "slots_per_frame", c.world.timing.slots_per_frame);
        read(j, "frame_duration_s", c.world.timing.frame_duration_s);
        c.n_slots = c.world.timing.n_slots();
        read(j, "n_slots", c.n_slots);
        read(j, "snr_db", c.world.snr_db);
        read(j, "jsr_db", c.world.jsr_db);
        read(j, "jhr", c.world.jammer.hit_rate);
        read(j, "p_tx_uav_w", c.world.p_tx_uav_w);
        if (j.contains("jammer")) parse_jammer(j.at("jammer"), c.world);
        if (j.contains("channel")) parse_channel(j.at("channel"), c.world);
        if (j.contains("geometry")) parse_geometry(j.at("geometry"), c.world);
        if (j.contains("agent")) parse_agent(j.at("agent"), c.agent);
        if (c.agent.label.empty()) c.agent.label = to_string(c.agent.kind);
        if (j.contains("seeds")) {
            c.seeds.clear();
            for (const Json& s : j.at("seeds")) c.seeds.push_back(s.get<std::uint64_t>());
        }
        if (j.contains("model_path")) {
            std::filesystem::path p = j.at("model_path").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            c.model_path = p.string();
        }
        if (j.contains("filter")) parse_filter(j.at("filter"), c.filter);
        if (j.contains("training")) parse_training(j.at("training"), c.training);
        if (j.contains("convergence")) {
            const Json& k = j.at("convergence");
            reject_unknown_keys(k, {"window", "threshold"}, "convergence");
            read(k, "window", c.convergence_window);
            read(k, "threshold", c.convergence_threshold);
        }
        if (j.contains("output")) {
            const Json& k = j.at("output");
            reject_unknown_keys(k, {"jsonl"}, "output");
            read(k, "jsonl", c.write_jsonl);
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_scenario(j, path.parent_path());
}

Json scenario_to_json(const ScenarioConfig& c) {
    Json j = environment_json(c);
    j["run_id"] = c.run_id;
    j["agent"] = {{"kind", to_string(c.agent.kind)},
                  {"label", c.agent.label},
                  {"ain", {{"kappa", c.agent.ain.kappa},
                           {"ain_floor", c.agent.ain.ain_floor},
                           {"jammer_tracking", to_string(c.agent.ain.tracking)},
                           {"onset_only", c.agent.ain.onset_only}}},
                  {"ql", {{"alpha_lr", c.agent.ql.alpha_lr},
                          {"gamma_disc", c.agent.ql.gamma_disc},
                          {"epsilon_decay", c.agent.ql.epsilon.decay},
                          {"epsilon_floor", c.agent.ql.epsilon.floor}}}};
    j["model_path"] = c.model_path;
    j["output"] = {{"jsonl", c.write_jsonl}};
    return j;
}

Json environment_json(const ScenarioConfig& c) {
    const WorldConfig& w = c.world;
    Json j;
    j["n_prbs"] = w.n_prbs;
    j["n_frames"] = w.timing.n_frames;
    j["slots_per_frame"] = w.timing.slots_per_frame;
    j["frame_duration_s"] = w.timing.frame_duration_s;
    j["n_slots"] = c.n_slots;
    j["snr_db"] = w.snr_db;
    j["jsr_db"] = w.jsr_db;
    j["jhr"] = w.jammer.hit_rate;
    j["p_tx_uav_w"] = w.p_tx_uav_w;
    Json cs = Json::array();
    for (PrbIndex p : w.jammer.constant_set) cs.push_back(p.value());
    j["jammer"] = {{"kind", to_string(w.jammer.kind)},
                   {"constant_set", cs},
                   {"constant_set_size", w.constant_set_size},
                   {"phase_rad", w.jammer_phase_rad}};
    j["channel"] = {{"alpha_pl", w.channel.alpha_pl},
                    {"C", w.channel.C},
                    {"D", w.channel.D},
                    {"theta0", w.channel.theta0},
                    {"eta0", w.channel.eta0},
                    {"a_shadow", w.channel.a_shadow},
                    {"sigma0_shadow", w.channel.sigma0_shadow},
                    {"shadowing", to_string(w.shadowing)},
                    {"decorrelation_distance_m", w.decorrelation_distance_m}};
    Json wp = Json::array();
    for (const auto& p : w.trajectory.waypoints) wp.push_back(Json::array({p(0), p(1)}));
    j["geometry"] = {{"gbs_pos", vec3_to(w.gbs_pos)},
                     {"jammer_pos", vec3_to(w.jammer_pos)},
                     {"waypoints", wp},
                     {"altitude_m", w.trajectory.altitude_m},
                     {"speed_mps", w.trajectory.speed_mps}};
    j["seeds"] = c.seeds;
    j["filter"] = {{"n_particles", c.filter.n_particles},
                   {"resample_fraction", c.filter.resample_fraction},
                   {"skl_reading", to_string(c.filter.skl_reading)},
                   {"abnormality_level", to_string(c.filter.level)},
                   {"reject_abnormal", c.filter.reject_abnormal},
                   {"initial_variance", c.filter.initial_variance}};
    const TrainingConfig& t = c.training;
    j["training"] = {{"seed", t.seed},
                     {"slots_per_prb", t.slots_per_prb},
                     {"n_segments", t.n_segments},
                     {"smoothing", t.smoothing},
                     {"process_var", t.process_var},
                     {"validation_slots", t.validation_slots},
                     {"threshold_quantile", t.threshold_quantile},
                     {"threshold_margin", t.threshold_margin},
                     {"gng", {{"max_nodes", t.gng.max_nodes},
                              {"insertion_interval", t.gng.insertion_interval},
                              {"eps_winner", t.gng.eps_winner},
                              {"eps_neighbor", t.gng.eps_neighbor},
                              {"max_edge_age", t.gng.max_edge_age},
                              {"alpha_split", t.gng.alpha_split},
                              {"error_decay", t.gng.error_decay},
                              {"epochs", t.gng.epochs}}}};
    j["convergence"] = {{"window", c.convergence_window}, {"threshold", c.convergence_threshold}};
    return j;
}

}  // namespace aijam

#include "aijam/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace aijam {

PrbIndex PrbIndex::checked(int n, int n_prbs) {
    if (n < 1 || n > n_prbs) {
        std::ostringstream os;
        os << "PRB index " << n << " outside [1, " << n_prbs << "]";
        throw ConfigError(os.str());
    }
    return PrbIndex(n);
}

JammerKind parse_jammer_kind(const std::string& s) {
    if (s == "constant") return JammerKind::constant;
    if (s == "sweep") return JammerKind::sweep;
    if (s == "random") return JammerKind::random;
    throw ConfigError("unknown jammer kind '" + s + "'");
}

std::string to_string(JammerKind kind) {
    switch (kind) {
        case JammerKind::constant: return "constant";
        case JammerKind::sweep: return "sweep";
        case JammerKind::random: return "random";
    }
    return "?";
}

void JammerStrategy::validate(int n_prbs) const {
    if (!(hit_rate >= 0.0 && hit_rate <= 1.0)) throw ConfigError("jammer: hit_rate outside [0,1]");
    if (kind == JammerKind::constant && constant_set.empty())
        throw ConfigError("jammer: constant strategy needs a non-empty constant_set");
    for (PrbIndex p : constant_set) PrbIndex::checked(p.value(), n_prbs);
}

JammerMove jammer_next(const JammerStrategy& s, PrbIndex current, int n_prbs, Rng& rng) {
    const double u_choice = uniform01(rng);
    const double u_tx = uniform01(rng);
    JammerMove move;
    switch (s.kind) {
        case JammerKind::constant: {
            const auto k = std::min<std::size_t>(
                static_cast<std::size_t>(u_choice * s.constant_set.size()),
                s.constant_set.size() - 1);
            move.prb = s.constant_set[k];
            break;
        }
        case JammerKind::sweep:
            move.prb = PrbIndex(current.value() % n_prbs + 1);
            break;
        case JammerKind::random:
            move.prb = PrbIndex(std::min(static_cast<int>(u_choice * n_prbs), n_prbs - 1) + 1);
            break;
    }
    move.transmitted = u_tx < s.hit_rate;
    return move;
}

void Trajectory::validate() const {
    if (waypoints.empty()) throw ConfigError("trajectory: at least one waypoint required");
    if (!(speed_mps > 0.0)) throw ConfigError("trajectory: speed must be positive");
    if (!(altitude_m > 0.0)) throw ConfigError("trajectory: altitude must be positive");
}

Vec3 uav_position(double t_seconds, const Trajectory& tr) {
    double remaining = std::max(0.0, t_seconds) * tr.speed_mps;
    Eigen::Vector2d p = tr.waypoints.front();
    for (std::size_t i = 1; i < tr.waypoints.size(); ++i) {
        const Eigen::Vector2d seg = tr.waypoints[i] - tr.waypoints[i - 1];
        const double len = seg.norm();
        if (remaining <= len) {
            if (len > 0.0) p = tr.waypoints[i - 1] + seg * (remaining / len);
            return {p(0), p(1), tr.altitude_m};
        }
        remaining -= len;
        p = tr.waypoints[i];
    }
    return {p(0), p(1), tr.altitude_m};
}

ShadowingMode parse_shadowing_mode(const std::string& s) {
    if (s == "per_slot") return ShadowingMode::per_slot;
    if (s == "per_segment") return ShadowingMode::per_segment;
    if (s == "frozen") return ShadowingMode::frozen;
    if (s == "off") return ShadowingMode::off;
    throw ConfigError("unknown shadowing mode '" + s + "'");
}

std::string to_string(ShadowingMode m) {
    switch (m) {
        case ShadowingMode::per_slot: return "per_slot";
        case ShadowingMode::per_segment: return "per_segment";
        case ShadowingMode::frozen: return "frozen";
        case ShadowingMode::off: return "off";
    }
    return "?";
}

namespace {

// Range of depression angles seen from `ground` along the flight path.
std::pair<double, double> angle_range(const Trajectory& tr, const Vec3& ground) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto visit = [&](const Eigen::Vector2d& xy) {
        Geometry g;
        g.uav_pos = Vec3(xy(0), xy(1), tr.altitude_m);
        g.gbs_pos = ground;
        const double th = depression_angle(g, GroundNode::gbs);
        lo = std::min(lo, th);
        hi = std::max(hi, th);
    };
    visit(tr.waypoints.front());
    for (std::size_t i = 1; i < tr.waypoints.size(); ++i) {
        const Eigen::Vector2d a = tr.waypoints[i - 1];
        const Eigen::Vector2d b = tr.waypoints[i];
        const Eigen::Vector2d ab = b - a;
        const double len2 = ab.squaredNorm();
        if (len2 > 0.0) {
            const Eigen::Vector2d g2(ground(0), ground(1));
            const double s = std::clamp((g2 - a).dot(ab) / len2, 0.0, 1.0);
            visit(a + s * ab);
        }
        visit(b);
    }
    return {lo, hi};
}

}  // namespace

void WorldConfig::validate() const {
    if (n_prbs < 1) throw ConfigError("n_prbs must be >= 1");
    if (timing.n_frames < 1 || timing.slots_per_frame < 1 || !(timing.frame_duration_s > 0.0))
        throw ConfigError("timing: frames, slots per frame and frame duration must be positive");
    if (!(p_tx_uav_w > 0.0)) throw ConfigError("p_tx_uav_w must be positive");
    if (!(decorrelation_distance_m > 0.0)) throw ConfigError("decorrelation_distance_m must be positive");
    if (jammer.kind == JammerKind::constant && jammer.constant_set.empty()) {
        if (constant_set_size < 1 || constant_set_size > n_prbs)
            throw ConfigError("constant_set_size outside [1, n_prbs]");
        JammerStrategy probe = jammer;
        probe.constant_set.assign(1, PrbIndex(1));
        probe.validate(n_prbs);
    } else {
        jammer.validate(n_prbs);
    }
    trajectory.validate();
    Geometry g;
    g.uav_pos = uav_position(0.0, trajectory);
    g.gbs_pos = gbs_pos;
    g.jammer_pos = jammer_pos;
    g.validate();
    double lo = 90.0, hi = -90.0;
    for (const Vec3* e : {&gbs_pos, &jammer_pos}) {
        auto [a, b] = angle_range(trajectory, *e);
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    channel.validate(lo, hi);
}

GdbnMatrices WorldConfig::matrices(double process_var) const {
    return GdbnMatrices::constant_velocity(process_var, noise_variance_for_snr(snr_db));
}

namespace {
enum Stream : std::uint64_t { kScenario = 1, kJammer, kChannel, kSymbols, kNoise };
}

World::World(const WorldConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      strategy_(cfg.jammer),
      matrices_(cfg.matrices(0.0)),
      jammer_link_(JammerLink::from_jsr(cfg.jsr_db, cfg.jammer_phase_rad)),
      jammer_rng_(make_rng(seed, kJammer)),
      channel_rng_(make_rng(seed, kChannel)),
      symbol_rng_(make_rng(seed, kSymbols)),
      noise_rng_(make_rng(seed, kNoise)) {
    cfg_.validate();
    Rng scenario = make_rng(seed, kScenario);
    if (strategy_.kind == JammerKind::constant && strategy_.constant_set.empty()) {
        std::vector<int> all(cfg_.n_prbs);
        for (int i = 0; i < cfg_.n_prbs; ++i) all[i] = i + 1;
        for (int i = 0; i < cfg_.constant_set_size; ++i) {
            const int j = uniform_int(scenario, i, cfg_.n_prbs - 1);
            std::swap(all[i], all[j]);
            strategy_.constant_set.emplace_back(all[i]);
        }
        std::sort(strategy_.constant_set.begin(), strategy_.constant_set.end());
    }
    jammer_prb_ = PrbIndex(uniform_int(scenario, 1, cfg_.n_prbs));

    // Link budget referenced to the start of the mission without shadowing:
    // SNR and JSR hold there exactly.
    Geometry g0;
    g0.uav_pos = uav_position(0.0, cfg_.trajectory);
    g0.gbs_pos = cfg_.gbs_pos;
    g0.jammer_pos = cfg_.jammer_pos;
    const double h_gu0 = mean_pathloss(g0, GroundNode::gbs, cfg_.channel).gain();
    const double h_ju0 = mean_pathloss(g0, GroundNode::jammer, cfg_.channel).gain();
    budget_.p_tx_uav = cfg_.p_tx_uav_w;
    budget_.noise_power = cfg_.p_tx_uav_w * h_gu0 / from_db(cfg_.snr_db);
    budget_.p_tx_jammer = from_db(cfg_.jsr_db) * cfg_.p_tx_uav_w * h_gu0 / h_ju0;
    budget_.validate();
}

void World::refresh_shadowing(const Vec3& pos) {
    bool redraw = false;
    switch (cfg_.shadowing) {
        case ShadowingMode::off: return;
        case ShadowingMode::per_slot: redraw = true; break;
        case ShadowingMode::frozen: redraw = !shadow_drawn_; break;
        case ShadowingMode::per_segment:
            redraw = !shadow_drawn_ ||
                     (pos - last_shadow_pos_).norm() >= cfg_.decorrelation_distance_m;
            break;
    }
    if (!redraw) return;
    Geometry g;
    g.uav_pos = pos;
    g.gbs_pos = cfg_.gbs_pos;
    g.jammer_pos = cfg_.jammer_pos;
    shadow_gu_db_ = shadowing_sample(depression_angle(g, GroundNode::gbs), cfg_.channel, channel_rng_);
    shadow_ju_db_ = shadowing_sample(depression_angle(g, GroundNode::jammer), cfg_.channel, channel_rng_);
    last_shadow_pos_ = pos;
    shadow_drawn_ = true;
}

StepOutcome World::step(PrbIndex action) {
    PrbIndex::checked(action.value(), cfg_.n_prbs);
    StepOutcome out;
    out.slot = slot_;
    out.uav_prb = action;

    const JammerMove move = jammer_next(strategy_, jammer_prb_, cfg_.n_prbs, jammer_rng_);
    jammer_prb_ = move.prb;
    out.jammer_prb_truth = move.prb;
    out.jammer_transmitted = move.transmitted;
    out.hypothesis = (move.transmitted && move.prb == action) ? Hypothesis::H1 : Hypothesis::H0;

    Geometry g;
    g.uav_pos = uav_position(static_cast<double>(slot_) * cfg_.timing.slot_duration_s(),
                             cfg_.trajectory);
    g.gbs_pos = cfg_.gbs_pos;
    g.jammer_pos = cfg_.jammer_pos;
    refresh_shadowing(g.uav_pos);
    PathLoss pl_gu = mean_pathloss(g, GroundNode::gbs, cfg_.channel);
    PathLoss pl_ju = mean_pathloss(g, GroundNode::jammer, cfg_.channel);
    pl_gu.shadowing_db = shadow_gu_db_;
    pl_ju.shadowing_db = shadow_ju_db_;

    const Symbol s_u = qpsk_symbol(symbol_rng_);
    const Symbol s_j = jammer_link_.apply(qpsk_symbol(symbol_rng_));
    if (slot_ == 0) {
        prev_uav_ = s_u;
        prev_jam_ = s_j;
    }
    const GeneralizedState x_u = to_generalized(s_u, prev_uav_);
    const GeneralizedState x_j = to_generalized(s_j, prev_jam_);
    prev_uav_ = s_u;
    prev_jam_ = s_j;

    const bool h1 = out.hypothesis == Hypothesis::H1;
    out.observation = observe(x_u, h1 ? std::optional<GeneralizedState>(x_j) : std::nullopt,
                              matrices_, noise_rng_);

    LinkBudget b = budget_;
    b.jammer_present = h1 ? 1 : 0;
    out.sinr = sinr(b, pl_gu.gain(), pl_ju.gain());
    ++slot_;
    return out;
}

}  // namespace aijam

#pragma once

#include "aijam/channel.hpp"
#include "aijam/signal.hpp"
#include "aijam/types.hpp"

#include <compare>
#include <string>
#include <vector>

namespace aijam {

// 1-based PRB number.
class PrbIndex {
public:
    constexpr PrbIndex() = default;
    constexpr explicit PrbIndex(int n) : n_(n) {}

    static PrbIndex checked(int n, int n_prbs);
    static constexpr PrbIndex from_zero_based(int i) { return PrbIndex(i + 1); }

    constexpr int value() const { return n_; }
    constexpr int index() const { return n_ - 1; }

    friend constexpr auto operator<=>(PrbIndex, PrbIndex) = default;

private:
    int n_ = 1;
};

enum class JammerKind { constant, sweep, random };

JammerKind parse_jammer_kind(const std::string& s);
std::string to_string(JammerKind kind);

struct JammerStrategy {
    JammerKind kind = JammerKind::constant;
    std::vector<PrbIndex> constant_set;
    double hit_rate = 0.4;

    void validate(int n_prbs) const;
};

struct JammerMove {
    PrbIndex prb;
    bool transmitted = false;
};

// Always consumes the same number of draws, whatever the strategy.
JammerMove jammer_next(const JammerStrategy& s, PrbIndex current, int n_prbs, Rng& rng);

enum class Hypothesis { H0, H1 };

inline const char* to_string(Hypothesis h) { return h == Hypothesis::H0 ? "H0" : "H1"; }

struct Trajectory {
    std::vector<Eigen::Vector2d> waypoints;  // horizontal (x, y)
    double speed_mps = 4.8;
    double altitude_m = 60.0;

    void validate() const;
};

Vec3 uav_position(double t_seconds, const Trajectory& tr);

struct SlotTiming {
    int n_frames = 200;
    int slots_per_frame = 10;
    double frame_duration_s = 0.010;

    int n_slots() const { return n_frames * slots_per_frame; }
    double slot_duration_s() const { return frame_duration_s / slots_per_frame; }
};

enum class ShadowingMode { per_slot, per_segment, frozen, off };

ShadowingMode parse_shadowing_mode(const std::string& s);
std::string to_string(ShadowingMode m);

struct WorldConfig {
    int n_prbs = 50;
    SlotTiming timing;
    double snr_db = 15.0;
    double jsr_db = 6.0;
    double jammer_phase_rad = M_PI / 4.0;
    double p_tx_uav_w = 1.0;
    JammerStrategy jammer;
    int constant_set_size = 3;  // used when jammer.constant_set is empty
    ChannelParams channel;
    ShadowingMode shadowing = ShadowingMode::per_segment;
    double decorrelation_distance_m = 20.0;
    Vec3 gbs_pos = Vec3(0.0, 0.0, 30.0);
    Vec3 jammer_pos = Vec3(900.0, 600.0, 10.0);
    Trajectory trajectory;

    void validate() const;
    GdbnMatrices matrices(double process_var) const;
};

struct StepOutcome {
    std::int64_t slot = 0;
    PrbIndex uav_prb;
    GeneralizedState observation = GeneralizedState::Zero();
    Hypothesis hypothesis = Hypothesis::H0;
    double sinr = 0.0;
    PrbIndex jammer_prb_truth;  // logger only
    bool jammer_transmitted = false;
};

class World {
public:
    World(const WorldConfig& cfg, std::uint64_t seed);

    StepOutcome step(PrbIndex action);

    std::int64_t slot() const { return slot_; }
    const std::vector<PrbIndex>& constant_set() const { return strategy_.constant_set; }
    const LinkBudget& budget() const { return budget_; }
    const WorldConfig& config() const { return cfg_; }

private:
    void refresh_shadowing(const Vec3& pos);

    WorldConfig cfg_;
    JammerStrategy strategy_;
    GdbnMatrices matrices_;
    JammerLink jammer_link_;
    LinkBudget budget_;
    Rng jammer_rng_;
    Rng channel_rng_;
    Rng symbol_rng_;
    Rng noise_rng_;
    std::int64_t slot_ = 0;
    PrbIndex jammer_prb_;
    Symbol prev_uav_{};
    Symbol prev_jam_{};
    double shadow_gu_db_ = 0.0;
    double shadow_ju_db_ = 0.0;
    Vec3 last_shadow_pos_;
    bool shadow_drawn_ = false;
};

}  // namespace aijam

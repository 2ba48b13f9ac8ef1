#pragma once

#include "aijam/types.hpp"

namespace aijam {

struct ChannelParams {
    double alpha_pl = 3.04;
    double C = -23.29;
    double D = 4.14;
    double theta0 = -3.61;
    double eta0 = 20.70;
    double a_shadow = -0.41;
    double sigma0_shadow = 8.52;

    static ChannelParams suburban() { return {}; }
    // same model with the alternate shadowing offset
    static ChannelParams suburban_alt_sigma() {
        ChannelParams p;
        p.sigma0_shadow = 5.86;
        return p;
    }

    // Throws ConfigError if D == 0 or sigma(theta) <= 0 anywhere in
    // [theta_min, theta_max].
    void validate(double theta_min_deg, double theta_max_deg) const;
};

enum class GroundNode { gbs, jammer };

struct Geometry {
    Vec3 uav_pos = Vec3(0.0, 0.0, 60.0);
    Vec3 gbs_pos = Vec3(0.0, 0.0, 30.0);
    Vec3 jammer_pos = Vec3(0.0, 0.0, 10.0);

    void validate() const;
    const Vec3& ground(GroundNode node) const {
        return node == GroundNode::gbs ? gbs_pos : jammer_pos;
    }
};

struct LinkBudget {
    double p_tx_uav = 1.0;
    double p_tx_jammer = 1.0;
    double noise_power = 1.0;
    int jammer_present = 0;

    void validate() const;
};

double to_db(double linear);
double from_db(double db);

double horizontal_distance(const Geometry& g, GroundNode node);
double depression_angle(const Geometry& g, GroundNode node);

double terrestrial_pathloss(double d, double alpha_pl);
double excess_aerial_pathloss(double theta_deg, const ChannelParams& p);
double shadowing_sigma(double theta_deg, const ChannelParams& p);
double shadowing_sample(double theta_deg, const ChannelParams& p, Rng& rng);

struct PathLoss {
    double terrestrial_db = 0.0;
    double excess_db = 0.0;
    double shadowing_db = 0.0;

    double total_db() const { return terrestrial_db + excess_db + shadowing_db; }
    double gain() const { return from_db(-total_db()); }
};

// Deterministic part only; shadowing_db left at 0.
PathLoss mean_pathloss(const Geometry& g, GroundNode node, const ChannelParams& p);

PathLoss total_pathloss(const Geometry& g, GroundNode node, const ChannelParams& p,
                        Rng& rng, bool shadowing = true);

double sinr(const LinkBudget& budget, double h_gu, double h_ju);

}  // namespace aijam

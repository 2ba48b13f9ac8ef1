#include "aijam/channel.hpp"

#include <cmath>
#include <sstream>

namespace aijam {

namespace {
constexpr double kRadToDeg = 180.0 / M_PI;
}

void ChannelParams::validate(double theta_min_deg, double theta_max_deg) const {
    if (D == 0.0) throw ConfigError("channel: D must be nonzero");
    if (!(alpha_pl >= 0.0)) throw ConfigError("channel: alpha_pl must be >= 0");
    // sigma is affine in theta, so the endpoints decide
    for (double theta : {theta_min_deg, theta_max_deg}) {
        if (shadowing_sigma(theta, *this) <= 0.0) {
            std::ostringstream os;
            os << "channel: shadowing sigma " << shadowing_sigma(theta, *this)
               << " dB at theta=" << theta << " deg is not positive";
            throw ConfigError(os.str());
        }
    }
}

void Geometry::validate() const {
    for (const Vec3* p : {&uav_pos, &gbs_pos, &jammer_pos}) {
        if ((*p)(2) < 0.0) throw GeometryError("geometry: negative z coordinate");
    }
    if (uav_pos(2) <= gbs_pos(2) || uav_pos(2) <= jammer_pos(2))
        throw GeometryError("geometry: UAV must fly above the ground equipment");
}

void LinkBudget::validate() const {
    if (!(p_tx_uav > 0.0) || !(p_tx_jammer > 0.0) || !(noise_power > 0.0))
        throw ConfigError("link budget: powers must be positive");
    if (jammer_present != 0 && jammer_present != 1)
        throw ConfigError("link budget: jammer_present must be 0 or 1");
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

double horizontal_distance(const Geometry& g, GroundNode node) {
    const Vec3& e = g.ground(node);
    return std::hypot(g.uav_pos(0) - e(0), g.uav_pos(1) - e(1));
}

double depression_angle(const Geometry& g, GroundNode node) {
    const double d = horizontal_distance(g, node);
    if (d <= 0.0) throw GeometryError("depression_angle: UAV directly overhead (d = 0)");
    return std::atan((g.uav_pos(2) - g.ground(node)(2)) / d) * kRadToDeg;
}

double terrestrial_pathloss(double d, double alpha_pl) {
    if (d < 1.0) {
        warn("terrestrial_pathloss: distance below 1 m clamped");
        d = 1.0;
    }
    return 10.0 * alpha_pl * std::log10(d);
}

double excess_aerial_pathloss(double theta_deg, const ChannelParams& p) {
    const double x = theta_deg - p.theta0;
    return p.C * x * std::exp(-x / p.D) + p.eta0;
}

double shadowing_sigma(double theta_deg, const ChannelParams& p) {
    return p.a_shadow * theta_deg + p.sigma0_shadow;
}

double shadowing_sample(double theta_deg, const ChannelParams& p, Rng& rng) {
    const double sigma = shadowing_sigma(theta_deg, p);
    if (sigma <= 0.0) throw ConfigError("shadowing_sample: sigma(theta) <= 0");
    return sigma * standard_normal(rng);
}

PathLoss mean_pathloss(const Geometry& g, GroundNode node, const ChannelParams& p) {
    const double theta = depression_angle(g, node);
    PathLoss pl;
    pl.terrestrial_db = terrestrial_pathloss(horizontal_distance(g, node), p.alpha_pl);
    pl.excess_db = excess_aerial_pathloss(theta, p);
    return pl;
}

PathLoss total_pathloss(const Geometry& g, GroundNode node, const ChannelParams& p,
                        Rng& rng, bool shadowing) {
    PathLoss pl = mean_pathloss(g, node, p);
    if (shadowing) pl.shadowing_db = shadowing_sample(depression_angle(g, node), p, rng);
    return pl;
}

double sinr(const LinkBudget& b, double h_gu, double h_ju) {
    return b.p_tx_uav * h_gu / (b.jammer_present * b.p_tx_jammer * h_ju + b.noise_power);
}

}  // namespace aijam

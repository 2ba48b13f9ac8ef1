#pragma once

#include "aijam/types.hpp"

#include <vector>

namespace aijam {

inline constexpr double kProbFloor = 1e-12;

enum class SklReading {
    as_written,     // sum_i P_r(i) * [KL(pi||lambda) + KL(lambda||pi)], full KLs
    per_component,  // sum_i P_r(i) * [pi_i ln(pi_i/lambda_i) + lambda_i ln(lambda_i/pi_i)]
};

SklReading parse_skl_reading(const std::string& s);
std::string to_string(SklReading r);

double kl_divergence(const VecX& p, const VecX& q);

double skl_abnormality(const VecX& pi, const VecX& lambda, const VecX& occurrence,
                       SklReading reading = SklReading::as_written);

double bhattacharyya_distance(const Vec4& mu1, const Mat4& cov1, const Vec4& mu2, const Mat4& cov2);
double bhattacharyya_abnormality(const Gaussian& a, const Gaussian& b);

struct GeneralizedErrorDiscrete {
    int anchor = 1;  // superstate id
    VecX delta;
};

GeneralizedErrorDiscrete discrete_generalized_error(const VecX& pi, const VecX& lambda, int anchor);

struct AbnormalitySignal {
    double skl = 0.0;    // superstate level
    double bhatt = 0.0;  // continuous level
    bool is_abnormal = false;
};

enum class AbnormalityLevel { continuous, discrete };

AbnormalityLevel parse_abnormality_level(const std::string& s);
std::string to_string(AbnormalityLevel l);

AbnormalitySignal classify(double skl, double bhatt, AbnormalityLevel level, double th_skl,
                           double th_bhatt);

// Linear-interpolated empirical quantile, q in [0,1].
double empirical_quantile(std::vector<double> values, double q);

}  // namespace aijam

#include "aijam/abnormality.hpp"

#include "aijam/filter.hpp"

#include <algorithm>
#include <cmath>

namespace aijam {

SklReading parse_skl_reading(const std::string& s) {
    if (s == "as_written") return SklReading::as_written;
    if (s == "per_component") return SklReading::per_component;
    throw ConfigError("unknown skl reading '" + s + "'");
}

std::string to_string(SklReading r) {
    return r == SklReading::as_written ? "as_written" : "per_component";
}

AbnormalityLevel parse_abnormality_level(const std::string& s) {
    if (s == "continuous") return AbnormalityLevel::continuous;
    if (s == "discrete") return AbnormalityLevel::discrete;
    throw ConfigError("unknown abnormality level '" + s + "'");
}

std::string to_string(AbnormalityLevel l) {
    return l == AbnormalityLevel::continuous ? "continuous" : "discrete";
}

double kl_divergence(const VecX& p, const VecX& q) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double pi = std::max(p(i), kProbFloor);
        const double qi = std::max(q(i), kProbFloor);
        d += pi * std::log(pi / qi);
    }
    return d;
}

double skl_abnormality(const VecX& pi, const VecX& lambda, const VecX& occurrence,
                       SklReading reading) {
    if (pi.size() != lambda.size() || pi.size() != occurrence.size())
        throw ModelError("skl_abnormality: support sizes differ");
    double out = 0.0;
    if (reading == SklReading::as_written) {
        const double sym = kl_divergence(pi, lambda) + kl_divergence(lambda, pi);
        for (Eigen::Index i = 0; i < occurrence.size(); ++i)
            if (occurrence(i) > 0.0) out += occurrence(i) * sym;
    } else {
        for (Eigen::Index i = 0; i < occurrence.size(); ++i) {
            if (!(occurrence(i) > 0.0)) continue;
            const double a = std::max(pi(i), kProbFloor);
            const double b = std::max(lambda(i), kProbFloor);
            out += occurrence(i) * (a * std::log(a / b) + b * std::log(b / a));
        }
    }
    // each term is a KL or a symmetric pair; clamp roundoff
    return std::max(out, 0.0);
}

double bhattacharyya_distance(const Vec4& mu1, const Mat4& cov1, const Vec4& mu2, const Mat4& cov2) {
    Mat4 avg = 0.5 * (cov1 + cov2);
    Eigen::LLT<Mat4> llt(avg);
    if (llt.info() != Eigen::Success) {
        avg = floor_spd(avg);
        llt.compute(avg);
    }
    const Vec4 dmu = mu1 - mu2;
    const double maha = dmu.dot(llt.solve(dmu));
    auto logdet = [](const Mat4& m) {
        Eigen::LLT<Mat4> c(m);
        if (c.info() != Eigen::Success) c.compute(floor_spd(m));
        return 2.0 * c.matrixLLT().diagonal().array().log().sum();
    };
    const double ld_avg = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double d = 0.125 * maha + 0.5 * (ld_avg - 0.5 * (logdet(cov1) + logdet(cov2)));
    return std::max(d, 0.0);
}

double bhattacharyya_abnormality(const Gaussian& a, const Gaussian& b) {
    return bhattacharyya_distance(a.mean, a.cov, b.mean, b.cov);
}

GeneralizedErrorDiscrete discrete_generalized_error(const VecX& pi, const VecX& lambda, int anchor) {
    if (pi.size() != lambda.size()) throw ModelError("discrete_generalized_error: size mismatch");
    return {anchor, lambda - pi};
}

AbnormalitySignal classify(double skl, double bhatt, AbnormalityLevel level, double th_skl,
                           double th_bhatt) {
    AbnormalitySignal s;
    s.skl = skl;
    s.bhatt = bhatt;
    s.is_abnormal = level == AbnormalityLevel::continuous ? bhatt >= th_bhatt : skl >= th_skl;
    return s;
}

double empirical_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ModelError("empirical_quantile: no values");
    q = std::clamp(q, 0.0, 1.0);
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace aijam

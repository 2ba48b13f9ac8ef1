#include "aijam/signal.hpp"

#include "aijam/channel.hpp"

#include <cmath>

namespace aijam {

namespace {

bool is_psd(const Mat4& m) {
    if (!m.isApprox(m.transpose(), 1e-9)) return false;
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff() >= -1e-12;
}

}  // namespace

GdbnMatrices GdbnMatrices::constant_velocity(double process_var, double noise_var) {
    GdbnMatrices m;
    m.A = Mat4::Identity();
    m.A(0, 2) = 1.0;
    m.A(1, 3) = 1.0;
    m.B = Mat4::Identity();
    m.H = Mat4::Identity();
    m.Sigma_w = process_var * Mat4::Identity();
    m.Sigma_v = noise_var * Mat4::Identity();
    return m;
}

void GdbnMatrices::validate() const {
    if (!A.allFinite() || !B.allFinite() || !H.allFinite())
        throw ModelError("gdbn: non-finite matrix entries");
    if (std::abs(H.determinant()) < 1e-12) throw ModelError("gdbn: H is singular");
    if (!is_psd(Sigma_w)) throw ModelError("gdbn: Sigma_w is not symmetric PSD");
    if (!is_psd(Sigma_v)) throw ModelError("gdbn: Sigma_v is not symmetric PSD");
}

Mat4 GdbnMatrices::H_inverse() const {
    if (std::abs(H.determinant()) < 1e-12) throw ModelError("gdbn: H is singular");
    return H.inverse();
}

Symbol qpsk_symbol(Rng& rng) {
    const auto bits = rng() >> 62;
    const double s = 1.0 / std::sqrt(2.0);
    return {(bits & 1) ? s : -s, (bits & 2) ? s : -s};
}

std::vector<Symbol> qpsk_stream(std::size_t n_symbols, Rng& rng) {
    std::vector<Symbol> out(n_symbols);
    for (auto& s : out) s = qpsk_symbol(rng);
    return out;
}

GeneralizedState to_generalized(Symbol current, Symbol previous) {
    GeneralizedState x;
    x << current.real(), current.imag(), current.real() - previous.real(),
        current.imag() - previous.imag();
    return x;
}

GeneralizedState to_generalized(std::span<const Symbol> symbols, std::size_t t) {
    const Symbol cur = symbols[t];
    return to_generalized(cur, t == 0 ? cur : symbols[t - 1]);
}

double noise_variance_for_snr(double snr_db) { return 0.5 / from_db(snr_db); }

JammerLink JammerLink::from_jsr(double jsr_db, double phase_rad) {
    return {std::sqrt(from_db(jsr_db)), phase_rad};
}

GeneralizedState observe(const GeneralizedState& x_uav,
                         const std::optional<GeneralizedState>& x_jam,
                         const GdbnMatrices& m, Rng& rng, bool with_noise) {
    Vec4 n;
    for (int i = 0; i < 4; ++i) n(i) = standard_normal(rng);
    GeneralizedState z = m.H * x_uav;
    if (x_jam) z += m.H * (*x_jam);
    if (with_noise) {
        Eigen::LLT<Mat4> llt(m.Sigma_v);
        if (llt.info() == Eigen::Success) {
            z += llt.matrixL() * n;
        } else {
            // PSD but singular: fall back to the symmetric square root
            Eigen::SelfAdjointEigenSolver<Mat4> es(m.Sigma_v);
            Vec4 ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
            z += es.eigenvectors() * ev.asDiagonal() * n;
        }
    }
    return z;
}

}  // namespace aijam

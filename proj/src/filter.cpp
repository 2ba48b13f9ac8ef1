#include "aijam/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aijam {

Mat4 floor_spd(const Mat4& P, double floor) {
    Mat4 S = 0.5 * (P + P.transpose());
    Eigen::LLT<Mat4> probe(S - floor * Mat4::Identity());
    if (probe.info() == Eigen::Success) return S;
    Eigen::SelfAdjointEigenSolver<Mat4> es(S);
    const Vec4 ev = es.eigenvalues().cwiseMax(floor);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double gaussian_logpdf(const Vec4& x, const Vec4& mean, const Mat4& cov) {
    Eigen::LLT<Mat4> llt(cov);
    if (llt.info() != Eigen::Success) {
        llt.compute(floor_spd(cov));
    }
    const Vec4 d = x - mean;
    const Vec4 y = llt.matrixL().solve(d);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * (y.squaredNorm() + logdet + 4.0 * std::log(2.0 * M_PI));
}

ParticleSet init_particles(int n_particles, int n_states, const Vec4& mean, const Mat4& cov) {
    if (n_particles < 1 || n_states < 1) throw ModelError("init_particles: empty set");
    ParticleSet ps;
    ps.particles.resize(n_particles);
    for (int l = 0; l < n_particles; ++l) {
        Particle& p = ps.particles[l];
        p.superstate = l % n_states + 1;
        p.weight = 1.0 / n_particles;
        p.kf_mean = mean;
        p.kf_cov = cov;
    }
    ps.prior = {mean, cov};
    return ps;
}

void remap_superstates(ParticleSet& ps, std::span<const Superstate> from,
                       std::span<const Superstate> to) {
    std::vector<int> map(from.size());
    for (std::size_t k = 0; k < from.size(); ++k) map[k] = nearest_superstate(from[k].mean, to);
    for (Particle& p : ps.particles) p.superstate = map.at(p.superstate - 1);
}

Gaussian moment_match(const ParticleSet& ps) {
    Gaussian g;
    g.mean.setZero();
    double wsum = 0.0;
    for (const Particle& p : ps.particles) {
        g.mean += p.weight * p.kf_mean;
        wsum += p.weight;
    }
    g.mean /= wsum;
    g.cov.setZero();
    for (const Particle& p : ps.particles) {
        const Vec4 d = p.kf_mean - g.mean;
        g.cov += p.weight * (p.kf_cov + d * d.transpose());
    }
    g.cov = floor_spd(g.cov / wsum);
    return g;
}

VecX superstate_histogram(const ParticleSet& ps, int n_states, bool weighted) {
    VecX h = VecX::Zero(n_states);
    for (const Particle& p : ps.particles) h(p.superstate - 1) += weighted ? p.weight : 1.0;
    const double s = h.sum();
    if (s > 0.0) h /= s;
    return h;
}

void predict(ParticleSet& ps, const MatX& transitions, std::span<const Superstate> superstates,
             const GdbnMatrices& m, Rng& rng) {
    const int M = static_cast<int>(superstates.size());
    if (transitions.rows() != M || transitions.cols() != M)
        throw ModelError("predict: transition matrix does not match superstates");
    ps.prior = moment_match(ps);

    MatX cdf(M, M);
    for (int i = 0; i < M; ++i) {
        double acc = 0.0;
        for (int j = 0; j < M; ++j) {
            acc += transitions(i, j);
            cdf(i, j) = acc;
        }
    }
    for (Particle& p : ps.particles) {
        const int row = p.superstate - 1;
        const double u = uniform01(rng) * cdf(row, M - 1);
        int next = 0;
        while (next < M - 1 && cdf(row, next) <= u) ++next;
        p.superstate = next + 1;
        const Superstate& s = superstates[next];
        p.kf_mean = m.A * p.kf_mean + m.B * s.mean;
        p.kf_cov = floor_spd(m.A * p.kf_cov * m.A.transpose() + m.B * s.cov * m.B.transpose() +
                             m.Sigma_w);
    }
}

UpdateResult update(ParticleSet& ps, const Vec4& z, std::span<const Superstate> superstates,
                    const GdbnMatrices& m) {
    const int M = static_cast<int>(superstates.size());
    const int L = ps.size();
    UpdateResult res;
    MessagePair& msg = res.messages;
    msg.discrete_pi = superstate_histogram(ps, M, true);
    msg.occurrence = superstate_histogram(ps, M, false);
    msg.cont_pi = moment_match(ps);
    const Mat4 Hinv = m.H_inverse();
    msg.cont_lambda.mean = Hinv * z;
    msg.cont_lambda.cov = floor_spd(Hinv * m.Sigma_v * Hinv.transpose());

    std::vector<double> loglik(L);
    VecX lam_acc = VecX::Zero(M);  // prior-weighted likelihood sums per superstate
    VecX lam_w = VecX::Zero(M);
    VecX lam_plain = VecX::Zero(M);  // unweighted fallback
    double ref = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < L; ++l) {
        Particle& p = ps.particles[l];
        const Vec4 zhat = m.H * p.kf_mean;
        const Mat4 S = m.H * p.kf_cov * m.H.transpose() + m.Sigma_v;
        loglik[l] = gaussian_logpdf(z, zhat, S);
        ref = std::max(ref, loglik[l]);
    }
    // per-superstate likelihood for superstates no particle visits
    VecX empty_loglik = VecX::Constant(M, -std::numeric_limits<double>::infinity());
    for (int k = 0; k < M; ++k) {
        if (msg.occurrence(k) > 0.0) continue;
        const Superstate& s = superstates[k];
        const Vec4 x = m.A * ps.prior.mean + m.B * s.mean;
        const Mat4 P = m.A * ps.prior.cov * m.A.transpose() + m.B * s.cov * m.B.transpose() + m.Sigma_w;
        empty_loglik(k) = gaussian_logpdf(z, m.H * x, m.H * P * m.H.transpose() + m.Sigma_v);
        ref = std::max(ref, empty_loglik(k));
    }

    // KF update and weights
    double wsum = 0.0;
    for (int l = 0; l < L; ++l) {
        Particle& p = ps.particles[l];
        const double w0 = p.weight;
        const double lik = std::isfinite(loglik[l]) ? std::exp(loglik[l] - ref) : 0.0;
        lam_acc(p.superstate - 1) += w0 * lik;
        lam_w(p.superstate - 1) += w0;
        lam_plain(p.superstate - 1) += lik;
        p.weight = w0 * lik;
        wsum += p.weight;

        const Mat4 S = m.H * p.kf_cov * m.H.transpose() + m.Sigma_v;
        const Eigen::Matrix4d K = p.kf_cov * m.H.transpose() * S.inverse();
        p.kf_mean = p.kf_mean + K * (z - m.H * p.kf_mean);
        p.kf_cov = floor_spd((Mat4::Identity() - K * m.H) * p.kf_cov);
    }
    if (!(wsum > 0.0) || !std::isfinite(wsum)) {
        res.degenerate = true;
        for (Particle& p : ps.particles) p.weight = 1.0 / L;
    } else {
        for (Particle& p : ps.particles) p.weight /= wsum;
    }

    msg.discrete_lambda = VecX::Zero(M);
    for (int k = 0; k < M; ++k) {
        if (lam_w(k) > 0.0) {
            msg.discrete_lambda(k) = lam_acc(k) / lam_w(k);
        } else if (msg.occurrence(k) > 0.0) {
            msg.discrete_lambda(k) = lam_plain(k) / (msg.occurrence(k) * L);
        } else if (std::isfinite(empty_loglik(k))) {
            msg.discrete_lambda(k) = std::exp(empty_loglik(k) - ref);
        }
    }
    const double lsum = msg.discrete_lambda.sum();
    if (lsum > 0.0 && std::isfinite(lsum)) {
        msg.discrete_lambda /= lsum;
    } else {
        msg.discrete_lambda.setConstant(1.0 / M);
    }
    res.posterior = superstate_histogram(ps, M, true);
    return res;
}

double effective_sample_size(const ParticleSet& ps) {
    double s = 0.0, s2 = 0.0;
    for (const Particle& p : ps.particles) {
        s += p.weight;
        s2 += p.weight * p.weight;
    }
    return s2 > 0.0 ? s * s / s2 : 0.0;
}

bool resample(ParticleSet& ps, Rng& rng, double threshold_fraction) {
    const int L = ps.size();
    if (!(effective_sample_size(ps) < threshold_fraction * L)) return false;
    double total = 0.0;
    for (const Particle& p : ps.particles) total += p.weight;
    std::vector<Particle> out;
    out.reserve(L);
    const double step = total / L;
    double u = uniform01(rng) * step;
    double cum = 0.0;
    int i = 0;
    for (int l = 0; l < L; ++l) {
        while (i < L - 1 && cum + ps.particles[i].weight < u) {
            cum += ps.particles[i].weight;
            ++i;
        }
        out.push_back(ps.particles[i]);
        out.back().weight = 1.0 / L;
        u += step;
    }
    ps.particles = std::move(out);
    return true;
}

}  // namespace aijam

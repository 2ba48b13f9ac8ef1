#pragma once

#include "aijam/offline_learning.hpp"
#include "aijam/signal.hpp"
#include "aijam/types.hpp"

#include <span>
#include <vector>

namespace aijam {

struct Particle {
    int superstate = 1;  // id into the active PRB model
    double weight = 0.0;
    Vec4 kf_mean = Vec4::Zero();
    Mat4 kf_cov = Mat4::Identity();
};

struct ParticleSet {
    std::vector<Particle> particles;
    // moment-matched posterior from the previous slot, set by predict()
    Gaussian prior;

    int size() const { return static_cast<int>(particles.size()); }
};

struct MessagePair {
    VecX discrete_pi;
    VecX discrete_lambda;
    VecX occurrence;  // unweighted particle histogram over superstates
    Gaussian cont_pi;
    Gaussian cont_lambda;
};

struct UpdateResult {
    MessagePair messages;
    VecX posterior;  // weighted superstate histogram after the update
    bool degenerate = false;
};

inline constexpr double kCovFloor = 1e-10;

// Symmetrize and lift eigenvalues to at least `floor`.
Mat4 floor_spd(const Mat4& P, double floor = kCovFloor);

double gaussian_logpdf(const Vec4& x, const Vec4& mean, const Mat4& cov);

// Superstates spread evenly over particles, equal weights.
ParticleSet init_particles(int n_particles, int n_states, const Vec4& mean, const Mat4& cov);

// Map each particle to the nearest superstate of another PRB model.
void remap_superstates(ParticleSet& ps, std::span<const Superstate> from,
                       std::span<const Superstate> to);

void predict(ParticleSet& ps, const MatX& transitions, std::span<const Superstate> superstates,
             const GdbnMatrices& m, Rng& rng);

UpdateResult update(ParticleSet& ps, const Vec4& z, std::span<const Superstate> superstates,
                    const GdbnMatrices& m);

Gaussian moment_match(const ParticleSet& ps);
VecX superstate_histogram(const ParticleSet& ps, int n_states, bool weighted);

double effective_sample_size(const ParticleSet& ps);

// Systematic resampling when ESS < threshold_fraction * L. Returns true if it ran.
bool resample(ParticleSet& ps, Rng& rng, double threshold_fraction = 0.5);

}  // namespace aijam

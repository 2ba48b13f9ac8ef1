#pragma once

#include "aijam/abnormality.hpp"
#include "aijam/environment.hpp"
#include "aijam/filter.hpp"
#include "aijam/offline_learning.hpp"

namespace aijam {

struct PerceptionConfig {
    int n_particles = 100;
    double resample_fraction = 0.5;
    SklReading skl_reading = SklReading::as_written;
    AbnormalityLevel level = AbnormalityLevel::continuous;
    // keep the prediction instead of the update on abnormal slots
    bool reject_abnormal = false;
    double initial_variance = 1.0;

    void validate() const;
};

struct PerceptionResult {
    AbnormalitySignal signal;
    MessagePair messages;
    GeneralizedErrorDiscrete superstate_error;
    bool degenerate = false;
    bool resampled = false;
};

// M-MJPF over the PRB-specific models plus the abnormality indicators.
class Perception {
public:
    Perception(const LearnedModel& model, PerceptionConfig cfg, Rng rng);

    PerceptionResult observe(PrbIndex prb, const Vec4& z);

    const ParticleSet& particles() const { return ps_; }

private:
    const LearnedModel* model_;
    PerceptionConfig cfg_;
    Rng rng_;
    ParticleSet ps_;
    PrbIndex current_;
};

}  // namespace aijam

#include "aijam/perception.hpp"

namespace aijam {

void PerceptionConfig::validate() const {
    if (n_particles < 1) throw ConfigError("filter: n_particles must be >= 1");
    if (!(resample_fraction >= 0.0 && resample_fraction <= 1.0))
        throw ConfigError("filter: resample_fraction outside [0,1]");
    if (!(initial_variance > 0.0)) throw ConfigError("filter: initial_variance must be positive");
}

Perception::Perception(const LearnedModel& model, PerceptionConfig cfg, Rng rng)
    : model_(&model), cfg_(cfg), rng_(std::move(rng)), current_(1) {
    cfg_.validate();
    ps_ = init_particles(cfg_.n_particles, model.prb(current_).n_states(), Vec4::Zero(),
                         cfg_.initial_variance * Mat4::Identity());
}

PerceptionResult Perception::observe(PrbIndex prb, const Vec4& z) {
    const PrbModel& pm = model_->prb(prb);
    if (prb != current_) {
        remap_superstates(ps_, model_->prb(current_).superstates, pm.superstates);
        current_ = prb;
    }
    predict(ps_, pm.transitions.segment(0), pm.superstates, model_->matrices, rng_);
    const ParticleSet predicted = ps_;
    const UpdateResult up = update(ps_, z, pm.superstates, model_->matrices);

    PerceptionResult res;
    res.messages = up.messages;
    res.degenerate = up.degenerate;
    const MessagePair& msg = up.messages;
    const double skl = skl_abnormality(msg.discrete_pi, msg.discrete_lambda, msg.occurrence,
                                       cfg_.skl_reading);
    const double bhatt = bhattacharyya_abnormality(msg.cont_pi, msg.cont_lambda);
    res.signal = classify(skl, bhatt, cfg_.level, pm.th_skl, pm.th_bhatt);
    Eigen::Index anchor = 0;
    msg.discrete_pi.maxCoeff(&anchor);
    res.superstate_error = discrete_generalized_error(msg.discrete_pi, msg.discrete_lambda,
                                                      static_cast<int>(anchor) + 1);
    if (res.signal.is_abnormal && cfg_.reject_abnormal) {
        ps_ = predicted;
    } else {
        res.resampled = resample(ps_, rng_, cfg_.resample_fraction);
    }
    return res;
}

}  // namespace aijam

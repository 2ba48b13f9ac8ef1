#include "aijam/offline_learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace aijam {

std::vector<GeneralizedState> null_force_predictions(std::span<const Vec4> observations,
                                                     const GdbnMatrices& m) {
    const Mat4 Hinv = m.H_inverse();
    std::vector<GeneralizedState> out(observations.size());
    for (std::size_t t = 0; t < observations.size(); ++t) {
        out[t] = t == 0 ? GeneralizedState(Hinv * observations[0])
                        : GeneralizedState(m.A * (Hinv * observations[t - 1]));
    }
    return out;
}

std::vector<GeneralizedErrorSample> generalized_errors(std::span<const Vec4> observations,
                                                       std::span<const GeneralizedState> predictions,
                                                       const Mat4& H) {
    if (observations.size() != predictions.size())
        throw ModelError("generalized_errors: sequences are not aligned");
    if (std::abs(H.determinant()) < 1e-12) throw ModelError("generalized_errors: H is singular");
    const Mat4 Hinv = H.inverse();
    std::vector<GeneralizedErrorSample> out(observations.size());
    for (std::size_t t = 0; t < observations.size(); ++t) {
        out[t].predicted = predictions[t];
        out[t].error = Hinv * (observations[t] - H * predictions[t]);
    }
    return out;
}

void GngParams::validate() const {
    if (max_nodes < 2) throw ConfigError("gng: max_nodes must be >= 2");
    if (insertion_interval < 1) throw ConfigError("gng: insertion_interval must be >= 1");
    if (!(eps_winner > 0.0 && eps_winner <= 1.0) || !(eps_neighbor >= 0.0 && eps_neighbor <= 1.0))
        throw ConfigError("gng: learning rates must lie in (0,1]");
    if (max_edge_age < 1) throw ConfigError("gng: max_edge_age must be >= 1");
    if (!(alpha_split > 0.0 && alpha_split <= 1.0) || !(error_decay > 0.0 && error_decay <= 1.0))
        throw ConfigError("gng: error decay factors must lie in (0,1]");
    if (epochs < 1) throw ConfigError("gng: epochs must be >= 1");
}

namespace {

class GrowingNeuralGas {
public:
    explicit GrowingNeuralGas(const GngParams& p)
        : p_(p), w_(p.max_nodes), err_(p.max_nodes, 0.0), alive_(p.max_nodes, false),
          age_(p.max_nodes, std::vector<int>(p.max_nodes, -1)) {}

    void seed(const Vec4& a, const Vec4& b) {
        add_node(a, 0.0);
        add_node(b, 0.0);
    }

    void adapt(const Vec4& x) {
        int s1 = -1, s2 = -1;
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        for (int i = 0; i < p_.max_nodes; ++i) {
            if (!alive_[i]) continue;
            const double d = (x - w_[i]).squaredNorm();
            if (d < d1) {
                d2 = d1; s2 = s1;
                d1 = d; s1 = i;
            } else if (d < d2) {
                d2 = d; s2 = i;
            }
        }
        for (int n = 0; n < p_.max_nodes; ++n) {
            if (age_[s1][n] < 0) continue;
            ++age_[s1][n];
            age_[n][s1] = age_[s1][n];
        }
        err_[s1] += d1;
        w_[s1] += p_.eps_winner * (x - w_[s1]);
        for (int n = 0; n < p_.max_nodes; ++n) {
            if (age_[s1][n] >= 0) w_[n] += p_.eps_neighbor * (x - w_[n]);
        }
        age_[s1][s2] = age_[s2][s1] = 0;
        prune();

        if (++steps_ % p_.insertion_interval == 0 && count() < p_.max_nodes) insert();
        for (int i = 0; i < p_.max_nodes; ++i) err_[i] *= p_.error_decay;
    }

    std::vector<Vec4> nodes() const {
        std::vector<Vec4> out;
        for (int i = 0; i < p_.max_nodes; ++i)
            if (alive_[i]) out.push_back(w_[i]);
        return out;
    }

private:
    int count() const { return static_cast<int>(std::count(alive_.begin(), alive_.end(), true)); }

    int add_node(const Vec4& w, double e) {
        for (int i = 0; i < p_.max_nodes; ++i) {
            if (alive_[i]) continue;
            alive_[i] = true;
            w_[i] = w;
            err_[i] = e;
            std::fill(age_[i].begin(), age_[i].end(), -1);
            for (auto& row : age_) row[i] = -1;
            return i;
        }
        return -1;
    }

    void prune() {
        for (int i = 0; i < p_.max_nodes; ++i)
            for (int j = 0; j < p_.max_nodes; ++j)
                if (age_[i][j] > p_.max_edge_age) age_[i][j] = -1;
        for (int i = 0; i < p_.max_nodes; ++i) {
            if (!alive_[i] || count() <= 2) continue;
            const bool isolated = std::none_of(age_[i].begin(), age_[i].end(),
                                               [](int a) { return a >= 0; });
            if (isolated) alive_[i] = false;
        }
    }

    void insert() {
        int q = -1;
        for (int i = 0; i < p_.max_nodes; ++i)
            if (alive_[i] && (q < 0 || err_[i] > err_[q])) q = i;
        int f = -1;
        for (int n = 0; n < p_.max_nodes; ++n)
            if (age_[q][n] >= 0 && (f < 0 || err_[n] > err_[f])) f = n;
        if (f < 0) return;
        err_[q] *= p_.alpha_split;
        err_[f] *= p_.alpha_split;
        const int r = add_node(0.5 * (w_[q] + w_[f]), err_[q]);
        age_[q][f] = age_[f][q] = -1;
        age_[q][r] = age_[r][q] = 0;
        age_[f][r] = age_[r][f] = 0;
    }

    GngParams p_;
    std::vector<Vec4> w_;
    std::vector<double> err_;
    std::vector<bool> alive_;
    std::vector<std::vector<int>> age_;
    long steps_ = 0;
};

}  // namespace

int nearest_superstate(const Vec4& x, std::span<const Superstate> superstates) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < superstates.size(); ++i) {
        const double d = (x - superstates[i].mean).squaredNorm();
        if (d < bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best + 1;
}

std::vector<int> assign_superstates(std::span<const Vec4> samples,
                                    std::span<const Superstate> superstates) {
    std::vector<int> out(samples.size());
    for (std::size_t t = 0; t < samples.size(); ++t) out[t] = nearest_superstate(samples[t], superstates);
    return out;
}

std::vector<Superstate> gng_fit(std::span<const Vec4> samples, const GngParams& params,
                                PrbIndex prb, Rng& rng) {
    params.validate();
    const int n = static_cast<int>(samples.size());
    if (n < 2) throw ModelError("gng_fit: at least 2 samples required");

    GrowingNeuralGas gng(params);
    const int a = uniform_int(rng, 0, n - 1);
    int b = uniform_int(rng, 0, n - 2);
    if (b >= a) ++b;
    gng.seed(samples[a], samples[b]);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_int(rng, 0, i)]);
        for (int i : order) gng.adapt(samples[i]);
    }

    std::vector<Superstate> nodes;
    for (const Vec4& w : gng.nodes()) {
        Superstate s;
        s.prb = prb;
        s.mean = w;
        nodes.push_back(s);
    }
    const std::vector<int> labels = assign_superstates(samples, nodes);

    std::vector<Superstate> out;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        Vec4 mu = Vec4::Zero();
        int count = 0;
        for (int t = 0; t < n; ++t)
            if (labels[t] == static_cast<int>(k) + 1) {
                mu += samples[t];
                ++count;
            }
        if (count == 0) continue;  // dropped; ids re-densified below
        mu /= count;
        Mat4 cov = Mat4::Zero();
        for (int t = 0; t < n; ++t)
            if (labels[t] == static_cast<int>(k) + 1) {
                const Vec4 d = samples[t] - mu;
                cov += d * d.transpose();
            }
        cov /= std::max(1, count - 1);
        Superstate s = nodes[k];
        s.id = static_cast<int>(out.size()) + 1;
        s.cov = 0.5 * (cov + cov.transpose()) + kClusterCovJitter * Mat4::Identity();
        out.push_back(s);
    }
    return out;
}

int SuperstateTransitions::segment_for(std::int64_t t, std::int64_t horizon) const {
    const int n_seg = static_cast<int>(segments.size());
    if (n_seg <= 1 || horizon <= 0) return 0;
    const auto k = static_cast<int>((std::max<std::int64_t>(0, t) * n_seg) / horizon);
    return std::min(k, n_seg - 1);
}

void SuperstateTransitions::validate() const {
    if (segments.empty()) throw ModelError("transitions: no segments");
    for (const MatX& m : segments) {
        if (m.rows() != n_states || m.cols() != n_states)
            throw ModelError("transitions: matrix shape does not match state count");
        for (int i = 0; i < n_states; ++i) {
            if (m.row(i).minCoeff() < 0.0 || m.row(i).maxCoeff() > 1.0 ||
                std::abs(m.row(i).sum() - 1.0) > 1e-9)
                throw ModelError("transitions: row is not a probability simplex");
        }
    }
}

SuperstateTransitions estimate_transitions(std::span<const int> labels, int n_states,
                                           int n_segments, double smoothing) {
    if (labels.size() < 2) throw ModelError("estimate_transitions: need at least 2 labels");
    if (n_states < 1 || n_segments < 1) throw ModelError("estimate_transitions: bad sizes");
    if (smoothing < 0.0) throw ModelError("estimate_transitions: negative smoothing");
    for (int l : labels)
        if (l < 1 || l > n_states) throw ModelError("estimate_transitions: label out of range");

    SuperstateTransitions tr;
    tr.n_states = n_states;
    tr.segments.assign(n_segments, MatX::Zero(n_states, n_states));
    const auto len = static_cast<std::int64_t>(labels.size());
    for (std::int64_t t = 1; t < len; ++t) {
        const int seg = tr.segment_for(t, len);
        tr.segments[seg](labels[t - 1] - 1, labels[t] - 1) += 1.0;
    }
    for (MatX& m : tr.segments) {
        for (int i = 0; i < n_states; ++i) {
            const double total = m.row(i).sum() + smoothing * n_states;
            if (total <= 0.0) {
                m.row(i).setConstant(1.0 / n_states);
            } else {
                m.row(i) = (m.row(i).array() + smoothing) / total;
            }
        }
    }
    return tr;
}

PrbModel learn_prb_model(std::span<const Vec4> observations, const GdbnMatrices& m,
                         const GngParams& gng, int n_segments, double smoothing, PrbIndex prb,
                         Rng& rng) {
    const auto predictions = null_force_predictions(observations, m);
    const auto ge = generalized_errors(observations, predictions, m.H);
    std::vector<Vec4> errors(ge.size());
    for (std::size_t t = 0; t < ge.size(); ++t) errors[t] = ge[t].error;

    PrbModel model;
    model.prb = prb;
    model.superstates = gng_fit(errors, gng, prb, rng);
    const auto labels = assign_superstates(errors, model.superstates);
    model.transitions = estimate_transitions(labels, model.n_states(), n_segments, smoothing);
    return model;
}

void LearnedModel::validate() const {
    if (version != kVersion) throw ModelError("model: unsupported version");
    if (n_prbs < 1 || static_cast<int>(prbs.size()) != n_prbs)
        throw ModelError("model: PRB count mismatch");
    matrices.validate();
    for (int i = 0; i < n_prbs; ++i) {
        const PrbModel& p = prbs[i];
        if (p.prb.value() != i + 1) throw ModelError("model: PRB entries out of order");
        if (p.superstates.empty()) throw ModelError("model: PRB without superstates");
        for (std::size_t k = 0; k < p.superstates.size(); ++k) {
            const Superstate& s = p.superstates[k];
            if (s.id != static_cast<int>(k) + 1) throw ModelError("model: superstate ids not dense");
            Eigen::LLT<Mat4> llt(s.cov);
            if (llt.info() != Eigen::Success) throw ModelError("model: superstate covariance not SPD");
        }
        if (p.transitions.n_states != p.n_states()) throw ModelError("model: transition size mismatch");
        p.transitions.validate();
        if (!(p.th_skl >= 0.0) || !(p.th_bhatt >= 0.0)) throw ModelError("model: negative threshold");
    }
}

}  // namespace aijam

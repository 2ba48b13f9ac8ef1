#include "aijam/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace aijam {

namespace {
enum AgentStream : std::uint64_t { kAgentRng = 100, kPerceptionRng = 101 };
}

double EpisodeResult::collision_rate(std::int64_t last_n) const {
    const auto n = static_cast<std::int64_t>(rows.size());
    const std::int64_t k = std::min(last_n, n);
    if (k <= 0) return 0.0;
    int c = 0;
    for (std::int64_t t = n - k; t < n; ++t) c += rows[t].hypothesis == Hypothesis::H1;
    return static_cast<double>(c) / static_cast<double>(k);
}

std::unique_ptr<Policy> make_policy(const AgentConfig& a, int n_prbs, Rng& rng) {
    switch (a.kind) {
        case AgentKind::ain: return std::make_unique<ActiveInferenceAgent>(n_prbs, a.ain, rng);
        case AgentKind::ql: return std::make_unique<QLearningPolicy>(n_prbs, a.ql, rng);
        case AgentKind::fh: return std::make_unique<FrequencyHoppingPolicy>(n_prbs);
    }
    throw ConfigError("unknown agent kind");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::int64_t convergence_slot(std::span<const Hypothesis> hyps, int window, double threshold) {
    const auto n = static_cast<std::int64_t>(hyps.size());
    std::int64_t last_violation = -1;
    int in_window = 0;
    for (std::int64_t t = 0; t < n; ++t) {
        in_window += hyps[t] == Hypothesis::H1;
        if (t >= window) in_window -= hyps[t - window] == Hypothesis::H1;
        const double rate = static_cast<double>(in_window) / window;
        if (rate >= threshold) last_violation = t;
    }
    return last_violation + 1;  // == n when the last window violates
}

void write_metrics_csv(std::span<const MetricsRow> rows, std::ostream& out) {
    out << kMetricsHeader << '\n';
    for (const MetricsRow& r : rows) {
        out << r.slot << ',' << to_string(r.hypothesis) << ',' << format_double(r.reward) << ','
            << format_double(r.abnormality) << ',' << format_double(r.sinr_db) << ','
            << format_double(r.cum_reward) << ',' << format_double(r.cum_abnormality) << ','
            << format_double(r.cum_sinr) << ',' << r.chosen_prb << ',' << r.jammer_prb << '\n';
    }
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
    std::ostringstream os;
    write_metrics_csv(rows, os);
    return os.str();
}

EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t seed, const LearnedModel* model,
                          std::ostream* jsonl) {
    const int n = cfg.world.n_prbs;
    World world(cfg.world, seed);
    Rng agent_rng = make_rng(seed, kAgentRng);
    auto policy = make_policy(cfg.agent, n, agent_rng);
    if (model && model->n_prbs != n) throw ModelError("model PRB count differs from the scenario");
    if (policy->needs_perception() && !model)
        throw ModelError("agent '" + policy->name() + "' requires a trained model");
    std::optional<Perception> perception;
    if (model) perception.emplace(*model, cfg.filter, make_rng(seed, kPerceptionRng));

    EpisodeResult res;
    res.seed = seed;
    res.rows.reserve(cfg.n_slots);
    res.jammer_sequence.reserve(cfg.n_slots);
    std::vector<Hypothesis> hyps;
    hyps.reserve(cfg.n_slots);
    MetricsRow acc;
    for (std::int64_t t = 0; t < cfg.n_slots; ++t) {
        const PrbIndex action = policy->select(agent_rng);
        const StepOutcome out = world.step(action);
        std::optional<PerceptionResult> pr;
        if (perception) pr = perception->observe(action, out.observation);
        policy->observe(out, pr ? &*pr : nullptr);

        MetricsRow row;
        row.slot = t;
        row.hypothesis = out.hypothesis;
        row.reward = reward_for(out.hypothesis);
        row.abnormality = pr ? pr->signal.skl : 0.0;
        row.sinr_db = to_db(out.sinr);
        row.cum_reward = acc.cum_reward + row.reward;
        row.cum_abnormality = acc.cum_abnormality + row.abnormality;
        row.cum_sinr = acc.cum_sinr + from_db(row.sinr_db);
        row.chosen_prb = action.value();
        row.jammer_prb = out.jammer_prb_truth.value();
        acc = row;
        res.rows.push_back(row);
        res.jammer_sequence.push_back(row.jammer_prb);
        hyps.push_back(out.hypothesis);
        res.collisions += out.hypothesis == Hypothesis::H1;
        if (pr) {
            res.abnormal_flags += pr->signal.is_abnormal;
            res.degenerate_slots += pr->degenerate;
        }

        if (jsonl) {
            Json line;
            line["slot"] = t;
            line["action"] = action.value();
            line["hypothesis"] = to_string(out.hypothesis);
            line["sinr"] = out.sinr;
            line["jammer_prb"] = out.jammer_prb_truth.value();
            line["jammer_transmitted"] = out.jammer_transmitted;
            line["observation"] = vec4_to_json(out.observation);
            if (pr) {
                line["skl"] = pr->signal.skl;
                line["bhatt"] = pr->signal.bhatt;
                line["abnormal"] = pr->signal.is_abnormal;
            }
            *jsonl << line.dump() << '\n';
        }
    }
    res.convergence_slot = convergence_slot(hyps, cfg.convergence_window, cfg.convergence_threshold);
    if (auto* ain = dynamic_cast<ActiveInferenceAgent*>(policy.get())) res.final_tables = ain->tables();
    return res;
}

Json summary_json(const RunSummary& s) {
    Json j;
    j["run_id"] = s.run_id;
    j["agent"] = s.agent;
    Json eps = Json::array();
    double r = 0, a = 0, q = 0;
    for (const EpisodeResult& e : s.episodes) {
        eps.push_back({{"seed", e.seed},
                       {"final_cum_reward", e.final_cum_reward()},
                       {"final_cum_abnormality", e.final_cum_abnormality()},
                       {"final_cum_sinr", e.final_cum_sinr()},
                       {"convergence_slot", e.convergence_slot},
                       {"collisions", e.collisions},
                       {"abnormal_flags", e.abnormal_flags},
                       {"degenerate_slots", e.degenerate_slots}});
        r += e.final_cum_reward();
        a += e.final_cum_abnormality();
        q += e.final_cum_sinr();
    }
    const double k = s.episodes.empty() ? 1.0 : static_cast<double>(s.episodes.size());
    j["seeds"] = eps;
    j["mean"] = {{"final_cum_reward", r / k}, {"final_cum_abnormality", a / k}, {"final_cum_sinr", q / k}};
    return j;
}

namespace {

template <typename F>
void parallel_for(std::size_t n, int jobs, F&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs && static_cast<std::size_t>(w) < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

std::optional<LearnedModel> load_model_for(const ScenarioConfig& cfg) {
    if (cfg.model_path.empty()) {
        if (cfg.agent.kind == AgentKind::ain) throw ModelError("ain agent requires model_path");
        return std::nullopt;
    }
    return load_model(cfg.model_path);
}

}  // namespace

RunSummary run(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, int jobs,
               const LearnedModel* model) {
    cfg.validate();
    std::optional<LearnedModel> owned;
    if (!model) {
        owned = load_model_for(cfg);
        if (owned) model = &*owned;
    }
    if (cfg.agent.kind == AgentKind::ain && !model) throw ModelError("ain agent requires a model");

    std::filesystem::path dir;
    if (!out_dir.empty()) {
        dir = out_dir / cfg.run_id;
        std::filesystem::create_directories(dir);
    }
    RunSummary summary;
    summary.run_id = cfg.run_id;
    summary.agent = cfg.agent.label;
    summary.episodes.resize(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), jobs, [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        std::ofstream jsonl;
        if (!dir.empty() && cfg.write_jsonl) jsonl.open(dir / ("seed" + std::to_string(seed) + ".jsonl"));
        summary.episodes[i] = run_episode(cfg, seed, model, jsonl.is_open() ? &jsonl : nullptr);
        if (!dir.empty()) {
            std::ofstream csv(dir / ("seed" + std::to_string(seed) + ".csv"));
            write_metrics_csv(summary.episodes[i].rows, csv);
            if (!csv) throw std::runtime_error("write failure in " + dir.string());
        }
    });
    if (!dir.empty()) {
        std::ofstream js(dir / "summary.json");
        js << summary_json(summary).dump(2) << '\n';
    }
    return summary;
}

LearnedModel train(const ScenarioConfig& cfg, TrainReport* report) {
    cfg.validate();
    const TrainingConfig& tc = cfg.training;
    const int n = cfg.world.n_prbs;
    WorldConfig clean = cfg.world;
    clean.jammer.hit_rate = 0.0;  // jammer forced absent

    LearnedModel model;
    model.n_prbs = n;
    model.matrices = cfg.world.matrices(tc.process_var);
    model.snr_db = cfg.world.snr_db;
    model.threshold_quantile = tc.threshold_quantile;
    model.prbs.resize(n);
    const std::int64_t slots = tc.slots_per_prb > 0 ? tc.slots_per_prb : cfg.n_slots;
    if (slots < 2) throw ConfigError("training: need at least 2 slots per PRB");

    for (int k = 1; k <= n; ++k) {
        World w(clean, mix_seed(tc.seed, 1000 + k));
        std::vector<Vec4> obs(slots);
        for (std::int64_t t = 0; t < slots; ++t) obs[t] = w.step(PrbIndex(k)).observation;
        Rng rng = make_rng(tc.seed, 5000 + k);
        model.prbs[k - 1] = learn_prb_model(obs, model.matrices, tc.gng, tc.n_segments, tc.smoothing,
                                            PrbIndex(k), rng);
    }

    // thresholds from a clean run hopping uniformly over PRBs
    PerceptionConfig pc = cfg.filter;
    pc.reject_abnormal = false;
    Perception perception(model, pc, make_rng(tc.seed, 7));
    World w(clean, mix_seed(tc.seed, 99));
    Rng hop = make_rng(tc.seed, 8);
    std::vector<std::vector<double>> skl(n), bh(n);
    std::vector<double> all_skl, all_bh;
    for (std::int64_t t = 0; t < tc.validation_slots; ++t) {
        const PrbIndex a = fh_select(n, hop);
        const StepOutcome o = w.step(a);
        const PerceptionResult r = perception.observe(a, o.observation);
        skl[a.index()].push_back(r.signal.skl);
        bh[a.index()].push_back(r.signal.bhatt);
        all_skl.push_back(r.signal.skl);
        all_bh.push_back(r.signal.bhatt);
    }
    constexpr std::size_t kMinSamples = 50;
    for (int k = 0; k < n; ++k) {
        const auto& s = skl[k].size() >= kMinSamples ? skl[k] : all_skl;
        const auto& b = bh[k].size() >= kMinSamples ? bh[k] : all_bh;
        model.prbs[k].th_skl = tc.threshold_margin * empirical_quantile(s, tc.threshold_quantile);
        model.prbs[k].th_bhatt = tc.threshold_margin * empirical_quantile(b, tc.threshold_quantile);
    }
    model.validate();

    if (report) {
        report->clean_flag_rate.assign(n, 0.0);
        std::size_t flagged = 0, total = 0;
        for (int k = 0; k < n; ++k) {
            std::size_t f = 0;
            for (std::size_t i = 0; i < skl[k].size(); ++i) {
                f += classify(skl[k][i], bh[k][i], cfg.filter.level, model.prbs[k].th_skl,
                              model.prbs[k].th_bhatt)
                         .is_abnormal;
            }
            report->clean_flag_rate[k] = skl[k].empty() ? 0.0 : static_cast<double>(f) / skl[k].size();
            flagged += f;
            total += skl[k].size();
        }
        report->overall_flag_rate = total ? static_cast<double>(flagged) / total : 0.0;
    }
    return model;
}

BenchResult bench(const std::vector<ScenarioConfig>& configs, const std::filesystem::path& out_dir,
                  int jobs, const LearnedModel* model) {
    if (configs.empty()) throw ConfigError("bench: no configs");
    const Json env = environment_json(configs.front());
    for (const ScenarioConfig& c : configs) {
        if (environment_json(c) != env)
            throw ConfigError("bench: config '" + c.run_id + "' differs from '" + configs.front().run_id +
                              "' outside the agent section");
    }
    std::map<std::string, int> ids;
    for (const ScenarioConfig& c : configs)
        if (++ids[c.run_id] > 1) throw ConfigError("bench: duplicate run_id '" + c.run_id + "'");

    std::optional<LearnedModel> owned;
    if (!model) {
        for (const ScenarioConfig& c : configs) {
            if (!c.model_path.empty()) {
                owned = load_model(c.model_path);
                break;
            }
        }
        if (owned) model = &*owned;
    }
    BenchResult b;
    for (const ScenarioConfig& c : configs) b.runs.push_back(run(c, out_dir, jobs, model));
    if (!out_dir.empty()) {
        std::ofstream t(out_dir / "bench.csv");
        write_bench_csv(b, t);
        std::ofstream s(out_dir / "bench_seeds.csv");
        write_bench_seeds_csv(b, s);
    }
    return b;
}

void write_bench_csv(const BenchResult& b, std::ostream& out) {
    out << "agent,run_id,n_seeds,mean_cum_reward,mean_cum_abnormality,mean_cum_sinr,"
           "mean_convergence_slot,mean_collisions\n";
    for (const RunSummary& r : b.runs) {
        double cr = 0, ca = 0, cs = 0, conv = 0, col = 0;
        for (const EpisodeResult& e : r.episodes) {
            cr += e.final_cum_reward();
            ca += e.final_cum_abnormality();
            cs += e.final_cum_sinr();
            conv += static_cast<double>(e.convergence_slot);
            col += e.collisions;
        }
        const double k = static_cast<double>(std::max<std::size_t>(1, r.episodes.size()));
        out << r.agent << ',' << r.run_id << ',' << r.episodes.size() << ',' << format_double(cr / k) << ','
            << format_double(ca / k) << ',' << format_double(cs / k) << ',' << format_double(conv / k) << ','
            << format_double(col / k) << '\n';
    }
}

void write_bench_seeds_csv(const BenchResult& b, std::ostream& out) {
    out << "agent,run_id,seed,final_cum_reward,final_cum_abnormality,final_cum_sinr,convergence_slot,"
           "collisions\n";
    for (const RunSummary& r : b.runs)
        for (const EpisodeResult& e : r.episodes)
            out << r.agent << ',' << r.run_id << ',' << e.seed << ',' << format_double(e.final_cum_reward())
                << ',' << format_double(e.final_cum_abnormality()) << ',' << format_double(e.final_cum_sinr())
                << ',' << e.convergence_slot << ',' << e.collisions << '\n';
}

}  // namespace aijam

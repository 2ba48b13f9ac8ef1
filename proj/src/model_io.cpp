#include "aijam/json_util.hpp"
#include "aijam/offline_learning.hpp"

#include <fstream>
#include <sstream>

namespace aijam {

void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

Json matrix_to_json(const MatX& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

MatX matrix_from_json(const Json& j, int rows, int cols, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw ModelError(what + ": expected " + std::to_string(rows) + " rows");
    MatX m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
            throw ModelError(what + ": expected " + std::to_string(cols) + " columns");
        for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

Json vec4_to_json(const Vec4& v) { return Json::array({v(0), v(1), v(2), v(3)}); }

Vec4 vec4_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 4) throw ModelError(what + ": expected 4 numbers");
    Vec4 v;
    for (int i = 0; i < 4; ++i) v(i) = j[i].get<double>();
    return v;
}

Mat4 mat4_from_json(const Json& j, const std::string& what) {
    return matrix_from_json(j, 4, 4, what);
}

std::string model_to_json(const LearnedModel& model) {
    Json j;
    j["version"] = model.version;
    j["n_prbs"] = model.n_prbs;
    j["snr_db"] = model.snr_db;
    j["threshold_quantile"] = model.threshold_quantile;
    j["matrices"] = {{"A", matrix_to_json(model.matrices.A)},
                     {"B", matrix_to_json(model.matrices.B)},
                     {"H", matrix_to_json(model.matrices.H)},
                     {"Sigma_w", matrix_to_json(model.matrices.Sigma_w)},
                     {"Sigma_v", matrix_to_json(model.matrices.Sigma_v)}};
    Json prbs = Json::array();
    for (const PrbModel& p : model.prbs) {
        Json sp;
        sp["prb"] = p.prb.value();
        sp["th_skl"] = p.th_skl;
        sp["th_bhatt"] = p.th_bhatt;
        Json ss = Json::array();
        for (const Superstate& s : p.superstates) {
            ss.push_back({{"id", s.id}, {"mean", vec4_to_json(s.mean)}, {"cov", matrix_to_json(s.cov)}});
        }
        sp["superstates"] = ss;
        Json segs = Json::array();
        for (const MatX& m : p.transitions.segments) segs.push_back(matrix_to_json(m));
        sp["transitions"] = segs;
        prbs.push_back(sp);
    }
    j["prbs"] = prbs;
    return j.dump(1);
}

LearnedModel model_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw ModelError(std::string("model: invalid JSON: ") + e.what());
    }
    try {
        reject_unknown_keys(j, {"version", "n_prbs", "snr_db", "threshold_quantile", "matrices", "prbs"},
                            "model");
        if (!j.contains("version")) throw ModelError("model: missing version field");
        LearnedModel m;
        m.version = j.at("version").get<int>();
        if (m.version != LearnedModel::kVersion)
            throw ModelError("model: unsupported version " + std::to_string(m.version));
        m.n_prbs = j.at("n_prbs").get<int>();
        m.snr_db = j.value("snr_db", 0.0);
        m.threshold_quantile = j.value("threshold_quantile", 0.0);
        const Json& mj = j.at("matrices");
        reject_unknown_keys(mj, {"A", "B", "H", "Sigma_w", "Sigma_v"}, "model.matrices");
        m.matrices.A = mat4_from_json(mj.at("A"), "A");
        m.matrices.B = mat4_from_json(mj.at("B"), "B");
        m.matrices.H = mat4_from_json(mj.at("H"), "H");
        m.matrices.Sigma_w = mat4_from_json(mj.at("Sigma_w"), "Sigma_w");
        m.matrices.Sigma_v = mat4_from_json(mj.at("Sigma_v"), "Sigma_v");
        for (const Json& sp : j.at("prbs")) {
            reject_unknown_keys(sp, {"prb", "th_skl", "th_bhatt", "superstates", "transitions"},
                                "model.prbs[]");
            PrbModel p;
            p.prb = PrbIndex(sp.at("prb").get<int>());
            p.th_skl = sp.at("th_skl").get<double>();
            p.th_bhatt = sp.at("th_bhatt").get<double>();
            for (const Json& s : sp.at("superstates")) {
                Superstate st;
                st.id = s.at("id").get<int>();
                st.prb = p.prb;
                st.mean = vec4_from_json(s.at("mean"), "superstate mean");
                st.cov = mat4_from_json(s.at("cov"), "superstate cov");
                p.superstates.push_back(st);
            }
            p.transitions.n_states = p.n_states();
            for (const Json& seg : sp.at("transitions"))
                p.transitions.segments.push_back(
                    matrix_from_json(seg, p.n_states(), p.n_states(), "transitions"));
            m.prbs.push_back(std::move(p));
        }
        m.validate();
        return m;
    } catch (const Json::exception& e) {
        throw ModelError(std::string("model: schema error: ") + e.what());
    } catch (const ConfigError& e) {
        throw ModelError(e.what());
    }
}

void save_model(const LearnedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file " + path.string());
    out << model_to_json(model) << '\n';
    if (!out) throw std::runtime_error("write failure on " + path.string());
}

LearnedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("model file not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace aijam

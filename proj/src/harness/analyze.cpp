#include <cmath>
#include <stdexcept>

#include "tdrc/harness.hpp"

namespace tdrc::harness {

using nlohmann::json;

namespace {

Mat matrix_from_json(const json& j, int rows, int cols, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw std::invalid_argument(std::string(what) + " must have " + std::to_string(rows) + " rows");
    Mat m(rows, cols < 0 ? (j.empty() ? 0 : static_cast<int>(j[0].size())) : cols);
    for (int r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != m.cols())
            throw std::invalid_argument(std::string(what) + " has a row of the wrong length");
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

json matrix_to_json(const Mat& m) {
    json j = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : (v < 0 ? "-inf" : "nan")); }

json complex_list(const std::vector<std::complex<double>>& v) {
    json j = json::array();
    for (auto z : v) j.push_back({z.real(), z.imag()});
    return j;
}

}  // namespace

MdpInput mdp_from_json(const json& j) {
    const int ns = j.at("n_states").get<int>();
    const int na = j.at("n_actions").get<int>();
    MdpInput in;
    in.mdp = mdp::MdpSpec(ns, na);
    for (const auto& t : j.at("transitions")) {
        if (!t.is_array() || t.size() != 6)
            throw std::invalid_argument("each transition is [s, a, s', p, r, gamma]");
        int s = t[0].get<int>(), a = t[1].get<int>(), sp = t[2].get<int>();
        if (s < 0 || s >= ns || sp < 0 || sp >= ns || a < 0 || a >= na)
            throw std::invalid_argument("transition index out of range");
        in.mdp.p(s, a, sp) += t[3].get<double>();
        in.mdp.r(s, a, sp) = t[4].get<double>();
        in.mdp.g(s, a, sp) = t[5].get<double>();
    }
    const json& sd = j.at("start_dist");
    if (static_cast<int>(sd.size()) != ns) throw std::invalid_argument("start_dist must have n_states entries");
    for (int s = 0; s < ns; ++s) in.mdp.start_dist(s) = sd[s].get<double>();
    in.behavior.probs = matrix_from_json(j.at("behavior"), ns, na, "behavior");
    in.target.probs = matrix_from_json(j.at("target"), ns, na, "target");
    in.features.phi = matrix_from_json(j.at("features"), ns, -1, "features");
    if (j.contains("stationary")) {
        const json& d = j.at("stationary");
        if (static_cast<int>(d.size()) != ns) throw std::invalid_argument("stationary must have n_states entries");
        Vec v(ns);
        for (int s = 0; s < ns; ++s) v(s) = d[s].get<double>();
        in.stationary = v;
    }
    in.mdp.validate();
    in.behavior.validate(ns, na);
    in.target.validate(ns, na);
    in.features.validate(ns);
    return in;
}

json mdp_to_json(const env::Problem& p) {
    const auto& m = p.mdp;
    json tr = json::array();
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a)
            for (int sp = 0; sp < m.n_states; ++sp)
                if (m.p(s, a, sp) > 0.0) tr.push_back({s, a, sp, m.p(s, a, sp), m.r(s, a, sp), m.g(s, a, sp)});
    json start = json::array();
    for (int s = 0; s < m.n_states; ++s) start.push_back(m.start_dist(s));
    return {{"n_states", m.n_states},
            {"n_actions", m.n_actions},
            {"transitions", tr},
            {"behavior", matrix_to_json(p.behavior.probs)},
            {"target", matrix_to_json(p.target.probs)},
            {"features", matrix_to_json(p.features.phi)},
            {"start_dist", start}};
}

json report_to_json(const stability::StabilityReport& r, const mdp::ExpectationModel& model) {
    json j;
    j["A_positive_definite"] = r.bounds.A_positive_definite;
    j["min_eig_H"] = r.bounds.min_eig_H;
    j["beta_max"] = number(r.bounds.beta_max);
    j["eta_min"] = number(r.bounds.eta_min);
    j["c_singular"] = model.c_singular;
    j["c_rank"] = model.c_rank;
    j["analysed_dimension"] = r.bounds.dimension;
    j["eta"] = r.eta;
    j["beta"] = r.beta;
    j["inside_theorem1_region"] = stability::inside_theorem1_region(r.bounds, r.eta, r.beta);
    j["G_spectrum"] = complex_list(r.G_spectrum);
    j["G_spectrum_full"] = complex_list(r.G_spectrum_full);
    j["hurwitz"] = r.hurwitz;
    j["max_real_part"] = r.max_real_part;
    j["td_fixed_point_exists"] = r.td_fixed_point_exists;
    j["fixed_point_residual"] = number(r.fixed_point_residual);
    j["rank_A_beta"] = r.rank_A_beta;
    j["stationary_distribution"] = std::vector<double>(model.d_b.data(), model.d_b.data() + model.d_b.size());
    return j;
}

}  // namespace tdrc::harness

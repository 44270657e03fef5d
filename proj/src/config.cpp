#include "hetcyc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hetcyc {

namespace {

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                std::vector<ValidationIssue>& bad) {
    if (!j.is_object()) {
        bad.push_back({path.empty() ? "<root>" : path, "must be an object"});
        return;
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) bad.push_back({(path.empty() ? "" : path + ".") + it.key(), "unknown key"});
}

// Reads j[key] into dst when present; type errors become issues on the field path.
template <class T>
void opt_read(const json& j, const char* key, const std::string& path, T& dst, std::vector<ValidationIssue>& bad) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception&) {
        bad.push_back({path + "." + key, "wrong type"});
    }
}

Period2Spec p2spec(long j1, long j2) {
    Period2Spec s;
    s.j1 = j1;
    s.j2 = j2;
    return s;
}

std::pair<int, int> line_col(const std::string& text, size_t byte) {
    int line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

std::vector<ValidationIssue> validate_config(const RunConfig& c) {
    std::vector<ValidationIssue> bad = validate_coefficients(c.coeffs);
    if (bad.empty()) {
        auto k = validate_control(c.control, c.coeffs);
        bad.insert(bad.end(), k.begin(), k.end());
    }
    const auto& p = c.pert;
    if (!(p.epsilon >= 0 && p.epsilon < 0.1)) bad.push_back({"perturbation.epsilon", "must lie in [0, 0.1)"});
    if (!(p.beta > 0 && p.beta <= 1)) bad.push_back({"perturbation.beta", "must lie in (0, 1]"});
    if (!(p.alpha > 0)) bad.push_back({"perturbation.alpha", "must be > 0"});
    if (!(c.solver.tol > 0 && c.solver.tol < 1e-3)) bad.push_back({"solver.tol", "must lie in (0, 1e-3)"});
    if (c.solver.j_min < 1) bad.push_back({"solver.j_min", "must be >= 1"});
    if (c.solver.saddle.k_min < 1) bad.push_back({"solver.k_min", "must be >= 1"});
    for (auto [name, v] : {std::pair{"orbit", c.tol.orbit}, {"quasi", c.tol.quasi}})
        if (!(v > 0 && v < 1e-3)) bad.push_back({std::string("tolerances.") + name, "must lie in (0, 1e-3)"});
    for (auto [name, v] : {std::pair{"angle_margin", c.tol.angle_margin}, {"witness_angle_margin", c.tol.witness_angle_margin}})
        if (!(v > 0 && v < 1.5)) bad.push_back({std::string("tolerances.") + name, "must lie in (0, 1.5) rad"});
    if (c.fixed_points.k_min < 1) bad.push_back({"fixed_points.k_min", "must be >= 1"});
    if (c.fixed_points.count < 1 || c.fixed_points.count > 200) bad.push_back({"fixed_points.count", "must lie in [1, 200]"});
    if (c.periodic.period != 2 && c.periodic.period != 3) bad.push_back({"periodic_orbit.period", "must be 2 or 3"});
    if (c.periodic.period == 2) {
        try {
            validate_period2_spec(p2spec(c.periodic.j1, c.periodic.j2), c.solver);
        } catch (const Error& e) {
            bad.push_back({"periodic_orbit", e.what()});
        }
    } else if (c.periodic.period == 3 && bad.empty()) {
        try {
            validate_period3_spec(Period3Spec{c.periodic.j1, c.periodic.j2, c.periodic.j3}, c.control.rho, c.solver);
        } catch (const Error& e) {
            bad.push_back({"periodic_orbit", e.what()});
        }
    }
    const auto& d = c.diophantine;
    if (!(d.q > 0 && d.p > 0 && 2 * d.p < d.q)) bad.push_back({"diophantine", "need 0 < p/q < 1/2"});
    if (d.count < 1) bad.push_back({"diophantine.count", "must be >= 1"});
    if (d.brute_bound < 1 || d.brute_bound > 2000) bad.push_back({"diophantine.brute_bound", "must lie in [1, 2000]"});
    const auto& h = c.hunt;
    if (h.mechanism != "thm1" && h.mechanism != "thm2") bad.push_back({"hunt.mechanism", "must be thm1 or thm2"});
    if (!(h.rho_star > 0 && h.rho_star < 0.5)) bad.push_back({"hunt.rho_star", "must lie in (0, 1/2)"});
    if (h.pairs.empty()) bad.push_back({"hunt.pairs", "must not be empty"});
    for (size_t i = 0; i < h.pairs.size(); ++i) {
        try {
            validate_period2_spec(p2spec(h.pairs[i].j1, h.pairs[i].j2), c.solver);
        } catch (const Error& e) {
            bad.push_back({"hunt.pairs[" + std::to_string(i) + "]", e.what()});
        }
    }
    if (!(h.q > 0 && h.p > 0 && 2 * h.p < h.q)) bad.push_back({"hunt.triple", "need 0 < p/q < 1/2"});
    if (h.count < 1) bad.push_back({"hunt.count", "must be >= 1"});
    if (h.p_k && *h.p_k < 1) bad.push_back({"hunt.p_k", "must be >= 1"});
    auto fb = validate_field(c.flow.field, "flow.field");
    bad.insert(bad.end(), fb.begin(), fb.end());
    if (!(c.flow.y_lo > 0 && c.flow.y_lo < c.flow.y_hi && c.flow.y_hi < c.flow.field.d))
        bad.push_back({"flow.y_lo", "need 0 < y_lo < y_hi < d"});
    if (c.flow.points < 2) bad.push_back({"flow.points", "must be >= 2"});
    if (!(c.flow.tol > 0 && c.flow.tol < 1e-3)) bad.push_back({"flow.tol", "must lie in (0, 1e-3)"});
    if (c.flow.z0.size() != c.flow.field.alpha.size()) bad.push_back({"flow.z0", "length must match flow.field.alpha"});
    if (c.jobs < 1) bad.push_back({"jobs", "must be >= 1"});
    return bad;
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error("parse", "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
    RunConfig c;
    c.source = text;
    std::vector<ValidationIssue> bad;
    check_keys(j, "",
               {"coefficients", "control", "perturbation", "solver", "tolerances", "fixed_points", "periodic_orbit",
                "diophantine", "hunt", "flow", "jobs", "seed", "output_dir"},
               bad);
    if (!bad.empty()) throw ValidationError(bad);

    if (!j.contains("coefficients") || !j["coefficients"].contains("omega")) {
        bad.push_back({"coefficients.omega", "required"});
        throw ValidationError(bad);
    }
    const json& jc = j["coefficients"];
    check_keys(jc, "coefficients",
               {"n", "omega", "A", "A1", "Avec", "eta", "eta1", "etavec", "B", "B1", "Bvec", "theta", "theta1",
                "thetavec", "zplus", "zminus", "delta"},
               bad);
    try {
        c.coeffs = coefficients_from_json(jc);
    } catch (const Error& e) {
        bad.push_back({"coefficients", e.what()});
    }
    if (j.contains("control")) {
        check_keys(j["control"], "control", {"rho", "zeta", "mu"}, bad);
        try {
            c.control = control_from_json(j["control"]);
        } catch (const Error& e) {
            bad.push_back({"control", e.what()});
        }
    }
    if (j.contains("perturbation")) {
        check_keys(j["perturbation"], "perturbation", {"kind", "epsilon", "beta", "phase", "alpha"}, bad);
        try {
            c.pert = perturbation_from_json(j["perturbation"]);
        } catch (const Error& e) {
            bad.push_back({"perturbation", e.what()});
        }
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        check_keys(s, "solver", {"tol", "phi", "j_min", "literal_x1_phase", "k_min", "mu_smallness"}, bad);
        opt_read(s, "tol", "solver", c.solver.tol, bad);
        opt_read(s, "j_min", "solver", c.solver.j_min, bad);
        opt_read(s, "literal_x1_phase", "solver", c.solver.literal_x1_phase, bad);
        opt_read(s, "k_min", "solver", c.solver.saddle.k_min, bad);
        opt_read(s, "mu_smallness", "solver", c.solver.saddle.mu_smallness, bad);
        if (s.contains("phi")) {
            try {
                c.solver.phi = phi_convention_from_name(s["phi"].get<std::string>());
            } catch (const std::exception&) {
                bad.push_back({"solver.phi", "must be omega_over_rho or rho_over_omega"});
            }
        }
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        check_keys(t, "tolerances", {"orbit", "quasi", "angle_margin", "witness_angle_margin"}, bad);
        opt_read(t, "orbit", "tolerances", c.tol.orbit, bad);
        opt_read(t, "quasi", "tolerances", c.tol.quasi, bad);
        opt_read(t, "angle_margin", "tolerances", c.tol.angle_margin, bad);
        opt_read(t, "witness_angle_margin", "tolerances", c.tol.witness_angle_margin, bad);
    }
    if (j.contains("fixed_points")) {
        const json& f = j["fixed_points"];
        check_keys(f, "fixed_points", {"k_min", "count"}, bad);
        opt_read(f, "k_min", "fixed_points", c.fixed_points.k_min, bad);
        opt_read(f, "count", "fixed_points", c.fixed_points.count, bad);
    }
    if (j.contains("periodic_orbit")) {
        const json& f = j["periodic_orbit"];
        check_keys(f, "periodic_orbit", {"period", "j1", "j2", "j3"}, bad);
        opt_read(f, "period", "periodic_orbit", c.periodic.period, bad);
        if (c.periodic.period == 3) {
            c.periodic.j1 = 53;
            c.periodic.j2 = 21;
        }
        opt_read(f, "j1", "periodic_orbit", c.periodic.j1, bad);
        opt_read(f, "j2", "periodic_orbit", c.periodic.j2, bad);
        opt_read(f, "j3", "periodic_orbit", c.periodic.j3, bad);
    }
    if (j.contains("diophantine")) {
        const json& f = j["diophantine"];
        check_keys(f, "diophantine", {"p", "q", "p1", "p2", "n_floor", "count", "brute_bound"}, bad);
        opt_read(f, "p", "diophantine", c.diophantine.p, bad);
        opt_read(f, "q", "diophantine", c.diophantine.q, bad);
        opt_read(f, "p1", "diophantine", c.diophantine.p1, bad);
        opt_read(f, "p2", "diophantine", c.diophantine.p2, bad);
        opt_read(f, "n_floor", "diophantine", c.diophantine.n_floor, bad);
        opt_read(f, "count", "diophantine", c.diophantine.count, bad);
        opt_read(f, "brute_bound", "diophantine", c.diophantine.brute_bound, bad);
    }
    if (j.contains("hunt")) {
        const json& h = j["hunt"];
        check_keys(h, "hunt", {"mechanism", "rho_star", "pairs", "triple", "n_floor", "count", "p_k"}, bad);
        opt_read(h, "mechanism", "hunt", c.hunt.mechanism, bad);
        opt_read(h, "rho_star", "hunt", c.hunt.rho_star, bad);
        opt_read(h, "n_floor", "hunt", c.hunt.n_floor, bad);
        opt_read(h, "count", "hunt", c.hunt.count, bad);
        if (h.contains("p_k")) {
            int v = 0;
            opt_read(h, "p_k", "hunt", v, bad);
            c.hunt.p_k = v;
        }
        if (h.contains("pairs")) {
            c.hunt.pairs.clear();
            try {
                for (const auto& pr : h["pairs"]) {
                    const auto v = pr.get<std::vector<long>>();
                    if (v.size() != 2) throw std::runtime_error("pair");
                    c.hunt.pairs.push_back({v[0], v[1]});
                }
            } catch (const std::exception&) {
                bad.push_back({"hunt.pairs", "must be a list of [j1, j2] integer pairs"});
            }
        }
        if (h.contains("triple")) {
            const json& t = h["triple"];
            check_keys(t, "hunt.triple", {"p", "q", "p1", "p2"}, bad);
            opt_read(t, "p", "hunt.triple", c.hunt.p, bad);
            opt_read(t, "q", "hunt.triple", c.hunt.q, bad);
            opt_read(t, "p1", "hunt.triple", c.hunt.p1, bad);
            opt_read(t, "p2", "hunt.triple", c.hunt.p2, bad);
        }
    }
    if (j.contains("flow")) {
        const json& f = j["flow"];
        check_keys(f, "flow", {"field", "y_lo", "y_hi", "points", "x0", "z0", "tol"}, bad);
        if (f.contains("field")) {
            check_keys(f["field"], "flow.field", {"rho", "omega", "alpha", "c_yx", "c_xz", "c_zx", "c_zz", "d"}, bad);
            try {
                c.flow.field = field_from_json(f["field"]);
            } catch (const Error& e) {
                bad.push_back({"flow.field", e.what()});
            }
        }
        opt_read(f, "y_lo", "flow", c.flow.y_lo, bad);
        opt_read(f, "y_hi", "flow", c.flow.y_hi, bad);
        opt_read(f, "points", "flow", c.flow.points, bad);
        opt_read(f, "x0", "flow", c.flow.x0, bad);
        opt_read(f, "z0", "flow", c.flow.z0, bad);
        opt_read(f, "tol", "flow", c.flow.tol, bad);
    }
    opt_read(j, "jobs", "", c.jobs, bad);
    opt_read(j, "seed", "", c.seed, bad);
    opt_read(j, "output_dir", "", c.output_dir, bad);
    for (auto& b : bad)
        if (!b.field.empty() && b.field[0] == '.') b.field.erase(0, 1);
    if (!bad.empty()) throw ValidationError(bad);
    bad = validate_config(c);
    if (!bad.empty()) throw ValidationError(bad);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json config_to_json(const RunConfig& c) {
    json j;
    j["coefficients"] = to_json(c.coeffs);
    j["control"] = to_json(c.control);
    j["perturbation"] = to_json(c.pert);
    j["solver"] = {{"tol", c.solver.tol},
                   {"phi", c.solver.phi == PhiConvention::OmegaOverRho ? "omega_over_rho" : "rho_over_omega"},
                   {"j_min", c.solver.j_min},
                   {"literal_x1_phase", c.solver.literal_x1_phase},
                   {"k_min", c.solver.saddle.k_min},
                   {"mu_smallness", c.solver.saddle.mu_smallness}};
    j["tolerances"] = {{"orbit", c.tol.orbit},
                       {"quasi", c.tol.quasi},
                       {"angle_margin", c.tol.angle_margin},
                       {"witness_angle_margin", c.tol.witness_angle_margin}};
    j["fixed_points"] = {{"k_min", c.fixed_points.k_min}, {"count", c.fixed_points.count}};
    j["periodic_orbit"] = {{"period", c.periodic.period}, {"j1", c.periodic.j1}, {"j2", c.periodic.j2}, {"j3", c.periodic.j3}};
    const auto& d = c.diophantine;
    j["diophantine"] = {{"p", d.p},           {"q", d.q},         {"p1", d.p1},
                        {"p2", d.p2},         {"n_floor", d.n_floor}, {"count", d.count},
                        {"brute_bound", d.brute_bound}};
    json pairs = json::array();
    for (const auto& pr : c.hunt.pairs) pairs.push_back({pr.j1, pr.j2});
    j["hunt"] = {{"mechanism", c.hunt.mechanism},
                 {"rho_star", c.hunt.rho_star},
                 {"pairs", pairs},
                 {"triple", {{"p", c.hunt.p}, {"q", c.hunt.q}, {"p1", c.hunt.p1}, {"p2", c.hunt.p2}}},
                 {"n_floor", c.hunt.n_floor},
                 {"count", c.hunt.count}};
    if (c.hunt.p_k) j["hunt"]["p_k"] = *c.hunt.p_k;
    j["flow"] = {{"field", to_json(c.flow.field)}, {"y_lo", c.flow.y_lo}, {"y_hi", c.flow.y_hi},
                 {"points", c.flow.points},        {"x0", c.flow.x0},     {"z0", c.flow.z0},
                 {"tol", c.flow.tol}};
    j["jobs"] = c.jobs;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

}  // namespace hetcyc

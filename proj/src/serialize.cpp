#include "hetcyc/serialize.hpp"

#include <cmath>
#include <sstream>

namespace hetcyc {

namespace {

// nlohmann writes non-finite doubles as null; keep them readable instead.
json num(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

double num_from(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "nan") return NAN;
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        return std::stod(s);
    }
    return j.get<double>();
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double e : v) a.push_back(num(e));
    return a;
}

std::vector<double> nums_from(const json& j) {
    std::vector<double> v;
    for (const auto& e : j) v.push_back(num_from(e));
    return v;
}

json hps(const std::vector<hp>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back(hp_json(e));
    return a;
}

std::vector<hp> hps_from(const json& j) {
    std::vector<hp> v;
    for (const auto& e : j) v.push_back(hp_from_json(e));
    return v;
}

template <class R, class F>
json coeffs_json(const MapCoefficientsT<R>& c, F f) {
    auto vec = [&](const std::vector<R>& v) {
        json a = json::array();
        for (const auto& e : v) a.push_back(f(e));
        return a;
    };
    json j;
    j["n"] = c.n;
    j["omega"] = f(c.omega);
    j["A"] = f(c.A);
    j["A1"] = f(c.A1);
    j["Avec"] = vec(c.Avec);
    j["eta"] = f(c.eta);
    j["eta1"] = f(c.eta1);
    j["etavec"] = vec(c.etavec);
    j["B"] = f(c.B);
    j["B1"] = f(c.B1);
    j["Bvec"] = vec(c.Bvec);
    j["theta"] = f(c.theta);
    j["theta1"] = f(c.theta1);
    j["thetavec"] = vec(c.thetavec);
    j["zplus"] = vec(c.zplus);
    j["zminus"] = vec(c.zminus);
    j["delta"] = f(c.delta);
    return j;
}

template <class R, class F>
void coeffs_read(const json& j, MapCoefficientsT<R>& c, F f) {
    auto vec = [&](const json& a) {
        std::vector<R> v;
        for (const auto& e : a) v.push_back(f(e));
        return v;
    };
    if (j.contains("n")) c.n = j.at("n").get<int>();
    auto sc = [&](const char* k, R& dst) {
        if (j.contains(k)) dst = f(j.at(k));
    };
    auto vc = [&](const char* k, std::vector<R>& dst) {
        if (j.contains(k)) dst = vec(j.at(k));
    };
    sc("omega", c.omega);
    sc("A", c.A);
    sc("A1", c.A1);
    vc("Avec", c.Avec);
    sc("eta", c.eta);
    sc("eta1", c.eta1);
    vc("etavec", c.etavec);
    sc("B", c.B);
    sc("B1", c.B1);
    vc("Bvec", c.Bvec);
    sc("theta", c.theta);
    sc("theta1", c.theta1);
    vc("thetavec", c.thetavec);
    vc("zplus", c.zplus);
    vc("zminus", c.zminus);
    sc("delta", c.delta);
}

HpPoint point_from(const json& j) {
    HpPoint p;
    p.y = hp_from_json(j.at("y"));
    p.x = hp_from_json(j.at("x"));
    p.z = hps_from(j.at("z"));
    return p;
}

Branch branch_from(const json& j) {
    const std::string s = j.get<std::string>();
    if (s == "+") return Branch::Plus;
    if (s == "-") return Branch::Minus;
    throw Error("validation", "bad branch '" + s + "'");
}

OrbitRecord orbit_from(const json& j) {
    OrbitRecord o;
    for (const auto& p : j.at("points")) o.points.push_back(point_from(p));
    for (const auto& b : j.at("itinerary")) o.itinerary.push_back(branch_from(b));
    for (const auto& m : j.at("multipliers")) o.multipliers.push_back({hp_from_json(m.at("re")), hp_from_json(m.at("im"))});
    o.index = j.at("index").get<int>();
    o.residual = hp_from_json(j.at("residual"));
    o.residual_abs = hp_from_json(j.at("residual_abs"));
    for (const auto& w : j.at("winding"))
        o.winding.push_back({branch_from(w.at("branch")), w.at("j").get<long>(), hp_from_json(w.at("xi"))});
    o.flagged = j.at("flagged").get<bool>();
    o.flag = j.at("flag").get<std::string>();
    return o;
}

LadderRung rung_from(const json& j) {
    LadderRung r;
    r.m = j.at("m").get<long>();
    r.t = hp_from_json(j.at("t"));
    r.dx = hp_from_json(j.at("dx"));
    r.dy = hp_from_json(j.at("dy"));
    r.amplitude = hp_from_json(j.at("amplitude"));
    r.scaled_x = num_from(j.at("scaled_x"));
    r.scaled_y = num_from(j.at("scaled_y"));
    return r;
}

json rung_json(const LadderRung& r) {
    return {{"m", r.m},
            {"t", hp_json(r.t)},
            {"dx", hp_json(r.dx)},
            {"dy", hp_json(r.dy)},
            {"amplitude", hp_json(r.amplitude)},
            {"scaled_x", num(r.scaled_x)},
            {"scaled_y", num(r.scaled_y)}};
}

ChainReport chain_from(const json& j) {
    ChainReport r;
    r.k0 = j.at("k0").get<int>();
    r.k_end = j.at("k_end").get<int>();
    r.rho_prime = num_from(j.at("rho_prime"));
    r.verified = j.at("verified").get<bool>();
    r.broken_at = j.at("broken_at").get<int>();
    for (const auto& l : j.at("links")) {
        ChainLink c;
        c.from = l.at("from").get<int>();
        c.to = l.at("to").get<int>();
        c.admissible = l.at("admissible").get<bool>();
        c.overlaps = l.at("overlaps").get<bool>();
        c.spans = l.at("spans").get<bool>();
        c.image_ymin = num_from(l.at("image_ymin"));
        c.image_ymax = num_from(l.at("image_ymax"));
        c.image_xmin = num_from(l.at("image_xmin"));
        c.image_xmax = num_from(l.at("image_xmax"));
        r.links.push_back(c);
    }
    return r;
}

QuasiReport quasi_from(const json& j) {
    QuasiReport q;
    q.ladder_index = j.at("ladder_index").get<long>();
    q.t = hp_from_json(j.at("t"));
    q.y_P = hp_from_json(j.at("y_P"));
    q.spiral_point = point_from(j.at("spiral_point"));
    q.leaf_point = point_from(j.at("leaf_point"));
    q.dx = hp_from_json(j.at("dx"));
    q.dy = hp_from_json(j.at("dy"));
    q.residual = num_from(j.at("residual"));
    q.residual_abs = num_from(j.at("residual_abs"));
    q.principal_angle = num_from(j.at("principal_angle"));
    q.tangent_intersection_dim = j.at("tangent_intersection_dim").get<int>();
    q.spiral_tangent = nums_from(j.at("spiral_tangent"));
    for (const auto& r : j.at("rungs")) q.rungs.push_back(rung_from(r));
    return q;
}

TransverseWitness witness_from(const json& j) {
    TransverseWitness w;
    w.iterations = j.at("iterations").get<int>();
    w.dir_y = hp_from_json(j.at("dir_y"));
    w.dir_x = hp_from_json(j.at("dir_x"));
    w.s_star = hp_from_json(j.at("s_star"));
    w.crossing_y_rel = hp_from_json(j.at("crossing_y_rel"));
    for (const auto& p : j.at("segment")) w.segment.push_back(point_from(p));
    w.crossing_angle = num_from(j.at("crossing_angle"));
    w.area_ratios = nums_from(j.at("area_ratios"));
    w.x_bounded = j.at("x_bounded").get<bool>();
    w.x_min = num_from(j.at("x_min"));
    w.x_max = num_from(j.at("x_max"));
    w.polyline_points = j.at("polyline_points").get<int>();
    w.landing_region = j.at("landing_region").get<int>();
    w.target_region = j.at("target_region").get<int>();
    w.chain = chain_from(j.at("chain"));
    return w;
}

Index2Diagnostic index2_from(const json& j) {
    Index2Diagnostic d;
    d.cos_omega_rho = nums_from(j.at("cos_omega_rho"));
    d.cos_rho_omega = nums_from(j.at("cos_rho_omega"));
    d.product_omega_rho = num_from(j.at("product_omega_rho"));
    d.product_rho_omega = num_from(j.at("product_rho_omega"));
    d.log10_moduli = nums_from(j.at("log10_moduli"));
    d.small_factor = j.at("small_factor").get<int>();
    d.index = j.at("index").get<int>();
    return d;
}

}  // namespace

json hp_json(const hp& v) { return hp_to_string(v); }

hp hp_from_json(const json& j) {
    if (j.is_string()) return hp_from_string(j.get<std::string>());
    return hp(j.get<double>());
}

json to_json(const MapCoefficients& c) {
    return coeffs_json(c, [](double v) { return num(v); });
}

json to_json(const HpCoeffs& c) {
    return coeffs_json(c, [](const hp& v) { return hp_json(v); });
}

json to_json(const ControlParams& k) { return {{"rho", num(k.rho)}, {"zeta", num(k.zeta)}, {"mu", num(k.mu)}}; }

json to_json(const HpControl& k) {
    return {{"rho", hp_json(k.rho)}, {"zeta", hp_json(k.zeta)}, {"mu", hp_json(k.mu)}};
}

json to_json(const PerturbationModel& p) {
    return {{"kind", perturbation_kind_name(p.kind)},
            {"epsilon", num(p.epsilon)},
            {"beta", num(p.beta)},
            {"phase", num(p.phase)},
            {"alpha", num(p.alpha)}};
}

json to_json(const HpPoint& p) { return {{"y", hp_json(p.y)}, {"x", hp_json(p.x)}, {"z", hps(p.z)}}; }

json to_json(const OrbitRecord& o) {
    json j;
    j["period"] = o.period();
    j["points"] = json::array();
    for (const auto& p : o.points) j["points"].push_back(to_json(p));
    j["itinerary"] = json::array();
    for (auto b : o.itinerary) j["itinerary"].push_back(branch_name(b));
    j["multipliers"] = json::array();
    for (const auto& m : o.multipliers) j["multipliers"].push_back({{"re", hp_json(m.re)}, {"im", hp_json(m.im)}});
    j["log10_moduli"] = nums(o.log10_moduli());
    j["index"] = o.index;
    j["residual"] = hp_json(o.residual);
    j["residual_abs"] = hp_json(o.residual_abs);
    j["winding"] = json::array();
    for (const auto& w : o.winding)
        j["winding"].push_back({{"branch", branch_name(w.branch)}, {"j", w.j}, {"xi", hp_json(w.xi)}});
    j["flagged"] = o.flagged;
    j["flag"] = o.flag;
    return j;
}

json to_json(const IndexReport& r) {
    json j;
    j["index"] = r.index;
    j["log10_moduli"] = nums(r.log10_moduli);
    j["cos_factors_omega_rho"] = nums(r.cos_factors_omega_rho);
    j["cos_factors_rho_omega"] = nums(r.cos_factors_rho_omega);
    j["cos_product_omega_rho"] = num(r.cos_product_omega_rho);
    j["cos_product_rho_omega"] = num(r.cos_product_rho_omega);
    j["small_factor"] = r.small_factor;
    return j;
}

json to_json(const Period2Result& r) {
    json j;
    j["orbit"] = to_json(r.orbit);
    j["rho"] = hp_json(r.rho);
    j["psi_leftover"] = hp_json(r.psi_leftover);
    j["psi_leading"] = hp_json(r.psi_leading);
    j["psi_residual"] = hp_json(r.psi_residual);
    j["index_value"] = hp_json(r.index_value);
    j["candidates"] = json::array();
    for (const auto& c : r.candidates)
        j["candidates"].push_back(
            {{"xi2_seed", num(c.xi2_seed)}, {"converged", c.converged}, {"index", c.index}, {"note", c.note}});
    j["xi2_seed_used"] = num(r.xi2_seed_used);
    j["iterations"] = r.iterations;
    return j;
}

json to_json(const Period3Result& r) {
    json j;
    j["orbit"] = to_json(r.orbit);
    j["mu"] = hp_json(r.mu);
    j["zeta"] = hp_json(r.zeta);
    j["B"] = hp_json(r.coeffs.B);
    j["theta1"] = hp_json(r.coeffs.theta1);
    j["index_value"] = hp_json(r.index_value);
    j["pp_residual_abs"] = nums(r.pp_residual_abs);
    j["pp_residual_rel"] = nums(r.pp_residual_rel);
    j["leaf_gap"] = hp_json(r.leaf_gap);
    j["u_solved"] = hp_json(r.u_solved);
    j["v_solved"] = hp_json(r.v_solved);
    j["u_closed"] = hp_json(r.u_closed);
    j["v_closed"] = hp_json(r.v_closed);
    j["seed_xi3"] = num(r.seed_xi3);
    j["iterations"] = r.iterations;
    return j;
}

json to_json(const ChainReport& r) {
    json j;
    j["k0"] = r.k0;
    j["k_end"] = r.k_end;
    j["rho_prime"] = num(r.rho_prime);
    j["verified"] = r.verified;
    j["broken_at"] = r.broken_at;
    j["links"] = json::array();
    for (const auto& l : r.links)
        j["links"].push_back({{"from", l.from},
                              {"to", l.to},
                              {"admissible", l.admissible},
                              {"overlaps", l.overlaps},
                              {"spans", l.spans},
                              {"image_ymin", num(l.image_ymin)},
                              {"image_ymax", num(l.image_ymax)},
                              {"image_xmin", num(l.image_xmin)},
                              {"image_xmax", num(l.image_xmax)}});
    return j;
}

json to_json(const QuasiReport& q) {
    json j;
    j["ladder_index"] = q.ladder_index;
    j["t"] = hp_json(q.t);
    j["y_P"] = hp_json(q.y_P);
    j["spiral_point"] = to_json(q.spiral_point);
    j["leaf_point"] = to_json(q.leaf_point);
    j["dx"] = hp_json(q.dx);
    j["dy"] = hp_json(q.dy);
    j["residual"] = num(q.residual);
    j["residual_abs"] = num(q.residual_abs);
    j["principal_angle"] = num(q.principal_angle);
    j["tangent_intersection_dim"] = q.tangent_intersection_dim;
    j["spiral_tangent"] = nums(q.spiral_tangent);
    j["rungs"] = json::array();
    for (const auto& r : q.rungs) j["rungs"].push_back(rung_json(r));
    return j;
}

json to_json(const TransverseWitness& w) {
    json j;
    j["iterations"] = w.iterations;
    j["dir_y"] = hp_json(w.dir_y);
    j["dir_x"] = hp_json(w.dir_x);
    j["s_star"] = hp_json(w.s_star);
    j["crossing_y_rel"] = hp_json(w.crossing_y_rel);
    j["segment"] = json::array();
    for (const auto& p : w.segment) j["segment"].push_back(to_json(p));
    j["crossing_angle"] = num(w.crossing_angle);
    j["area_ratios"] = nums(w.area_ratios);
    j["x_bounded"] = w.x_bounded;
    j["x_min"] = num(w.x_min);
    j["x_max"] = num(w.x_max);
    j["polyline_points"] = w.polyline_points;
    j["landing_region"] = w.landing_region;
    j["target_region"] = w.target_region;
    j["chain"] = to_json(w.chain);
    return j;
}

json to_json(const Index2Diagnostic& d) {
    return {{"cos_omega_rho", nums(d.cos_omega_rho)},
            {"cos_rho_omega", nums(d.cos_rho_omega)},
            {"product_omega_rho", num(d.product_omega_rho)},
            {"product_rho_omega", num(d.product_rho_omega)},
            {"log10_moduli", nums(d.log10_moduli)},
            {"small_factor", d.small_factor},
            {"index", d.index}};
}

json to_json(const CycleCertificate& c) {
    json j;
    j["kind"] = "heterodimensional-cycle";
    j["schema_version"] = kCertificateSchemaVersion;
    j["mechanism"] = c.mechanism;
    j["sequence_index"] = c.sequence_index;
    j["js"] = c.js;
    j["digits"] = c.digits;
    j["coefficients"] = to_json(c.coeffs);
    j["control"] = to_json(c.control);
    j["perturbation"] = to_json(c.pert);
    j["phi_convention"] = phi_convention_name(c.phi);
    j["p_k"] = c.p_k;
    j["P"] = to_json(c.P);
    j["Q"] = to_json(c.Q);
    j["quasi_transverse"] = to_json(c.quasi);
    j["transverse_witness"] = to_json(c.witness);
    j["tolerances"] = {{"orbit", num(c.tol.orbit)},
                       {"quasi", num(c.tol.quasi)},
                       {"angle_margin", num(c.tol.angle_margin)},
                       {"witness_angle_margin", num(c.tol.witness_angle_margin)}};
    j["coupling_iterations"] = c.coupling_iterations;
    j["joint_residual"] = hp_json(c.joint_residual);
    j["zeta_scan_start"] = hp_json(c.zeta_scan_start);
    j["index2"] = to_json(c.index2);
    j["indices"] = {{"map_P", c.map_index_P()},
                    {"map_Q", c.map_index_Q()},
                    {"flow_P", c.flow_index_P()},
                    {"flow_Q", c.flow_index_Q()}};
    if (c.anchor) {
        const auto& a = *c.anchor;
        j["anchor"] = {{"mu", hp_json(a.mu)},
                       {"zeta", hp_json(a.zeta)},
                       {"B", hp_json(a.B)},
                       {"theta1", hp_json(a.theta1)},
                       {"pp_residual_abs", nums(a.pp_residual_abs)},
                       {"pp_residual_rel", nums(a.pp_residual_rel)},
                       {"leaf_gap", hp_json(a.leaf_gap)},
                       {"leaf_gap_rel", hp_json(a.leaf_gap_rel)},
                       {"u_solved", hp_json(a.u_solved)},
                       {"v_solved", hp_json(a.v_solved)},
                       {"u_closed", hp_json(a.u_closed)},
                       {"v_closed", hp_json(a.v_closed)},
                       {"p", a.p},
                       {"q", a.q},
                       {"p1", a.p1},
                       {"p2", a.p2},
                       {"u_star", num(a.u_star)},
                       {"v_star", num(a.v_star)},
                       {"u_error", num(a.u_error)},
                       {"v_error", num(a.v_error)}};
    } else {
        j["anchor"] = nullptr;
    }
    return j;
}

CycleCertificate certificate_from_json(const json& j) {
    try {
        if (j.at("kind").get<std::string>() != "heterodimensional-cycle")
            throw Error("validation", "not a cycle certificate");
        if (j.at("schema_version").get<int>() != kCertificateSchemaVersion)
            throw Error("validation", "schema_version: unsupported");
        CycleCertificate c;
        c.digits = j.at("digits").get<unsigned>();
        if (c.digits < 16) throw Error("validation", "digits: implausible precision");
        DigitsAtLeast prec(c.digits);
        c.mechanism = j.at("mechanism").get<std::string>();
        c.sequence_index = j.at("sequence_index").get<int>();
        c.js = j.at("js").get<std::vector<long>>();
        coeffs_read(j.at("coefficients"), c.coeffs, [](const json& e) { return hp_from_json(e); });
        const auto& k = j.at("control");
        c.control.rho = hp_from_json(k.at("rho"));
        c.control.zeta = hp_from_json(k.at("zeta"));
        c.control.mu = hp_from_json(k.at("mu"));
        c.pert = perturbation_from_json(j.at("perturbation"));
        c.phi = phi_convention_from_name(j.at("phi_convention").get<std::string>());
        c.p_k = j.at("p_k").get<int>();
        c.P = orbit_from(j.at("P"));
        c.Q = orbit_from(j.at("Q"));
        c.quasi = quasi_from(j.at("quasi_transverse"));
        c.witness = witness_from(j.at("transverse_witness"));
        const auto& t = j.at("tolerances");
        c.tol.orbit = num_from(t.at("orbit"));
        c.tol.quasi = num_from(t.at("quasi"));
        c.tol.angle_margin = num_from(t.at("angle_margin"));
        c.tol.witness_angle_margin = num_from(t.at("witness_angle_margin"));
        c.coupling_iterations = j.at("coupling_iterations").get<int>();
        c.joint_residual = hp_from_json(j.at("joint_residual"));
        c.zeta_scan_start = hp_from_json(j.at("zeta_scan_start"));
        c.index2 = index2_from(j.at("index2"));
        if (!j.at("anchor").is_null()) {
            const auto& a = j.at("anchor");
            Thm2Anchor an;
            an.mu = hp_from_json(a.at("mu"));
            an.zeta = hp_from_json(a.at("zeta"));
            an.B = hp_from_json(a.at("B"));
            an.theta1 = hp_from_json(a.at("theta1"));
            an.pp_residual_abs = nums_from(a.at("pp_residual_abs"));
            an.pp_residual_rel = nums_from(a.at("pp_residual_rel"));
            an.leaf_gap = hp_from_json(a.at("leaf_gap"));
            an.leaf_gap_rel = hp_from_json(a.at("leaf_gap_rel"));
            an.u_solved = hp_from_json(a.at("u_solved"));
            an.v_solved = hp_from_json(a.at("v_solved"));
            an.u_closed = hp_from_json(a.at("u_closed"));
            an.v_closed = hp_from_json(a.at("v_closed"));
            an.p = a.at("p").get<std::string>();
            an.q = a.at("q").get<std::string>();
            an.p1 = a.at("p1").get<std::string>();
            an.p2 = a.at("p2").get<std::string>();
            an.u_star = num_from(a.at("u_star"));
            an.v_star = num_from(a.at("v_star"));
            an.u_error = num_from(a.at("u_error"));
            an.v_error = num_from(a.at("v_error"));
            c.anchor = an;
        }
        return c;
    } catch (const json::exception& e) {
        throw Error("validation", std::string("certificate shape: ") + e.what());
    }
}

json to_json(const HuntFailure& f) {
    return {{"sequence_index", f.sequence_index}, {"code", f.code}, {"message", f.message}};
}

json to_json(const RationalTriple& t) {
    return {{"p", to_string(t.p)},   {"q", to_string(t.q)},   {"p1", to_string(t.p1)},
            {"p2", to_string(t.p2)}, {"rho", to_string(t.rho())}, {"u", to_string(t.u())},
            {"v", to_string(t.v())}, {"N", t.N},              {"retried", t.retried}};
}

json to_json(const DiophantineFamily& f, const std::vector<FamilyMember>& members) {
    json j;
    j["p"] = to_string(f.p);
    j["q"] = to_string(f.q);
    j["p1"] = to_string(f.p1);
    j["p2"] = to_string(f.p2);
    j["particular"] = {{"j1", to_string(f.j1h)}, {"j2", to_string(f.j2h)}, {"j3", to_string(f.j3h)}, {"k", to_string(f.kh)}};
    j["members"] = json::array();
    for (const auto& m : members)
        j["members"].push_back(
            {{"i", to_string(m.i)}, {"j1", to_string(m.j[0])}, {"j2", to_string(m.j[1])}, {"j3", to_string(m.j[2])}});
    return j;
}

json to_json(const NormalFormField& f) {
    return {{"rho", num(f.rho)},   {"omega", num(f.omega)}, {"alpha", nums(f.alpha)},
            {"c_yx", num(f.c_yx)}, {"c_xz", num(f.c_xz)},   {"c_zx", num(f.c_zx)},
            {"c_zz", num(f.c_zz)}, {"d", num(f.d)}};
}

json to_json(const ExponentFit& f) {
    return {{"rho_fit", num(f.rho_fit)},
            {"half_width", num(f.half_width)},
            {"intercept", num(f.intercept)},
            {"points", f.points},
            {"span_decades", num(f.span_decades)}};
}

MapCoefficients coefficients_from_json(const json& j, MapCoefficients base) {
    try {
        coeffs_read(j, base, [](const json& e) { return num_from(e); });
    } catch (const json::exception& e) {
        throw Error("validation", std::string("coefficients: ") + e.what());
    }
    return base;
}

ControlParams control_from_json(const json& j, ControlParams base) {
    try {
        if (j.contains("rho")) base.rho = num_from(j.at("rho"));
        if (j.contains("zeta")) base.zeta = num_from(j.at("zeta"));
        if (j.contains("mu")) base.mu = num_from(j.at("mu"));
    } catch (const json::exception& e) {
        throw Error("validation", std::string("control: ") + e.what());
    }
    return base;
}

PerturbationModel perturbation_from_json(const json& j) {
    PerturbationModel p;
    try {
        if (j.contains("kind")) p.kind = perturbation_kind_from_name(j.at("kind").get<std::string>());
        if (j.contains("epsilon")) p.epsilon = num_from(j.at("epsilon"));
        if (j.contains("beta")) p.beta = num_from(j.at("beta"));
        if (j.contains("phase")) p.phase = num_from(j.at("phase"));
        if (j.contains("alpha")) p.alpha = num_from(j.at("alpha"));
    } catch (const json::exception& e) {
        throw Error("validation", std::string("perturbation: ") + e.what());
    }
    return p;
}

NormalFormField field_from_json(const json& j, NormalFormField f) {
    try {
        if (j.contains("rho")) f.rho = num_from(j.at("rho"));
        if (j.contains("omega")) f.omega = num_from(j.at("omega"));
        if (j.contains("alpha")) f.alpha = nums_from(j.at("alpha"));
        if (j.contains("c_yx")) f.c_yx = num_from(j.at("c_yx"));
        if (j.contains("c_xz")) f.c_xz = num_from(j.at("c_xz"));
        if (j.contains("c_zx")) f.c_zx = num_from(j.at("c_zx"));
        if (j.contains("c_zz")) f.c_zz = num_from(j.at("c_zz"));
        if (j.contains("d")) f.d = num_from(j.at("d"));
    } catch (const json::exception& e) {
        throw Error("validation", std::string("field: ") + e.what());
    }
    return f;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string ladder_csv(const std::vector<OrbitRecord>& ladder, const std::vector<int>& ks) {
    std::ostringstream os;
    os << "k,y,x,log10_y,residual,index,max_z_modulus,log_ratio_next\n";
    for (size_t i = 0; i < ladder.size(); ++i) {
        const auto& o = ladder[i];
        const auto& p = o.points.at(0);
        const auto lm = o.log10_moduli();
        double zmax = 0;
        for (size_t m = 2; m < lm.size(); ++m) zmax = std::max(zmax, std::pow(10.0, lm[m]));
        os << ks.at(i) << ',' << format_double(to_d(p.y)) << ',' << format_double(to_d(p.x)) << ','
           << format_double(hp_log10_abs(p.y)) << ',' << format_double(to_d(o.residual)) << ',' << o.index << ','
           << format_double(zmax) << ',';
        if (i + 1 < ladder.size()) {
            using std::log;
            os << format_double(to_d(log(ladder[i].points[0].y / ladder[i + 1].points[0].y)));
        }
        os << '\n';
    }
    return os.str();
}

std::string local_map_csv(const std::vector<LocalMapSample>& table) {
    std::ostringstream os;
    os << "y0,x1,x2,z_norm,envelope,time,x1_model,x2_model,model_error\n";
    for (const auto& r : table)
        os << format_double(r.y0) << ',' << format_double(r.x1) << ',' << format_double(r.x2) << ','
           << format_double(r.z_norm) << ',' << format_double(r.envelope) << ',' << format_double(r.time) << ','
           << format_double(r.x1_model) << ',' << format_double(r.x2_model) << ',' << format_double(r.model_error)
           << '\n';
    return os.str();
}

std::string rungs_csv(const std::vector<LadderRung>& rungs) {
    std::ostringstream os;
    os << "m,log10_t,dx,dy,amplitude,scaled_x,scaled_y\n";
    for (const auto& r : rungs)
        os << r.m << ',' << format_double(hp_log10_abs(r.t)) << ',' << format_double(to_d(r.dx)) << ','
           << format_double(to_d(r.dy)) << ',' << format_double(to_d(r.amplitude)) << ','
           << format_double(r.scaled_x) << ',' << format_double(r.scaled_y) << '\n';
    return os.str();
}

}  // namespace hetcyc

#include "hetcyc/periodic.hpp"

#include "hetcyc/diophantine.hpp"
#include "hetcyc/newton.hpp"

#include <cmath>

namespace hetcyc {

double orbit_decades(const std::vector<long>& js, double omega) {
    double s = 0;
    for (long j : js) s += 2 * M_PI * (static_cast<double>(j) + 1) / omega;
    return s / std::log(10.0);
}

namespace {

struct NewtonBudget {
    int fd_exponent;
    hp tol;
};

NewtonBudget budget_for(double decades) {
    const unsigned need = digits_for_decades(decades);
    if (working_digits() + 5 < need)
        throw Error("precision", "working precision below what the orbit requires");
    NewtonBudget b;
    b.fd_exponent = static_cast<int>(decades) + 30;
    b.tol = pow(hp(10), -(static_cast<int>(decades) + 40));
    return b;
}

hp wrap_2pi(hp a) {
    const hp tp = 2 * hp_pi();
    while (a < 0) a += tp;
    while (a >= tp) a -= tp;
    return a;
}

HpPoint minus_point(long j, const hp& xi, const hp& x, const std::vector<hp>& z, const HpCoeffs& c) {
    HpPoint p;
    p.y = from_winding(WindingCoordT<hp>{Branch::Minus, j, xi}, c.theta, c.omega);
    p.x = x;
    p.z = z;
    return p;
}

hp index_ratio(const MatrixT<hp>& M) {
    const hp tr = M(0, 0) + M(1, 1);
    const hp det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    return tr / (1 + det);
}

}  // namespace

Period2Seed seed_period2(const Period2Spec& spec, const MapCoefficients& c, const ControlParams& kp,
                         PhiConvention conv) {
    Period2Seed s;
    const double phi = phi_angle(kp.rho, c.omega, conv);
    s.xi1 = spec.xi1 ? *spec.xi1 : 3 * M_PI / 2 + phi;
    s.xi2 = spec.xi2 ? std::vector<double>{*spec.xi2} : std::vector<double>{M_PI / 2, 3 * M_PI / 2};
    s.log_y1 = -(2 * M_PI * spec.j1 + s.xi1 - c.theta) / c.omega;
    s.log_y2 = -(2 * M_PI * spec.j2 + s.xi2[0] - c.theta) / c.omega;
    s.y1 = -std::exp(s.log_y1);
    s.y2 = -std::exp(s.log_y2);
    const double Bn = (1 + kp.zeta) * c.B;
    double rho = kp.rho;
    for (int it = 0; it < 50; ++it) {
        const double psi =
            (c.omega * std::log(Bn * std::cos(s.xi1)) - c.theta + rho * c.theta - rho * s.xi1 + s.xi2[0]) / (2 * M_PI);
        rho = (spec.j2 + psi) / spec.j1;
    }
    s.rho = rho;
    return s;
}

void validate_period2_spec(const Period2Spec& spec, const SolverOptions& opt) {
    if (spec.j1 < opt.j_min || spec.j2 < opt.j_min) throw Error("validation", "j1, j2 below the configured minimum");
    const double r = static_cast<double>(spec.j2) / spec.j1;
    if (!(r > 0 && r < 0.5)) throw Error("validation", "j2/j1 must lie in (0, 1/2)");
    if (!(spec.c > -1 && spec.c < 1)) throw Error("validation", "c must lie in (-1, 1)");
}

Period2Result solve_period2_hp(const Period2Spec& spec, const HpCoeffs& c, const HpControl& kp,
                               const PerturbationModel& pert, const SolverOptions& opt, std::optional<hp> rho_seed) {
    using std::cos;
    using std::exp;
    using std::log;
    validate_period2_spec(spec, opt);
    const NewtonBudget bud = budget_for(orbit_decades({spec.j1, spec.j2}, to_d(c.omega)));
    const int nz = c.nz();
    const int blk = 2 + nz;
    const hp pi = hp_pi();
    const hp phi = phi_angle(kp.rho, c.omega, opt.phi);
    const hp xi1_seed = spec.xi1 ? hp(*spec.xi1) : hp(3 * pi / 2 + phi);
    std::vector<hp> xi2_seeds;
    if (spec.xi2)
        xi2_seeds.push_back(hp(*spec.xi2));
    else
        xi2_seeds = {pi / 2, 3 * pi / 2};
    const hp cstar(spec.c);

    auto unpack = [&](const std::vector<hp>& v, HpPoint& q1, HpPoint& q2, HpControl& kk) {
        q1 = minus_point(spec.j1, v[0], v[1], std::vector<hp>(v.begin() + 2, v.begin() + blk), c);
        q2 = minus_point(spec.j2, v[blk], v[blk + 1], std::vector<hp>(v.begin() + blk + 2, v.begin() + 2 * blk), c);
        kk = kp;
        kk.rho = v[2 * blk];
    };
    auto F = [&](const std::vector<hp>& v) {
        HpPoint q1, q2;
        HpControl kk;
        unpack(v, q1, q2, kk);
        if (!(kk.rho > 0 && kk.rho < hp(0.5))) throw Error("domain", "rho left (0, 1/2)");
        MatrixT<hp> J1, J2;
        const HpPoint a = apply_T_with_jacobian(q1, c, kk, pert, J1);
        const HpPoint b = apply_T_with_jacobian(q2, c, kk, pert, J2);
        std::vector<hp> r(v.size());
        r[0] = a.y / q2.y - 1;
        r[1] = a.x - q2.x;
        for (int m = 0; m < nz; ++m) r[2 + m] = a.z[m] - q2.z[m];
        r[blk] = b.y / q1.y - 1;
        hp bx = b.x;
        if (opt.literal_x1_phase) {
            const hp s2 = -q2.y;
            const hp amp = c.B1 * q2.x * exp(kk.rho * log(s2));
            bx += amp * (cos(v[blk] + c.eta1) - cos(v[blk] + c.theta1 - c.theta));
        }
        r[blk + 1] = bx - q1.x;
        for (int m = 0; m < nz; ++m) r[blk + 2 + m] = b.z[m] - q1.z[m];
        r[2 * blk] = index_ratio(J2 * J1) - cstar;
        return r;
    };

    // rho seed from the leading-order solvability relation.
    auto rho_from_psi = [&](const hp& xi2) {
        hp rho = kp.rho;
        const hp Bn = (1 + kp.zeta) * c.B;
        for (int it = 0; it < 60; ++it) {
            const hp psi = (c.omega * log(Bn * cos(xi1_seed)) - c.theta + rho * c.theta - rho * xi1_seed + xi2) / (2 * pi);
            rho = (hp(spec.j2) + psi) / hp(spec.j1);
        }
        return rho;
    };

    NewtonOptions no;
    no.tol = bud.tol;
    no.fd_exponent = bud.fd_exponent;

    Period2Result best;
    bool have_accepted = false, have_converged = false;
    for (const hp& xi2 : xi2_seeds) {
        CandidateOutcome co;
        co.xi2_seed = to_d(xi2);
        std::vector<hp> v0;
        v0.push_back(xi1_seed);
        v0.push_back(1 + kp.zeta);
        for (const auto& z : c.zminus) v0.push_back(z);
        v0.push_back(xi2);
        v0.push_back(1 + kp.zeta);
        for (const auto& z : c.zminus) v0.push_back(z);
        v0.push_back(rho_seed ? *rho_seed : rho_from_psi(xi2));
        try {
            const NewtonResult nr = newton_solve(F, v0, no);
            co.converged = nr.converged;
            if (!nr.converged) {
                co.note = "no-convergence";
                best.candidates.push_back(co);
                continue;
            }
            Period2Result res;
            HpPoint q1, q2;
            HpControl kk;
            unpack(nr.x, q1, q2, kk);
            res.orbit.points = {q1, q2};
            finalize_orbit(res.orbit, c, kk, pert, opt.saddle);
            co.index = res.orbit.index;
            res.rho = kk.rho;
            res.iterations = nr.iterations;
            res.xi2_seed_used = co.xi2_seed;
            const hp xi1 = res.orbit.winding[0].xi, xi2s = res.orbit.winding[1].xi;
            res.psi_leftover = kk.rho * spec.j1 - spec.j2;
            res.psi_leading = (c.omega * log((1 + kk.zeta) * c.B * cos(xi1)) - c.theta + kk.rho * c.theta -
                               kk.rho * xi1 + xi2s) /
                              (2 * pi);
            res.psi_residual = res.psi_leftover - res.psi_leading;
            {
                MatrixT<hp> J1, J2;
                apply_T_with_jacobian(q1, c, kk, pert, J1);
                apply_T_with_jacobian(q2, c, kk, pert, J2);
                res.index_value = index_ratio(J2 * J1);
            }
            if (res.orbit.index != 2) {
                res.orbit.flagged = true;
                res.orbit.flag = "index-mismatch";
                co.note = "index-mismatch";
            } else {
                co.note = "accepted";
            }
            if (!have_accepted && (res.orbit.index == 2 || !have_converged)) {
                const auto cands = best.candidates;
                best = res;
                best.candidates = cands;
                have_accepted = res.orbit.index == 2;
                have_converged = true;
            }
        } catch (const Error& e) {
            co.note = e.code();
        }
        best.candidates.push_back(co);
    }
    if (!have_converged) throw Error("no-convergence", "period-2 Newton failed for every xi2 candidate");
    return best;
}

Period2Result solve_period2(const Period2Spec& spec, const MapCoefficients& c, const ControlParams& kp,
                            const PerturbationModel& pert, const SolverOptions& opt) {
    DigitsAtLeast guard(digits_for_decades(orbit_decades({spec.j1, spec.j2}, c.omega)));
    Period2Result r = solve_period2_hp(spec, c.cast<hp>(), kp.cast<hp>(), pert, opt);
    if (!(r.orbit.residual < hp(opt.tol))) throw Error("no-convergence", "period-2 residual above tolerance");
    return r;
}

Period3Seed seed_period3(const Period3Spec& spec, const MapCoefficients& c, const ControlParams& kp,
                         PhiConvention conv) {
    if (spec.configuration != 4)
        throw Error("unsupported-configuration", "only configuration 4 of the period-3 orbit is implemented");
    Period3Seed s;
    s.xi3 = M_PI / 2 - c.theta1 + c.theta;
    while (s.xi3 < 0) s.xi3 += 2 * M_PI;
    while (s.xi3 >= 2 * M_PI) s.xi3 -= 2 * M_PI;
    s.xi1 = 3 * M_PI / 2 + phi_angle(kp.rho, c.omega, conv);
    s.xi2 = M_PI / 2;
    return s;
}

void validate_period3_spec(const Period3Spec& spec, double rho, const SolverOptions& opt) {
    if (spec.configuration != 4)
        throw Error("unsupported-configuration", "only configuration 4 of the period-3 orbit is implemented");
    if (spec.j1 < opt.j_min || spec.j2 < opt.j_min || spec.j3 < opt.j_min)
        throw Error("validation", "j1, j2, j3 below the configured minimum");
    const double e1 = std::fabs(rho * spec.j3 - spec.j1) / spec.j1;
    const double e2 = std::fabs(rho * spec.j1 - spec.j2) / spec.j2;
    if (e1 > opt.ordering_slack || e2 > opt.ordering_slack)
        throw Error("validation", "winding indices violate rho*j3 ~ j1, rho*j1 ~ j2");
}

namespace {

struct P3Layout {
    int nz, blk;
    int off_mu() const { return 3 * blk; }
};

void fill_period3_diagnostics(Period3Result& r, const Period3Spec& spec, const HpControl& kk,
                              const PerturbationModel& pert) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    const hp pi = hp_pi();
    const auto& c = r.coeffs;
    const auto& P = r.orbit.points;
    const hp s1 = -P[0].y, s2 = -P[1].y, s3 = -P[2].y;
    const hp xi1 = r.orbit.winding[0].xi, xi2 = r.orbit.winding[1].xi, xi3 = r.orbit.winding[2].xi;
    const hp rho = kk.rho;
    auto powr = [&](const hp& s) { return exp(rho * log(s)); };
    const hp sigma = c.theta1 - c.theta;
    const hp e15 = s1 - c.B * powr(s3) * sin(sigma) / 2;
    const hp e16 = -s2 - (s1 - c.B * powr(s1) * cos(xi1));
    const hp e17 = -s3 - (s1 - c.B * powr(s2) * cos(xi2));
    r.pp_residual_abs = {to_d(abs(e15)), to_d(abs(e16)), to_d(abs(e17))};
    // relative to the largest term of each relation
    const hp n15 = std::max(s1, hp(abs(c.B * powr(s3) * sin(sigma) / 2)));
    const hp n16 = std::max({s2, s1, hp(abs(c.B * powr(s1) * cos(xi1)))});
    const hp n17 = std::max({s3, s1, hp(abs(c.B * powr(s2) * cos(xi2)))});
    r.pp_residual_rel = {to_d(abs(e15) / n15), to_d(abs(e16) / n16), to_d(abs(e17) / n17)};
    const Leaf L = leaf_through(P[0], pert);
    const HpPoint at = L.at(c.zplus);
    r.leaf_gap = std::max(abs(at.y - kk.mu), abs(at.x - 1));
    r.u_solved = (c.omega * log(c.B * cos(xi1)) - c.theta + rho * c.theta - rho * xi1 + xi2) / (2 * pi);
    r.v_solved = (c.omega * log(c.B * sin(sigma) / 2) - c.theta + rho * c.theta - rho * xi3 + xi1) / (2 * pi);
    (void)spec;
}

}  // namespace

Period3Result solve_period3_anchored_hp(const Period3Spec& spec, const HpCoeffs& c0, const HpControl& kp,
                                        const PerturbationModel& pert, const SolverOptions& opt) {
    using std::abs;
    validate_period3_spec(spec, to_d(kp.rho), opt);
    const NewtonBudget bud = budget_for(orbit_decades({spec.j1, spec.j2, spec.j3}, to_d(c0.omega)));
    const int nz = c0.nz();
    const int blk = 2 + nz;
    const hp pi = hp_pi();
    const long js[3] = {spec.j1, spec.j2, spec.j3};
    const hp cstar(spec.c);

    HpCoeffs cs = c0;
    const hp ut = kp.rho * spec.j1 - spec.j2;
    const hp vt = kp.rho * spec.j3 - spec.j1;
    coefficients_from_uv_t(cs, kp.rho, ut, vt, opt.phi);
    const hp phi = phi_angle(kp.rho, c0.omega, opt.phi);
    const hp xi3_seed = wrap_2pi(pi / 2 - cs.theta1 + cs.theta);
    const hp seeds[3] = {3 * pi / 2 + phi, pi / 2, xi3_seed};

    auto unpack = [&](const std::vector<hp>& v, HpPoint* Q, HpCoeffs& cc, HpControl& kk) {
        for (int i = 0; i < 3; ++i)
            Q[i] = minus_point(js[i], v[i * blk], v[i * blk + 1],
                               std::vector<hp>(v.begin() + i * blk + 2, v.begin() + (i + 1) * blk), cc);
        kk = kp;
        kk.mu = v[3 * blk];
        kk.zeta = v[3 * blk + 1];
        cc.B = v[3 * blk + 2];
        cc.theta1 = v[3 * blk + 3];
    };
    auto F = [&](const std::vector<hp>& v) {
        HpCoeffs cc = c0;
        HpControl kk;
        HpPoint Q[3];
        cc.B = v[3 * blk + 2];
        unpack(v, Q, cc, kk);
        if (!(cc.B > 0)) throw Error("domain", "B left (0, inf)");
        std::vector<hp> r(v.size());
        MatrixT<hp> M = MatrixT<hp>::identity(c0.dim());
        for (int i = 0; i < 3; ++i) {
            MatrixT<hp> J;
            const HpPoint a = apply_T_with_jacobian(Q[i], cc, kk, pert, J);
            M = J * M;
            const HpPoint& nx = Q[(i + 1) % 3];
            r[i * blk] = a.y / nx.y - 1;
            r[i * blk + 1] = a.x - nx.x;
            for (int m = 0; m < nz; ++m) r[i * blk + 2 + m] = a.z[m] - nx.z[m];
        }
        const Leaf L = leaf_through(Q[0], pert);
        const HpPoint at = L.at(cc.zplus);
        r[3 * blk] = (kk.mu - at.y) / abs(Q[0].y);
        r[3 * blk + 1] = 1 - at.x;
        r[3 * blk + 2] = kk.zeta + (at.x - Q[0].x);
        r[3 * blk + 3] = index_ratio(M) - cstar;
        return r;
    };

    std::vector<hp> v0(3 * blk + 4);
    for (int i = 0; i < 3; ++i) {
        v0[i * blk] = seeds[i];
        v0[i * blk + 1] = 1;
        for (int m = 0; m < nz; ++m) v0[i * blk + 2 + m] = c0.zminus[m];
    }
    v0[3 * blk] = from_winding(WindingCoordT<hp>{Branch::Minus, spec.j1, seeds[0]}, c0.theta, c0.omega);
    v0[3 * blk + 1] = 0;
    v0[3 * blk + 2] = cs.B;
    v0[3 * blk + 3] = cs.theta1;

    NewtonOptions no;
    no.tol = bud.tol;
    no.fd_exponent = bud.fd_exponent;
    const NewtonResult nr = newton_solve(F, v0, no);
    if (!nr.converged) throw Error("no-convergence", "period-3 anchored Newton did not converge");

    Period3Result res;
    res.coeffs = c0;
    HpControl kk;
    HpPoint Q[3];
    unpack(nr.x, Q, res.coeffs, kk);
    res.orbit.points = {Q[0], Q[1], Q[2]};
    finalize_orbit(res.orbit, res.coeffs, kk, pert, opt.saddle);
    res.mu = kk.mu;
    res.zeta = kk.zeta;
    res.iterations = nr.iterations;
    res.seed_xi3 = to_d(xi3_seed);
    res.index_value = index_ratio(composed_jacobian(res.orbit, res.coeffs, kk, pert));
    const hp sig = res.coeffs.theta1 - res.coeffs.theta;
    if (!(sig > 0 && sig <= pi / 2 + hp(1e-9))) {
        res.orbit.flagged = true;
        res.orbit.flag = "theta1-outside-box";
    }
    if (res.orbit.index != 2) {
        res.orbit.flagged = true;
        res.orbit.flag = "index-mismatch";
    }
    const hp phic = phi_angle(kp.rho, c0.omega, opt.phi);
    res.u_closed = u_closed_form(res.coeffs.B, res.coeffs.omega, res.coeffs.theta, kp.rho, phic);
    res.v_closed = v_closed_form(res.coeffs.B, res.coeffs.theta1, res.coeffs.omega, res.coeffs.theta, kp.rho, phic);
    fill_period3_diagnostics(res, spec, kk, pert);
    return res;
}

Period3Result solve_period3_anchored(const Period3Spec& spec, const MapCoefficients& c, const ControlParams& kp,
                                     const PerturbationModel& pert, const SolverOptions& opt) {
    DigitsAtLeast guard(digits_for_decades(orbit_decades({spec.j1, spec.j2, spec.j3}, c.omega)));
    Period3Result r = solve_period3_anchored_hp(spec, c.cast<hp>(), kp.cast<hp>(), pert, opt);
    if (!(r.orbit.residual < hp(opt.tol))) throw Error("no-convergence", "period-3 residual above tolerance");
    return r;
}

Period3Result resolve_period3_fixed_anchor(const Period3Spec& spec, const Period3Result& prev, const hp& zeta,
                                           const HpControl& kp, const PerturbationModel& pert,
                                           const SolverOptions& opt) {
    const NewtonBudget bud = budget_for(orbit_decades({spec.j1, spec.j2, spec.j3}, to_d(prev.coeffs.omega)));
    // Every x_i carries the factor 1 + zeta into the y-equations through B x_i, so B is
    // rescaled to hold B (1 + zeta) fixed; without this the orbit does not persist.
    HpCoeffs c0 = prev.coeffs;
    c0.B = prev.coeffs.B * (1 + prev.zeta) / (1 + zeta);
    const int nz = c0.nz();
    const int blk = 2 + nz;
    const long js[3] = {spec.j1, spec.j2, spec.j3};
    HpControl kk = kp;
    kk.mu = prev.mu;
    kk.zeta = zeta;

    auto unpack = [&](const std::vector<hp>& v, HpPoint* Q) {
        for (int i = 0; i < 3; ++i)
            Q[i] = minus_point(js[i], v[i * blk], v[i * blk + 1],
                               std::vector<hp>(v.begin() + i * blk + 2, v.begin() + (i + 1) * blk), c0);
    };
    auto F = [&](const std::vector<hp>& v) {
        HpPoint Q[3];
        unpack(v, Q);
        std::vector<hp> r(v.size());
        for (int i = 0; i < 3; ++i) {
            const HpPoint a = apply_T(Q[i], c0, kk, pert);
            const HpPoint& nx = Q[(i + 1) % 3];
            r[i * blk] = a.y / nx.y - 1;
            r[i * blk + 1] = a.x - nx.x;
            for (int m = 0; m < nz; ++m) r[i * blk + 2 + m] = a.z[m] - nx.z[m];
        }
        return r;
    };
    std::vector<hp> v0(3 * blk);
    for (int i = 0; i < 3; ++i) {
        const auto& p = prev.orbit.points[i];
        const auto wd = to_winding(p.y, c0.theta, c0.omega);
        v0[i * blk] = wd.xi + 2 * hp_pi() * hp(wd.j - js[i]);
        v0[i * blk + 1] = p.x;
        for (int m = 0; m < nz; ++m) v0[i * blk + 2 + m] = p.z[m];
    }
    NewtonOptions no;
    no.tol = bud.tol;
    no.fd_exponent = bud.fd_exponent;
    const NewtonResult nr = newton_solve(F, v0, no);
    if (!nr.converged) throw Error("no-convergence", "period-3 re-solve did not converge");
    Period3Result res = prev;
    res.coeffs = c0;
    HpPoint Q[3];
    unpack(nr.x, Q);
    res.orbit = OrbitRecord{};
    res.orbit.points = {Q[0], Q[1], Q[2]};
    finalize_orbit(res.orbit, res.coeffs, kk, pert, opt.saddle);
    res.zeta = zeta;
    res.iterations = nr.iterations;
    res.index_value = index_ratio(composed_jacobian(res.orbit, res.coeffs, kk, pert));
    if (res.orbit.index != 2) {
        res.orbit.flagged = true;
        res.orbit.flag = "index-mismatch";
    }
    fill_period3_diagnostics(res, spec, kk, pert);
    return res;
}

Index2Diagnostic index2_diagnostic(const OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp,
                                   const PerturbationModel& pert) {
    const IndexReport ir = classify_index(orbit, c, kp, pert);
    Index2Diagnostic d;
    d.cos_omega_rho = ir.cos_factors_omega_rho;
    d.cos_rho_omega = ir.cos_factors_rho_omega;
    d.product_omega_rho = ir.cos_product_omega_rho;
    d.product_rho_omega = ir.cos_product_rho_omega;
    d.log10_moduli = ir.log10_moduli;
    d.small_factor = ir.small_factor;
    d.index = ir.index;
    return d;
}

double distance_to_Mminus(const OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp) {
    using std::abs;
    hp d = 0;
    for (const auto& p : orbit.points) {
        d = std::max(d, abs(p.y));
        d = std::max(d, hp(abs(p.x - (1 + kp.zeta))));
        for (int m = 0; m < c.nz(); ++m) d = std::max(d, hp(abs(p.z[m] - c.zminus[m])));
    }
    return to_d(d);
}

}  // namespace hetcyc

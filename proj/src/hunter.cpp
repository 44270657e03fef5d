#include "hetcyc/hunter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <atomic>
#include <thread>

namespace hetcyc {

namespace {

hp eps_digits(double fraction) {
    return pow(hp(10), -static_cast<int>(working_digits() * fraction));
}

hp amp_scale(const hp& A, const OrbitRecord& P, const hp& t, const hp& rho) {
    using std::abs;
    using std::exp;
    using std::log;
    return abs(A) * abs(P.points[0].x) * exp(rho * log(t));
}

// Regula falsi with the Illinois modification; f(a), f(b) must differ in sign.
hp illinois(const std::function<hp(const hp&)>& f, hp a, hp b, hp fa, hp fb, const hp& xtol, int max_iter) {
    using std::abs;
    int side = 0;
    hp c = a;
    for (int it = 0; it < max_iter; ++it) {
        c = (a * fb - b * fa) / (fb - fa);
        if (!(c > std::min(a, b) && c < std::max(a, b))) c = (a + b) / 2;
        const hp fc = f(c);
        if (fc == 0) return c;
        if ((fc > 0) == (fb > 0)) {
            b = c;
            fb = fc;
            if (side == -1) fa /= 2;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb /= 2;
            side = 1;
        }
        if (abs(b - a) < xtol) break;
    }
    return abs(fa) < abs(fb) ? a : b;
}

template <class Fn>
void run_parallel(int n, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

int ladder_index_of(const OrbitRecord& P, const HpCoeffs& c) {
    const double C = std::exp((2 * to_d(c.eta) - M_PI) / (2 * to_d(c.omega)));
    const double lnY = hp_log10_abs(P.points.at(0).y) * std::log(10.0);
    return static_cast<int>(std::lround(to_d(c.omega) * (std::log(C) - lnY) / M_PI));
}

hp ladder_seed(long m, const HpCoeffs& c) {
    using std::exp;
    const hp pi = hp_pi();
    return exp(-(pi / 2 + hp(m) * pi - c.eta) / c.omega);
}

LadderRung solve_rung(long m, const OrbitRecord& P, const Leaf& L, const HpCoeffs& c, const HpControl& kp,
                      const PerturbationModel& pert) {
    using std::abs;
    using std::exp;
    const hp pi = hp_pi();
    const hp yP = P.points.at(0).y;
    auto t_of = [&](const hp& u) { return hp(exp(-(u - c.eta) / c.omega)); };
    auto h = [&](const hp& u) {
        const hp t = t_of(u);
        const HpPoint S = unstable_spiral_hp(P, t, c, kp, pert);
        return hp((S.y - L.at(S.z).y) / amp_scale(c.A, P, t, kp.rho));
    };
    hp u = pi / 2 + hp(m) * pi;
    if (!(t_of(u) < yP)) throw Error("domain", "ladder rung above the fixed point");
    const hp du = eps_digits(1.0 / 3);
    const hp stop = eps_digits(0.5);
    for (int it = 0; it < 80; ++it) {
        const hp hu = h(u);
        if (abs(hu) < stop) break;
        const hp d = (h(u + du) - h(u - du)) / (2 * du);
        hp step = hu / d;
        if (abs(step) > pi / 4) step = step > 0 ? pi / 4 : -pi / 4;
        u -= step;
    }
    LadderRung r;
    r.m = m;
    r.t = t_of(u);
    const HpPoint S = unstable_spiral_hp(P, r.t, c, kp, pert);
    const HpPoint Lp = L.at(S.z);
    r.dx = S.x - Lp.x;
    r.dy = S.y - Lp.y;
    r.amplitude = amp_scale(c.A1, P, r.t, kp.rho);
    r.scaled_x = to_d(abs(r.dx) / r.amplitude);
    r.scaled_y = to_d(abs(r.dy) / amp_scale(c.A, P, r.t, kp.rho));
    return r;
}

double quasi_angle(const OrbitRecord& P, const hp& t, const Leaf& L, const HpCoeffs& c, const HpControl& kp,
                   const PerturbationModel& pert, std::vector<double>* tangent) {
    using std::sqrt;
    const int d = c.dim();
    MatrixT<hp> J;
    apply_T_with_jacobian(HpPoint{t, P.points[0].x, P.points[0].z}, c, kp, pert, J);
    hp nrm = 0;
    for (int i = 0; i < d; ++i) nrm += J(i, 0) * J(i, 0);
    nrm = sqrt(nrm);
    Matrix U(d, 1);
    for (int i = 0; i < d; ++i) U(i, 0) = to_d(J(i, 0) / nrm);
    if (tangent) {
        tangent->clear();
        for (int i = 0; i < d; ++i) tangent->push_back(U(i, 0));
    }
    const int nz = c.nz();
    if (nz == 0) return M_PI / 2;
    Matrix V(d, nz);
    for (int m = 0; m < nz; ++m) {
        V(0, m) = to_d(L.a1);
        V(1, m) = to_d(L.a2);
        V(2 + m, m) = 1;
    }
    return smallest_principal_angle(U, V);
}

QuasiReport quasi_transverse_solve(const OrbitRecord& P, const OrbitRecord& Q, const HpCoeffs& c,
                                   const HpControl& kp, const PerturbationModel& pert, const QuasiOptions& opt) {
    if (P.index != 1 || P.points.empty() || !(P.points[0].y > 0))
        throw Error("domain", "P must be an index-1 point on branch +");
    if (Q.index != 2) throw Error("domain", "Q must have index 2");
    const Leaf L = leaf_through(Q.points.at(0), pert);
    const hp yP = P.points[0].y;
    long lo, hi;
    if (opt.ladder_index) {
        lo = *opt.ladder_index - opt.window;
        hi = *opt.ladder_index + opt.window;
    } else {
        // first rung below y_P
        const double m0 = (to_d(c.omega) * (-hp_log10_abs(yP) * std::log(10.0)) + to_d(c.eta) - M_PI / 2) / M_PI;
        lo = static_cast<long>(std::ceil(m0)) + 1;
        hi = lo + opt.scan;
    }
    QuasiReport rep;
    rep.y_P = yP;
    const LadderRung* best = nullptr;
    for (long m = std::max(0L, lo); m <= hi; ++m) {
        if (!(ladder_seed(m, c) < yP)) continue;
        try {
            rep.rungs.push_back(solve_rung(m, P, L, c, kp, pert));
        } catch (const Error&) {
        }
    }
    for (const auto& r : rep.rungs)
        if (!best || r.scaled_x < best->scaled_x) best = &r;
    if (!best || !(best->scaled_x < opt.tol) || !(best->scaled_y < opt.tol))
        throw Error("no-ladder-point", "no spiral rung satisfies the x-equation within tolerance");
    rep.ladder_index = best->m;
    rep.t = best->t;
    rep.spiral_point = unstable_spiral_hp(P, rep.t, c, kp, pert);
    rep.leaf_point = L.at(rep.spiral_point.z);
    rep.dx = best->dx;
    rep.dy = best->dy;
    rep.residual = std::max(best->scaled_x, best->scaled_y);
    rep.residual_abs = std::max(to_d(abs(best->dx)), to_d(abs(best->dy)));
    rep.principal_angle = quasi_angle(P, rep.t, L, c, kp, pert, &rep.spiral_tangent);
    rep.tangent_intersection_dim = rep.principal_angle > 1e-12 ? 0 : 1;
    // keep the report compact: only rungs next to the chosen one
    std::vector<LadderRung> near;
    for (const auto& r : rep.rungs)
        if (std::labs(r.m - rep.ladder_index) <= 2) near.push_back(r);
    rep.rungs = near;
    return rep;
}

// ---- transverse witness ----

namespace {

struct Node {
    hp s;
    HpPoint img;
};

HpPoint disc_point(const HpPoint& Q1, const hp& s, const hp& dy, const hp& dx) {
    HpPoint p = Q1;
    p.y += s * dy;
    p.x += s * dx;
    return p;
}

HpPoint iterate_n(HpPoint p, int n, const HpCoeffs& c, const HpControl& kp, const PerturbationModel& pert) {
    for (int k = 0; k < n; ++k) p = apply_T(p, c, kp, pert);
    return p;
}

double log_gap(const HpPoint& a, const HpPoint& b, const HpCoeffs& c) {
    const double la = hp_log10_abs(a.y) * std::log(10.0), lb = hp_log10_abs(b.y) * std::log(10.0);
    return std::fabs(to_d(c.omega) * (la - lb)) + to_d(abs(a.x - b.x)) / to_d(c.delta);
}

}  // namespace

TransverseWitness transverse_witness(const OrbitRecord& Q, const OrbitRecord& /*P*/, int p_k, const HpCoeffs& c,
                                     const HpControl& kp, const PerturbationModel& pert, const WitnessOptions& opt) {
    using std::abs;
    using std::asin;
    using std::sqrt;
    using std::cos;
    using std::sin;
    const HpPoint Q1 = Q.points.at(0);
    TransverseWitness w;
    w.dir_y = hp(opt.disc_radius) * abs(Q1.y) * cos(hp(opt.disc_angle));
    w.dir_x = hp(opt.disc_radius_x) * sin(hp(opt.disc_angle));
    std::vector<Node> poly;
    for (int i = 0; i < opt.initial_points; ++i) {
        const hp s = hp(-1) + hp(2 * i) / (opt.initial_points - 1);
        poly.push_back({s, disc_point(Q1, s, w.dir_y, w.dir_x)});
    }
    int n = 0;
    long cross = -1;
    for (n = 1; n <= opt.max_iter && cross < 0; ++n) {
        for (auto& nd : poly) nd.img = apply_T(nd.img, c, kp, pert);
        for (int pass = 0; pass < 16; ++pass) {
            std::vector<Node> out;
            bool inserted = false;
            out.push_back(poly[0]);
            for (size_t i = 1; i < poly.size(); ++i) {
                const Node& a = poly[i - 1];
                const Node& b = poly[i];
                const bool same = (a.img.y > 0) == (b.img.y > 0);
                if (same && out.size() + (poly.size() - i) < static_cast<size_t>(opt.max_points) &&
                    log_gap(a.img, b.img, c) > opt.max_phase_gap) {
                    const hp sm = (a.s + b.s) / 2;
                    try {
                        out.push_back({sm, iterate_n(disc_point(Q1, sm, w.dir_y, w.dir_x), n, c, kp, pert)});
                        inserted = true;
                    } catch (const OnStableManifold&) {
                    }
                }
                out.push_back(b);
            }
            poly.swap(out);
            if (!inserted) break;
        }
        for (size_t i = 1; i < poly.size(); ++i)
            if ((poly[i - 1].img.y > 0) != (poly[i].img.y > 0)) {
                cross = static_cast<long>(i);
                break;
            }
        if (cross >= 0) break;
    }
    if (cross < 0) throw Error("no-crossing", "disc image does not cross {y=0} within max_iter");

    w.iterations = n;
    w.polyline_points = static_cast<int>(poly.size());
    const Node& na = poly[cross - 1];
    const Node& nb = poly[cross];
    const hp y_plus = na.img.y > 0 ? na.img.y : nb.img.y;
    auto f = [&](const hp& s) { return iterate_n(disc_point(Q1, s, w.dir_y, w.dir_x), n, c, kp, pert).y; };
    w.s_star = illinois(f, na.s, nb.s, na.img.y, nb.img.y, eps_digits(0.5), 600);

    HpPoint p = disc_point(Q1, w.s_star, w.dir_y, w.dir_x);
    std::vector<hp> v(c.dim(), hp(0));
    v[0] = w.dir_y;
    v[1] = w.dir_x;
    w.segment.push_back(p);
    w.x_min = w.x_max = to_d(p.x);
    for (int k = 0; k < n; ++k) {
        MatrixT<hp> J;
        p = apply_T_with_jacobian(p, c, kp, pert, J);
        w.area_ratios.push_back(std::fabs(to_d(det_yx(J))));
        v = J * v;
        w.segment.push_back(p);
        w.x_min = std::min(w.x_min, to_d(p.x));
        w.x_max = std::max(w.x_max, to_d(p.x));
    }
    const double d = to_d(c.delta);
    w.x_bounded = w.x_min > 1 - d && w.x_max < 1 + d;
    hp nv = 0;
    for (const auto& e : v) nv += e * e;
    nv = sqrt(nv);
    w.crossing_angle = to_d(asin(abs(v[0]) / nv));
    w.crossing_y_rel = abs(p.y) / abs(v[0]);

    // Landing: the image arc covers y in (0, y_plus), so every sigma_i above index i_min is met.
    const double ln_yp = hp_log10_abs(y_plus) * std::log(10.0);
    const double om = to_d(c.omega), eta = to_d(c.eta);
    const int i_min = static_cast<int>(std::floor((-2 * om * ln_yp + 2 * eta + M_PI) / (4 * M_PI))) + 1;
    w.target_region = std::max(1, (p_k + 1) / 2);
    w.landing_region = std::max(i_min, w.target_region + 1);
    if (opt.check_chain) {
        if (w.landing_region > 110) throw Error("chain-broken", "landing region too deep for the chain check");
        const double rho = to_d(kp.rho);
        const double rp = opt.rho_prime ? *opt.rho_prime : rho + (0.5 - rho) / 4;
        w.chain = horseshoe_chain_check(w.landing_region, rp, c.cast<double>(), kp.cast<double>(), pert,
                                        w.target_region);
        if (!w.chain.verified) throw Error("chain-broken", "horseshoe chain broken at region " +
                                                               std::to_string(w.chain.broken_at));
    }
    return w;
}

// ---- certificates ----

CycleCertificate certify(CycleCertificate parts) {
    std::vector<ValidationIssue> bad;
    const auto& t = parts.tol;
    if (parts.mechanism != "thm1" && parts.mechanism != "thm2") bad.push_back({"mechanism", "must be thm1 or thm2"});
    if (parts.P.index != 1)
        bad.push_back({"P.index", "index invariant violated: expected 1, got " + std::to_string(parts.P.index)});
    if (parts.Q.index != 2)
        bad.push_back({"Q.index", "index invariant violated: expected 2, got " + std::to_string(parts.Q.index)});
    if (!(parts.P.residual < hp(t.orbit))) bad.push_back({"P.residual", "above the orbit tolerance"});
    if (!(parts.Q.residual < hp(t.orbit))) bad.push_back({"Q.residual", "above the orbit tolerance"});
    if (!(parts.quasi.residual < t.quasi))
        bad.push_back({"quasi.residual", "residual " + format_double(parts.quasi.residual) + " exceeds tolerance " +
                                             format_double(t.quasi)});
    if (!(parts.quasi.principal_angle > t.angle_margin))
        bad.push_back({"quasi.principal_angle", "below the configured margin"});
    if (parts.quasi.tangent_intersection_dim != 0)
        bad.push_back({"quasi.tangent_intersection_dim", "tangent spaces intersect"});
    if (!(parts.quasi.t > 0 && parts.quasi.t < parts.quasi.y_P))
        bad.push_back({"quasi.t", "spiral parameter outside (0, y_P)"});
    if (!(parts.witness.crossing_angle > t.witness_angle_margin))
        bad.push_back({"witness.crossing_angle", "below the configured margin"});
    if (parts.witness.segment.empty()) bad.push_back({"witness.segment", "missing"});
    if (!bad.empty()) throw ValidationError(bad, "validation-failed");
    return parts;
}

std::vector<ValidationIssue> revalidate(const CycleCertificate& cert) {
    using std::abs;
    using std::asin;
    using std::sqrt;
    std::vector<ValidationIssue> bad;
    PrecisionScope prec(cert.digits);
    const HpCoeffs& c = cert.coeffs;
    const HpControl& kp = cert.control;
    const auto& pert = cert.pert;
    auto check_orbit = [&](const OrbitRecord& O, const char* name, int want) {
        const int per = O.period();
        if (per == 0) {
            bad.push_back({name, "no points"});
            return;
        }
        hp res = 0;
        MatrixT<hp> M = MatrixT<hp>::identity(c.dim());
        for (int i = 0; i < per; ++i) {
            const HpPoint& a = O.points[i];
            const HpPoint& b = O.points[(i + 1) % per];
            const HpPoint q = apply_T(a, c, kp, pert);
            res = std::max({res, hp(abs(q.y - b.y) / abs(b.y)), hp(abs(q.x - b.x))});
            for (int m = 0; m < c.nz(); ++m) res = std::max(res, hp(abs(q.z[m] - b.z[m])));
            M = jacobian_T(a, c, kp, pert, JacobianMode::Analytic) * M;
        }
        if (!(res < hp(cert.tol.orbit)))
            bad.push_back({std::string(name) + ".residual", "recomputed residual above tolerance"});
        int idx = 0;
        for (const auto& e : eigenvalues(M))
            if (e.modulus() > 1) ++idx;
        if (idx != want)
            bad.push_back({std::string(name) + ".index", "recomputed index " + std::to_string(idx) + ", expected " +
                                                             std::to_string(want)});
    };
    check_orbit(cert.P, "P", 1);
    check_orbit(cert.Q, "Q", 2);
    if (bad.empty()) {
        const Leaf L = leaf_through(cert.Q.points[0], pert);
        const HpPoint& Pp = cert.P.points[0];
        if (!(cert.quasi.t > 0 && cert.quasi.t < Pp.y)) bad.push_back({"quasi.t", "outside (0, y_P)"});
        const HpPoint S = apply_T1(HpPoint{cert.quasi.t, Pp.x, Pp.z}, c, kp, pert);
        const HpPoint Lp = L.at(S.z);
        const double rx = to_d(abs(S.x - Lp.x) / amp_scale(c.A1, cert.P, cert.quasi.t, kp.rho));
        const double ry = to_d(abs(S.y - Lp.y) / amp_scale(c.A, cert.P, cert.quasi.t, kp.rho));
        if (!(std::max(rx, ry) < cert.tol.quasi)) bad.push_back({"quasi.residual", "recomputed residual above tolerance"});
        const double ang = quasi_angle(cert.P, cert.quasi.t, L, c, kp, pert);
        if (!(ang > cert.tol.angle_margin)) bad.push_back({"quasi.principal_angle", "recomputed angle below margin"});

        const auto& w = cert.witness;
        HpPoint p = cert.Q.points[0];
        p.y += w.s_star * w.dir_y;
        p.x += w.s_star * w.dir_x;
        std::vector<hp> v(c.dim(), hp(0));
        v[0] = w.dir_y;
        v[1] = w.dir_x;
        bool ok = p.y < 0;
        for (int k = 0; k < w.iterations && ok; ++k) {
            if (p.y == 0) {
                ok = false;
                break;
            }
            v = jacobian_T(p, c, kp, pert, JacobianMode::Analytic) * v;
            p = apply_T(p, c, kp, pert);
        }
        if (!ok) {
            bad.push_back({"witness", "iterates hit {y=0} early"});
        } else {
            hp nv = 0;
            for (const auto& e : v) nv += e * e;
            const hp yrel = abs(p.y) / abs(v[0]);
            if (!(yrel < hp(1e-20))) bad.push_back({"witness.crossing", "end point is not on {y=0}"});
            const double ang2 = to_d(asin(abs(v[0]) / sqrt(nv)));
            if (!(ang2 > cert.tol.witness_angle_margin))
                bad.push_back({"witness.crossing_angle", "recomputed angle below margin"});
        }
    }
    if (cert.flow_index_P() != cert.map_index_P() + 1 || cert.flow_index_Q() != cert.map_index_Q() + 1)
        bad.push_back({"indices", "flow index must equal map index + 1"});
    return bad;
}

// ---- hunts ----

namespace {

OrbitRecord choose_P(const HpCoeffs& c, const HpControl& kp, const PerturbationModel& pert,
                     const SaddleOptions& so, std::optional<int> forced, int* k_used) {
    using std::exp;
    const hp pi = hp_pi();
    const int k0 = forced ? *forced : so.k_min;
    const int k1 = forced ? *forced : so.k_min + 10;
    Error last("no-convergence", "no admissible ladder point");
    for (int k = k0; k <= k1; ++k) {
        if (kp.mu != 0 && !(abs(kp.mu) * exp(pi * kp.rho * k / c.omega) < hp(so.mu_smallness))) continue;
        HpPoint s;
        s.y = exp((2 * c.eta - pi) / (2 * c.omega)) * exp(-pi * k / c.omega);
        s.x = 1;
        s.z = c.zplus;
        try {
            OrbitRecord r = refine_fixed_point_hp(s, Branch::Plus, c, kp, pert, so);
            if (r.index == 1) {
                *k_used = k;
                return r;
            }
        } catch (const Error& e) {
            last = e;
        }
    }
    throw last;
}

}  // namespace

HuntResult hunt_thm1(double rho_star, const std::vector<Thm1Pair>& pairs, const MapCoefficients& c0,
                     const PerturbationModel& pert, const HuntOptions& opt) {
    if (!(rho_star > 0 && rho_star < 0.5)) throw Error("validation", "rho_star must lie in (0, 1/2)");
    if (pairs.empty()) throw Error("validation", "empty j sequence");
    double decades = 0;
    for (const auto& pr : pairs) {
        validate_period2_spec(Period2Spec{pr.j1, pr.j2, 0.0, {}, {}}, opt.solver);
        decades = std::max(decades, orbit_decades({pr.j1, pr.j2}, c0.omega));
    }
    PrecisionScope prec(digits_for_decades(decades));
    const unsigned digits = working_digits();
    const HpCoeffs c = c0.cast<hp>();
    const int n = static_cast<int>(pairs.size());
    std::vector<std::optional<CycleCertificate>> certs(n);
    std::vector<std::optional<HuntFailure>> fails(n);

    run_parallel(n, opt.jobs, [&](int i) {
        try {
            const Period2Spec spec{pairs[i].j1, pairs[i].j2, 0.0, {}, {}};
            HpControl kk;
            kk.rho = hp(rho_star);
            kk.zeta = 0;
            kk.mu = 0;
            const long m = opt.quasi.ladder_index ? *opt.quasi.ladder_index : spec.j2;
            std::optional<hp> rho_prev;
            Period2Result r2;
            OrbitRecord P;
            int pk = 0;
            HpControl kq = kk;
            bool done = false;
            int it = 0;
            for (; it < opt.max_coupling_iter && !done; ++it) {
                r2 = solve_period2_hp(spec, c, kk, pert, opt.solver, rho_prev);
                if (r2.orbit.flagged) throw Error("no-convergence", "period-2 orbit flagged: " + r2.orbit.flag);
                rho_prev = r2.rho;
                kq = kk;
                kq.rho = r2.rho;
                P = choose_P(c, kq, pert, opt.solver.saddle, opt.p_k ? opt.p_k : (pk ? std::optional<int>(pk) : std::nullopt), &pk);
                const Leaf L = leaf_through(r2.orbit.points[0], pert);
                const LadderRung rung = solve_rung(m, P, L, c, kq, pert);
                if (rung.scaled_x < opt.tol.quasi * 1e-3) done = true;
                else kk.zeta += rung.dx;
            }
            if (!done) throw Error("no-convergence", "coupling loop did not converge");
            QuasiOptions qo = opt.quasi;
            qo.ladder_index = m;
            qo.tol = opt.tol.quasi;
            CycleCertificate cert;
            cert.mechanism = "thm1";
            cert.sequence_index = i;
            cert.js = {spec.j1, spec.j2};
            cert.digits = digits;
            cert.coeffs = c;
            cert.control = kq;
            cert.pert = pert;
            cert.phi = opt.solver.phi;
            cert.p_k = pk;
            cert.P = P;
            cert.Q = r2.orbit;
            cert.quasi = quasi_transverse_solve(P, r2.orbit, c, kq, pert, qo);
            cert.witness = transverse_witness(r2.orbit, P, pk, c, kq, pert, opt.witness);
            cert.tol = opt.tol;
            cert.coupling_iterations = it;
            cert.joint_residual = std::max(r2.orbit.residual, hp(cert.quasi.residual));
            cert.index2 = index2_diagnostic(r2.orbit, c, kq, pert);
            certs[i] = certify(std::move(cert));
        } catch (const Error& e) {
            fails[i] = HuntFailure{i, e.code(), e.what()};
        }
    });
    HuntResult out;
    for (int i = 0; i < n; ++i) {
        if (certs[i]) out.certificates.push_back(std::move(*certs[i]));
        if (fails[i]) out.failures.push_back(*fails[i]);
    }
    return out;
}

HuntResult hunt_thm2(const RationalTriple& triple, const DiophantineFamily& family, long n_floor, int count,
                     const MapCoefficients& c0, const PerturbationModel& pert, const HuntOptions& opt) {
    using std::abs;
    const auto members = enumerate_solutions(family, n_floor, count);
    std::vector<Period3Spec> specs;
    double decades = 0;
    for (const auto& mb : members) {
        Period3Spec s;
        s.j1 = mb.j[0].convert_to<long>();
        s.j2 = mb.j[1].convert_to<long>();
        s.j3 = mb.j[2].convert_to<long>();
        specs.push_back(s);
        decades = std::max(decades, orbit_decades({s.j1, s.j2, s.j3}, c0.omega));
    }
    PrecisionScope prec(digits_for_decades(decades));
    const unsigned digits = working_digits();
    const HpCoeffs c = c0.cast<hp>();
    const hp rho = hp_from_string(triple.p.str()) / hp_from_string(triple.q.str());
    const double u_star = static_cast<double>(triple.u().convert_to<double>());
    const double v_star = static_cast<double>(triple.v().convert_to<double>());
    const int n = static_cast<int>(specs.size());
    std::vector<std::optional<CycleCertificate>> certs(n);
    std::vector<std::optional<HuntFailure>> fails(n);

    run_parallel(n, opt.jobs, [&](int i) {
        try {
            const Period3Spec& spec = specs[i];
            validate_period3_spec(spec, to_d(rho), opt.solver);
            HpControl kk;
            kk.rho = rho;
            const Period3Result a = solve_period3_anchored_hp(spec, c, kk, pert, opt.solver);
            if (a.orbit.flagged) throw Error("no-convergence", "period-3 orbit flagged: " + a.orbit.flag);
            if (!(a.orbit.residual < hp(opt.tol.orbit))) throw Error("no-convergence", "period-3 residual too large");
            HpControl kq = kk;
            kq.mu = a.mu;
            kq.zeta = a.zeta;
            int pk = 0;
            const OrbitRecord P = choose_P(a.coeffs, kq, pert, opt.solver.saddle, opt.p_k, &pk);
            const long m = opt.quasi.ladder_index ? *opt.quasi.ladder_index : spec.j2;

            // zeta-scan: bracket the sign change of the x-distance, then regula falsi.
            Period3Result cur = a;
            auto dist = [&](const hp& z) {
                HpControl k2 = kq;
                k2.zeta = z;
                cur = resolve_period3_fixed_anchor(spec, a, z, k2, pert, opt.solver);
                if (cur.orbit.index != 2) throw Error("no-convergence", "index lost during the zeta-scan");
                const Leaf L = leaf_through(cur.orbit.points[0], pert);
                return solve_rung(m, P, L, cur.coeffs, k2, pert);
            };
            const hp z0 = a.zeta;
            LadderRung r0 = dist(z0);
            hp zeta_star = z0;
            LadderRung rf = r0;
            if (!(r0.scaled_x < opt.tol.quasi * 1e-3)) {
                // dx moves almost one-to-one with zeta, so zeta + dx is usually already the root.
                hp z1 = z0 + r0.dx;
                LadderRung r1 = dist(z1);
                if (r1.scaled_x < opt.tol.quasi * 1e-3) {
                    zeta_star = z1;
                    rf = r1;
                } else {
                    hp za = z0, zb = z1;
                    hp fa = r0.dx, fb = r1.dx;
                    for (int grow = 0; (fa > 0) == (fb > 0) && grow < 30; ++grow) {
                        zb = za + 2 * (zb - za);
                        fb = dist(zb).dx;
                    }
                    if ((fa > 0) == (fb > 0)) throw Error("no-convergence", "zeta-scan could not bracket the crossing");
                    const hp xtol = abs(zb - za) * eps_digits(0.5);
                    zeta_star = illinois([&](const hp& z) { return dist(z).dx; }, za, zb, fa, fb, xtol, 200);
                    rf = dist(zeta_star);
                }
            }
            if (!(rf.scaled_x < opt.tol.quasi)) throw Error("no-convergence", "zeta-scan did not reach tolerance");
            HpControl kf = kq;
            kf.zeta = zeta_star;
            const Period3Result fin = cur;

            QuasiOptions qo = opt.quasi;
            qo.ladder_index = m;
            qo.tol = opt.tol.quasi;
            CycleCertificate cert;
            cert.mechanism = "thm2";
            cert.sequence_index = i;
            cert.js = {spec.j1, spec.j2, spec.j3};
            cert.digits = digits;
            cert.coeffs = fin.coeffs;
            cert.control = kf;
            cert.pert = pert;
            cert.phi = opt.solver.phi;
            cert.p_k = pk;
            cert.P = P;
            cert.Q = fin.orbit;
            cert.quasi = quasi_transverse_solve(P, fin.orbit, fin.coeffs, kf, pert, qo);
            cert.witness = transverse_witness(fin.orbit, P, pk, fin.coeffs, kf, pert, opt.witness);
            cert.tol = opt.tol;
            cert.joint_residual = std::max(fin.orbit.residual, hp(cert.quasi.residual));
            cert.zeta_scan_start = z0;
            cert.index2 = index2_diagnostic(fin.orbit, fin.coeffs, kf, pert);
            Thm2Anchor an;
            an.mu = a.mu;
            an.zeta = a.zeta;
            an.B = a.coeffs.B;
            an.theta1 = a.coeffs.theta1;
            an.pp_residual_abs = a.pp_residual_abs;
            an.pp_residual_rel = a.pp_residual_rel;
            an.leaf_gap = a.leaf_gap;
            an.leaf_gap_rel = a.leaf_gap / abs(a.mu);
            an.u_solved = a.u_solved;
            an.v_solved = a.v_solved;
            an.u_closed = a.u_closed;
            an.v_closed = a.v_closed;
            an.p = triple.p.str();
            an.q = triple.q.str();
            an.p1 = triple.p1.str();
            an.p2 = triple.p2.str();
            an.u_star = u_star;
            an.v_star = v_star;
            const hp us = hp_from_string(an.p1) / hp_from_string(an.q);
            const hp vs = hp_from_string(an.p2) / hp_from_string(an.q);
            an.u_error = to_d(abs(a.u_solved - us));
            an.v_error = to_d(abs(a.v_solved - vs));
            cert.anchor = an;
            certs[i] = certify(std::move(cert));
        } catch (const Error& e) {
            fails[i] = HuntFailure{i, e.code(), e.what()};
        }
    });
    HuntResult out;
    for (int i = 0; i < n; ++i) {
        if (certs[i]) out.certificates.push_back(std::move(*certs[i]));
        if (fails[i]) out.failures.push_back(*fails[i]);
    }
    return out;
}

}  // namespace hetcyc

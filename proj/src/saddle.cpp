#include "hetcyc/saddle.hpp"

#include "hetcyc/newton.hpp"

#include <algorithm>
#include <cmath>

namespace hetcyc {

const char* phi_convention_name(PhiConvention p) {
    return p == PhiConvention::OmegaOverRho ? "arctan(omega/rho)" : "arctan(rho/omega)";
}

PhiConvention phi_convention_from_name(const std::string& s) {
    if (s == "arctan(omega/rho)" || s == "omega_over_rho") return PhiConvention::OmegaOverRho;
    if (s == "arctan(rho/omega)" || s == "rho_over_omega") return PhiConvention::RhoOverOmega;
    throw Error("validation", "unknown phi convention '" + s + "'");
}

std::vector<double> OrbitRecord::log10_moduli() const {
    std::vector<double> v;
    for (const auto& e : multipliers) v.push_back(hp_log10_abs(e.modulus()));
    return v;
}

SectionPoint seed_Pk(int k, Branch b, const MapCoefficients& c, const ControlParams& kp, const SaddleOptions& opt) {
    if (k < opt.k_min) throw Error("domain", "k below the configured K_min");
    const double phase = b == Branch::Plus ? c.eta : c.theta;
    const double C = std::exp((2 * phase - M_PI) / (2 * c.omega));
    const double yk = C * std::exp(-M_PI * k / c.omega);
    if (!(yk < c.delta)) throw Error("seed-outside-section", "y_k >= delta");
    if (kp.mu != 0 && !(std::fabs(kp.mu) * std::exp(M_PI * kp.rho * k / c.omega) < opt.mu_smallness))
        throw Error("mu-too-large", "|mu| exp(pi rho k / omega) exceeds the configured smallness");
    SectionPoint p;
    p.y = b == Branch::Plus ? yk : -yk;
    p.x = b == Branch::Plus ? 1.0 : 1.0 + kp.zeta;
    p.z = b == Branch::Plus ? c.zplus : c.zminus;
    return p;
}

MatrixT<hp> composed_jacobian(const OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp,
                              const PerturbationModel& pert) {
    MatrixT<hp> M = MatrixT<hp>::identity(c.dim());
    for (const auto& p : orbit.points) {
        MatrixT<hp> J;
        apply_T_with_jacobian(p, c, kp, pert, J);
        M = J * M;
    }
    return M;
}

IndexReport classify_index(const OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp,
                           const PerturbationModel& pert, const SaddleOptions& opt) {
    using std::cos;
    IndexReport r;
    r.multipliers = eigenvalues(composed_jacobian(orbit, c, kp, pert));
    for (const auto& e : r.multipliers) {
        const double l = hp_log10_abs(e.modulus());
        r.log10_moduli.push_back(l);
        if (std::fabs(l * std::log(10.0)) < opt.tol_marginal)
            throw Error("marginal-multiplier", "multiplier on the unit circle");
        if (l > 0) ++r.index;
    }
    const hp phi1 = phi_angle(kp.rho, c.omega, PhiConvention::OmegaOverRho);
    const hp phi2 = phi_angle(kp.rho, c.omega, PhiConvention::RhoOverOmega);
    r.cos_product_omega_rho = 1;
    r.cos_product_rho_omega = 1;
    double best = 2;
    for (size_t i = 0; i < orbit.points.size(); ++i) {
        const Branch b = orbit.points[i].y > 0 ? Branch::Plus : Branch::Minus;
        const auto w = to_winding(orbit.points[i].y, branch_phase(b, c), c.omega);
        const double f1 = to_d(cos(w.xi - phi1));
        const double f2 = to_d(cos(w.xi - phi2));
        r.cos_factors_omega_rho.push_back(f1);
        r.cos_factors_rho_omega.push_back(f2);
        r.cos_product_omega_rho *= f1;
        r.cos_product_rho_omega *= f2;
        if (std::fabs(f1) < best) {
            best = std::fabs(f1);
            r.small_factor = static_cast<int>(i);
        }
    }
    return r;
}

void finalize_orbit(OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp, const PerturbationModel& pert,
                    const SaddleOptions& opt) {
    using std::abs;
    const int P = orbit.period();
    orbit.itinerary.clear();
    orbit.winding.clear();
    orbit.residual = 0;
    orbit.residual_abs = 0;
    for (int i = 0; i < P; ++i) {
        const auto& p = orbit.points[i];
        const auto& nx = orbit.points[(i + 1) % P];
        const Branch b = p.y > 0 ? Branch::Plus : Branch::Minus;
        orbit.itinerary.push_back(b);
        orbit.winding.push_back(to_winding(p.y, branch_phase(b, c), c.omega));
        const auto q = apply_T(p, c, kp, pert);
        const hp dy = abs(q.y - nx.y), dx = abs(q.x - nx.x);
        orbit.residual = std::max({orbit.residual, hp(dy / abs(nx.y)), dx});
        orbit.residual_abs = std::max({orbit.residual_abs, dy, dx});
        for (int m = 0; m < c.nz(); ++m) {
            const hp dz = abs(q.z[m] - nx.z[m]);
            orbit.residual = std::max(orbit.residual, dz);
            orbit.residual_abs = std::max(orbit.residual_abs, dz);
        }
    }
    const IndexReport ir = classify_index(orbit, c, kp, pert, opt);
    orbit.multipliers = ir.multipliers;
    orbit.index = ir.index;
}

OrbitRecord refine_fixed_point_hp(const HpPoint& seed, Branch b, const HpCoeffs& c, const HpControl& kp,
                                  const PerturbationModel& pert, const SaddleOptions& opt) {
    const int nz = c.nz();
    const hp phase = branch_phase(b, c);
    if ((b == Branch::Plus) != (seed.y > 0)) throw Error("domain", "seed on the wrong branch");
    const auto w0 = to_winding(seed.y, phase, c.omega);
    const long j = w0.j;

    auto unpack = [&](const std::vector<hp>& v) {
        HpPoint p;
        p.y = from_winding(WindingCoordT<hp>{b, j, v[0]}, phase, c.omega);
        p.x = v[1];
        p.z.assign(v.begin() + 2, v.end());
        return p;
    };
    auto F = [&](const std::vector<hp>& v) {
        const HpPoint p = unpack(v);
        const HpPoint q = apply_T(p, c, kp, pert);
        std::vector<hp> r(v.size());
        r[0] = q.y / p.y - 1;
        r[1] = q.x - p.x;
        for (int m = 0; m < nz; ++m) r[2 + m] = q.z[m] - p.z[m];
        return r;
    };
    std::vector<hp> x0{w0.xi, seed.x};
    for (const auto& z : seed.z) x0.push_back(z);
    NewtonOptions no;
    no.tol = pow(hp(10), -static_cast<int>(working_digits() / 2));
    no.fd_exponent = static_cast<int>(working_digits() / 3);
    const NewtonResult nr = newton_solve(F, x0, no);
    if (!nr.converged) throw Error("no-convergence", "fixed-point Newton did not converge");
    OrbitRecord rec;
    rec.points.push_back(unpack(nr.x));
    finalize_orbit(rec, c, kp, pert, opt);
    if (rec.index != 1) {
        rec.flagged = true;
        rec.flag = "wrong-index";
    }
    return rec;
}

OrbitRecord refine_fixed_point(const SectionPoint& seed, Branch b, const MapCoefficients& c, const ControlParams& kp,
                               const PerturbationModel& pert, double tol, const SaddleOptions& opt) {
    const double decades = -std::log10(std::fabs(seed.y));
    DigitsAtLeast guard(std::max(60u, digits_for_decades(decades)));
    OrbitRecord rec = refine_fixed_point_hp(seed.cast<hp>(), b, c.cast<hp>(), kp.cast<hp>(), pert, opt);
    if (!(rec.residual < hp(tol))) throw Error("no-convergence", "fixed-point residual above tolerance");
    return rec;
}

OrbitRecord ladder_point(int k, const MapCoefficients& c, const ControlParams& kp, const PerturbationModel& pert,
                         const SaddleOptions& opt) {
    Error last("no-convergence", "ladder search exhausted");
    for (int kk = std::max(k, opt.k_min); kk < std::max(k, opt.k_min) + 10; ++kk) {
        try {
            const SectionPoint s = seed_Pk(kk, Branch::Plus, c, kp, opt);
            OrbitRecord r = refine_fixed_point(s, Branch::Plus, c, kp, pert, 1e-12, opt);
            if (r.index == 1) return r;
        } catch (const Error& e) {
            if (e.code() == "mu-too-large" || e.code() == "seed-outside-section") throw;
            last = e;
        }
    }
    throw last;
}

ManifoldGraph stable_graph(const OrbitRecord& P, const MapCoefficients& c, const ControlParams& kp,
                           const PerturbationModel& pert, const SaddleOptions& opt) {
    const SectionPoint p0 = P.point(0);
    if (!(p0.y > 0) || P.index != 1) throw Error("domain", "stable graph needs an index-1 point on branch +");
    if (kp.mu != 0) {
        const double k_est = (std::log(1.0 / p0.y) * c.omega + c.eta - M_PI / 2) / M_PI;
        if (!(std::fabs(kp.mu) * std::exp(M_PI * kp.rho * k_est / c.omega) < opt.mu_smallness))
            throw Error("mu-too-large", "|mu| exp(pi rho k / omega) exceeds the configured smallness");
    }
    const double win = M_PI / (8 * c.omega);
    const double yP = p0.y;
    const Matrix J = jacobian_T(p0, c, kp, pert, JacobianMode::Analytic);
    const int D = J(0, 0) > 0 ? 1 : -1;

    ManifoldGraph g;
    g.kind = ManifoldKind::StableGraph;
    g.anchor = p0;
    g.lo = yP * std::exp(-win);
    g.hi = yP * std::exp(win);
    auto side = [=](double y0, double x, const std::vector<double>& z) {
        SectionPoint p{y0, x, z};
        int parity = 1;
        for (int i = 0; i < 6; ++i) {
            p = apply_T1(p, c, kp, pert);
            parity *= D;
            if (!(p.y > 0) || std::fabs(std::log(p.y / yP)) > win) return (p.y > yP ? 1 : -1) * parity;
        }
        return (p.y > yP ? 1 : -1) * parity;
    };
    const double lo0 = g.lo, hi0 = g.hi;
    g.evaluate = [=](const std::vector<double>& xz) {
        const double x = xz.at(0);
        const std::vector<double> z(xz.begin() + 1, xz.end());
        double lo = lo0, hi = hi0;
        const int slo = side(lo, x, z);
        if (side(hi, x, z) == slo) throw Error("no-convergence", "stable graph bracket lost");
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (side(mid, x, z) == slo ? lo : hi) = mid;
        }
        return SectionPoint{0.5 * (lo + hi), x, z};
    };
    if (kp.mu != 0) {
        g.in_band = true;
        for (double x : {1 - c.delta / 2, 1.0, 1 + c.delta / 2}) {
            std::vector<double> xz{x};
            for (double z : c.zplus) xz.push_back(z);
            const double y = g.evaluate(xz).y;
            if (!(y > 0 && y < std::fabs(kp.mu))) g.in_band = false;
        }
    }
    return g;
}

HpPoint unstable_spiral_hp(const OrbitRecord& P, const hp& t, const HpCoeffs& c, const HpControl& kp,
                           const PerturbationModel& pert) {
    const HpPoint& p = P.points.at(0);
    if (!(t > 0) || !(t < p.y)) throw Error("domain", "spiral parameter outside (0, y_P)");
    HpPoint q{t, p.x, p.z};
    return apply_T1(q, c, kp, pert);
}

SectionPoint unstable_spiral(const OrbitRecord& P, double t, const MapCoefficients& c, const ControlParams& kp,
                             const PerturbationModel& pert) {
    const SectionPoint p = P.point(0);
    if (!(t > 0) || !(t < p.y)) throw Error("domain", "spiral parameter outside (0, y_P)");
    return apply_T1(SectionPoint{t, p.x, p.z}, c, kp, pert);
}

HpPoint Leaf::at(const std::vector<hp>& z) const {
    HpPoint p;
    hp s = 0;
    for (size_t m = 0; m < z.size(); ++m) s += z[m] - anchor.z[m];
    p.y = anchor.y + s * a1;
    p.x = anchor.x + s * a2;
    p.z = z;
    return p;
}

Leaf leaf_through(const HpPoint& M, const PerturbationModel& pert) {
    Leaf l;
    l.anchor = M;
    l.a1 = pert.leaf_a1(M.y);
    l.a2 = pert.leaf_a2(M.y);
    return l;
}

ManifoldGraph strong_stable_leaf(const SectionPoint& M, const PerturbationModel& pert) {
    ManifoldGraph g;
    g.kind = ManifoldKind::StrongStableLeaf;
    g.anchor = M;
    const double a1 = pert.leaf_a1(M.y), a2 = pert.leaf_a2(M.y);
    g.evaluate = [M, a1, a2](const std::vector<double>& z) {
        double s = 0;
        for (size_t m = 0; m < z.size(); ++m) s += z[m] - M.z.at(m);
        return SectionPoint{M.y + s * a1, M.x + s * a2, z};
    };
    return g;
}

double preimage_level(int k, Branch b, const MapCoefficients& c, const ControlParams&) {
    const double phase = b == Branch::Plus ? c.eta : c.theta;
    const double s = std::exp((-(2.0 * k + 1) * M_PI + 2 * phase) / (2 * c.omega));
    if (!(s < c.delta)) throw Error("level-outside-section", "pre-image level outside the section");
    return b == Branch::Plus ? s : -s;
}

HorseshoeRegion horseshoe_region(int k, const MapCoefficients& c, const ControlParams& kp) {
    HorseshoeRegion r;
    r.k = k;
    r.ylo = preimage_level(2 * k, Branch::Plus, c, kp);
    r.yhi = preimage_level(2 * k - 1, Branch::Plus, c, kp);
    return r;
}

ChainReport horseshoe_chain_check(int k0, double rho_prime, const MapCoefficients& c, const ControlParams& kp,
                                  const PerturbationModel& pert, int k_end) {
    if (!(rho_prime > kp.rho && rho_prime < 0.5)) throw Error("domain", "rho' must lie in (rho, 1/2)");
    ChainReport rep;
    rep.k0 = k0;
    rep.k_end = k_end;
    rep.rho_prime = rho_prime;
    rep.verified = true;
    const int nx = 9, nu = 801;
    std::vector<std::vector<double>> zs{c.zplus};
    if (!pert.is_zero() && c.nz() > 0) {
        std::vector<double> a = c.zplus, b = c.zplus;
        for (auto& v : a) v -= c.delta / 2;
        for (auto& v : b) v += c.delta / 2;
        zs.push_back(a);
        zs.push_back(b);
    }
    for (int i = k0; i > k_end; --i) {
        const int j = i - 1;
        ChainLink L;
        L.from = i;
        L.to = j;
        L.admissible = j > rho_prime * i;
        const HorseshoeRegion tgt = horseshoe_region(j, c, kp);
        L.overlaps = true;
        L.spans = true;
        L.image_ymin = 1e300;
        L.image_ymax = -1e300;
        L.image_xmin = 1e300;
        L.image_xmax = -1e300;
        // source phases padded past both zeros of the cosine so the image straddles y = 0
        const double u0 = (4.0 * i - 1) * M_PI / 2 - kChainPhasePad, u1 = (4.0 * i + 1) * M_PI / 2 + kChainPhasePad;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = 1 - c.delta + 2 * c.delta * ix / (nx - 1);
            for (const auto& z : zs) {
                double ymin = 1e300, ymax = -1e300;
                for (int iu = 0; iu < nu; ++iu) {
                    const double u = u0 + (u1 - u0) * iu / (nu - 1);
                    const double y = std::exp(-(u - c.eta) / c.omega);
                    const SectionPoint q = apply_T1(SectionPoint{y, x, z}, c, kp, pert);
                    ymin = std::min(ymin, q.y);
                    ymax = std::max(ymax, q.y);
                    L.image_xmin = std::min(L.image_xmin, q.x);
                    L.image_xmax = std::max(L.image_xmax, q.x);
                }
                L.image_ymin = std::min(L.image_ymin, ymin);
                L.image_ymax = std::max(L.image_ymax, ymax);
                if (!(ymax > tgt.ylo && ymin < tgt.yhi)) L.overlaps = false;
                if (!(ymax >= tgt.yhi && ymin <= tgt.ylo)) L.spans = false;
            }
        }
        if ((!L.admissible || !L.overlaps) && rep.verified) {
            rep.verified = false;
            rep.broken_at = i;
        }
        rep.links.push_back(L);
    }
    return rep;
}

}  // namespace hetcyc

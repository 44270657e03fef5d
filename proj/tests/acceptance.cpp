// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "hetcyc/flow.hpp"
#include "hetcyc/hunter.hpp"
#include "hetcyc/serialize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace hetcyc;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void report(int n, const std::string& name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << "criterion " << n << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << ":" << o.detail.str()
              << " (" << std::fixed;
    std::cout.precision(1);
    std::cout << secs << " s)" << std::defaultfloat << std::endl;
    std::cout.precision(6);
}

double ln_abs(const hp& v) { return hp_log10_abs(v) * std::log(10.0); }

void check_ladder(Outcome& o, const PerturbationModel& pert, double relax) {
    const auto c = standard_coefficients();
    const ControlParams k;
    const int k_min = SaddleOptions{}.k_min;
    std::vector<double> ys;
    double worst_ratio = 0, worst_res = 0, worst_z = 0;
    for (int kk = k_min; kk <= k_min + 6; ++kk) {
        const OrbitRecord P = refine_fixed_point(seed_Pk(kk, Branch::Plus, c, k), Branch::Plus, c, k, pert, 1e-12);
        worst_res = std::max(worst_res, to_d(P.residual));
        o.require(P.index == 1, "index of P_" + std::to_string(kk));
        // the two z/contracting multipliers
        std::vector<double> mods;
        for (const auto& m : P.multipliers) mods.push_back(to_d(m.modulus()));
        std::sort(mods.begin(), mods.end());
        worst_z = std::max(worst_z, mods[mods.size() - 2]);
        ys.push_back(P.point(0).y);
    }
    for (size_t i = 0; i + 1 < ys.size(); ++i)
        worst_ratio = std::max(worst_ratio, std::fabs(std::log(ys[i] / ys[i + 1]) - M_PI / c.omega));
    o.require(worst_ratio < 1e-3 * relax, "log-ratio");
    o.require(worst_res < 1e-12 * relax, "Newton residual");
    o.require(worst_z < 0.9, "contracting multipliers");
    o.detail << " max|ln ratio - pi/omega| = " << worst_ratio << ", max residual = " << worst_res
             << ", max contracting |multiplier| = " << worst_z;
}

void check_period2(Outcome& o, const PerturbationModel& pert, double relax) {
    const auto c = standard_coefficients();
    const ControlParams k;
    const Period2Result r = solve_period2({50, 20}, c, k, pert);
    DigitsAtLeast prec(digits_for_decades(orbit_decades({50, 20}, c.omega)));
    HpControl kh = k.cast<hp>();
    kh.rho = r.rho;
    const Index2Diagnostic d = index2_diagnostic(r.orbit, c.cast<hp>(), kh, pert);
    int outside = 0;
    for (const auto& m : r.orbit.multipliers)
        if (m.modulus() > 1) ++outside;
    const double rho = to_d(r.rho);
    const double ratio = ln_abs(r.orbit.points[1].y) / ln_abs(r.orbit.points[0].y);
    o.require(to_d(r.orbit.residual) < 1e-10 * relax, "residual");
    o.require(outside == 2, "two multipliers outside the unit circle");
    o.require(std::fabs(d.cos_omega_rho[0]) < 0.1, "|cos(xi1 - phi)|");
    o.require(std::fabs(ratio - rho) < 0.1 * rho, "ln|y2|/ln|y1| vs rho");
    o.detail << " residual = " << to_d(r.orbit.residual) << ", outside = " << outside
             << ", |cos(xi1 - phi)| = " << std::fabs(d.cos_omega_rho[0])
             << " (other phi: " << std::fabs(d.cos_rho_omega[0]) << ")"
             << ", ln ratio = " << ratio << ", rho = " << rho;
}

HuntResult run_thm1(const PerturbationModel& pert, double relax) {
    HuntOptions ho;
    ho.tol.orbit *= relax;
    ho.tol.quasi *= relax;
    ho.solver.tol *= relax;
    return hunt_thm1(0.4, {{50, 20}, {100, 40}, {150, 60}}, standard_coefficients(), pert, ho);
}

void check_thm1(Outcome& o, const HuntResult& r, double relax) {
    o.require(r.failures.empty(), "no failed items");
    for (const auto& f : r.failures) o.detail << " item " << f.sequence_index << ": " << f.message << ";";
    o.require(r.certificates.size() == 3, "three certificates");
    if (r.certificates.size() != 3) return;
    double pz = INFINITY, pr = INFINITY, pd = INFINITY;
    for (const auto& c : r.certificates) {
        DigitsAtLeast prec(c.digits);
        const double z = std::fabs(to_d(c.control.zeta));
        const double dr = std::fabs(to_d(c.control.rho - hp(0.4)));
        const double dist = distance_to_Mminus(c.Q, c.coeffs, c.control);
        o.require(z < pz, "|zeta| strictly decreasing");
        o.require(dr < pr, "|rho - 0.4| strictly decreasing");
        o.require(dist < pd, "Q1 approaching M-");
        o.require(c.quasi.residual < 1e-9 * relax, "quasi-transverse residual");
        o.require(c.quasi.principal_angle > 0.05, "principal angle");
        o.require(c.witness.iterations <= 60, "witness iterations");
        o.require(c.witness.crossing_angle > 0.05, "witness crossing angle");
        o.require(revalidate(c).empty(), "independent revalidation");
        pz = z;
        pr = dr;
        pd = dist;
        o.detail << " (" << c.js[0] << "," << c.js[1] << "): zeta = " << to_d(c.control.zeta)
                 << ", rho - 0.4 = " << to_d(c.control.rho - hp(0.4)) << ", quasi = " << c.quasi.residual
                 << ", angle = " << c.quasi.principal_angle << ", witness n = " << c.witness.iterations << ";";
    }
}

}  // namespace

int main() {
    const PerturbationModel zero;

    report(1, "Shilnikov ladder", [&](Outcome& o) { check_ladder(o, zero, 1.0); });

    report(2, "determinant and area expansion", [&](Outcome& o) {
        const auto c = standard_coefficients();
        const ControlParams k;
        double worst = 0, smallest = INFINITY;
        for (double y : {1e-2, 1e-3, 1e-4, 1e-5}) {
            const SectionPoint p{y, 1.0, c.zplus};
            const double da = det_yx(jacobian_T(p, c, k, zero, JacobianMode::Analytic));
            const double df = det_yx(jacobian_T(p, c, k, zero, JacobianMode::FiniteDifference));
            worst = std::max(worst, std::fabs(da - df) / std::fabs(da));
            if (y <= 1e-3) smallest = std::min(smallest, std::fabs(da));
        }
        o.require(worst < 1e-5, "analytic vs finite difference");
        o.require(smallest > 2, "|det| > 2 for y <= 1e-3");
        o.detail << " max relative gap = " << worst << ", min |det| (y <= 1e-3) = " << smallest;
    });

    report(3, "winding transform", [&](Outcome& o) {
        std::mt19937_64 rng(20240601);
        std::uniform_real_distribution<double> lg(-300.0, -0.01), ph(0.0, 2 * M_PI);
        double worst = 0;
        for (int i = 0; i < 10000; ++i) {
            const double y = (i % 2 ? -1 : 1) * std::pow(10.0, lg(rng));
            const double phase = ph(rng);
            const double back = from_winding(to_winding(y, phase, 1.0), phase, 1.0);
            worst = std::max(worst, std::fabs(back - y) / std::fabs(y));
        }
        bool monotone = true;
        long prev = -1;
        for (int kk = 1; kk < 200; ++kk) {
            const long j = to_winding(std::exp(-0.37 * kk), 0.0, 1.0).j;
            monotone = monotone && j >= prev;
            prev = j;
        }
        o.require(worst < 1e-14, "roundtrip");
        o.require(monotone, "monotone j");
        o.detail << " max relative roundtrip error = " << worst << ", j monotone = " << monotone;
    });

    report(4, "period-2 index-2 orbit", [&](Outcome& o) { check_period2(o, zero, 1.0); });

    std::string first_dump;
    report(5, "first-mechanism sequence", [&](Outcome& o) {
        const HuntResult r = run_thm1(zero, 1.0);
        check_thm1(o, r, 1.0);
        for (const auto& c : r.certificates) {
            DigitsAtLeast prec(c.digits);
            first_dump += dump(to_json(c));
        }
    });

    report(6, "diophantine exactness", [&](Outcome& o) {
        const DiophantineFamily f = solve_diophantine(2, 5, 1, 3);
        const RationalTriple t = make_triple(2, 5, 1, 3);
        std::set<std::vector<long>> fam, brute;
        bool exact = true;
        for (long i = -100; i <= 100; ++i) {
            const JTriple j = f.member(i);
            const auto [r1, r2] = rational_residuals(t, j);
            exact = exact && r1 == 0 && r2 == 0;
            if (j[0] >= 1 && j[1] >= 1 && j[2] >= 1 && j[0] <= 200 && j[1] <= 200 && j[2] <= 200)
                fam.insert({j[0].convert_to<long>(), j[1].convert_to<long>(), j[2].convert_to<long>()});
        }
        for (const auto& j : brute_force_solutions(2, 5, 1, 3, 200))
            brute.insert({j[0].convert_to<long>(), j[1].convert_to<long>(), j[2].convert_to<long>()});
        o.require(fam == brute, "set equality with brute force");
        o.require(exact, "zero rational residual");
        o.detail << " family in box = " << fam.size() << ", brute force = " << brute.size()
                 << ", exact residuals = " << exact;
    });

    report(7, "second-mechanism anchoring", [&](Outcome& o) {
        const RationalTriple t = make_triple(2, 5, 1, 3);
        const DiophantineFamily f = solve_diophantine(2, 5, 1, 3);
        const HuntResult r = hunt_thm2(t, f, 20, 3, standard_coefficients(), zero);
        o.require(r.failures.empty(), "no failed members");
        for (const auto& fl : r.failures) o.detail << " member " << fl.sequence_index << ": " << fl.message << ";";
        o.require(r.certificates.size() == 3, "three members");
        if (r.certificates.size() != 3) return;
        const auto& first = r.certificates[0];
        o.require(*std::min_element(first.js.begin(), first.js.end()) > 20, "first member has min j > 20");
        double pmu = INFINITY, puv = INFINITY;
        for (const auto& c : r.certificates) {
            DigitsAtLeast prec(c.digits);
            const auto& a = *c.anchor;
            double pp = 0;
            for (double e : a.pp_residual_rel) pp = std::max(pp, e);
            const double mu = hp_log10_abs(a.mu);
            const double uv = std::max(a.u_error, a.v_error);
            o.require(pp < 1e-9, "pp residuals");
            o.require(to_d(a.leaf_gap_rel) < 1e-9, "leaf through Q1 meets (mu, 1, zplus)");
            o.require(mu < pmu, "|mu| strictly decreasing");
            o.require(uv < puv, "(u, v) approaching (u*, v*)");
            o.require(revalidate(c).empty(), "independent revalidation");
            pmu = mu;
            puv = uv;
            o.detail << " (" << c.js[0] << "," << c.js[1] << "," << c.js[2] << "): log10|mu| = " << mu
                     << ", max pp = " << pp << ", leaf gap = " << to_d(a.leaf_gap_rel) << ", |(u,v) - (u*,v*)| = " << uv
                     << ";";
        }
    });

    report(8, "flow validation", [&](Outcome& o) {
        const auto grid = log_grid(1e-6, 1e-2, 12);
        NormalFormField lin;
        NormalFormField cub;
        cub.c_yx = 0.5;
        cub.c_xz = 0.2;
        cub.c_zx = 0.3;
        cub.c_zz = 0.1;
        const auto tl = sample_local_map(lin, grid, 1.0, {0.1});
        const auto tc = sample_local_map(cub, grid, 1.0, {0.1});
        const ExponentFit fl = fit_exponent(tl), fc = fit_exponent(tc);
        bool decreasing = true;
        for (const auto* tab : {&tl, &tc})
            for (size_t i = 1; i < tab->size(); ++i)
                decreasing = decreasing && (*tab)[i].z_norm / (*tab)[i].envelope <
                                               (*tab)[i - 1].z_norm / (*tab)[i - 1].envelope;
        o.require(fl.rho_fit >= 0.398 && fl.rho_fit <= 0.402, "linear fit");
        o.require(fc.rho_fit >= 0.38 && fc.rho_fit <= 0.42, "nonlinear fit");
        o.require(decreasing, "z / envelope decreasing");
        o.detail << " linear rho_fit = " << fl.rho_fit << " +- " << fl.half_width << ", nonlinear rho_fit = "
                 << fc.rho_fit << " +- " << fc.half_width << ", ratio decreasing = " << decreasing;
    });

    report(9, "robustness to small terms", [&](Outcome& o) {
        for (const auto& m : perturbation_library(1e-3, 0.2)) {
            Outcome a, b, c;
            check_ladder(a, m, 10.0);
            check_period2(b, m, 10.0);
            check_thm1(c, run_thm1(m, 10.0), 10.0);
            o.require(a.pass, m.label() + " ladder");
            o.require(b.pass, m.label() + " period-2");
            o.require(c.pass, m.label() + " sequence");
            o.detail << " " << m.label() << ": ladder " << (a.pass ? "ok" : "FAIL") << ", period-2 "
                     << (b.pass ? "ok" : "FAIL") << ", sequence " << (c.pass ? "ok" : "FAIL") << ";";
            if (!a.pass) o.detail << a.detail.str();
            if (!b.pass) o.detail << b.detail.str();
            if (!c.pass) o.detail << c.detail.str();
        }
    });

    report(10, "determinism", [&](Outcome& o) {
        const HuntResult r = run_thm1(zero, 1.0);
        std::string again;
        for (const auto& c : r.certificates) {
            DigitsAtLeast prec(c.digits);
            again += dump(to_json(c));
        }
        o.require(!first_dump.empty(), "reference run available");
        o.require(again == first_dump, "byte-identical certificates");
        o.detail << " " << r.certificates.size() << " certificates, " << again.size() << " bytes, identical = "
                 << (again == first_dump);
    });

    std::cout << (failures ? "acceptance: FAILED (" + std::to_string(failures) + " criteria)" : "acceptance: all criteria passed")
              << std::endl;
    return failures ? 1 : 0;
}

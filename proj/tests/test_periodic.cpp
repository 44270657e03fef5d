#include "doctest.h"

#include "hetcyc/periodic.hpp"

#include <cmath>

using namespace hetcyc;

namespace {

template <class F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

double log_abs(const hp& v) { return hp_log10_abs(v) * std::log(10.0); }

double angle_gap(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 2 * M_PI);
    return std::min(d, 2 * M_PI - d);
}

}  // namespace

TEST_CASE("period-2 seeds") {
    const auto c = standard_coefficients();
    ControlParams k;
    const Period2Seed s = seed_period2({50, 20}, c, k, PhiConvention::RhoOverOmega);
    CHECK(std::atan(0.4) == doctest::Approx(0.38051).epsilon(1e-5));
    CHECK(s.xi1 == doctest::Approx(3 * M_PI / 2 + std::atan(0.4)).epsilon(1e-14));
    CHECK(std::fabs(s.xi1 - 5.09290) < 1e-5);
    REQUIRE(s.xi2.size() == 2u);
    CHECK(s.xi2[0] == M_PI / 2);
    CHECK(s.xi2[1] == 3 * M_PI / 2);
    // seeds are consistent with the winding transform
    const auto w = to_winding(-std::exp(s.log_y1), c.theta, c.omega);
    CHECK(w.j == 50);
    CHECK(w.xi == doctest::Approx(s.xi1).epsilon(1e-9));
    const Period2Seed s2 = seed_period2({50, 20}, c, k, PhiConvention::OmegaOverRho);
    CHECK(s2.xi1 == doctest::Approx(3 * M_PI / 2 + std::atan(2.5)).epsilon(1e-14));
}

TEST_CASE("period-3 seeds and configuration guard") {
    const auto c = standard_coefficients();
    const Period3Seed s = seed_period3({53, 21, 134, 4}, c, {}, PhiConvention::RhoOverOmega);
    CHECK(std::fabs(s.xi3) < 1e-15);
    CHECK(std::fabs(s.xi1 - 5.09290) < 1e-5);
    CHECK(s.xi2 == doctest::Approx(M_PI / 2));
    Period3Spec bad{53, 21, 134, 2};
    CHECK(error_code([&] { seed_period3(bad, c, {}, PhiConvention::RhoOverOmega); }) == "unsupported-configuration");
    ControlParams k;
    CHECK(error_code([&] { solve_period3_anchored(bad, c, k, {}); }) == "unsupported-configuration");
}

TEST_CASE("period-2 spec validation") {
    SolverOptions opt;
    CHECK_THROWS_AS(validate_period2_spec({50, 30}, opt), Error);
    CHECK_THROWS_AS(validate_period2_spec({50, 5}, opt), Error);
    Period2Spec s{50, 20};
    s.c = 1.5;
    CHECK_THROWS_AS(validate_period2_spec(s, opt), Error);
    CHECK_NOTHROW(validate_period2_spec({50, 20}, opt));
}

TEST_CASE("period-2 index-2 orbit at (50, 20)") {
    const auto c = standard_coefficients();
    const ControlParams k;
    const Period2Result r = solve_period2({50, 20}, c, k, {});
    DigitsAtLeast prec(digits_for_decades(orbit_decades({50, 20}, 1.0)));
    const HpCoeffs ch = c.cast<hp>();
    HpControl kh = k.cast<hp>();
    kh.rho = r.rho;

    CHECK(r.orbit.period() == 2);
    CHECK(to_d(r.orbit.residual) < 1e-10);
    CHECK(r.orbit.index == 2);
    CHECK(r.orbit.multipliers.size() == 3u);

    // independent re-application in high precision
    const HpPoint a = apply_T(r.orbit.points[0], ch, kh, {});
    const HpPoint b = apply_T(r.orbit.points[1], ch, kh, {});
    CHECK(to_d(abs(a.y / r.orbit.points[1].y - 1)) < 1e-10);
    CHECK(to_d(abs(b.y / r.orbit.points[0].y - 1)) < 1e-10);
    CHECK(to_d(abs(a.x - r.orbit.points[1].x)) < 1e-10);
    CHECK(to_d(abs(b.x - r.orbit.points[0].x)) < 1e-10);

    const IndexReport ir = classify_index(r.orbit, ch, kh, {});
    CHECK(ir.index == 2);
    int outside = 0, inside = 0;
    for (const auto& m : ir.multipliers) (m.modulus() > 1 ? outside : inside)++;
    CHECK(outside == 2);
    CHECK(inside == 1);

    const Index2Diagnostic d = index2_diagnostic(r.orbit, ch, kh, {});
    CHECK(std::fabs(d.cos_omega_rho[0]) < 0.1);
    CHECK(std::fabs(d.cos_omega_rho[1]) > 0.5);
    CHECK(d.small_factor == 0);
    CHECK(d.index == 2);

    const double rho = to_d(r.rho);
    const double ratio = log_abs(r.orbit.points[1].y) / log_abs(r.orbit.points[0].y);
    CHECK(std::fabs(ratio - rho) < 0.1 * rho);
    CHECK(std::fabs(rho - 0.4) < 0.01);
    CHECK(to_d(abs(r.psi_leftover - (r.rho * 50 - 20))) < 1e-20);
    CHECK(!r.candidates.empty());
}

TEST_CASE("period-2 orbits approach M- and rho approaches j2/j1") {
    const auto c = standard_coefficients();
    const ControlParams k;
    double prev_dist = 1e9, prev_rho_gap = 1e9;
    for (long s : {1L, 2L, 3L}) {
        const Period2Result r = solve_period2({50 * s, 20 * s}, c, k, {});
        DigitsAtLeast prec(digits_for_decades(orbit_decades({50 * s, 20 * s}, 1.0)));
        HpControl kh = k.cast<hp>();
        kh.rho = r.rho;
        CHECK(r.orbit.index == 2);
        const double dist = distance_to_Mminus(r.orbit, c.cast<hp>(), kh);
        CHECK(dist < prev_dist);
        prev_dist = dist;
        const double gap = std::fabs(to_d(r.rho) - 0.4);
        CHECK(gap < prev_rho_gap);
        prev_rho_gap = gap;
        const double seed = 3 * M_PI / 2 + std::atan(c.omega / to_d(r.rho));
        // the index-2 condition pins xi1 to the seed phase at the solved rho
        CHECK(angle_gap(to_d(r.orbit.winding[0].xi), seed) < 1e-12);
    }
}

TEST_CASE("literal x1 phase reading coincides on the standard set") {
    const auto c = standard_coefficients();
    SolverOptions lit;
    lit.literal_x1_phase = true;
    const Period2Result a = solve_period2({50, 20}, c, {}, {}, {});
    const Period2Result b = solve_period2({50, 20}, c, {}, {}, lit);
    CHECK(std::fabs(to_d(a.rho - b.rho)) < 1e-15);
}

TEST_CASE("period-3 anchored orbit at (53, 21, 134)") {
    const auto c = standard_coefficients();
    const ControlParams k;
    const Period3Spec spec{53, 21, 134, 4};
    const Period3Result r = solve_period3_anchored(spec, c, k, {});
    DigitsAtLeast prec(digits_for_decades(orbit_decades({53, 21, 134}, 1.0)));
    HpControl kh = k.cast<hp>();
    kh.mu = r.mu;
    kh.zeta = r.zeta;

    CHECK(r.orbit.period() == 3);
    CHECK(to_d(r.orbit.residual) < 1e-10);
    CHECK(r.orbit.index == 2);
    CHECK(r.mu < 0);
    // zero perturbation: M+ on the leaf of Q1 means y1 = mu and x1 = 1
    CHECK(to_d(abs(r.orbit.points[0].y / r.mu - 1)) < 1e-9);
    CHECK(to_d(abs(r.orbit.points[0].x - 1)) < 1e-9);
    CHECK(to_d(r.leaf_gap) < 1e-9);

    for (int i = 0; i < 3; ++i) {
        const HpPoint img = apply_T(r.orbit.points[i], r.coeffs, kh, {});
        const HpPoint& nxt = r.orbit.points[(i + 1) % 3];
        CHECK(to_d(abs(img.y / nxt.y - 1)) < 1e-10);
        CHECK(to_d(abs(img.x - nxt.x)) < 1e-10);
    }

    REQUIRE(r.pp_residual_rel.size() == 3u);
    for (double e : r.pp_residual_rel) CHECK(e < 1e-9);
    CHECK(angle_gap(to_d(r.orbit.winding[2].xi), r.seed_xi3) < 0.2);

    const double l1 = log_abs(r.orbit.points[0].y), l2 = log_abs(r.orbit.points[1].y),
                 l3 = log_abs(r.orbit.points[2].y);
    CHECK(std::fabs(l1 / (0.4 * l3) - 1) < 0.1);
    CHECK(std::fabs(l2 / (0.4 * l1) - 1) < 0.1);

    const Index2Diagnostic d = index2_diagnostic(r.orbit, r.coeffs, kh, {});
    CHECK(d.small_factor == 0);
    CHECK(d.index == 2);
}

TEST_CASE("period-3 ordering guard") {
    SolverOptions opt;
    CHECK_THROWS_AS(validate_period3_spec({53, 21, 60, 4}, 0.4, opt), Error);
    CHECK_NOTHROW(validate_period3_spec({53, 21, 134, 4}, 0.4, opt));
}

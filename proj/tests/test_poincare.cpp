#include "doctest.h"

#include "hetcyc/poincare.hpp"
#include "hetcyc/saddle.hpp"

#include <cmath>
#include <random>

using namespace hetcyc;

namespace {

MapCoefficients example_coeffs() {
    MapCoefficients c = standard_coefficients();
    c.A = 1.0;
    c.A1 = 0.5;
    c.Avec = {0.3};
    c.eta = 0.0;
    c.eta1 = M_PI / 2;
    c.etavec = {0.0};
    c.B = 1.0;
    c.B1 = 0.5;
    c.Bvec = {0.3};
    c.theta = 0.0;
    c.theta1 = M_PI / 2;
    c.thetavec = {0.0};
    return c;
}

template <class F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("T1 closed-form example") {
    const auto c = example_coeffs();
    ControlParams k;
    const SectionPoint p{std::exp(-2 * M_PI), 1.0, {0.7}};
    const SectionPoint q = apply_T1(p, c, k, PerturbationModel{});
    CHECK(q.y == doctest::Approx(std::exp(-0.8 * M_PI)).epsilon(1e-13));
    CHECK(std::fabs(q.y - 0.08108) < 1e-4);  // quoted to ~4 digits; exact value 0.081012
    CHECK(std::fabs(q.x - 1.0) < 1e-14);
    CHECK(q.z[0] == doctest::Approx(0.1 + 0.3 * std::exp(-0.8 * M_PI)).epsilon(1e-13));
}

TEST_CASE("T2 mirrored example") {
    const auto c = example_coeffs();
    ControlParams k;
    k.zeta = 0.01;
    const SectionPoint p{-std::exp(-2 * M_PI), 1.0, {0.7}};
    const SectionPoint q = apply_T2(p, c, k, PerturbationModel{});
    CHECK(q.y == doctest::Approx(-std::exp(-0.8 * M_PI)).epsilon(1e-13));
    CHECK(std::fabs(q.x - 1.01) < 1e-14);
    CHECK(q.z[0] == doctest::Approx(-0.1 + 0.3 * std::exp(-0.8 * M_PI)).epsilon(1e-13));
}

TEST_CASE("limits onto M+ and M-") {
    const auto c = standard_coefficients();
    ControlParams k;
    k.zeta = 0.02;
    const PerturbationModel zero;
    const auto a = apply_T1(SectionPoint{1e-300, 1.0, {0.0}}, c, k, zero);
    CHECK(std::fabs(a.y) < 1e-12);
    CHECK(std::fabs(a.x - 1) < 1e-12);
    CHECK(std::fabs(a.z[0] - c.zplus[0]) < 1e-12);
    const auto b = apply_T2(SectionPoint{-1e-300, 1.0, {0.0}}, c, k, zero);
    CHECK(std::fabs(b.y) < 1e-12);
    CHECK(std::fabs(b.x - 1.02) < 1e-12);
    CHECK(std::fabs(b.z[0] - c.zminus[0]) < 1e-12);
}

TEST_CASE("limit error bounded by C |y|^rho for every library perturbation") {
    const auto c = standard_coefficients();
    ControlParams k;
    k.mu = 1e-3;
    auto models = perturbation_library(1e-3, 0.2);
    models.push_back(PerturbationModel{});
    for (const auto& m : models) {
        const double C = std::fabs(c.A) + std::fabs(c.A1) + std::fabs(c.Avec[0]) + 3 * m.bound_constant(c);
        for (double y : {1e-2, 1e-5, 1e-9, 1e-14}) {
            const auto q = apply_T1(SectionPoint{y, 1.2, {0.05}}, c, k, m);
            const double err =
                std::max({std::fabs(q.y - k.mu), std::fabs(q.x - 1), std::fabs(q.z[0] - c.zplus[0])});
            CHECK(err <= C * 1.2 * std::pow(y, k.rho));
        }
    }
}

TEST_CASE("branch errors") {
    const auto c = standard_coefficients();
    const ControlParams k;
    const PerturbationModel zero;
    CHECK(error_code([&] { apply_T1(SectionPoint{-0.01, 1, {0}}, c, k, zero); }) == "domain");
    CHECK(error_code([&] { apply_T2(SectionPoint{0.01, 1, {0}}, c, k, zero); }) == "domain");
    CHECK(error_code([&] { apply_T(SectionPoint{0.0, 1, {0}}, c, k, zero); }) == "on-stable-manifold");
    CHECK_THROWS_AS(apply_T(SectionPoint{0.0, 1, {0}}, c, k, zero), OnStableManifold);
}

TEST_CASE("apply_T dispatches on the sign of y") {
    const auto c = standard_coefficients();
    ControlParams k;
    k.zeta = 0.003;
    const PerturbationModel zero;
    for (double y : {0.03, -0.03, 1e-7, -1e-7}) {
        const SectionPoint p{y, 0.9, {0.2}};
        const auto a = apply_T(p, c, k, zero);
        const auto b = y > 0 ? apply_T1(p, c, k, zero) : apply_T2(p, c, k, zero);
        CHECK(a.y == b.y);
        CHECK(a.x == b.x);
        CHECK(a.z[0] == b.z[0]);
    }
}

TEST_CASE("analytic Jacobian against finite differences") {
    const auto c = example_coeffs();
    const ControlParams k;
    const PerturbationModel zero;
    const SectionPoint p{1e-3, 1.0, {0.1}};
    const Matrix Ja = jacobian_T(p, c, k, zero, JacobianMode::Analytic);
    const Matrix Jf = jacobian_T(p, c, k, zero, JacobianMode::FiniteDifference);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double scale = std::max(std::fabs(Ja(i, j)), 1e-12);
            CHECK(std::fabs(Ja(i, j) - Jf(i, j)) <= 1e-6 * std::max(scale, 1e-6 * std::fabs(Ja(0, 0))));
        }
}

TEST_CASE("determinant identity and area expansion") {
    const auto c = example_coeffs();
    const ControlParams k;
    const PerturbationModel zero;
    for (double y : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const SectionPoint p{y, 1.0, {0.1}};
        const double closed = -c.omega * c.A * c.A1 * std::sin(c.eta1 - c.eta) * std::pow(y, 2 * k.rho - 1);
        const double da = det_yx(jacobian_T(p, c, k, zero, JacobianMode::Analytic));
        const double df = det_yx(jacobian_T(p, c, k, zero, JacobianMode::FiniteDifference));
        CHECK(da == doctest::Approx(closed).epsilon(1e-12));
        CHECK(det_yx_closed_form(p, c, k) == doctest::Approx(closed).epsilon(1e-12));
        CHECK(std::fabs(df - da) <= 1e-5 * std::fabs(da));
    }
    const auto s = standard_coefficients();
    for (double y : {1e-4, 1e-5, 1e-7})
        CHECK(std::fabs(det_yx(jacobian_T(SectionPoint{y, 1.0, {0.1}}, s, k, zero))) >= 10);
    // x- and z-columns of the z-row, and the z-column, are O(y^rho)
    const Matrix J = jacobian_T(SectionPoint{1e-4, 1.0, {0.1}}, c, k, zero);
    CHECK(std::fabs(J(2, 1)) < 0.1);
    CHECK(std::fabs(J(2, 2)) < 0.1);
    CHECK(std::fabs(J(0, 2)) < 0.1);
    CHECK(std::fabs(J(1, 2)) < 0.1);
}

TEST_CASE("perturbed Jacobian uses finite differences and matches the analytic derivative") {
    const auto c = standard_coefficients();
    const ControlParams k;
    for (const auto& m : perturbation_library(1e-3, 0.2)) {
        const SectionPoint p{-2e-3, 1.1, {-0.05}};
        const Matrix Ja = jacobian_T(p, c, k, m, JacobianMode::Analytic);
        const Matrix Jauto = jacobian_T(p, c, k, m);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::fabs(Ja(i, j) - Jauto(i, j)) <= 1e-5 * (1 + std::fabs(Ja(i, j))));
    }
}

TEST_CASE("winding example") {
    const WindingCoord w = to_winding(-std::exp(-7.0), 0.0, 1.0);
    CHECK(w.branch == Branch::Minus);
    CHECK(w.j == 1);
    CHECK(w.xi == doctest::Approx(7 - 2 * M_PI).epsilon(1e-13));
    CHECK(std::fabs(w.xi - 0.71681) < 1e-5);
    CHECK_THROWS_AS(to_winding(0.0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(to_winding(1.5, 0.0, 1.0), Error);
}

TEST_CASE("winding roundtrip and ladder monotonicity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lg(-300.0, -0.01), ph(-3.0, 3.0), om(0.2, 4.0);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const double y = (i % 2 ? -1 : 1) * std::pow(10.0, lg(rng));
        const double phase = ph(rng), omega = om(rng);
        if (omega * -std::log(std::fabs(y)) + phase < 0) {  // would need j < 0
            if (error_code([&] { to_winding(y, phase, omega); }) != "domain") ++bad;
            continue;
        }
        const auto w = to_winding(y, phase, omega);
        const double back = from_winding(w, phase, omega);
        if (!(std::fabs(back - y) <= 1e-14 * std::fabs(y)) || w.xi < 0 || w.xi >= 2 * M_PI) ++bad;
    }
    CHECK(bad == 0);
    long prev = -1;
    for (int k = 1; k < 60; ++k) {
        const auto w = to_winding(std::exp(-k * 0.7), 0.3, 1.0);
        CHECK(w.j >= prev);
        prev = w.j;
    }
}

TEST_CASE("perturbation models obey their scaling bound") {
    const auto c = standard_coefficients();
    for (const auto& m : perturbation_library(1e-3, 0.2)) {
        const BoundSample s = sample_bound(m, c, 0.4, 1e-12, 1e-2, 2000, 11);
        CHECK(s.samples == 2000);
        CHECK(s.max_ratio <= 1.0);
        CHECK(std::isfinite(s.max_deriv_ratio));
    }
}

TEST_CASE("coefficient validation") {
    auto c = standard_coefficients();
    CHECK(validate_coefficients(c).empty());
    c.omega = 0;
    auto issues = validate_coefficients(c);
    REQUIRE(!issues.empty());
    CHECK(issues[0].field == "coefficients.omega");
    c = standard_coefficients();
    c.eta1 = c.eta;
    CHECK(!validate_coefficients(c).empty());
    ControlParams k;
    k.rho = 0.7;
    auto ki = validate_control(k, standard_coefficients());
    REQUIRE(!ki.empty());
    CHECK(ki[0].field == "control.rho");
}

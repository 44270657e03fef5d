#include "doctest.h"

#include "hetcyc/saddle.hpp"

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

}  // namespace

TEST_CASE("seed ladder with C = 1") {
    MapCoefficients c = standard_coefficients();
    c.omega = M_PI;
    c.eta = M_PI / 2;
    SaddleOptions opt;
    opt.k_min = 1;
    const SectionPoint p = seed_Pk(3, Branch::Plus, c, ControlParams{}, opt);
    CHECK(p.y == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
    CHECK(std::fabs(p.y - 0.049787) < 1e-6);
    CHECK(p.x == 1.0);
    CHECK(p.z == c.zplus);
    for (int k = 1; k < 20; ++k) {
        const double r = seed_Pk(k + 1, Branch::Plus, c, {}, opt).y / seed_Pk(k, Branch::Plus, c, {}, opt).y;
        CHECK(r == doctest::Approx(std::exp(-M_PI / c.omega)).epsilon(1e-13));
    }
}

TEST_CASE("seed errors") {
    const auto c = standard_coefficients();
    ControlParams k;
    k.mu = 0.1;
    CHECK(error_code([&] { seed_Pk(40, Branch::Plus, c, k); }) == "mu-too-large");
    SaddleOptions opt;
    opt.k_min = 0;
    MapCoefficients big = c;
    big.eta = 6.0;
    CHECK(error_code([&] { seed_Pk(0, Branch::Plus, big, {}, opt); }) == "seed-outside-section");
}

TEST_CASE("refined ladder: residual, index, log-ratio") {
    const auto c = standard_coefficients();
    const ControlParams k;
    const PerturbationModel zero;
    std::vector<double> ys;
    for (int kk = 5; kk <= 11; ++kk) {
        const SectionPoint seed = seed_Pk(kk, Branch::Plus, c, k);
        const OrbitRecord o = refine_fixed_point(seed, Branch::Plus, c, k, zero, 1e-12);
        CHECK(to_d(o.residual) < 1e-12);
        CHECK(o.index == 1);
        CHECK(o.multipliers.size() == 3u);
        CHECK(std::fabs(o.point(0).y / seed.y - 1) < 0.2);
        // independent re-application; the expanding multiplier ~ y^(rho-1) rules out doing this in double
        DigitsAtLeast prec(digits_for_decades(20));
        const HpPoint img = apply_T1(o.points[0], c.cast<hp>(), k.cast<hp>(), zero);
        CHECK(to_d(abs(img.y / o.points[0].y - 1)) < 1e-12);
        CHECK(to_d(abs(img.x - o.points[0].x)) < 1e-12);
        ys.push_back(o.point(0).y);
    }
    for (size_t i = 0; i + 1 < ys.size(); ++i) CHECK(std::fabs(std::log(ys[i] / ys[i + 1]) - M_PI / c.omega) < 1e-3);
}

TEST_CASE("index classification of ladder points") {
    const auto c = standard_coefficients();
    const HpCoeffs ch = c.cast<hp>();
    const HpControl kh = ControlParams{}.cast<hp>();
    for (int kk : {5, 8}) {
        const OrbitRecord o = ladder_point(kk, c, {}, {});
        const IndexReport r = classify_index(o, ch, kh, {});
        CHECK(r.index == 1);
        int inside = 0;
        for (const auto& m : r.multipliers)
            if (m.modulus() < 0.9) ++inside;
        CHECK(inside == 2);
    }
}

TEST_CASE("far seed never yields a silent wrong answer") {
    const auto c = standard_coefficients();
    const SectionPoint seed{c.delta / 2, 1.0, c.zplus};
    try {
        const OrbitRecord o = refine_fixed_point(seed, Branch::Plus, c, {}, {}, 1e-12);
        const SectionPoint img = apply_T1(o.point(0), c, {}, {});
        CHECK(std::fabs(img.y - o.point(0).y) <= 1e-12 * std::fabs(o.point(0).y) + 1e-300);
    } catch (const Error& e) {
        CHECK(e.code() == "no-convergence");
    }
}

TEST_CASE("stable graphs: level through P, ordered ladder, band for mu < 0") {
    const auto c = standard_coefficients();
    const OrbitRecord P6 = ladder_point(6, c, {}, {});
    const OrbitRecord P7 = ladder_point(7, c, {}, {});
    const ManifoldGraph g6 = stable_graph(P6, c, {}, {});
    const ManifoldGraph g7 = stable_graph(P7, c, {}, {});
    CHECK(g6.kind == ManifoldKind::StableGraph);
    const SectionPoint p6 = P6.point(0);
    const double lam = std::fabs(jacobian_T(p6, c, {}, {})(0, 0));
    for (double z : {-0.2, 0.1, 0.3}) CHECK(std::fabs(g6.evaluate({p6.x, z}).y / p6.y - 1) < 1e-12);
    for (double x : {0.6, 1.0, 1.4})
        for (double z : {-0.2, 0.1, 0.3}) {
            const double y6 = g6.evaluate({x, z}).y, y7 = g7.evaluate({x, z}).y;
            // x enters ybar only through the amplitude: level moves by ~ |x - x_P| / |dybar/dy|
            CHECK(std::fabs(y6 / p6.y - 1) <= 2 * std::fabs(x - p6.x) / lam + 1e-12);
            CHECK(y7 < y6);
            CHECK(std::fabs(std::log(y6 / y7) - M_PI) < 1e-2);
        }

    ControlParams k;
    k.mu = -std::exp(-6.0);
    SaddleOptions opt;
    opt.k_min = 2;
    const SectionPoint seed = seed_Pk(2, Branch::Plus, c, k, opt);
    const OrbitRecord Pm = refine_fixed_point(seed, Branch::Plus, c, k, {}, 1e-12, opt);
    const ManifoldGraph gm = stable_graph(Pm, c, k, {}, opt);
    CHECK(gm.in_band);
    for (double x : {0.8, 1.0, 1.2}) {
        const double y = gm.evaluate({x, 0.1}).y;
        CHECK(y > 0);
        CHECK(y < std::exp(-6.0));
    }
}

TEST_CASE("perturbed stable graphs keep half the unperturbed gap") {
    const auto c = standard_coefficients();
    const double gap = ladder_point(6, c, {}, {}).point(0).y - ladder_point(7, c, {}, {}).point(0).y;
    for (const auto& m : perturbation_library(1e-3, 0.2)) {
        const OrbitRecord P6 = ladder_point(6, c, {}, m), P7 = ladder_point(7, c, {}, m);
        const ManifoldGraph g6 = stable_graph(P6, c, {}, m), g7 = stable_graph(P7, c, {}, m);
        for (double x : {0.7, 1.0, 1.3})
            for (double z : {-0.1, 0.1, 0.3}) CHECK(g6.evaluate({x, z}).y - g7.evaluate({x, z}).y >= gap / 2);
    }
}

TEST_CASE("unstable spiral") {
    const auto c = standard_coefficients();
    const ControlParams k;
    const OrbitRecord P = ladder_point(5, c, k, {});
    const SectionPoint pP = P.point(0);
    const auto lim = unstable_spiral(P, 1e-200, c, k, {});
    CHECK(std::fabs(lim.y) < 1e-60);
    CHECK(std::fabs(lim.x - 1) < 1e-60);
    CHECK(std::fabs(lim.z[0] - c.zplus[0]) < 1e-60);
    CHECK_THROWS_AS(unstable_spiral(P, 2 * pP.y, c, k, {}), Error);
    CHECK_THROWS_AS(unstable_spiral(P, -1e-9, c, k, {}), Error);

    const double bound_const = (c.A + c.A1 + c.Avec[0] + 1) * pP.x;
    for (double tau : {1e-1 * pP.y, 1e-4 * pP.y, 1e-8 * pP.y}) {
        double sup = 0;
        for (int i = 0; i < 400; ++i) {
            const double t = tau * std::exp(-0.05 * i);
            const auto q = unstable_spiral(P, t, c, k, {});
            CHECK(std::fabs(q.x - 1) <= c.A1 * pP.x * std::pow(t, k.rho) * (1 + 1e-12));
            sup = std::max(sup, std::max({std::fabs(q.y), std::fabs(q.x - 1), std::fabs(q.z[0] - c.zplus[0])}));
        }
        CHECK(sup <= bound_const * std::pow(tau, k.rho));
    }

    // x-extrema along the spiral are spaced by e^{-pi/omega} in t
    std::vector<double> ext;
    const int N = 20000;
    const double u0 = -std::log(pP.y) + 0.1, du = 30.0 / N;
    auto xoff = [&](double u) { return unstable_spiral(P, std::exp(-u), c, k, {}).x - 1; };
    for (int i = 1; i < N - 1; ++i) {
        const double a = xoff(u0 + (i - 1) * du), b = xoff(u0 + i * du), d = xoff(u0 + (i + 1) * du);
        if ((b - a) * (d - b) < 0) ext.push_back(u0 + i * du);
    }
    REQUIRE(ext.size() >= 4);
    for (size_t i = 0; i + 1 < ext.size(); ++i) CHECK(std::fabs((ext[i + 1] - ext[i]) - M_PI / c.omega) < 3 * du);
}

TEST_CASE("strong-stable leaves") {
    const SectionPoint M{1e-4, 1.0, {0.1}};
    const ManifoldGraph flat = strong_stable_leaf(M, PerturbationModel{});
    for (double z : {-0.3, 0.0, 0.4}) {
        const auto p = flat.evaluate({z});
        CHECK(p.y == M.y);
        CHECK(p.x == M.x);
    }
    for (const auto& m : perturbation_library(1e-3, 0.2))
        for (double y0 : {1e-2, 1e-5, -1e-8}) {
            CHECK(std::fabs(m.leaf_a1(y0)) <= m.epsilon * std::pow(std::fabs(y0), 1 + m.beta));
            const ManifoldGraph g = strong_stable_leaf(SectionPoint{y0, 1.0, {0.1}}, m);
            const auto p = g.evaluate({0.3});
            CHECK(std::fabs(p.y - y0) <= 0.2 * m.epsilon * std::pow(std::fabs(y0), 1 + m.beta));
        }
    const double zeta = 0.013;
    const ManifoldGraph lm = strong_stable_leaf(SectionPoint{0.0, 1 + zeta, {-0.1}}, PerturbationModel{});
    for (double z : {-0.4, 0.0, 0.2}) CHECK(lm.evaluate({z}).x == 1 + zeta);
}

TEST_CASE("pre-image levels") {
    MapCoefficients c = standard_coefficients();
    c.eta = M_PI / 2;
    const ControlParams k;
    CHECK(preimage_level(1, Branch::Plus, c, k) == doctest::Approx(std::exp(-M_PI)).epsilon(1e-14));
    CHECK(std::fabs(preimage_level(1, Branch::Plus, c, k) - 0.043214) < 1e-6);
    for (int kk = 1; kk < 12; ++kk) {
        const double y = preimage_level(kk, Branch::Plus, c, k);
        CHECK(apply_T1(SectionPoint{y, 1.1, {0.0}}, c, k, {}).y == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::fabs(apply_T1(SectionPoint{y, 1.1, {0.0}}, c, k, {}).y) < 1e-12 * std::pow(y, k.rho));
        CHECK(preimage_level(kk + 1, Branch::Plus, c, k) / y == doctest::Approx(std::exp(-M_PI)).epsilon(1e-13));
        CHECK(preimage_level(kk, Branch::Minus, c, k) < 0);
    }
    CHECK_THROWS_AS(preimage_level(-3, Branch::Plus, c, k), Error);
}

TEST_CASE("ladder interleaves pre-image levels") {
    const auto c = standard_coefficients();
    for (int kk = 6; kk < 12; ++kk) {
        const double y = ladder_point(kk, c, {}, {}).point(0).y;
        CHECK(y < preimage_level(kk - 1, Branch::Plus, c, {}));
        CHECK(y > preimage_level(kk + 1, Branch::Plus, c, {}));
    }
    for (int kk = 2; kk < 8; ++kk) {
        const HorseshoeRegion r = horseshoe_region(kk, c, {});
        const HorseshoeRegion r2 = horseshoe_region(kk + 1, c, {});
        CHECK(0 < r.ylo);
        CHECK(r.ylo < r.yhi);
        CHECK(r.yhi < c.delta);
        CHECK(r2.yhi < r.ylo);
    }
}

TEST_CASE("horseshoe chain from k0 = 10") {
    const auto c = standard_coefficients();
    const ChainReport rep = horseshoe_chain_check(10, 0.45, c, {}, {});
    CHECK(rep.verified);
    CHECK(rep.links.size() == 9u);
    for (const auto& L : rep.links) {
        CHECK(L.admissible);
        CHECK(L.overlaps);
        if (L.to >= 2) CHECK(L.spans);  // sigma_1 reaches past the image top; overlap is what counts
    }
    for (const auto& m : perturbation_library(1e-3, 0.2)) CHECK(horseshoe_chain_check(10, 0.45, c, {}, m).verified);
}

TEST_CASE("chain reports a broken link") {
    MapCoefficients c = standard_coefficients();
    c.A = 1e-9;  // images collapse onto y = mu and miss the targets
    const ChainReport rep = horseshoe_chain_check(6, 0.45, c, {}, {});
    CHECK_FALSE(rep.verified);
    CHECK(rep.broken_at == 6);
    CHECK_THROWS_AS(horseshoe_chain_check(6, 0.3, standard_coefficients(), {}, {}), Error);
}

#include "doctest.h"

#include "hetcyc/flow.hpp"
#include "hetcyc/linalg.hpp"

#include <algorithm>
#include <cmath>

using namespace hetcyc;

namespace {

NormalFormField linear_field() { return NormalFormField{}; }

NormalFormField cubic_field() {
    NormalFormField f;
    f.c_yx = 0.5;
    f.c_xz = 0.2;
    f.c_zx = 0.3;
    f.c_zz = 0.1;
    return f;
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

TEST_CASE("origin is an equilibrium and the linear part has the expected spectrum") {
    for (const auto& f : {linear_field(), cubic_field()}) {
        const FlowState d = vector_field(FlowState{0, 0, 0, {0.0}, 0}, f);
        CHECK(d.y == 0);
        CHECK(d.x1 == 0);
        CHECK(d.x2 == 0);
        CHECK(d.z[0] == 0);
        const auto L = linearization_at_origin(f);
        const int n = f.dim();
        Matrix M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = L[i * n + j];
        auto ev = eigenvalues(M);
        std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
        REQUIRE(ev.size() == 4u);
        CHECK(std::abs(ev[0] - std::complex<double>(-1.0, 0)) < 1e-8);
        CHECK(std::abs(ev[1] - std::complex<double>(-0.4, -1.0)) < 1e-8);
        CHECK(std::abs(ev[2] - std::complex<double>(-0.4, 1.0)) < 1e-8);
        CHECK(std::abs(ev[3] - std::complex<double>(1.0, 0)) < 1e-8);
    }
}

TEST_CASE("pure linear focus on y = 0") {
    const auto f = cubic_field();
    const FlowState s{0.0, 0.3, -0.2, {0.0}, 0};
    const FlowState d = vector_field(s, f);
    CHECK(d.y == 0);
    CHECK(d.x1 == doctest::Approx(-0.4 * 0.3 + 0.2));
    CHECK(d.x2 == doctest::Approx(0.3 + 0.4 * 0.2));
}

TEST_CASE("crossing time of the linear passage") {
    const auto f = linear_field();
    for (double y0 : {1e-2, 1e-4, 1e-6}) {
        const FlowState e = integrate_to_section(FlowState{y0, 1.0, 0.0, {0.1}, 0}, f, SectionKind::YPlus);
        CHECK(std::fabs(e.t - std::log(f.d / y0)) < 1e-9);
        CHECK(std::fabs(e.y - f.d) < 1e-10);
        const FlowState m = integrate_to_section(FlowState{-y0, 1.0, 0.0, {0.1}, 0}, f, SectionKind::YMinus);
        CHECK(std::fabs(m.t - e.t) < 1e-9);
        CHECK(std::fabs(m.x1 - e.x1) < 1e-10);
        CHECK(std::fabs(m.y + f.d) < 1e-10);
    }
}

TEST_CASE("no crossing from the invariant plane, blow-up guard") {
    const auto f = linear_field();
    CHECK(error_code([&] { integrate_to_section(FlowState{0.0, 1.0, 0.0, {0.1}, 0}, f, SectionKind::YPlus); }) ==
          "no-crossing");
    CHECK(error_code([&] { integrate_to_section(FlowState{-1e-3, 1.0, 0.0, {0.1}, 0}, f, SectionKind::YPlus); }) ==
          "no-crossing");
    IntegrateOptions opt;
    opt.blowup = 10;
    NormalFormField g = cubic_field();
    g.c_yx = 50;
    CHECK(!error_code([&] { integrate_to_section(FlowState{0.5, 3.0, 0.0, {0.1}, 0}, g, SectionKind::YPlus, opt); })
               .empty());
}

TEST_CASE("x2 = 0 return of the focus") {
    const auto f = linear_field();
    const FlowState e = integrate_to_section(FlowState{0.0, 1.0, 0.0, {0.0}, 0}, f, SectionKind::X2Zero);
    CHECK(std::fabs(e.x2) < 1e-10);
    CHECK(e.t == doctest::Approx(M_PI / f.omega).epsilon(1e-8));
    CHECK(e.x1 == doctest::Approx(-std::exp(-f.rho * M_PI / f.omega)).epsilon(1e-8));
}

TEST_CASE("linear local map matches the closed form") {
    const auto f = linear_field();
    const auto grid = log_grid(1e-6, 1e-2, 12);
    const auto tab = sample_local_map(f, grid, 1.0, {0.1});
    for (const auto& r : tab) {
        CHECK(r.model_error < 1e-9);
        CHECK(r.envelope == doctest::Approx(std::pow(r.y0 / f.d, f.rho)).epsilon(1e-9));
        CHECK(r.time == doctest::Approx(std::log(f.d / r.y0)).epsilon(1e-10));
    }
    const ExponentFit fit = fit_exponent(tab);
    CHECK(fit.rho_fit >= 0.398);
    CHECK(fit.rho_fit <= 0.402);
    CHECK(fit.points == 12);
    CHECK(fit.span_decades == doctest::Approx(4.0));
}

TEST_CASE("cubic sample nonlinearity") {
    const auto f = cubic_field();
    const auto grid = log_grid(1e-6, 1e-2, 12);
    const auto tab = sample_local_map(f, grid, 1.0, {0.1});
    const ExponentFit fit = fit_exponent(tab);
    CHECK(fit.rho_fit >= 0.38);
    CHECK(fit.rho_fit <= 0.42);
    // z decays faster than the envelope
    for (size_t i = 1; i < tab.size(); ++i)
        CHECK(tab[i].z_norm / tab[i].envelope < tab[i - 1].z_norm / tab[i - 1].envelope);
    // model error is o(y0^rho); pointwise it oscillates with the phase, so compare grid thirds
    auto worst = [&](size_t a, size_t b) {
        double m = 0;
        for (size_t i = a; i < b; ++i) m = std::max(m, tab[i].model_error / std::pow(tab[i].y0, f.rho));
        return m;
    };
    const size_t n3 = tab.size() / 3;
    CHECK(worst(tab.size() - n3, tab.size()) < 0.5 * worst(0, n3));
}

TEST_CASE("fit preconditions") {
    const auto f = linear_field();
    const auto two = sample_local_map(f, {1e-2, 1e-5}, 1.0, {0.1});
    CHECK(error_code([&] { fit_exponent(two); }) == "ill-conditioned");
    const auto narrow = sample_local_map(f, log_grid(1e-3, 5e-3, 10), 1.0, {0.1});
    CHECK(error_code([&] { fit_exponent(narrow); }) == "ill-conditioned");
    CHECK_THROWS_AS(sample_local_map(f, {2.0}, 1.0, {0.1}), Error);
}

TEST_CASE("tolerance sweep moves the landing by less than 10x the tolerance") {
    const auto f = cubic_field();
    IntegrateOptions ref;
    ref.tol = 1e-13;
    ref.event_tol = 1e-13;
    const FlowState s0{1e-4, 1.0, 0.0, {0.1}, 0};
    const FlowState r = integrate_to_section(s0, f, SectionKind::YPlus, ref);
    for (double tol : {1e-8, 1e-9, 1e-10, 1e-11, 1e-12}) {
        IntegrateOptions o;
        o.tol = tol;
        o.event_tol = tol;
        const FlowState e = integrate_to_section(s0, f, SectionKind::YPlus, o);
        const double d = std::max({std::fabs(e.x1 - r.x1), std::fabs(e.x2 - r.x2), std::fabs(e.z[0] - r.z[0])});
        CHECK(d < 10 * tol);
    }
}

TEST_CASE("coordinate planes are invariant") {
    const auto f = cubic_field();
    IntegrateOptions o;
    // {y = 0}: stays there through a full x2-return
    const FlowState a = integrate_to_section(FlowState{0.0, 0.5, 0.0, {0.2}, 0}, f, SectionKind::X2Zero, o);
    CHECK(a.y == 0);
    // {x = 0, z = 0}: y(t) = y0 e^t exactly, x and z stay zero
    const FlowState b = integrate_to_section(FlowState{1e-3, 0.0, 0.0, {0.0}, 0}, f, SectionKind::YPlus, o);
    CHECK(b.x1 == 0);
    CHECK(b.x2 == 0);
    CHECK(b.z[0] == 0);
    CHECK(std::fabs(b.t - std::log(f.d / 1e-3)) < 1e-9);
    // {x = 0, y = 0}: the strong-stable axis
    const FlowState d = vector_field(FlowState{0.0, 0.0, 0.0, {0.3}, 0}, f);
    CHECK(d.x1 == 0);
    CHECK(d.x2 == 0);
    CHECK(d.y == 0);
}

TEST_CASE("field validation") {
    NormalFormField f;
    CHECK(validate_field(f).empty());
    f.rho = 0.7;
    CHECK(!validate_field(f).empty());
    f = NormalFormField{};
    f.alpha = {-0.2};
    auto bad = validate_field(f);
    REQUIRE(!bad.empty());
    CHECK(bad[0].field == "field.alpha[0]");
    auto g = log_grid(1e-6, 1e-2, 5);
    CHECK(g.front() == doctest::Approx(1e-2));
    CHECK(g.back() == doctest::Approx(1e-6));
}

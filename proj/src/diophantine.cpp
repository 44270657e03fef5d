#include "hetcyc/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hetcyc {

std::string to_string(const bigint& v) { return v.str(); }
std::string to_string(const bigrat& v) { return v.str(); }

namespace {

bigint pow10(int n) {
    bigint r = 1;
    for (int i = 0; i < n; ++i) r *= 10;
    return r;
}

// Digits of |x| truncated to N decimals, then a final 1; sign restored.
bigint append_one(double x, int N) {
    const bigrat ax(std::fabs(x));
    const bigrat scaled = ax * bigrat(pow10(N));
    const bigint t = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
    const bigint m = t * 10 + 1;
    return x < 0 ? bigint(-m) : m;
}

// a*x + b*y = g with g = gcd(a, b) >= 0.
void extgcd(const bigint& a, const bigint& b, bigint& x, bigint& y, bigint& g) {
    bigint old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const bigint qq = old_r / r;
        bigint tmp = r;
        r = old_r - qq * r;
        old_r = tmp;
        tmp = s;
        s = old_s - qq * s;
        old_s = tmp;
        tmp = t;
        t = old_t - qq * t;
        old_t = tmp;
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    x = old_s;
    y = old_t;
    g = old_r;
}

bigint floor_div(const bigint& a, const bigint& b) {
    bigint q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
    return q;
}

bigint mod_pos(const bigint& a, const bigint& m) {
    bigint r = a % m;
    if (r < 0) r += m;
    return r;
}

}  // namespace

RationalTriple make_triple(const bigint& p, const bigint& q, const bigint& p1, const bigint& p2) {
    if (!(p > 0 && q > 0)) throw Error("range-violation", "p and q must be positive");
    if (boost::multiprecision::gcd(p, q) != 1) throw Error("not-coprime", "gcd(p, q) != 1");
    if (!(2 * p < q)) throw Error("range-violation", "p/q must lie in (0, 1/2)");
    RationalTriple t;
    t.p = p;
    t.q = q;
    t.p1 = p1;
    t.p2 = p2;
    return t;
}

RationalTriple rationalize_triple(double rho, double u, double v, int N) {
    if (!(rho > 0 && rho < 0.5)) throw Error("range-violation", "rho must lie in (0, 1/2)");
    if (N < 1) throw Error("domain", "N must be >= 1");
    for (int n = N; n < N + 20; ++n) {
        const bigint den = pow10(n + 1);
        const bigint a = append_one(rho, n), b = append_one(u, n), cc = append_one(v, n);
        // a ends in 1 so it is coprime to 10^(n+1); the common denominator stays 10^(n+1).
        const bigint g = boost::multiprecision::gcd(a, den);
        const bigrat r(a, den);
        if (g != 1 || !(r > 0 && r < bigrat(1, 2))) continue;
        RationalTriple t = make_triple(a, den, b, cc);
        t.N = n;
        t.retried = n != N;
        return t;
    }
    throw Error("range-violation", "could not place rho* inside (0, 1/2)");
}

JTriple DiophantineFamily::member(const bigint& i) const {
    const bigint k = kh + i * p;
    return {j1h + k * q, j2h + k * p, j3h + i * q * q};
}

bool DiophantineFamily::satisfies(const JTriple& j) const {
    return p * j[0] - q * j[1] == p1 && p * j[2] - q * j[0] == p2;
}

DiophantineFamily solve_diophantine(const bigint& p, const bigint& q, const bigint& p1, const bigint& p2) {
    if (!(p > 0 && q > 0)) throw Error("domain", "p and q must be positive");
    bigint x, y, g;
    extgcd(p, q, x, y, g);
    if (g != 1) throw Error("not-coprime", "gcd(p, q) != 1");
    DiophantineFamily f;
    f.p = p;
    f.q = q;
    f.p1 = p1;
    f.p2 = p2;
    // p*j1 - q*j2 = p1 with j1 reduced into [0, q).
    f.j1h = mod_pos(x * p1, q);
    f.j2h = (p * f.j1h - p1) / q;
    // j1 = j1h + k q turns the second equation into p*j3 - q^2 k = p2 + q*j1h.
    const bigint q2 = q * q;
    bigint a, b, g2;
    extgcd(p, q2, a, b, g2);
    const bigint rhs = p2 + q * f.j1h;
    f.j3h = mod_pos(a * rhs, q2);
    f.kh = (p * f.j3h - rhs) / q2;
    if (!f.satisfies(f.member(0))) throw Error("internal", "diophantine base check failed");
    return f;
}

std::vector<FamilyMember> enumerate_solutions(const DiophantineFamily& f, long N_floor, int count) {
    if (count < 1) throw Error("domain", "count must be >= 1");
    // Each coordinate is increasing and linear in i: coeffs p*q, p*p, q*q.
    const JTriple base = f.member(0);
    const std::array<bigint, 3> slope{f.p * f.q, f.p * f.p, f.q * f.q};
    bigint imin = std::numeric_limits<long>::min() / 4;
    for (int c = 0; c < 3; ++c) {
        // smallest i with base + i*slope > N_floor
        const bigint need = floor_div(bigint(N_floor) - base[c], slope[c]) + 1;
        imin = std::max(imin, need);
    }
    std::vector<FamilyMember> out;
    for (int k = 0; k < count; ++k) {
        const bigint i = imin + k;
        out.push_back({i, f.member(i)});
    }
    return out;
}

std::vector<JTriple> brute_force_solutions(const bigint& p, const bigint& q, const bigint& p1, const bigint& p2,
                                           long bound) {
    std::vector<JTriple> out;
    for (long j1 = 1; j1 <= bound; ++j1)
        for (long j2 = 1; j2 <= bound; ++j2) {
            if (p * j1 - q * j2 != p1) continue;
            for (long j3 = 1; j3 <= bound; ++j3)
                if (p * j3 - q * j1 == p2) out.push_back({bigint(j1), bigint(j2), bigint(j3)});
        }
    return out;
}

std::pair<bigrat, bigrat> rational_residuals(const RationalTriple& t, const JTriple& j) {
    const bigrat r1 = t.rho() * bigrat(j[0]) - bigrat(j[1]) - t.u();
    const bigrat r2 = t.rho() * bigrat(j[2]) - bigrat(j[0]) - t.v();
    return {r1, r2};
}

UV uv_from_coefficients(const MapCoefficients& c, double rho, PhiConvention conv) {
    if (!(c.B > 0)) throw Error("domain", "B must be > 0");
    if (!(std::sin(c.theta1 - c.theta) > 0)) throw Error("domain", "sin(theta1 - theta) must be > 0");
    const double phi = phi_angle(rho, c.omega, conv);
    return {u_closed_form(c.B, c.omega, c.theta, rho, phi),
            v_closed_form(c.B, c.theta1, c.omega, c.theta, rho, phi)};
}

template <class R>
void coefficients_from_uv_t(MapCoefficientsT<R>& c, const R& rho, const R& u_target, const R& v_target,
                            PhiConvention conv) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::sin;
    const R pi = pi_v<R>();
    const R phi = phi_angle(rho, c.omega, conv);
    const R B = exp((2 * pi * u_target + c.theta - rho * c.theta + rho * (3 * pi / 2 + phi) - pi / 2) / c.omega) /
                sin(phi);
    R eps;
    if constexpr (is_hp_v<R>)
        eps = pow(R(10), -static_cast<int>(working_digits()) + 5);
    else
        eps = R(4) * std::numeric_limits<R>::epsilon();
    auto g = [&](const R& sigma) { return v_closed_form(B, c.theta + sigma, c.omega, c.theta, rho, phi) - v_target; };
    R lo = R(1e-12), hi = pi / 2;
    if (g(hi) < 0 || g(lo) > 0) throw Error("unreachable-target", "no theta1 with theta1-theta in (0, pi/2] attains v");
    R s = pi / 4;
    for (int it = 0; it < 4000; ++it) {
        const R gs = g(s);
        if (gs == 0) break;
        (gs > 0 ? hi : lo) = s;
        const R dg = (c.omega * cos(s) / sin(s) + rho) / (2 * pi);
        R next = s - gs / dg;
        if (!(next > lo && next < hi)) next = (lo + hi) / 2;
        const R step = abs(next - s);
        s = next;
        if (step < eps * (R(1) + abs(s)) || hi - lo < eps) break;
    }
    c.B = B;
    c.theta1 = c.theta + s;
}

template void coefficients_from_uv_t(MapCoefficientsT<double>&, const double&, const double&, const double&,
                                     PhiConvention);
template void coefficients_from_uv_t(MapCoefficientsT<hp>&, const hp&, const hp&, const hp&, PhiConvention);

MapCoefficients coefficients_from_uv(const MapCoefficients& c, double rho, double u_target, double v_target,
                                     PhiConvention conv) {
    MapCoefficients o = c;
    coefficients_from_uv_t(o, rho, u_target, v_target, conv);
    return o;
}

}  // namespace hetcyc

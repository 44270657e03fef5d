#pragma once

#include "hetcyc/saddle.hpp"
#include "hetcyc/types.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <array>
#include <string>
#include <vector>

namespace hetcyc {

using bigint = boost::multiprecision::mpz_int;
using bigrat = boost::multiprecision::mpq_rational;

struct RationalTriple {
    bigint p, q, p1, p2;  // rho* = p/q, u* = p1/q, v* = p2/q
    int N = 0;            // digits actually used (after any range retry)
    bool retried = false;

    bigrat rho() const { return bigrat(p, q); }
    bigrat u() const { return bigrat(p1, q); }
    bigrat v() const { return bigrat(p2, q); }
};

// Truncate to N decimals, append the digit 1, put over 10^(N+1).
RationalTriple rationalize_triple(double rho, double u, double v, int N);
RationalTriple make_triple(const bigint& p, const bigint& q, const bigint& p1, const bigint& p2);

using JTriple = std::array<bigint, 3>;

// Members: (j1h + (kh + i p) q, j2h + (kh + i p) p, j3h + i q^2).
struct DiophantineFamily {
    bigint p, q, p1, p2;
    bigint j1h, j2h, j3h, kh;
    JTriple member(const bigint& i) const;
    bool satisfies(const JTriple& j) const;  // exact check of both equations
};

DiophantineFamily solve_diophantine(const bigint& p, const bigint& q, const bigint& p1, const bigint& p2);

struct FamilyMember {
    bigint i;
    JTriple j;
};
std::vector<FamilyMember> enumerate_solutions(const DiophantineFamily& f, long N_floor, int count);

// All solutions with 1 <= j1, j2, j3 <= bound, by direct search.
std::vector<JTriple> brute_force_solutions(const bigint& p, const bigint& q, const bigint& p1, const bigint& p2,
                                           long bound);

// rho* j1 - j2 - u* and rho* j3 - j1 - v* in exact arithmetic.
std::pair<bigrat, bigrat> rational_residuals(const RationalTriple& t, const JTriple& j);

// u and v as functions of (B, theta1) at fixed (omega, theta, rho).
template <class R>
R u_closed_form(const R& B, const R& omega, const R& theta, const R& rho, const R& phi) {
    using std::log;
    using std::sin;
    const R pi = pi_v<R>();
    return (omega * log(B * sin(phi)) - theta + rho * theta - rho * (3 * pi / 2 + phi) + pi / 2) / (2 * pi);
}

template <class R>
R v_closed_form(const R& B, const R& theta1, const R& omega, const R& theta, const R& rho, const R& phi) {
    using std::log;
    using std::sin;
    const R pi = pi_v<R>();
    return (omega * log(B * sin(theta1 - theta) / 2) - theta + rho * theta - rho * (pi / 2 + theta - theta1) +
            3 * pi / 2 + phi) /
           (2 * pi);
}

struct UV {
    double u = 0, v = 0;
};

UV uv_from_coefficients(const MapCoefficients& c, double rho, PhiConvention conv);

// Inverse map adjusting (B, theta1) only, with theta1 - theta in (0, pi/2].
template <class R>
void coefficients_from_uv_t(MapCoefficientsT<R>& c, const R& rho, const R& u_target, const R& v_target,
                            PhiConvention conv);

MapCoefficients coefficients_from_uv(const MapCoefficients& c, double rho, double u_target, double v_target,
                                     PhiConvention conv);

std::string to_string(const bigint& v);
std::string to_string(const bigrat& v);

extern template void coefficients_from_uv_t(MapCoefficientsT<double>&, const double&, const double&, const double&,
                                            PhiConvention);
extern template void coefficients_from_uv_t(MapCoefficientsT<hp>&, const hp&, const hp&, const hp&, PhiConvention);

}  // namespace hetcyc

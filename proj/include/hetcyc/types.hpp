#pragma once

#include "hetcyc/real.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace hetcyc {

// Error with a stable machine-readable code (e.g. "domain", "no-convergence").
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Raised by apply_T when y == 0: the orbit falls into the equilibrium.
class OnStableManifold : public Error {
public:
    OnStableManifold() : Error("on-stable-manifold", "point lies on {y=0}, no return") {}
};

struct ValidationIssue {
    std::string field;
    std::string message;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues, std::string code = "validation");
    const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ValidationIssue> issues_;
};

enum class Branch { Plus, Minus };

inline int sign_of(Branch b) { return b == Branch::Plus ? 1 : -1; }
inline const char* branch_name(Branch b) { return b == Branch::Plus ? "+" : "-"; }

// z-components are indexed m = 0..n-4 and correspond to A_{m+2}, eta_{m+2}, ...
template <class R>
struct MapCoefficientsT {
    int n = 4;
    R omega = 1;
    R A = 2, A1 = 1;
    std::vector<R> Avec{R(0.3)};
    R eta = 0, eta1 = R(1.5707963267948966);
    std::vector<R> etavec{R(0)};
    R B = 2, B1 = 1;
    std::vector<R> Bvec{R(0.3)};
    R theta = 0, theta1 = R(1.5707963267948966);
    std::vector<R> thetavec{R(0)};
    std::vector<R> zplus{R(0.1)};
    std::vector<R> zminus{R(-0.1)};
    R delta = 0.5;

    int dim() const { return n - 1; }  // section dimension
    int nz() const { return n - 3; }

    template <class T>
    MapCoefficientsT<T> cast() const {
        MapCoefficientsT<T> o;
        auto cv = [](const std::vector<R>& v) {
            std::vector<T> r;
            r.reserve(v.size());
            for (const auto& e : v) r.push_back(real_cast<T>(e));
            return r;
        };
        o.n = n;
        o.omega = real_cast<T>(omega);
        o.A = real_cast<T>(A);
        o.A1 = real_cast<T>(A1);
        o.Avec = cv(Avec);
        o.eta = real_cast<T>(eta);
        o.eta1 = real_cast<T>(eta1);
        o.etavec = cv(etavec);
        o.B = real_cast<T>(B);
        o.B1 = real_cast<T>(B1);
        o.Bvec = cv(Bvec);
        o.theta = real_cast<T>(theta);
        o.theta1 = real_cast<T>(theta1);
        o.thetavec = cv(thetavec);
        o.zplus = cv(zplus);
        o.zminus = cv(zminus);
        o.delta = real_cast<T>(delta);
        return o;
    }
};

template <class R>
struct ControlParamsT {
    R rho = 0.4;
    R zeta = 0;
    R mu = 0;

    template <class T>
    ControlParamsT<T> cast() const {
        return {real_cast<T>(rho), real_cast<T>(zeta), real_cast<T>(mu)};
    }
};

template <class R>
struct SectionPointT {
    R y = 0;
    R x = 1;
    std::vector<R> z;

    template <class T>
    SectionPointT<T> cast() const {
        SectionPointT<T> o;
        o.y = real_cast<T>(y);
        o.x = real_cast<T>(x);
        for (const auto& e : z) o.z.push_back(real_cast<T>(e));
        return o;
    }
};

using MapCoefficients = MapCoefficientsT<double>;
using ControlParams = ControlParamsT<double>;
using SectionPoint = SectionPointT<double>;

template <class R>
struct WindingCoordT {
    Branch branch = Branch::Plus;
    long j = 0;
    R xi = 0;
};
using WindingCoord = WindingCoordT<double>;

// The standard coefficient set used by the acceptance suite (n = 4).
MapCoefficients standard_coefficients();

std::vector<ValidationIssue> validate_coefficients(const MapCoefficients& c,
                                                   const std::string& prefix = "coefficients");
std::vector<ValidationIssue> validate_control(const ControlParams& k, const MapCoefficients& c,
                                              const std::string& prefix = "control");

// Soft in-section predicate.
bool in_section(const SectionPoint& p, const MapCoefficients& c);

}  // namespace hetcyc

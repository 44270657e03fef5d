#pragma once

#include "hetcyc/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hetcyc {

enum class PerturbationKind { Zero, Oscillatory, Coupled, Polynomial };

const char* perturbation_kind_name(PerturbationKind k);
PerturbationKind perturbation_kind_from_name(const std::string& s);

// Sample small terms standing in for every o(|y|^rho) correction of T1/T2.
// Each correction has the shape eps * |y|^(rho+beta) * g(phase) * k(x, z), so
// |h| <= C |y|^(rho+beta) on the section box (C from bound_constant).
// Strong-stable leaf slopes scale as eps*|y0|^(1+beta) (y-slope) and eps*|y0|^alpha (x-slope).
struct PerturbationModel {
    PerturbationKind kind = PerturbationKind::Zero;
    double epsilon = 0.0;
    double beta = 0.2;
    double phase = 0.0;
    double alpha = 1.0;

    bool is_zero() const { return kind == PerturbationKind::Zero || epsilon == 0.0; }
    std::string label() const;
    double bound_constant(const MapCoefficients& c) const;

    // Adds corrections for branch b at p to out (length n-1); if J is given, adds the
    // derivatives into the row-major (n-1)x(n-1) array.
    template <class R>
    void add(Branch b, const SectionPointT<R>& p, const MapCoefficientsT<R>& c, const R& rho,
             std::vector<R>& out, std::vector<R>* J) const;

    template <class R>
    R leaf_a1(const R& y0) const;
    template <class R>
    R leaf_a2(const R& y0) const;
};

std::vector<PerturbationModel> perturbation_library(double epsilon, double beta);

struct BoundSample {
    double max_ratio = 0;        // max |h| / (C |y|^(rho+beta)) over samples
    double max_deriv_ratio = 0;  // max |dh/dy| / |y|^(rho+beta-1)
    int samples = 0;
};

// Samples y log-uniformly in [ylo, yhi] and (x, z) over the section box.
BoundSample sample_bound(const PerturbationModel& m, const MapCoefficients& c, double rho,
                         double ylo, double yhi, int count, std::uint64_t seed);

template <class R>
void PerturbationModel::add(Branch b, const SectionPointT<R>& p, const MapCoefficientsT<R>& c,
                            const R& rho, std::vector<R>& out, std::vector<R>* J) const {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::tanh;
    if (is_zero()) return;
    const int d = c.dim();
    const int nz = c.nz();
    const R sgn = p.y > 0 ? R(1) : R(-1);
    const R s = p.y > 0 ? p.y : R(-p.y);
    const R ls = log(s);
    const R rb = rho + R(beta);
    const R w = exp(rb * ls);
    const R wd = w / s;  // s^(rb-1)
    const R eps(epsilon);
    const R shift = b == Branch::Plus ? R(0) : R(0.5);
    const auto& zref = b == Branch::Plus ? c.zplus : c.zminus;

    R zs = 0;
    for (int m = 0; m < nz; ++m) zs += p.z[m] - zref[m];
    const R th = tanh(zs);

    for (int comp = 0; comp < d; ++comp) {
        const R ph = -c.omega * ls + R(phase) + R(0.7) * R(comp) + shift;
        R g, gp, k, kx, kz;
        switch (kind) {
            case PerturbationKind::Oscillatory:
                g = cos(ph);
                gp = -sin(ph);
                k = 1;
                kx = 0;
                kz = 0;
                break;
            case PerturbationKind::Coupled:
                g = sin(ph);
                gp = cos(ph);
                k = p.x * (R(1) + R(0.5) * th);
                kx = R(1) + R(0.5) * th;
                kz = p.x * R(0.5) * (R(1) - th * th);
                break;
            case PerturbationKind::Polynomial:
            default:
                g = 1;
                gp = 0;
                k = R(0.5) + R(0.25) * R(comp) + (p.x - R(1)) + zs;
                kx = 1;
                kz = 1;
                break;
        }
        out[comp] += eps * w * g * k;
        if (J) {
            auto& M = *J;
            M[comp * d + 0] += eps * sgn * wd * (rb * g - c.omega * gp) * k;
            M[comp * d + 1] += eps * w * g * kx;
            for (int m = 0; m < nz; ++m) M[comp * d + 2 + m] += eps * w * g * kz;
        }
    }
}

template <class R>
R PerturbationModel::leaf_a1(const R& y0) const {
    using std::exp;
    using std::log;
    if (is_zero() || y0 == 0) return R(0);
    const R s = y0 > 0 ? y0 : R(-y0);
    return R(0.5) * R(epsilon) * exp(R(1.0 + beta) * log(s));
}

template <class R>
R PerturbationModel::leaf_a2(const R& y0) const {
    using std::exp;
    using std::log;
    if (is_zero() || y0 == 0) return R(0);
    const R s = y0 > 0 ? y0 : R(-y0);
    return R(0.5) * R(epsilon) * exp(R(alpha) * log(s));
}

}  // namespace hetcyc

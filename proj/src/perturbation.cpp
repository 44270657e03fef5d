#include "hetcyc/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hetcyc {

const char* perturbation_kind_name(PerturbationKind k) {
    switch (k) {
        case PerturbationKind::Zero: return "zero";
        case PerturbationKind::Oscillatory: return "oscillatory";
        case PerturbationKind::Coupled: return "coupled";
        case PerturbationKind::Polynomial: return "polynomial";
    }
    return "zero";
}

PerturbationKind perturbation_kind_from_name(const std::string& s) {
    if (s == "zero") return PerturbationKind::Zero;
    if (s == "oscillatory") return PerturbationKind::Oscillatory;
    if (s == "coupled") return PerturbationKind::Coupled;
    if (s == "polynomial") return PerturbationKind::Polynomial;
    throw Error("validation", "unknown perturbation kind '" + s + "'");
}

std::string PerturbationModel::label() const {
    if (is_zero()) return "zero";
    std::ostringstream os;
    os << perturbation_kind_name(kind) << "(eps=" << epsilon << ",beta=" << beta << ")";
    return os.str();
}

double PerturbationModel::bound_constant(const MapCoefficients& c) const {
    if (is_zero()) return 0.0;
    const double dl = c.delta;
    switch (kind) {
        case PerturbationKind::Oscillatory: return epsilon;
        case PerturbationKind::Coupled: return 1.5 * epsilon * (1.0 + dl);
        case PerturbationKind::Polynomial:
            return epsilon * (0.5 + 0.25 * (c.dim() - 1) + dl + c.nz() * 2.0 * dl);
        default: return 0.0;
    }
}

std::vector<PerturbationModel> perturbation_library(double epsilon, double beta) {
    std::vector<PerturbationModel> v;
    for (auto k : {PerturbationKind::Oscillatory, PerturbationKind::Coupled, PerturbationKind::Polynomial}) {
        PerturbationModel m;
        m.kind = k;
        m.epsilon = epsilon;
        m.beta = beta;
        v.push_back(m);
    }
    return v;
}

BoundSample sample_bound(const PerturbationModel& m, const MapCoefficients& c, double rho, double ylo, double yhi,
                         int count, std::uint64_t seed) {
    BoundSample r;
    if (m.is_zero()) return r;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double C = m.bound_constant(c);
    const int d = c.dim();
    for (int i = 0; i < count; ++i) {
        const Branch b = (i % 2 == 0) ? Branch::Plus : Branch::Minus;
        const double s = std::exp(std::log(ylo) + u01(gen) * (std::log(yhi) - std::log(ylo)));
        SectionPoint p;
        p.y = b == Branch::Plus ? s : -s;
        p.x = 1.0 + c.delta * (2 * u01(gen) - 1);
        const auto& zref = b == Branch::Plus ? c.zplus : c.zminus;
        for (int k = 0; k < c.nz(); ++k) p.z.push_back(zref[k] + 2 * c.delta * (2 * u01(gen) - 1) / 2);
        std::vector<double> h(d, 0.0), J(static_cast<size_t>(d) * d, 0.0);
        m.add(b, p, c, rho, h, &J);
        const double w = std::pow(s, rho + m.beta);
        for (int k = 0; k < d; ++k) {
            r.max_ratio = std::max(r.max_ratio, std::fabs(h[k]) / (C * w));
            r.max_deriv_ratio = std::max(r.max_deriv_ratio, std::fabs(J[k * d]) / (w / s));
        }
        ++r.samples;
    }
    return r;
}

}  // namespace hetcyc

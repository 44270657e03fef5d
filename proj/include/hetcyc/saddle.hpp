#pragma once

#include "hetcyc/linalg.hpp"
#include "hetcyc/poincare.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hetcyc {

using HpCoeffs = MapCoefficientsT<hp>;
using HpControl = ControlParamsT<hp>;
using HpPoint = SectionPointT<hp>;

enum class PhiConvention { OmegaOverRho, RhoOverOmega };
const char* phi_convention_name(PhiConvention p);
PhiConvention phi_convention_from_name(const std::string& s);

// phi = arctan(omega/rho) or arctan(rho/omega).
template <class R>
R phi_angle(const R& rho, const R& omega, PhiConvention conv) {
    using std::atan;
    return conv == PhiConvention::OmegaOverRho ? R(atan(omega / rho)) : R(atan(rho / omega));
}

struct OrbitRecord {
    std::vector<HpPoint> points;
    std::vector<Branch> itinerary;
    std::vector<HpEigenvalue> multipliers;
    int index = 0;
    hp residual = 0;      // max over i of |dy|/|y_{i+1}|, |dx|, |dz| (y measured relatively)
    hp residual_abs = 0;  // plain max-norm of T(p_i) - p_{i+1}
    std::vector<WindingCoordT<hp>> winding;  // phase eta on branch +, theta on branch -
    bool flagged = false;
    std::string flag;

    int period() const { return static_cast<int>(points.size()); }
    SectionPoint point(int i) const { return points.at(i).cast<double>(); }
    std::vector<double> log10_moduli() const;
};

struct IndexReport {
    int index = 0;
    std::vector<HpEigenvalue> multipliers;
    std::vector<double> log10_moduli;
    // cos(xi_i - phi) for both phi conventions, and their products.
    std::vector<double> cos_factors_omega_rho, cos_factors_rho_omega;
    double cos_product_omega_rho = 0, cos_product_rho_omega = 0;
    int small_factor = -1;  // index of the smallest |cos| factor (omega/rho convention)
};

struct SaddleOptions {
    int k_min = 5;
    double mu_smallness = 0.25;  // bound on |mu| exp(pi rho k / omega)
    double tol_marginal = 1e-9;
};

// Shilnikov ladder seed: y_k = C exp(-pi k / omega), C = exp((2 phase - pi)/(2 omega)).
SectionPoint seed_Pk(int k, Branch b, const MapCoefficients& c, const ControlParams& kp,
                     const SaddleOptions& opt = {});

// Newton refinement in winding coordinates (hp internally).
OrbitRecord refine_fixed_point(const SectionPoint& seed, Branch b, const MapCoefficients& c,
                               const ControlParams& kp, const PerturbationModel& pert, double tol = 1e-12,
                               const SaddleOptions& opt = {});
OrbitRecord refine_fixed_point_hp(const HpPoint& seed, Branch b, const HpCoeffs& c, const HpControl& kp,
                                  const PerturbationModel& pert, const SaddleOptions& opt = {});

// Ladder k = k_min.., automatically raising k when Newton fails.
OrbitRecord ladder_point(int k, const MapCoefficients& c, const ControlParams& kp, const PerturbationModel& pert,
                         const SaddleOptions& opt = {});

IndexReport classify_index(const OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp,
                           const PerturbationModel& pert, const SaddleOptions& opt = {});

// Fills itinerary, residuals, winding, multipliers and index of an orbit from its points.
void finalize_orbit(OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp, const PerturbationModel& pert,
                    const SaddleOptions& opt = {});

MatrixT<hp> composed_jacobian(const OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp,
                              const PerturbationModel& pert);

enum class ManifoldKind { StableGraph, UnstableSpiral, StrongStableLeaf };

struct ManifoldGraph {
    ManifoldKind kind;
    SectionPoint anchor;
    double lo = 0, hi = 0;  // domain of the free parameter (spiral t, or band for graphs)
    bool in_band = true;    // stable graph inside (0, |mu|) when mu != 0
    std::function<SectionPoint(const std::vector<double>&)> evaluate;
};

// W^s(P) as a graph y = g(x, z), computed by forward shooting and bisection.
ManifoldGraph stable_graph(const OrbitRecord& P, const MapCoefficients& c, const ControlParams& kp,
                           const PerturbationModel& pert, const SaddleOptions& opt = {});

SectionPoint unstable_spiral(const OrbitRecord& P, double t, const MapCoefficients& c, const ControlParams& kp,
                             const PerturbationModel& pert);
HpPoint unstable_spiral_hp(const OrbitRecord& P, const hp& t, const HpCoeffs& c, const HpControl& kp,
                           const PerturbationModel& pert);

// Local strong-stable leaf z -> (y0 + (z - z0).a1, x0 + (z - z0).a2, z).
struct Leaf {
    HpPoint anchor;
    hp a1 = 0, a2 = 0;  // same slope in every z direction
    HpPoint at(const std::vector<hp>& z) const;
};
Leaf leaf_through(const HpPoint& M, const PerturbationModel& pert);
ManifoldGraph strong_stable_leaf(const SectionPoint& M, const PerturbationModel& pert);

double preimage_level(int k, Branch b, const MapCoefficients& c, const ControlParams& kp);

struct HorseshoeRegion {
    int k = 0;
    double ylo = 0, yhi = 0;
    Branch branch = Branch::Plus;
};
HorseshoeRegion horseshoe_region(int k, const MapCoefficients& c, const ControlParams& kp);

struct ChainLink {
    int from = 0, to = 0;
    bool admissible = false;  // to > rho' * from
    bool overlaps = false;    // T1(sigma_from) meets sigma_to at every sampled x
    bool spans = false;       // image crosses sigma_to from bottom to top at every sampled x
    double image_ymin = 0, image_ymax = 0;
    double image_xmin = 0, image_xmax = 0;
};

struct ChainReport {
    int k0 = 0, k_end = 1;
    double rho_prime = 0;
    std::vector<ChainLink> links;
    bool verified = false;
    int broken_at = -1;
};

inline constexpr double kChainPhasePad = 0.1;

// Links i -> i-1 from k0 down to k_end. The source strip of link i is sigma_i widened by
// kChainPhasePad radians of phase on each side.
ChainReport horseshoe_chain_check(int k0, double rho_prime, const MapCoefficients& c, const ControlParams& kp,
                                  const PerturbationModel& pert, int k_end = 1);

}  // namespace hetcyc

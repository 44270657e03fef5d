#pragma once

#include "hetcyc/saddle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hetcyc {

struct SolverOptions {
    PhiConvention phi = PhiConvention::OmegaOverRho;
    bool literal_x1_phase = false;  // use cos(xi2 + eta1) in the Q2 -> Q1 x-equation
    double tol = 1e-11;             // acceptance gate on the scaled orbit residual
    long j_min = 10;
    double ordering_slack = 0.25;   // period-3 spec check on rho*j3 ~ j1, rho*j1 ~ j2
    SaddleOptions saddle;
};

// Decimal decades spanned by an orbit with the given winding indices.
double orbit_decades(const std::vector<long>& js, double omega);

struct Period2Spec {
    long j1 = 50, j2 = 20;
    double c = 0.0;
    std::optional<double> xi1, xi2;  // seed overrides
};

struct Period2Seed {
    double xi1 = 0;
    std::vector<double> xi2;  // both candidates
    double y1 = 0, y2 = 0;    // may underflow to 0 for large j
    double log_y1 = 0, log_y2 = 0;
    double rho = 0;
};

Period2Seed seed_period2(const Period2Spec& spec, const MapCoefficients& c, const ControlParams& kp,
                         PhiConvention conv);

struct CandidateOutcome {
    double xi2_seed = 0;
    bool converged = false;
    int index = -1;
    std::string note;
};

struct Period2Result {
    OrbitRecord orbit;
    hp rho = 0;
    hp psi_leftover = 0;   // rho j1 - j2 at the solution
    hp psi_leading = 0;    // leading-order expression from the solved angles
    hp psi_residual = 0;   // leftover - leading
    hp index_value = 0;    // tr/(1+det) of the composed (y,x)-block
    std::vector<CandidateOutcome> candidates;
    double xi2_seed_used = 0;
    int iterations = 0;
};

void validate_period2_spec(const Period2Spec& spec, const SolverOptions& opt);

// Solves T2(T2(Q1)) = Q1 with the index-2 condition for (orbit, rho). zeta and mu come from kp.
// Runs at the current working precision; solve_period2 raises it as needed.
Period2Result solve_period2_hp(const Period2Spec& spec, const HpCoeffs& c, const HpControl& kp,
                               const PerturbationModel& pert, const SolverOptions& opt,
                               std::optional<hp> rho_seed = std::nullopt);
Period2Result solve_period2(const Period2Spec& spec, const MapCoefficients& c, const ControlParams& kp,
                            const PerturbationModel& pert, const SolverOptions& opt = {});

struct Period3Spec {
    long j1 = 53, j2 = 21, j3 = 134;
    int configuration = 4;
    double c = 0.0;
};

struct Period3Seed {
    double xi1 = 0, xi2 = 0, xi3 = 0;
};

Period3Seed seed_period3(const Period3Spec& spec, const MapCoefficients& c, const ControlParams& kp,
                         PhiConvention conv);

struct Period3Result {
    OrbitRecord orbit;
    hp mu = 0, zeta = 0;
    HpCoeffs coeffs;  // with the solved B and theta1
    hp index_value = 0;
    // Leading-order relations evaluated on the solution: absolute and relative residuals.
    std::vector<double> pp_residual_abs, pp_residual_rel;
    hp leaf_gap = 0;  // |leaf(Q1) at z = zplus - (mu, 1)|
    hp u_solved = 0, v_solved = 0;  // u, v from the solved angles
    hp u_closed = 0, v_closed = 0;  // u, v from the closed forms at the solved (B, theta1)
    double seed_xi3 = 0;
    int iterations = 0;
};

void validate_period3_spec(const Period3Spec& spec, double rho, const SolverOptions& opt);

// Solves the period-3 orbit together with (mu, zeta, B, theta1) so that M+ lies on the
// strong-stable leaf of Q1. rho is fixed (kp.rho). The targets (u, v) seed (B, theta1).
Period3Result solve_period3_anchored_hp(const Period3Spec& spec, const HpCoeffs& c, const HpControl& kp,
                                        const PerturbationModel& pert, const SolverOptions& opt);
Period3Result solve_period3_anchored(const Period3Spec& spec, const MapCoefficients& c, const ControlParams& kp,
                                     const PerturbationModel& pert, const SolverOptions& opt = {});

// Re-solves the period-3 orbit at a new zeta with (mu, theta1) fixed and B (1 + zeta) held constant.
// The index is re-measured, not imposed.
Period3Result resolve_period3_fixed_anchor(const Period3Spec& spec, const Period3Result& prev, const hp& zeta,
                                           const HpControl& kp, const PerturbationModel& pert,
                                           const SolverOptions& opt);

struct Index2Diagnostic {
    std::vector<double> cos_omega_rho, cos_rho_omega;
    double product_omega_rho = 0, product_rho_omega = 0;
    std::vector<double> log10_moduli;
    int small_factor = -1;
    int index = 0;
};

Index2Diagnostic index2_diagnostic(const OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp,
                                   const PerturbationModel& pert);

// max over orbit points of the distance to M- = (0, 1 + zeta, zminus)
double distance_to_Mminus(const OrbitRecord& orbit, const HpCoeffs& c, const HpControl& kp);

}  // namespace hetcyc

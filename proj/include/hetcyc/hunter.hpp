#pragma once

#include "hetcyc/diophantine.hpp"
#include "hetcyc/periodic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hetcyc {

// ---- quasi-transverse intersection W^u(P) with the leaf of Q1 ----

struct QuasiOptions {
    double tol = 1e-9;            // on the scaled residuals
    double angle_margin = 0.05;   // rad
    std::optional<long> ladder_index;  // search only near this m
    int window = 3;               // m +- window when ladder_index is set
    int scan = 400;               // ladder indices scanned otherwise
};

// One rung: spiral parameter t with the y-equation solved, x-distance left over.
struct LadderRung {
    long m = 0;
    hp t = 0;
    hp dx = 0;             // spiral x - leaf x (signed)
    hp dy = 0;             // spiral y - leaf y after the solve
    hp amplitude = 0;      // A1 x_P t^rho, the scale of the spiral near t
    double scaled_x = 0;   // |dx| / amplitude
    double scaled_y = 0;
};

struct QuasiReport {
    long ladder_index = 0;
    hp t = 0;
    hp y_P = 0;
    HpPoint spiral_point, leaf_point;
    hp dx = 0, dy = 0;
    double residual = 0;       // max of scaled x and y residuals
    double residual_abs = 0;
    double principal_angle = 0;
    int tangent_intersection_dim = 0;
    std::vector<double> spiral_tangent;  // unit vector
    std::vector<LadderRung> rungs;       // the rungs inspected
};

// t_m with omega ln(1/t) + eta = pi/2 + m pi (zeros of the y-cosine on the spiral).
hp ladder_seed(long m, const HpCoeffs& c);

// Solves the y-equation near t_m and measures the x-equation.
LadderRung solve_rung(long m, const OrbitRecord& P, const Leaf& L, const HpCoeffs& c, const HpControl& kp,
                      const PerturbationModel& pert);

QuasiReport quasi_transverse_solve(const OrbitRecord& P, const OrbitRecord& Q, const HpCoeffs& c,
                                   const HpControl& kp, const PerturbationModel& pert, const QuasiOptions& opt = {});

// Smallest principal angle between the spiral tangent at t and the leaf directions.
double quasi_angle(const OrbitRecord& P, const hp& t, const Leaf& L, const HpCoeffs& c, const HpControl& kp,
                   const PerturbationModel& pert, std::vector<double>* tangent = nullptr);

// ---- transverse witness W^u(Q) crossing {y = 0} ----

struct WitnessOptions {
    int max_iter = 60;
    double disc_radius = 0.5;       // y half-width, relative to |y1|
    double disc_radius_x = 1e-4;    // x half-width
    double disc_angle = 0.7853981633974483;  // diameter direction in the scaled (y, x) disc
    double angle_margin = 0.05;
    int initial_points = 17;
    int max_points = 4000;
    double max_phase_gap = 0.5;     // refine the polyline above this log-|y| gap
    std::optional<double> rho_prime;  // default rho + (1/2 - rho)/4
    bool check_chain = true;
};

struct TransverseWitness {
    int iterations = 0;           // iterate of the disc that crosses {y = 0}
    hp dir_y = 0, dir_x = 0;      // disc diameter: Q1 + s (dir_y, dir_x, 0), s in [-1, 1]
    hp s_star = 0;
    hp crossing_y_rel = 0;        // |y_n(s*)| / |dy_n/ds|
    std::vector<HpPoint> segment; // Q1 + s* dir, and its iterates up to the crossing
    double crossing_angle = 0;    // angle of the image curve with {y = 0}
    std::vector<double> area_ratios;  // |det| of the (y,x)-block along the segment
    bool x_bounded = true;
    double x_min = 0, x_max = 0;
    int polyline_points = 0;
    int landing_region = 0;
    int target_region = 0;
    ChainReport chain;
};

TransverseWitness transverse_witness(const OrbitRecord& Q, const OrbitRecord& P, int p_k, const HpCoeffs& c,
                                     const HpControl& kp, const PerturbationModel& pert,
                                     const WitnessOptions& opt = {});

// ---- certificates ----

struct CertificateTolerances {
    double orbit = 1e-10;
    double quasi = 1e-9;
    double angle_margin = 0.05;
    double witness_angle_margin = 0.05;
};

struct Thm2Anchor {
    hp mu = 0, zeta = 0, B = 0, theta1 = 0;
    std::vector<double> pp_residual_abs, pp_residual_rel;
    hp leaf_gap = 0, leaf_gap_rel = 0;
    hp u_solved = 0, v_solved = 0, u_closed = 0, v_closed = 0;
    std::string p, q, p1, p2;  // rational triple (exact)
    double u_star = 0, v_star = 0;
    double u_error = 0, v_error = 0;  // |u_closed - u*|, |v_closed - v*|
};

struct CycleCertificate {
    std::string mechanism;  // thm1 | thm2
    int sequence_index = 0;
    std::vector<long> js;
    unsigned digits = 0;
    HpCoeffs coeffs;
    HpControl control;
    PerturbationModel pert;
    PhiConvention phi = PhiConvention::OmegaOverRho;
    int p_k = 0;
    OrbitRecord P, Q;
    QuasiReport quasi;
    TransverseWitness witness;
    CertificateTolerances tol;
    int coupling_iterations = 0;
    hp joint_residual = 0;
    std::optional<Thm2Anchor> anchor;
    hp zeta_scan_start = 0;
    Index2Diagnostic index2;

    int map_index_P() const { return P.index; }
    int map_index_Q() const { return Q.index; }
    int flow_index_P() const { return P.index + 1; }
    int flow_index_Q() const { return Q.index + 1; }
};

// Checks every invariant of the parts. Throws ValidationError with code "validation-failed".
CycleCertificate certify(CycleCertificate parts);

// Recomputes the invariants from the stored points and parameters with the map alone.
std::vector<ValidationIssue> revalidate(const CycleCertificate& cert);

// ---- hunts ----

struct HuntFailure {
    int sequence_index = 0;
    std::string code, message;
};

struct HuntResult {
    std::vector<CycleCertificate> certificates;
    std::vector<HuntFailure> failures;
};

struct HuntOptions {
    SolverOptions solver;
    QuasiOptions quasi;
    WitnessOptions witness;
    CertificateTolerances tol;
    std::optional<int> p_k;   // default: smallest admissible ladder index
    int jobs = 1;
    int max_coupling_iter = 40;
};

struct Thm1Pair {
    long j1 = 50, j2 = 20;
};

HuntResult hunt_thm1(double rho_star, const std::vector<Thm1Pair>& pairs, const MapCoefficients& c,
                     const PerturbationModel& pert, const HuntOptions& opt = {});

HuntResult hunt_thm2(const RationalTriple& triple, const DiophantineFamily& family, long n_floor, int count,
                     const MapCoefficients& c, const PerturbationModel& pert, const HuntOptions& opt = {});

// Ladder index k of a fixed point P_k on branch +.
int ladder_index_of(const OrbitRecord& P, const HpCoeffs& c);

}  // namespace hetcyc

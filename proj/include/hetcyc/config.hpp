#pragma once

#include "hetcyc/flow.hpp"
#include "hetcyc/hunter.hpp"
#include "hetcyc/serialize.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hetcyc {

struct FixedPointsBlock {
    int k_min = 5;
    int count = 6;
};

struct PeriodicBlock {
    int period = 2;
    long j1 = 50, j2 = 20, j3 = 134;  // period 3 uses all three
};

struct DiophantineBlock {
    long p = 2, q = 5, p1 = 1, p2 = 3;
    long n_floor = 20;
    int count = 3;
    long brute_bound = 200;
};

struct HuntBlock {
    std::string mechanism = "thm1";
    double rho_star = 0.4;
    std::vector<Thm1Pair> pairs{{50, 20}, {100, 40}, {150, 60}};
    long p = 2, q = 5, p1 = 1, p2 = 3;
    long n_floor = 20;
    int count = 3;
    std::optional<int> p_k;
};

struct FlowBlock {
    NormalFormField field = [] {
        NormalFormField f;  // a weak sample nonlinearity; the linear part is checked separately
        f.c_yx = 0.5;
        f.c_xz = 0.2;
        f.c_zx = 0.3;
        f.c_zz = 0.1;
        return f;
    }();
    double y_lo = 1e-6, y_hi = 1e-2;
    int points = 12;
    double x0 = 1.0;
    std::vector<double> z0{0.1};
    double tol = 1e-12;
};

struct RunConfig {
    MapCoefficients coeffs = standard_coefficients();
    ControlParams control;
    PerturbationModel pert;
    SolverOptions solver;
    CertificateTolerances tol;
    FixedPointsBlock fixed_points;
    PeriodicBlock periodic;
    DiophantineBlock diophantine;
    HuntBlock hunt;
    FlowBlock flow;
    int jobs = 1;
    std::uint64_t seed = 20240601;
    std::string output_dir;  // empty: $HETCYC_OUT or ./runs
    std::string source;      // raw config text as given
};

// Parses and validates. Errors: "parse" (with line/column) and ValidationError (field paths).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Every field with its effective value.
json config_to_json(const RunConfig& c);

// Checks every block against the module invariants.
std::vector<ValidationIssue> validate_config(const RunConfig& c);

}  // namespace hetcyc

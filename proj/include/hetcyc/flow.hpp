#pragma once

#include "hetcyc/types.hpp"

#include <optional>
#include <vector>

namespace hetcyc {

// Saddle-focus in normal form, gamma = 1. Nonlinear terms carry the factors that keep
// {y=0}, {x=0,z=0} and {x=0,y=0} invariant:
//   x-row: c_yx * y * x1 * x + c_xz * y * (z1, z1)
//   z-row: c_zx * x1 * x1 + c_zz * y * z_m
struct NormalFormField {
    double rho = 0.4;
    double omega = 1.0;
    std::vector<double> alpha{-1.0};  // strong-stable rates, each < -rho
    double c_yx = 0, c_xz = 0, c_zx = 0, c_zz = 0;
    double d = 1.0;

    int dim() const { return 3 + static_cast<int>(alpha.size()); }
};

std::vector<ValidationIssue> validate_field(const NormalFormField& f, const std::string& prefix = "field");

struct FlowState {
    double y = 0, x1 = 0, x2 = 0;
    std::vector<double> z;
    double t = 0;
};

FlowState vector_field(const FlowState& s, const NormalFormField& f);

// Linearization at the origin by central differences, as a dense row-major matrix (y, x1, x2, z...).
std::vector<double> linearization_at_origin(const NormalFormField& f, double h = 1e-6);

enum class SectionKind { YPlus, YMinus, X2Zero };

struct IntegrateOptions {
    double tol = 1e-12;        // integrator abs/rel tolerance
    double event_tol = 1e-12;  // on the event function
    double t_max = 200;
    double max_dt = 0.25;
    double blowup = 1e12;
};

// Integrates until the trajectory meets the section. Errors: "no-crossing", "blow-up".
FlowState integrate_to_section(const FlowState& s0, const NormalFormField& f, SectionKind section,
                               const IntegrateOptions& opt = {});

struct LocalMapSample {
    double y0 = 0;
    double x1 = 0, x2 = 0;
    std::vector<double> z;
    double z_norm = 0;
    double envelope = 0;       // sqrt(x1^2 + x2^2)
    double time = 0;
    double x1_model = 0, x2_model = 0;  // leading-order local map
    double model_error = 0;    // max |numeric - model| over x1, x2
};

// Starts at (y0, x0, 0, z0) on {x2 = 0} and integrates to y = +-d.
std::vector<LocalMapSample> sample_local_map(const NormalFormField& f, const std::vector<double>& y_grid, double x0,
                                             const std::vector<double>& z0, const IntegrateOptions& opt = {});

struct ExponentFit {
    double rho_fit = 0;
    double half_width = 0;  // 95% interval on the slope
    double intercept = 0;
    int points = 0;
    double span_decades = 0;
};

// Least-squares slope of ln(envelope) against ln(y0). Error "ill-conditioned".
ExponentFit fit_exponent(const std::vector<LocalMapSample>& table);

// Log-spaced grid on [lo, hi], descending.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace hetcyc

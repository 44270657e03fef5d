#pragma once

#include "hetcyc/real.hpp"

#include <functional>
#include <vector>

namespace hetcyc {

struct NewtonOptions {
    int max_iter = 200;
    int max_halvings = 40;
    hp tol = hp(1e-11);
    int fd_exponent = 30;  // central-difference step is 10^-fd_exponent * max(1, |x_i|)
};

struct NewtonResult {
    std::vector<hp> x;
    hp residual = 0;  // max-norm of F(x)
    int iterations = 0;
    bool converged = false;
};

using ResidualFn = std::function<std::vector<hp>(const std::vector<hp>&)>;

// Damped Newton with a central-difference Jacobian. Evaluations that throw
// (for instance a trial point crossing y = 0) count as rejected steps.
NewtonResult newton_solve(const ResidualFn& F, std::vector<hp> x0, const NewtonOptions& opt);

hp max_abs(const std::vector<hp>& v);

}  // namespace hetcyc

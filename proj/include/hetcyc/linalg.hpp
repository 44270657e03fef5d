#pragma once

#include "hetcyc/poincare.hpp"

#include <complex>
#include <vector>

namespace hetcyc {

// Dense LU with partial pivoting. Throws Error("singular") on a zero pivot.
std::vector<hp> solve_linear(const MatrixT<hp>& A, const std::vector<hp>& b);
std::vector<double> solve_linear(const Matrix& A, const std::vector<double>& b);

struct HpEigenvalue {
    hp re, im;
    hp modulus() const;
};

std::vector<HpEigenvalue> eigenvalues(const MatrixT<hp>& A);
std::vector<std::complex<double>> eigenvalues(const Matrix& A);

// Smallest principal angle between the column spans of U and V (both d x k).
double smallest_principal_angle(const Matrix& U, const Matrix& V);

}  // namespace hetcyc

#pragma once

#include "hetcyc/perturbation.hpp"
#include "hetcyc/types.hpp"

#include <cmath>
#include <vector>

namespace hetcyc {

template <class R>
struct MatrixT {
    int rows = 0, cols = 0;
    std::vector<R> a;

    MatrixT() = default;
    MatrixT(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, R(0)) {}
    static MatrixT identity(int n) {
        MatrixT m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = R(1);
        return m;
    }
    R& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const R& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};
using Matrix = MatrixT<double>;

template <class R>
MatrixT<R> operator*(const MatrixT<R>& A, const MatrixT<R>& B) {
    MatrixT<R> C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const R& aik = A(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

template <class R>
std::vector<R> operator*(const MatrixT<R>& A, const std::vector<R>& v) {
    std::vector<R> r(A.rows, R(0));
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) r[i] += A(i, j) * v[j];
    return r;
}

enum class JacobianMode { Auto, Analytic, FiniteDifference };

// Below this |y| a double evaluation returns the y -> 0 limit point.
inline constexpr double kUnderflowFloor = 1e-300;

template <class R>
SectionPointT<R> apply_T1(const SectionPointT<R>& p, const MapCoefficientsT<R>& c,
                          const ControlParamsT<R>& k, const PerturbationModel& pert);
template <class R>
SectionPointT<R> apply_T2(const SectionPointT<R>& p, const MapCoefficientsT<R>& c,
                          const ControlParamsT<R>& k, const PerturbationModel& pert);
template <class R>
SectionPointT<R> apply_T(const SectionPointT<R>& p, const MapCoefficientsT<R>& c,
                         const ControlParamsT<R>& k, const PerturbationModel& pert);

// Image and derivative in one pass (analytic).
template <class R>
SectionPointT<R> apply_T_with_jacobian(const SectionPointT<R>& p, const MapCoefficientsT<R>& c,
                                       const ControlParamsT<R>& k, const PerturbationModel& pert,
                                       MatrixT<R>& J);

template <class R>
MatrixT<R> jacobian_T(const SectionPointT<R>& p, const MapCoefficientsT<R>& c,
                      const ControlParamsT<R>& k, const PerturbationModel& pert,
                      JacobianMode mode = JacobianMode::Auto);

// Leading-order closed form of the (y,x)-block determinant: -omega A A1 sin(eta1-eta) x y^(2rho-1)
// on branch +, and the B-analogue on branch -.
double det_yx_closed_form(const SectionPoint& p, const MapCoefficients& c, const ControlParams& k);

template <class R>
R det_yx(const MatrixT<R>& J) {
    return J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
}

// Winding coordinates: omega ln(1/|y|) + phase = 2 pi j + xi, xi in [0, 2 pi).
template <class R>
WindingCoordT<R> to_winding(const R& y, const R& phase, const R& omega);
template <class R>
R from_winding(const WindingCoordT<R>& w, const R& phase, const R& omega);

// Phase used for branch b (eta on +, theta on -).
template <class R>
R branch_phase(Branch b, const MapCoefficientsT<R>& c) {
    return b == Branch::Plus ? c.eta : c.theta;
}

extern template SectionPointT<double> apply_T1(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                               const ControlParamsT<double>&, const PerturbationModel&);
extern template SectionPointT<hp> apply_T1(const SectionPointT<hp>&, const MapCoefficientsT<hp>&,
                                           const ControlParamsT<hp>&, const PerturbationModel&);
extern template SectionPointT<double> apply_T2(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                               const ControlParamsT<double>&, const PerturbationModel&);
extern template SectionPointT<hp> apply_T2(const SectionPointT<hp>&, const MapCoefficientsT<hp>&,
                                           const ControlParamsT<hp>&, const PerturbationModel&);
extern template SectionPointT<double> apply_T(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                              const ControlParamsT<double>&, const PerturbationModel&);
extern template SectionPointT<hp> apply_T(const SectionPointT<hp>&, const MapCoefficientsT<hp>&,
                                          const ControlParamsT<hp>&, const PerturbationModel&);
extern template SectionPointT<double> apply_T_with_jacobian(const SectionPointT<double>&,
                                                            const MapCoefficientsT<double>&,
                                                            const ControlParamsT<double>&,
                                                            const PerturbationModel&, MatrixT<double>&);
extern template SectionPointT<hp> apply_T_with_jacobian(const SectionPointT<hp>&, const MapCoefficientsT<hp>&,
                                                        const ControlParamsT<hp>&, const PerturbationModel&,
                                                        MatrixT<hp>&);
extern template MatrixT<double> jacobian_T(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                           const ControlParamsT<double>&, const PerturbationModel&, JacobianMode);
extern template MatrixT<hp> jacobian_T(const SectionPointT<hp>&, const MapCoefficientsT<hp>&,
                                       const ControlParamsT<hp>&, const PerturbationModel&, JacobianMode);
extern template WindingCoordT<double> to_winding(const double&, const double&, const double&);
extern template WindingCoordT<hp> to_winding(const hp&, const hp&, const hp&);
extern template double from_winding(const WindingCoordT<double>&, const double&, const double&);
extern template hp from_winding(const WindingCoordT<hp>&, const hp&, const hp&);

}  // namespace hetcyc

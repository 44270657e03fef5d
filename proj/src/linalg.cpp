#include "hetcyc/linalg.hpp"

#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace hetcyc {

namespace {

template <class R>
using EMat = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>;
template <class R>
using EVec = Eigen::Matrix<R, Eigen::Dynamic, 1>;

template <class R>
EMat<R> to_eigen(const MatrixT<R>& A) {
    EMat<R> M(A.rows, A.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) M(i, j) = A(i, j);
    return M;
}

template <class R>
std::vector<R> lu_solve(const MatrixT<R>& A, const std::vector<R>& b) {
    using std::abs;
    if (A.rows != A.cols || static_cast<int>(b.size()) != A.rows) throw Error("domain", "shape mismatch in solve");
    const EMat<R> M = to_eigen(A);
    EVec<R> rhs(A.rows);
    for (int i = 0; i < A.rows; ++i) rhs(i) = b[i];
    Eigen::PartialPivLU<EMat<R>> lu(M);
    const EMat<R> U = lu.matrixLU().template triangularView<Eigen::Upper>();
    for (int i = 0; i < A.rows; ++i)
        if (U(i, i) == 0) throw Error("singular", "singular Newton matrix");
    const EVec<R> x = lu.solve(rhs);
    std::vector<R> out(A.rows);
    for (int i = 0; i < A.rows; ++i) out[i] = x(i);
    return out;
}

}  // namespace

hp HpEigenvalue::modulus() const {
    using std::sqrt;
    return sqrt(re * re + im * im);
}

std::vector<hp> solve_linear(const MatrixT<hp>& A, const std::vector<hp>& b) { return lu_solve(A, b); }
std::vector<double> solve_linear(const Matrix& A, const std::vector<double>& b) { return lu_solve(A, b); }

std::vector<HpEigenvalue> eigenvalues(const MatrixT<hp>& A) {
    const EMat<hp> M = to_eigen(A);
    Eigen::EigenSolver<EMat<hp>> es(M, false);
    if (es.info() != Eigen::Success) throw Error("no-convergence", "eigenvalue iteration failed");
    std::vector<HpEigenvalue> out;
    for (int i = 0; i < A.rows; ++i) {
        const std::complex<hp> e = es.eigenvalues()(i);
        out.push_back({e.real(), e.imag()});
    }
    return out;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& A) {
    const EMat<double> M = to_eigen(A);
    Eigen::EigenSolver<EMat<double>> es(M, false);
    if (es.info() != Eigen::Success) throw Error("no-convergence", "eigenvalue iteration failed");
    std::vector<std::complex<double>> out;
    for (int i = 0; i < A.rows; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

double smallest_principal_angle(const Matrix& U, const Matrix& V) {
    const EMat<double> Ue = to_eigen(U), Ve = to_eigen(V);
    const EMat<double> Qu = Eigen::HouseholderQR<EMat<double>>(Ue).householderQ() *
                            EMat<double>::Identity(U.rows, U.cols);
    const EMat<double> Qv = Eigen::HouseholderQR<EMat<double>>(Ve).householderQ() *
                            EMat<double>::Identity(V.rows, V.cols);
    const EMat<double> C = Qu.transpose() * Qv;
    Eigen::JacobiSVD<EMat<double>> svd(C);
    const double smax = std::min(1.0, svd.singularValues()(0));
    return std::acos(smax);
}

}  // namespace hetcyc

#include "hetcyc/poincare.hpp"

#include <cmath>
#include <sstream>

namespace hetcyc {

ValidationError::ValidationError(std::vector<ValidationIssue> issues, std::string code)
    : Error(std::move(code), [&] {
          std::ostringstream os;
          for (size_t i = 0; i < issues.size(); ++i) {
              if (i) os << "; ";
              os << issues[i].field << ": " << issues[i].message;
          }
          return os.str();
      }()),
      issues_(std::move(issues)) {}

MapCoefficients standard_coefficients() {
    MapCoefficients c;
    c.n = 4;
    c.omega = 1.0;
    c.A = 2.0;
    c.A1 = 1.0;
    c.Avec = {0.3};
    c.eta = 0.0;
    c.eta1 = M_PI / 2;
    c.etavec = {0.0};
    c.B = 2.0;
    c.B1 = 1.0;
    c.Bvec = {0.3};
    c.theta = 0.0;
    c.theta1 = M_PI / 2;
    c.thetavec = {0.0};
    c.zplus = {0.1};
    c.zminus = {-0.1};
    c.delta = 0.5;
    return c;
}

std::vector<ValidationIssue> validate_coefficients(const MapCoefficients& c, const std::string& pre) {
    std::vector<ValidationIssue> out;
    auto bad = [&](const std::string& f, const std::string& m) { out.push_back({pre + "." + f, m}); };
    if (c.n < 4) bad("n", "must be an integer >= 4");
    if (!std::isfinite(c.omega) || c.omega == 0)
        bad("omega", "must be nonzero (non-degeneracy of the focus)");
    else if (c.omega < 0)
        bad("omega", "must be > 0 (reflect x2 to reduce a negative frequency)");
    if (!(c.A > 0)) bad("A", "must be > 0");
    if (!(c.A1 > 0)) bad("A1", "must be > 0");
    if (!(c.B > 0)) bad("B", "must be > 0");
    if (!(c.B1 > 0)) bad("B1", "must be > 0");
    if (c.A > 0 && c.A1 > 0 && !(c.A * c.A1 * std::fabs(std::sin(c.eta1 - c.eta)) > 1e-12))
        bad("eta1", "A*A1*|sin(eta1-eta)| must be > 0 (non-degeneracy)");
    if (c.B > 0 && c.B1 > 0 && !(c.B * c.B1 * std::fabs(std::sin(c.theta1 - c.theta)) > 1e-12))
        bad("theta1", "B*B1*|sin(theta1-theta)| must be > 0 (non-degeneracy)");
    const size_t m = c.n >= 4 ? static_cast<size_t>(c.n - 3) : 0;
    if (c.Avec.size() != m) bad("Avec", "length must be n-3 = " + std::to_string(m));
    if (c.Bvec.size() != m) bad("Bvec", "length must be n-3 = " + std::to_string(m));
    if (c.etavec.size() != m) bad("etavec", "length must be n-3 = " + std::to_string(m));
    if (c.thetavec.size() != m) bad("thetavec", "length must be n-3 = " + std::to_string(m));
    if (c.zplus.size() != m) bad("zplus", "length must be n-3 = " + std::to_string(m));
    if (c.zminus.size() != m) bad("zminus", "length must be n-3 = " + std::to_string(m));
    if (!(c.delta > 0)) bad("delta", "must be > 0");
    return out;
}

std::vector<ValidationIssue> validate_control(const ControlParams& k, const MapCoefficients& c,
                                              const std::string& pre) {
    std::vector<ValidationIssue> out;
    if (!(k.rho > 0 && k.rho < 0.5)) out.push_back({pre + ".rho", "must lie in (0, 1/2)"});
    if (!(std::fabs(k.zeta) < c.delta)) out.push_back({pre + ".zeta", "|zeta| must be < delta"});
    if (!(std::fabs(k.mu) < c.delta)) out.push_back({pre + ".mu", "|mu| must be < delta"});
    return out;
}

bool in_section(const SectionPoint& p, const MapCoefficients& c) {
    if (!(std::fabs(p.y) < c.delta)) return false;
    if (!(std::fabs(p.x - 1) <= c.delta)) return false;
    for (int m = 0; m < c.nz(); ++m) {
        const bool near_plus = std::fabs(p.z[m] - c.zplus[m]) <= c.delta;
        const bool near_minus = std::fabs(p.z[m] - c.zminus[m]) <= c.delta;
        if (!near_plus && !near_minus) return false;
    }
    return true;
}

namespace {

template <class R>
SectionPointT<R> eval_branch(Branch b, const SectionPointT<R>& p, const MapCoefficientsT<R>& c,
                             const ControlParamsT<R>& k, const PerturbationModel& pert,
                             std::vector<R>* J) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    const int d = c.dim();
    const int nz = c.nz();
    if (static_cast<int>(p.z.size()) != nz) throw Error("domain", "z has wrong length");
    const bool plus = b == Branch::Plus;
    const R s = plus ? p.y : R(-p.y);
    const R sgn = plus ? R(1) : R(-1);

    std::vector<R> vals(d);
    vals[0] = plus ? k.mu : R(-k.mu);
    vals[1] = plus ? R(1) : R(R(1) + k.zeta);
    for (int m = 0; m < nz; ++m) vals[2 + m] = plus ? c.zplus[m] : c.zminus[m];
    if (J) J->assign(static_cast<size_t>(d) * d, R(0));

    auto pack = [&]() {
        SectionPointT<R> out;
        out.y = vals[0];
        out.x = vals[1];
        out.z.assign(vals.begin() + 2, vals.end());
        return out;
    };

    if constexpr (!is_hp_v<R>) {
        if (s < R(kUnderflowFloor)) return pack();
    }

    const R ls = log(s);
    const R sr = exp(k.rho * ls);
    const R srm = sr / s;
    const R wl = -c.omega * ls;

    for (int comp = 0; comp < d; ++comp) {
        R amp, ph;
        if (comp == 0) {
            amp = plus ? c.A : R(-c.B);
            ph = plus ? c.eta : c.theta;
        } else if (comp == 1) {
            amp = plus ? c.A1 : c.B1;
            ph = plus ? c.eta1 : c.theta1;
        } else {
            amp = plus ? c.Avec[comp - 2] : c.Bvec[comp - 2];
            ph = plus ? c.etavec[comp - 2] : c.thetavec[comp - 2];
        }
        const R u = wl + ph;
        const R cu = cos(u);
        vals[comp] += amp * p.x * sr * cu;
        if (J) {
            const R su = sin(u);
            (*J)[comp * d + 0] = amp * p.x * sgn * srm * (k.rho * cu + c.omega * su);
            (*J)[comp * d + 1] = amp * sr * cu;
        }
    }
    pert.add(b, p, c, k.rho, vals, J);

    if constexpr (!is_hp_v<R>) {
        for (const auto& v : vals)
            if (!std::isfinite(v)) throw Error("overflow", "non-finite map value");
    }
    return pack();
}

template <class R>
MatrixT<R> fd_jacobian(const SectionPointT<R>& p, const MapCoefficientsT<R>& c, const ControlParamsT<R>& k,
                       const PerturbationModel& pert) {
    using std::abs;
    using std::max;
    using std::min;
    const int d = c.dim();
    MatrixT<R> J(d, d);
    auto coord = [&](SectionPointT<R>& q, int i) -> R& { return i == 0 ? q.y : (i == 1 ? q.x : q.z[i - 2]); };
    auto diff = [&](int i, const R& h) {
        SectionPointT<R> a = p, b = p;
        coord(a, i) += h;
        coord(b, i) -= h;
        const auto fa = apply_T(a, c, k, pert);
        const auto fb = apply_T(b, c, k, pert);
        std::vector<R> col(d);
        col[0] = (fa.y - fb.y) / (2 * h);
        col[1] = (fa.x - fb.x) / (2 * h);
        for (int m = 0; m < c.nz(); ++m) col[2 + m] = (fa.z[m] - fb.z[m]) / (2 * h);
        return col;
    };
    for (int i = 0; i < d; ++i) {
        const R v = coord(const_cast<SectionPointT<R>&>(p), i);
        R h;
        if constexpr (is_hp_v<R>) {
            R rel = pow(R(10), -R(static_cast<int>(working_digits() / 3)));
            h = max(abs(v), R(1)) * rel;
            if (i == 0) h = abs(v) * rel;
        } else {
            h = max(R(1e-7), R(1e-3) * abs(v));
            if (i == 0) h = min(h, R(0.25) * abs(v));
        }
        // Richardson extrapolation of two central differences.
        const auto d1 = diff(i, h);
        const auto d2 = diff(i, h / 2);
        for (int r = 0; r < d; ++r) J(r, i) = (R(4) * d2[r] - d1[r]) / R(3);
    }
    return J;
}

}  // namespace

template <class R>
SectionPointT<R> apply_T1(const SectionPointT<R>& p, const MapCoefficientsT<R>& c, const ControlParamsT<R>& k,
                          const PerturbationModel& pert) {
    if (!(p.y > 0)) throw Error("domain", "T1 requires y > 0");
    return eval_branch(Branch::Plus, p, c, k, pert, static_cast<std::vector<R>*>(nullptr));
}

template <class R>
SectionPointT<R> apply_T2(const SectionPointT<R>& p, const MapCoefficientsT<R>& c, const ControlParamsT<R>& k,
                          const PerturbationModel& pert) {
    if (!(p.y < 0)) throw Error("domain", "T2 requires y < 0");
    return eval_branch(Branch::Minus, p, c, k, pert, static_cast<std::vector<R>*>(nullptr));
}

template <class R>
SectionPointT<R> apply_T(const SectionPointT<R>& p, const MapCoefficientsT<R>& c, const ControlParamsT<R>& k,
                         const PerturbationModel& pert) {
    if (p.y == 0) throw OnStableManifold();
    return p.y > 0 ? apply_T1(p, c, k, pert) : apply_T2(p, c, k, pert);
}

template <class R>
SectionPointT<R> apply_T_with_jacobian(const SectionPointT<R>& p, const MapCoefficientsT<R>& c,
                                       const ControlParamsT<R>& k, const PerturbationModel& pert, MatrixT<R>& J) {
    if (p.y == 0) throw OnStableManifold();
    const int d = c.dim();
    J = MatrixT<R>(d, d);
    return eval_branch(p.y > 0 ? Branch::Plus : Branch::Minus, p, c, k, pert, &J.a);
}

template <class R>
MatrixT<R> jacobian_T(const SectionPointT<R>& p, const MapCoefficientsT<R>& c, const ControlParamsT<R>& k,
                      const PerturbationModel& pert, JacobianMode mode) {
    if (p.y == 0) throw OnStableManifold();
    if (mode == JacobianMode::Auto)
        mode = pert.is_zero() ? JacobianMode::Analytic : JacobianMode::FiniteDifference;
    if (mode == JacobianMode::FiniteDifference) return fd_jacobian(p, c, k, pert);
    MatrixT<R> J;
    apply_T_with_jacobian(p, c, k, pert, J);
    return J;
}

double det_yx_closed_form(const SectionPoint& p, const MapCoefficients& c, const ControlParams& k) {
    const double s = std::fabs(p.y);
    const double f = std::pow(s, 2 * k.rho - 1) * p.x * c.omega;
    if (p.y > 0) return -f * c.A * c.A1 * std::sin(c.eta1 - c.eta);
    return f * c.B * c.B1 * std::sin(c.theta1 - c.theta);
}

template <class R>
WindingCoordT<R> to_winding(const R& y, const R& phase, const R& omega) {
    using W = std::conditional_t<is_hp_v<R>, hp, long double>;
    using std::floor;
    using std::log;
    if (y == 0) throw Error("domain", "winding coordinate undefined at y = 0");
    const W s = y > 0 ? W(y) : W(-y);
    if (!(s < W(1))) throw Error("domain", "winding coordinate requires |y| < 1");
    if (!(omega > 0)) throw Error("domain", "winding coordinate requires omega > 0");
    const W twopi = 2 * pi_v<W>();
    const W val = W(omega) * (-log(s)) + W(phase);
    W jf = floor(val / twopi);
    W xi = val - jf * twopi;
    if (xi < 0) {
        xi += twopi;
        jf -= 1;
    }
    if (xi >= twopi) {
        xi -= twopi;
        jf += 1;
    }
    if (jf < 0) throw Error("domain", "negative winding index");
    WindingCoordT<R> w;
    w.branch = y > 0 ? Branch::Plus : Branch::Minus;
    if constexpr (is_hp_v<R>)
        w.j = jf.template convert_to<long>();
    else
        w.j = static_cast<long>(jf);
    w.xi = static_cast<R>(xi);
    return w;
}

template <class R>
R from_winding(const WindingCoordT<R>& w, const R& phase, const R& omega) {
    using W = std::conditional_t<is_hp_v<R>, hp, long double>;
    using std::exp;
    const W twopi = 2 * pi_v<W>();
    const W val = twopi * W(w.j) + W(w.xi) - W(phase);
    const W s = exp(-val / W(omega));
    const W y = w.branch == Branch::Plus ? s : W(-s);
    return static_cast<R>(y);
}

template SectionPointT<double> apply_T1(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                        const ControlParamsT<double>&, const PerturbationModel&);
template SectionPointT<hp> apply_T1(const SectionPointT<hp>&, const MapCoefficientsT<hp>&, const ControlParamsT<hp>&,
                                    const PerturbationModel&);
template SectionPointT<double> apply_T2(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                        const ControlParamsT<double>&, const PerturbationModel&);
template SectionPointT<hp> apply_T2(const SectionPointT<hp>&, const MapCoefficientsT<hp>&, const ControlParamsT<hp>&,
                                    const PerturbationModel&);
template SectionPointT<double> apply_T(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                       const ControlParamsT<double>&, const PerturbationModel&);
template SectionPointT<hp> apply_T(const SectionPointT<hp>&, const MapCoefficientsT<hp>&, const ControlParamsT<hp>&,
                                   const PerturbationModel&);
template SectionPointT<double> apply_T_with_jacobian(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                                     const ControlParamsT<double>&, const PerturbationModel&,
                                                     MatrixT<double>&);
template SectionPointT<hp> apply_T_with_jacobian(const SectionPointT<hp>&, const MapCoefficientsT<hp>&,
                                                 const ControlParamsT<hp>&, const PerturbationModel&, MatrixT<hp>&);
template MatrixT<double> jacobian_T(const SectionPointT<double>&, const MapCoefficientsT<double>&,
                                    const ControlParamsT<double>&, const PerturbationModel&, JacobianMode);
template MatrixT<hp> jacobian_T(const SectionPointT<hp>&, const MapCoefficientsT<hp>&, const ControlParamsT<hp>&,
                                const PerturbationModel&, JacobianMode);
template WindingCoordT<double> to_winding(const double&, const double&, const double&);
template WindingCoordT<hp> to_winding(const hp&, const hp&, const hp&);
template double from_winding(const WindingCoordT<double>&, const double&, const double&);
template hp from_winding(const WindingCoordT<hp>&, const hp&, const hp&);

}  // namespace hetcyc

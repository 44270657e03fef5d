#include "hetcyc/flow.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>

namespace hetcyc {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

std::vector<ValidationIssue> validate_field(const NormalFormField& f, const std::string& prefix) {
    std::vector<ValidationIssue> out;
    if (!(f.rho > 0 && f.rho < 0.5)) out.push_back({prefix + ".rho", "must lie in (0, 1/2)"});
    if (!std::isfinite(f.omega) || f.omega == 0) out.push_back({prefix + ".omega", "must be non-zero"});
    if (f.alpha.empty()) out.push_back({prefix + ".alpha", "needs at least one strong-stable rate"});
    for (size_t m = 0; m < f.alpha.size(); ++m)
        if (!(f.alpha[m] < -f.rho))
            out.push_back({prefix + ".alpha[" + std::to_string(m) + "]", "must be < -rho"});
    if (!(f.d > 0)) out.push_back({prefix + ".d", "must be positive"});
    for (double v : {f.c_yx, f.c_xz, f.c_zx, f.c_zz})
        if (!std::isfinite(v)) {
            out.push_back({prefix + ".nonlinearity", "coefficients must be finite"});
            break;
        }
    return out;
}

namespace {

void rhs(const NormalFormField& f, const State& s, State& ds) {
    const double y = s[0], x1 = s[1], x2 = s[2];
    const size_t nz = f.alpha.size();
    const double z1 = nz ? s[3] : 0.0;
    const double g = f.c_yx * y * x1;
    ds[0] = y;
    ds[1] = -f.rho * x1 - f.omega * x2 + g * x1 + f.c_xz * y * z1;
    ds[2] = f.omega * x1 - f.rho * x2 + g * x2 + f.c_xz * y * z1;
    for (size_t m = 0; m < nz; ++m) ds[3 + m] = f.alpha[m] * s[3 + m] + f.c_zx * x1 * x1 + f.c_zz * y * s[3 + m];
}

State pack(const FlowState& s, const NormalFormField& f) {
    State v(3 + f.alpha.size(), 0.0);
    v[0] = s.y;
    v[1] = s.x1;
    v[2] = s.x2;
    for (size_t m = 0; m < f.alpha.size() && m < s.z.size(); ++m) v[3 + m] = s.z[m];
    return v;
}

FlowState unpack(const State& v, double t) {
    FlowState s;
    s.y = v[0];
    s.x1 = v[1];
    s.x2 = v[2];
    s.z.assign(v.begin() + 3, v.end());
    s.t = t;
    return s;
}

double event_value(const State& v, const NormalFormField& f, SectionKind k) {
    switch (k) {
        case SectionKind::YPlus: return v[0] - f.d;
        case SectionKind::YMinus: return v[0] + f.d;
        case SectionKind::X2Zero: return v[2];
    }
    return 0;
}

}  // namespace

FlowState vector_field(const FlowState& s, const NormalFormField& f) {
    State v = pack(s, f), dv(v.size());
    rhs(f, v, dv);
    return unpack(dv, s.t);
}

std::vector<double> linearization_at_origin(const NormalFormField& f, double h) {
    const int n = f.dim();
    std::vector<double> J(static_cast<size_t>(n) * n);
    State p(n, 0.0), m(n, 0.0), fp(n), fm(n);
    for (int j = 0; j < n; ++j) {
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(m.begin(), m.end(), 0.0);
        p[j] = h;
        m[j] = -h;
        rhs(f, p, fp);
        rhs(f, m, fm);
        for (int i = 0; i < n; ++i) J[i * n + j] = (fp[i] - fm[i]) / (2 * h);
    }
    return J;
}

FlowState integrate_to_section(const FlowState& s0, const NormalFormField& f, SectionKind section,
                               const IntegrateOptions& opt) {
    if (auto iss = validate_field(f); !iss.empty()) throw ValidationError(iss);
    if (section != SectionKind::X2Zero) {
        if (s0.y == 0) throw Error("no-crossing", "y0 = 0 stays in the invariant plane {y=0}");
        if ((section == SectionKind::YPlus) != (s0.y > 0))
            throw Error("no-crossing", "y0 has the wrong sign for this section");
    }
    auto sys = [&f](const State& x, State& dx, double) { rhs(f, x, dx); };
    auto stepper = odeint::make_dense_output(opt.tol, opt.tol, opt.max_dt, odeint::runge_kutta_dopri5<State>());
    State x = pack(s0, f);
    const double t0 = s0.t;
    // y-sections that already hold at the start count as a crossing at t0
    if (section != SectionKind::X2Zero && event_value(x, f, section) == 0) return unpack(x, t0);
    stepper.initialize(x, t0, std::min(1e-3, opt.max_dt));
    double g_prev = event_value(x, f, section);
    const double t_skip = t0 + 1e-9;  // an x2-section start is not a crossing
    while (stepper.current_time() - t0 < opt.t_max) {
        stepper.do_step(sys);
        const State& cur = stepper.current_state();
        double nrm = 0;
        for (double v : cur) {
            if (!std::isfinite(v)) throw Error("blow-up", "non-finite state at t = " + std::to_string(stepper.current_time()));
            nrm = std::max(nrm, std::abs(v));
        }
        if (nrm > opt.blowup) throw Error("blow-up", "state norm exceeded " + std::to_string(opt.blowup));
        const double g = event_value(cur, f, section);
        const bool started = stepper.current_time() > t_skip;
        if (started && ((g_prev < 0 && g >= 0) || (g_prev > 0 && g <= 0) || g == 0)) {
            double a = std::max(stepper.previous_time(), t_skip), b = stepper.current_time();
            State xa(x.size()), xm(x.size());
            stepper.calc_state(a, xa);
            double ga = event_value(xa, f, section);
            double tm = b;
            xm = cur;
            for (int it = 0; it < 200; ++it) {
                tm = 0.5 * (a + b);
                stepper.calc_state(tm, xm);
                const double gm = event_value(xm, f, section);
                if (std::abs(gm) < opt.event_tol || b - a < 1e-15 * std::max(1.0, std::abs(tm))) break;
                if ((gm > 0) == (ga > 0)) {
                    a = tm;
                    ga = gm;
                } else {
                    b = tm;
                }
            }
            if (section == SectionKind::YPlus) xm[0] = f.d;
            if (section == SectionKind::YMinus) xm[0] = -f.d;
            if (section == SectionKind::X2Zero) xm[2] = 0;
            return unpack(xm, tm);
        }
        g_prev = g;
    }
    throw Error("no-crossing", "section not reached within t_max = " + std::to_string(opt.t_max));
}

std::vector<LocalMapSample> sample_local_map(const NormalFormField& f, const std::vector<double>& y_grid, double x0,
                                             const std::vector<double>& z0, const IntegrateOptions& opt) {
    std::vector<LocalMapSample> out;
    out.reserve(y_grid.size());
    for (double y0 : y_grid) {
        if (!(std::abs(y0) > 0 && std::abs(y0) < f.d))
            throw Error("domain", "grid value " + std::to_string(y0) + " outside (0, d)");
        FlowState s;
        s.y = y0;
        s.x1 = x0;
        s.z = z0;
        s.z.resize(f.alpha.size(), 0.0);
        const FlowState e = integrate_to_section(s, f, y0 > 0 ? SectionKind::YPlus : SectionKind::YMinus, opt);
        LocalMapSample r;
        r.y0 = y0;
        r.x1 = e.x1;
        r.x2 = e.x2;
        r.z = e.z;
        double zn = 0;
        for (double v : e.z) zn += v * v;
        r.z_norm = std::sqrt(zn);
        r.envelope = std::hypot(e.x1, e.x2);
        r.time = e.t;
        const double ratio = std::abs(y0) / f.d;
        const double amp = x0 * std::pow(ratio, f.rho);
        const double ph = f.omega * std::log(1.0 / ratio);
        r.x1_model = amp * std::cos(ph);
        r.x2_model = amp * std::sin(ph);
        r.model_error = std::max(std::abs(r.x1 - r.x1_model), std::abs(r.x2 - r.x2_model));
        out.push_back(std::move(r));
    }
    return out;
}

ExponentFit fit_exponent(const std::vector<LocalMapSample>& table) {
    if (table.size() < 8) throw Error("ill-conditioned", "need at least 8 grid points, got " + std::to_string(table.size()));
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : table) {
        if (!(r.envelope > 0) || r.y0 == 0) throw Error("ill-conditioned", "zero envelope or y0 in the table");
        const double l = std::log10(std::abs(r.y0));
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    const double span = hi - lo;
    if (span < 3) throw Error("ill-conditioned", "grid spans " + std::to_string(span) + " decades, need 3");
    const int n = static_cast<int>(table.size());
    double sx = 0, sy = 0;
    for (const auto& r : table) {
        sx += std::log(std::abs(r.y0));
        sy += std::log(r.envelope);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& r : table) {
        const double dx = std::log(std::abs(r.y0)) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(r.envelope) - my);
    }
    ExponentFit fit;
    fit.rho_fit = sxy / sxx;
    fit.intercept = my - fit.rho_fit * mx;
    double ss = 0;
    for (const auto& r : table) {
        const double e = std::log(r.envelope) - fit.intercept - fit.rho_fit * std::log(std::abs(r.y0));
        ss += e * e;
    }
    // 1.96 sigma; n >= 8 so the normal quantile is close enough
    fit.half_width = 1.96 * std::sqrt(ss / (n - 2) / sxx);
    fit.points = n;
    fit.span_decades = span;
    return fit;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double a = std::log(hi), b = std::log(lo);
    for (int i = 0; i < n; ++i) g[i] = std::exp(n == 1 ? a : a + (b - a) * i / (n - 1));
    return g;
}

}  // namespace hetcyc

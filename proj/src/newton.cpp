#include "hetcyc/newton.hpp"

#include "hetcyc/linalg.hpp"

namespace hetcyc {

hp max_abs(const std::vector<hp>& v) {
    using std::abs;
    hp m = 0;
    for (const auto& e : v) {
        const hp a = abs(e);
        if (a > m) m = a;
    }
    return m;
}

namespace {

bool try_eval(const ResidualFn& F, const std::vector<hp>& x, std::vector<hp>& out) {
    try {
        out = F(x);
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace

NewtonResult newton_solve(const ResidualFn& F, std::vector<hp> x0, const NewtonOptions& opt) {
    using std::abs;
    NewtonResult res;
    res.x = std::move(x0);
    const int n = static_cast<int>(res.x.size());
    std::vector<hp> f;
    if (!try_eval(F, res.x, f)) throw Error("no-convergence", "residual undefined at the seed");
    if (static_cast<int>(f.size()) != n) throw Error("domain", "residual size differs from unknown count");
    res.residual = max_abs(f);
    const hp rel = pow(hp(10), -opt.fd_exponent);

    for (int it = 0; it < opt.max_iter; ++it) {
        if (res.residual < opt.tol) {
            res.converged = true;
            return res;
        }
        MatrixT<hp> J(n, n);
        for (int i = 0; i < n; ++i) {
            const hp h = (abs(res.x[i]) > 1 ? abs(res.x[i]) : hp(1)) * rel;
            std::vector<hp> xp = res.x, xm = res.x, fp, fm;
            xp[i] += h;
            xm[i] -= h;
            const bool okp = try_eval(F, xp, fp);
            const bool okm = try_eval(F, xm, fm);
            if (okp && okm) {
                for (int r = 0; r < n; ++r) J(r, i) = (fp[r] - fm[r]) / (2 * h);
            } else if (okp) {
                for (int r = 0; r < n; ++r) J(r, i) = (fp[r] - f[r]) / h;
            } else if (okm) {
                for (int r = 0; r < n; ++r) J(r, i) = (f[r] - fm[r]) / h;
            } else {
                throw Error("no-convergence", "residual undefined around the iterate");
            }
        }
        std::vector<hp> rhs(n);
        for (int r = 0; r < n; ++r) rhs[r] = -f[r];
        const std::vector<hp> dx = solve_linear(J, rhs);

        hp lambda = 1;
        bool accepted = false;
        for (int k = 0; k <= opt.max_halvings; ++k) {
            std::vector<hp> xt(n), ft;
            for (int r = 0; r < n; ++r) xt[r] = res.x[r] + lambda * dx[r];
            if (try_eval(F, xt, ft)) {
                const hp rt = max_abs(ft);
                if (rt < res.residual) {
                    res.x = std::move(xt);
                    f = std::move(ft);
                    res.residual = rt;
                    accepted = true;
                    break;
                }
            }
            lambda /= 2;
        }
        res.iterations = it + 1;
        if (!accepted) break;
    }
    res.converged = res.residual < opt.tol;
    return res;
}

}  // namespace hetcyc

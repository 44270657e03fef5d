#include "hetcyc/runner.hpp"

#include <boost/version.hpp>
#include <gmp.h>
#include <mpfr.h>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

namespace hetcyc {

namespace fs = std::filesystem;

namespace {

std::mutex g_write_mutex;  // every file write goes through here

std::string cert_stem(const CycleCertificate& c) {
    return "cert_" + c.mechanism + "_" + std::to_string(c.sequence_index);
}

json library_versions() {
    return {{"boost", BOOST_LIB_VERSION},
            {"mpfr", mpfr_get_version()},
            {"gmp", gmp_version},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

void manifest_add(const fs::path& dir, const std::string& key, const std::string& file) {
    const fs::path mp = dir / "manifest.json";
    if (!fs::exists(mp)) return;
    json m = json::parse(read_file(mp));
    if (!m.contains(key)) m[key] = json::array();
    m[key].push_back(file);
    const fs::path tmp = dir / ".manifest.json.tmp";
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw Error("io", "cannot write " + tmp.string());
        o << dump(m);
        if (!o) throw Error("io", "write failed for " + tmp.string());
    }
    fs::rename(tmp, mp);
}

// Writes under the lock and records the file in the manifest.
void emit(const fs::path& dir, const std::string& name, const std::string& text) {
    std::lock_guard<std::mutex> lk(g_write_mutex);
    write_file_atomic(dir / name, text);
    manifest_add(dir, "files", name);
}

json issues_json(const std::vector<ValidationIssue>& v) {
    json a = json::array();
    for (const auto& i : v) a.push_back({{"field", i.field}, {"message", i.message}});
    return a;
}

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

json checks_json(const std::vector<Check>& v) {
    json a = json::array();
    for (const auto& c : v) a.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return a;
}

std::string fmt(double v) { return format_double(v); }

// ---- subcommands; each returns the exit code ----

int cmd_fixed_points(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
    std::vector<OrbitRecord> ladder;
    std::vector<int> ks;
    json pts = json::array();
    json fails = json::array();
    const int k0 = std::max(cfg.fixed_points.k_min, cfg.solver.saddle.k_min);
    SaddleOptions so = cfg.solver.saddle;
    for (int k = k0; k < k0 + cfg.fixed_points.count; ++k) {
        try {
            const SectionPoint s = seed_Pk(k, Branch::Plus, cfg.coeffs, cfg.control, so);
            OrbitRecord r = refine_fixed_point(s, Branch::Plus, cfg.coeffs, cfg.control, cfg.pert, cfg.solver.tol, so);
            json e = to_json(r);
            e["k"] = k;
            pts.push_back(e);
            ladder.push_back(std::move(r));
            ks.push_back(k);
        } catch (const Error& e) {
            fails.push_back({{"k", k}, {"code", e.code()}, {"message", e.what()}});
        }
    }
    json out;
    out["kind"] = "fixed-points";
    out["branch"] = "+";
    out["points"] = pts;
    out["failures"] = fails;
    emit(dir, "fixed_points.json", dump(out));
    emit(dir, "ladder.csv", ladder_csv(ladder, ks));
    log << "fixed-points: " << ladder.size() << " refined, " << fails.size() << " failed\n";
    return fails.empty() ? kExitOk : kExitComputation;
}

int cmd_periodic(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
    if (cfg.periodic.period == 2) {
        Period2Spec spec;
        spec.j1 = cfg.periodic.j1;
        spec.j2 = cfg.periodic.j2;
        DigitsAtLeast prec(digits_for_decades(orbit_decades({spec.j1, spec.j2}, cfg.coeffs.omega)));
        const Period2Result r = solve_period2(spec, cfg.coeffs, cfg.control, cfg.pert, cfg.solver);
        json out = to_json(r);
        out["kind"] = "periodic-orbit";
        out["period"] = 2;
        out["js"] = {spec.j1, spec.j2};
        emit(dir, "periodic_orbit.json", dump(out));
        log << "periodic-orbit p=2: index " << r.orbit.index << ", residual " << fmt(to_d(r.orbit.residual)) << ", rho "
            << fmt(to_d(r.rho)) << "\n";
        return r.orbit.flagged ? kExitComputation : kExitOk;
    }
    Period3Spec spec;
    spec.j1 = cfg.periodic.j1;
    spec.j2 = cfg.periodic.j2;
    spec.j3 = cfg.periodic.j3;
    DigitsAtLeast prec(digits_for_decades(orbit_decades({spec.j1, spec.j2, spec.j3}, cfg.coeffs.omega)));
    const Period3Result r = solve_period3_anchored(spec, cfg.coeffs, cfg.control, cfg.pert, cfg.solver);
    json out = to_json(r);
    out["kind"] = "periodic-orbit";
    out["period"] = 3;
    out["js"] = {spec.j1, spec.j2, spec.j3};
    emit(dir, "periodic_orbit.json", dump(out));
    log << "periodic-orbit p=3: index " << r.orbit.index << ", residual " << fmt(to_d(r.orbit.residual))
        << ", log10|mu| " << fmt(hp_log10_abs(r.mu)) << "\n";
    return r.orbit.flagged ? kExitComputation : kExitOk;
}

std::vector<JTriple> family_within(const DiophantineFamily& f, long bound) {
    const JTriple base = f.member(0);
    const std::array<bigint, 3> slope{f.p * f.q, f.p * f.p, f.q * f.q};
    // members are increasing in i in every coordinate
    bigint lo = 0, hi = 0;
    bool first = true;
    for (int c = 0; c < 3; ++c) {
        bigint a = (bigint(1) - base[c]) / slope[c] - 1;
        bigint b = (bigint(bound) - base[c]) / slope[c] + 1;
        if (first || a < lo) lo = a;
        if (first || b > hi) hi = b;
        first = false;
    }
    std::vector<JTriple> out;
    for (bigint i = lo; i <= hi; ++i) {
        const JTriple j = f.member(i);
        bool ok = true;
        for (const auto& e : j) ok = ok && e >= 1 && e <= bound;
        if (ok) out.push_back(j);
    }
    return out;
}

int cmd_diophantine(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
    const auto& d = cfg.diophantine;
    const RationalTriple t = make_triple(d.p, d.q, d.p1, d.p2);
    const DiophantineFamily f = solve_diophantine(d.p, d.q, d.p1, d.p2);
    const auto members = enumerate_solutions(f, d.n_floor, d.count);
    auto fam = family_within(f, d.brute_bound);
    auto brute = brute_force_solutions(d.p, d.q, d.p1, d.p2, d.brute_bound);
    std::sort(fam.begin(), fam.end());
    std::sort(brute.begin(), brute.end());
    const bool equal = fam == brute;
    bool exact = true;
    json res = json::array();
    for (const auto& m : members) {
        const auto [r1, r2] = rational_residuals(t, m.j);
        exact = exact && r1 == 0 && r2 == 0;
        res.push_back({{"i", to_string(m.i)}, {"r1", to_string(r1)}, {"r2", to_string(r2)}});
    }
    json out = to_json(f, members);
    out["kind"] = "diophantine";
    out["triple"] = to_json(t);
    out["rational_residuals"] = res;
    out["brute_force"] = {{"bound", d.brute_bound}, {"solutions", brute.size()}, {"family_in_bound", fam.size()},
                          {"set_equal", equal}};
    emit(dir, "diophantine.json", dump(out));
    log << "diophantine: " << members.size() << " members, brute-force " << (equal ? "agrees" : "DISAGREES")
        << " (" << brute.size() << " solutions <= " << d.brute_bound << ")\n";
    return equal && exact ? kExitOk : kExitValidation;
}

int cmd_hunt(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
    HuntOptions ho;
    ho.solver = cfg.solver;
    ho.tol = cfg.tol;
    ho.jobs = cfg.jobs;
    ho.p_k = cfg.hunt.p_k;
    HuntResult hr;
    if (cfg.hunt.mechanism == "thm1") {
        hr = hunt_thm1(cfg.hunt.rho_star, cfg.hunt.pairs, cfg.coeffs, cfg.pert, ho);
    } else {
        const auto& h = cfg.hunt;
        const RationalTriple t = make_triple(h.p, h.q, h.p1, h.p2);
        const DiophantineFamily f = solve_diophantine(h.p, h.q, h.p1, h.p2);
        hr = hunt_thm2(t, f, h.n_floor, h.count, cfg.coeffs, cfg.pert, ho);
    }
    fs::create_directories(dir / "certificates");
    json summary;
    summary["kind"] = "hunt";
    summary["mechanism"] = cfg.hunt.mechanism;
    summary["certificates"] = json::array();
    for (const auto& c : hr.certificates) {
        PrecisionScope prec(c.digits);
        const fs::path p = write_certificate(c, dir / "certificates");
        {
            std::lock_guard<std::mutex> lk(g_write_mutex);
            manifest_add(dir, "certificates", "certificates/" + p.filename().string());
        }
        emit(dir, "rungs_" + cert_stem(c) + ".csv", rungs_csv(c.quasi.rungs));
        json s = {{"file", "certificates/" + p.filename().string()},
                  {"sequence_index", c.sequence_index},
                  {"js", c.js},
                  {"rho", hp_json(c.control.rho)},
                  {"zeta", hp_json(c.control.zeta)},
                  {"mu", hp_json(c.control.mu)},
                  {"quasi_residual", c.quasi.residual},
                  {"principal_angle", c.quasi.principal_angle},
                  {"witness_iterations", c.witness.iterations}};
        summary["certificates"].push_back(s);
        log << "hunt: certificate " << p.filename().string() << "\n";
    }
    std::ostringstream seq;
    seq << "index,j1,j2,j3,rho,zeta,mu,quasi_residual\n";
    for (const auto& c : hr.certificates) {
        seq << c.sequence_index;
        for (int i = 0; i < 3; ++i) seq << "," << (i < static_cast<int>(c.js.size()) ? std::to_string(c.js[i]) : "");
        seq << "," << format_double(to_d(c.control.rho)) << "," << format_double(to_d(c.control.zeta)) << ","
            << format_double(to_d(c.control.mu)) << "," << format_double(c.quasi.residual) << "\n";
    }
    emit(dir, "sequence.csv", seq.str());
    summary["failures"] = json::array();
    for (const auto& f : hr.failures) {
        summary["failures"].push_back(to_json(f));
        log << "hunt: item " << f.sequence_index << " failed: " << f.message << "\n";
    }
    emit(dir, "hunt.json", dump(summary));
    if (hr.certificates.empty()) return kExitComputation;
    return hr.failures.empty() ? kExitOk : kExitComputation;
}

int cmd_validate_local(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
    IntegrateOptions io;
    io.tol = cfg.flow.tol;
    const auto grid = log_grid(cfg.flow.y_lo, cfg.flow.y_hi, cfg.flow.points);
    NormalFormField lin = cfg.flow.field;
    lin.c_yx = lin.c_xz = lin.c_zx = lin.c_zz = 0;
    const auto tl = sample_local_map(lin, grid, cfg.flow.x0, cfg.flow.z0, io);
    const auto tn = sample_local_map(cfg.flow.field, grid, cfg.flow.x0, cfg.flow.z0, io);
    const ExponentFit fl = fit_exponent(tl);
    const ExponentFit fn = fit_exponent(tn);
    // grid is descending in y0, so the ratio must fall along it
    auto decreasing = [](const std::vector<LocalMapSample>& t) {
        for (size_t i = 1; i < t.size(); ++i)
            if (!(t[i].z_norm / t[i].envelope < t[i - 1].z_norm / t[i - 1].envelope)) return false;
        return true;
    };
    const double rho = cfg.flow.field.rho;
    std::vector<Check> checks{
        {"linear fit within 0.002 of rho", std::abs(fl.rho_fit - rho) <= 0.002, fmt(fl.rho_fit)},
        {"nonlinear fit within 0.02 of rho", std::abs(fn.rho_fit - rho) <= 0.02, fmt(fn.rho_fit)},
        {"z/envelope decreasing (linear)", decreasing(tl), ""},
        {"z/envelope decreasing (nonlinear)", decreasing(tn), ""}};
    json out;
    out["kind"] = "validate-local";
    out["field"] = to_json(cfg.flow.field);
    out["fit_linear"] = to_json(fl);
    out["fit_field"] = to_json(fn);
    out["checks"] = checks_json(checks);
    emit(dir, "flow.json", dump(out));
    emit(dir, "local_map_linear.csv", local_map_csv(tl));
    emit(dir, "local_map_field.csv", local_map_csv(tn));
    bool ok = true;
    for (const auto& c : checks) {
        log << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
        ok = ok && c.passed;
    }
    return ok ? kExitOk : kExitValidation;
}

std::vector<Check> property_sweep(const RunConfig& cfg) {
    std::vector<Check> out;
    const auto& c = cfg.coeffs;
    const auto& k = cfg.control;
    // ladder spacing, residual, index
    {
        Check ch{"ladder", true, ""};
        std::vector<OrbitRecord> L;
        for (int i = 0; i < 6; ++i) {
            const int kk = cfg.solver.saddle.k_min + i;
            try {
                L.push_back(refine_fixed_point(seed_Pk(kk, Branch::Plus, c, k, cfg.solver.saddle), Branch::Plus, c, k,
                                               cfg.pert, 1e-12, cfg.solver.saddle));
            } catch (const Error& e) {
                ch.passed = false;
                ch.detail = "k=" + std::to_string(kk) + ": " + e.what();
                break;
            }
        }
        for (size_t i = 0; ch.passed && i < L.size(); ++i) {
            if (L[i].index != 1 || !(L[i].residual < hp(1e-12))) ch.passed = false;
            if (i + 1 < L.size()) {
                using std::log;
                const double gap = to_d(log(L[i].points[0].y / L[i + 1].points[0].y));
                if (!(std::abs(gap - M_PI / c.omega) < 1e-3)) ch.passed = false;
            }
        }
        out.push_back(ch);
    }
    // analytic vs finite-difference determinant
    {
        Check ch{"determinant", true, ""};
        for (double y : {1e-2, 1e-3, 1e-4, 1e-5}) {
            SectionPoint p;
            p.y = y;
            p.x = 1;
            p.z = c.zplus;
            const double da = det_yx(jacobian_T(p, c, k, cfg.pert, JacobianMode::Analytic));
            const double df = det_yx(jacobian_T(p, c, k, cfg.pert, JacobianMode::FiniteDifference));
            if (!(std::abs(da - df) <= 1e-5 * std::abs(df))) ch.passed = false;
            if (y <= 1e-3 && !(std::abs(da) > 2)) ch.passed = false;
            ch.detail += "y=" + fmt(y) + ":" + fmt(da) + " ";
        }
        out.push_back(ch);
    }
    // winding roundtrips
    {
        Check ch{"winding roundtrip", true, ""};
        std::mt19937_64 gen(cfg.seed);
        std::uniform_real_distribution<double> u(std::log(1e-200), std::log(0.4));
        double worst = 0;
        for (int i = 0; i < 10000; ++i) {
            const double y = std::exp(u(gen));
            const auto w = to_winding(y, c.eta, c.omega);
            worst = std::max(worst, std::abs(from_winding(w, c.eta, c.omega) - y) / y);
        }
        ch.passed = worst < 1e-14;
        ch.detail = "max rel error " + fmt(worst);
        out.push_back(ch);
    }
    // perturbation bound class
    {
        Check ch{"perturbation bounds", true, ""};
        for (const auto& m : perturbation_library(1e-3, 0.2)) {
            const BoundSample b = sample_bound(m, c, k.rho, 1e-12, 0.1, 2000, cfg.seed);
            if (!(b.max_ratio <= 1.0)) ch.passed = false;
            ch.detail += m.label() + ":" + fmt(b.max_ratio) + " ";
        }
        out.push_back(ch);
    }
    // diophantine family vs brute force
    {
        const auto& d = cfg.diophantine;
        const DiophantineFamily f = solve_diophantine(d.p, d.q, d.p1, d.p2);
        auto fam = family_within(f, d.brute_bound);
        auto brute = brute_force_solutions(d.p, d.q, d.p1, d.p2, d.brute_bound);
        std::sort(fam.begin(), fam.end());
        std::sort(brute.begin(), brute.end());
        out.push_back({"diophantine family", fam == brute, std::to_string(brute.size()) + " solutions"});
    }
    // flow linear fit
    {
        NormalFormField lin = cfg.flow.field;
        lin.c_yx = lin.c_xz = lin.c_zx = lin.c_zz = 0;
        const auto t = sample_local_map(lin, log_grid(1e-6, 1e-2 * lin.d, 12), 1.0, cfg.flow.z0);
        const auto fit = fit_exponent(t);
        out.push_back({"flow exponent", std::abs(fit.rho_fit - lin.rho) <= 0.002, fmt(fit.rho_fit)});
    }
    return out;
}

int cmd_check_invariants(const RunConfig& cfg, const RunRequest& req, const fs::path& dir, std::ostream& log) {
    json out;
    out["kind"] = "check-invariants";
    bool ok = true;
    if (!req.run_dir.empty()) {
        const fs::path cdir = fs::path(req.run_dir) / "certificates";
        std::vector<fs::path> files;
        if (fs::exists(cdir))
            for (const auto& e : fs::directory_iterator(cdir))
                if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        out["run"] = req.run_dir;
        out["certificates"] = json::array();
        for (const auto& f : files) {
            json r = {{"file", f.filename().string()}};
            try {
                const CycleCertificate c = certificate_from_json(json::parse(read_file(f)));
                const auto iss = revalidate(c);
                r["passed"] = iss.empty();
                r["issues"] = issues_json(iss);
                ok = ok && iss.empty();
            } catch (const std::exception& e) {
                r["passed"] = false;
                r["issues"] = json::array({{{"field", "<file>"}, {"message", e.what()}}});
                ok = false;
            }
            log << (r["passed"].get<bool>() ? "ok   " : "FAIL ") << f.filename().string() << "\n";
            out["certificates"].push_back(r);
        }
        if (files.empty()) {
            log << "no certificates under " << cdir.string() << "\n";
            ok = false;
        }
    } else {
        const auto checks = property_sweep(cfg);
        out["checks"] = checks_json(checks);
        for (const auto& c : checks) {
            log << (c.passed ? "ok   " : "FAIL ") << c.name << "  " << c.detail << "\n";
            ok = ok && c.passed;
        }
    }
    out["passed"] = ok;
    emit(dir, "invariants.json", dump(out));
    return ok ? kExitOk : kExitValidation;
}

fs::path choose_run_dir(const RunRequest& req, const RunConfig& cfg) {
    if (!req.out.empty()) return req.out;
    const fs::path root = cfg.output_dir.empty() ? default_output_root() : fs::path(cfg.output_dir);
    for (int i = 1;; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%03d", i);
        const fs::path p = root / (req.command + "-" + buf);
        if (!fs::exists(p)) return p;
    }
}

}  // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw Error("io", "cannot open " + tmp.string() + " for writing");
        o << text;
        o.flush();
        if (!o) throw Error("io", "write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

fs::path default_output_root() {
    if (const char* e = std::getenv("HETCYC_OUT"); e && *e) return e;
    return "runs";
}

fs::path write_certificate(const CycleCertificate& cert, const fs::path& dir) {
    const auto iss = revalidate(cert);
    if (!iss.empty()) throw ValidationError(iss, "validation-failed");
    const std::string text = dump(to_json(cert));
    std::lock_guard<std::mutex> lk(g_write_mutex);
    fs::create_directories(dir);
    const std::string stem = cert_stem(cert);
    fs::path p = dir / (stem + ".json");
    for (int n = 1; fs::exists(p); ++n) p = dir / (stem + "_" + std::to_string(n) + ".json");
    write_file_atomic(p, text);
    manifest_add(dir, "certificates", p.filename().string());
    return p;
}

int run(const RunRequest& req, std::ostream& log) {
    static const std::set<std::string> commands{"fixed-points",   "periodic-orbit", "diophantine",
                                                "hunt",           "validate-local", "check-invariants"};
    fs::path dir;
    auto fail = [&](int code, const std::string& ecode, const std::string& msg, const json& issues) {
        json e = {{"status", "error"}, {"exit_code", code}, {"code", ecode}, {"message", msg}, {"issues", issues}};
        log << "error [" << ecode << "]: " << msg << "\n";
        std::cerr << e.dump() << "\n";
        if (dir.empty() && !req.out.empty()) dir = req.out;
        try {
            if (!dir.empty()) {
                fs::create_directories(dir);
                std::lock_guard<std::mutex> lk(g_write_mutex);
                write_file_atomic(dir / "error.json", dump(e));
            }
        } catch (const std::exception& w) {
            log << "could not write error.json: " << w.what() << "\n";
        }
        return code;
    };
    if (!commands.count(req.command)) return fail(kExitValidation, "validation", "unknown command '" + req.command + "'", json::array());
    RunConfig cfg;
    try {
        cfg = req.config_path.empty() ? parse_config(R"({"coefficients": {"omega": 1}})") : load_config(req.config_path);
        if (!req.run_dir.empty() && req.config_path.empty()) {
            const fs::path stored = fs::path(req.run_dir) / "config.json";
            if (fs::exists(stored)) cfg = load_config(stored.string());
        }
        if (req.mechanism) cfg.hunt.mechanism = *req.mechanism;
        if (req.period) {
            if (*req.period == 3 && cfg.periodic.period != 3) {
                cfg.periodic.j1 = 53;
                cfg.periodic.j2 = 21;
                cfg.periodic.j3 = 134;
            }
            cfg.periodic.period = *req.period;
        }
        if (req.jobs) cfg.jobs = *req.jobs;
        if (req.tol) {
            cfg.solver.tol = *req.tol;
            cfg.tol.orbit = *req.tol;
        }
        const auto bad = validate_config(cfg);
        if (!bad.empty()) throw ValidationError(bad);
    } catch (const ValidationError& e) {
        return fail(kExitValidation, e.code(), e.what(), issues_json(e.issues()));
    } catch (const Error& e) {
        return fail(kExitValidation, e.code(), e.what(), json::array());
    }
    try {
        dir = choose_run_dir(req, cfg);
        fs::create_directories(dir);
        json manifest;
        manifest["tool"] = "hetcyc";
        manifest["version"] = kToolVersion;
        manifest["command"] = req.command;
        manifest["libraries"] = library_versions();
        manifest["seed"] = cfg.seed;
        manifest["tolerances"] = config_to_json(cfg)["tolerances"];
        manifest["solver"] = config_to_json(cfg)["solver"];
        manifest["files"] = json::array({"config.json", "config.source.json"});
        manifest["certificates"] = json::array();
        {
            std::lock_guard<std::mutex> lk(g_write_mutex);
            write_file_atomic(dir / "manifest.json", dump(manifest));
            write_file_atomic(dir / "config.json", dump(config_to_json(cfg)));
            write_file_atomic(dir / "config.source.json", cfg.source);
        }
        log << "run directory: " << dir.string() << "\n";
        int code = kExitOk;
        if (req.command == "fixed-points") code = cmd_fixed_points(cfg, dir, log);
        else if (req.command == "periodic-orbit") code = cmd_periodic(cfg, dir, log);
        else if (req.command == "diophantine") code = cmd_diophantine(cfg, dir, log);
        else if (req.command == "hunt") code = cmd_hunt(cfg, dir, log);
        else if (req.command == "validate-local") code = cmd_validate_local(cfg, dir, log);
        else code = cmd_check_invariants(cfg, req, dir, log);
        {
            std::lock_guard<std::mutex> lk(g_write_mutex);
            json m = json::parse(read_file(dir / "manifest.json"));
            m["exit_code"] = code;
            write_file_atomic(dir / "manifest.json", dump(m));
        }
        return code;
    } catch (const ValidationError& e) {
        return fail(kExitValidation, e.code(), e.what(), issues_json(e.issues()));
    } catch (const Error& e) {
        const bool v = e.code() == "validation" || e.code() == "parse";
        return fail(v ? kExitValidation : kExitComputation, e.code(), e.what(), json::array());
    } catch (const std::exception& e) {
        return fail(kExitComputation, "internal", e.what(), json::array());
    }
}

}  // namespace hetcyc

#include "hetcyc/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Heterodimensional cycles near Shilnikov loops: numerical certificates"};
    app.require_subcommand(1);
    hetcyc::RunRequest req;
    std::string mechanism;
    int period = 0, jobs = 0;
    double tol = 0;

    auto common = [&](CLI::App* sc) {
        sc->add_option("--config", req.config_path, "JSON config file")->check(CLI::ExistingFile);
        sc->add_option("--out", req.out, "run directory (default: $HETCYC_OUT or ./runs, numbered)");
        sc->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        sc->add_option("--tol", tol, "orbit acceptance tolerance")->check(CLI::PositiveNumber);
    };
    auto* fp = app.add_subcommand("fixed-points", "refine the ladder P_k and write a CSV");
    common(fp);
    auto* po = app.add_subcommand("periodic-orbit", "solve the period-2 or period-3 orbit");
    common(po);
    po->add_option("--period", period, "2 or 3")->check(CLI::IsMember({2, 3}));
    auto* di = app.add_subcommand("diophantine", "solve the winding-index Diophantine family");
    common(di);
    auto* hu = app.add_subcommand("hunt", "search for cycle certificates");
    common(hu);
    hu->add_option("--mechanism", mechanism, "thm1 or thm2")->check(CLI::IsMember({"thm1", "thm2"}));
    auto* vl = app.add_subcommand("validate-local", "cross-check the local map against an integrated flow");
    common(vl);
    auto* ci = app.add_subcommand("check-invariants", "property sweep, or revalidate a stored run");
    common(ci);
    ci->add_option("--run", req.run_dir, "stored run directory to revalidate")->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hetcyc::kExitValidation;
    }
    req.command = app.get_subcommands().front()->get_name();
    if (!mechanism.empty()) req.mechanism = mechanism;
    if (period) req.period = period;
    if (jobs) req.jobs = jobs;
    if (tol > 0) req.tol = tol;
    return hetcyc::run(req, std::cout);
}

#pragma once

#include "hetcyc/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace hetcyc {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode { kExitOk = 0, kExitValidation = 1, kExitComputation = 2 };

struct RunRequest {
    std::string command;  // fixed-points | periodic-orbit | diophantine | hunt | validate-local | check-invariants
    std::string config_path;  // empty: built-in defaults
    std::string out;          // run directory; empty: <root>/<command>-NNN
    std::optional<std::string> mechanism;
    std::optional<int> period;
    std::optional<int> jobs;
    std::optional<double> tol;
    std::string run_dir;  // check-invariants against a stored run
};

// Executes one subcommand. Never throws: failures go to error.json in the run directory
// (when one is known), one JSON line on stderr, and the exit code.
int run(const RunRequest& req, std::ostream& log);

// Atomic write (temp + rename) of a validated certificate as cert_<mechanism>_<index>[_n].json.
// Refuses certificates that fail revalidation; appends the file to dir/manifest.json when present.
std::filesystem::path write_certificate(const CycleCertificate& cert, const std::filesystem::path& dir);

// Atomic text write.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

std::string read_file(const std::filesystem::path& path);

// Default output root: $HETCYC_OUT, else ./runs.
std::filesystem::path default_output_root();

}  // namespace hetcyc

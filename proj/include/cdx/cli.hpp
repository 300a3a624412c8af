#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdx {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitMismatch = 1, kExitConfig = 2, kExitData = 3 };

struct OracleOptions {
    long max_prime = 50;
    int max_level = 10;
    int samples = 60;
    std::uint64_t seed = 20240611;
    std::string curves_path = "fixtures/ec.csv";
    // Test hook: negate the trace fed to the closed-form matrix.
    bool negate_trace = false;
};

struct OracleReport {
    int samples = 0, matrix_mismatches = 0;
    int genus0_checks = 0, genus0_failures = 0;
    int genus1_checks = 0, genus1_failures = 0;
    std::vector<std::string> failures;

    bool ok() const { return matrix_mismatches == 0 && genus0_failures == 0 && genus1_failures == 0; }
};

// Closed-form Frobenius vs torsion basis on random curves; #X_H(F_p) = p + 1
// on genus-0 classes; genus-1 classes match a pool curve trace by trace.
OracleReport run_oracle(const OracleOptions& opt);

// Parses `N;a,b,c,d;...`, `full:N` or `gamma0:N`.
class SubgroupRep;
SubgroupRep parse_subgroup_arg(const std::string& text);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cdx

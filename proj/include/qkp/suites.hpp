#pragma once

// Identity suites, single-identity evaluation and calculus derivations
// behind the command-line driver, with a deterministic JSON report.

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qkp::cli {

/// Unknown suite, identity or parameter.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct Config {
    int weight = 10;  // series truncation weight W
    int vars = 6;     // time variables used by random samples, N <= 7
    int depth = 6;    // operator depth for pseudo-differential truncations
    std::uint64_t seed = 20240611;
    std::string data_dir;         // holds calculi/*.calc
    bool corrupt_corpus = false;  // swaps a corpus tau for the non-tau control
    bool timing = false;          // record elapsed_ms (breaks byte-identity)
    int threads = 0;              // 0: hardware concurrency
};

enum class Status { pass, fail, diagnostic };
std::string status_name(Status s);

struct CheckRecord {
    std::string check_id;
    std::string identity;  // what is being verified, in words
    std::map<std::string, std::string> parameters;
    Status status = Status::fail;
    bool holds = false;              // diagnostics report the outcome here
    std::string first_nonzero_term;  // empty when holds
    std::string detail;
    double elapsed_ms = 0;
};

struct SuiteReport {
    std::string suite;
    Config config;
    std::vector<CheckRecord> checks;  // sorted by check_id
    bool passed() const;
};

const std::vector<std::string>& suite_names();
/// Throws UsageError for an unknown suite; "all" runs every suite.
SuiteReport run_suite(const std::string& name, const Config& config);

/// Pretty-printed JSON, keys sorted; byte-identical for equal reports.
std::string to_json(const SuiteReport& report);
/// One line per check plus a summary line.
std::string to_text(const SuiteReport& report);

struct IdentityInfo {
    std::string id;
    std::string description;
    std::map<std::string, std::string> defaults;
};
const std::vector<IdentityInfo>& identity_catalog();
/// Canonical text of the identity's sides or residual; throws UsageError.
std::string eval_identity(const std::string& id, const std::map<std::string, std::string>& params,
                          const Config& config);

struct Derivation {
    bool valid = false;  // calculus validation passed
    std::string text;
    SuiteReport report;  // validation and scenario records
};
/// Loads and validates a calculus file, prints its curvature and replays its checks.
Derivation derive(const std::string& path, const Config& config);

/// Terms of a sum as sets of juxtaposed factors, e.g. "qx^2(q-1)^2D_q^2+1"
/// -> {{"+","q","x^2","(q-1)^2","D_q^2"}, {"+","1"}}; used to compare
/// renderings that differ only in factor order.
std::vector<std::vector<std::string>> factor_terms(const std::string& text);

}  // namespace qkp::cli

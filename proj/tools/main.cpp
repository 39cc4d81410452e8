#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qkp/suites.hpp"

namespace {

int write_json(const std::string& path, const std::string& json) {
    if (path.empty()) return 0;
    if (path == "-") {
        std::cout << json;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    out << json;
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace qkp::cli;
    Config cfg;
    cfg.data_dir = QKP_DATA_DIR;
    std::string suite, json_path;

    CLI::App app{"Exact identity checks for the q-deformed KP hierarchy"};
    app.add_option("--weight", cfg.weight, "series truncation weight W")->check(CLI::Range(2, 16));
    app.add_option("--vars", cfg.vars, "time variables in random samples, N")->check(CLI::Range(1, 7));
    app.add_option("--depth", cfg.depth, "pseudo-differential operator depth")->check(CLI::Range(1, 12));
    app.add_option("--seed", cfg.seed, "seed for random samples");
    app.add_option("--json", json_path, "write the JSON report here ('-' for stdout)");
    app.add_option("--suite", suite, "suite to run")->check(CLI::IsMember(suite_names()));
    app.add_option("--data-dir", cfg.data_dir, "directory holding calculi/*.calc");
    app.add_flag("--timing", cfg.timing, "record elapsed times (reports are then not reproducible)");
    app.add_option("--threads", cfg.threads, "worker threads, 0 for all cores");
    app.add_flag("--corrupt-corpus", cfg.corrupt_corpus, "replace one corpus tau by a non-tau (negative control)");

    auto* list = app.add_subcommand("list", "list suites and identities");
    auto* eval = app.add_subcommand("eval", "evaluate one identity from the catalog");
    std::string identity;
    std::vector<std::string> assignments;
    eval->add_option("id", identity, "identity id (see list)")->required();
    eval->add_option("params", assignments, "key=value parameters");
    auto* der = app.add_subcommand("derive", "curvature and scripted checks of a calculus file");
    std::string calc_path;
    der->add_option("file", calc_path, "calculus file")->required()->check(CLI::ExistingFile);
    app.require_subcommand(0, 1);
    eval->fallthrough();
    der->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            std::cout << "suites:";
            for (const auto& s : suite_names()) std::cout << " " << s;
            std::cout << "\nidentities:\n";
            for (const auto& e : identity_catalog()) {
                std::cout << "  " << e.id;
                for (const auto& [k, v] : e.defaults) std::cout << " " << k << "=" << v;
                std::cout << "\n      " << e.description << "\n";
            }
            return 0;
        }
        if (eval->parsed()) {
            std::map<std::string, std::string> params;
            for (const auto& a : assignments) {
                const auto eq = a.find('=');
                if (eq == std::string::npos) throw UsageError("parameter '" + a + "' is not key=value");
                params[a.substr(0, eq)] = a.substr(eq + 1);
            }
            std::cout << eval_identity(identity, params, cfg) << "\n";
            return 0;
        }
        if (der->parsed()) {
            const Derivation d = derive(calc_path, cfg);
            std::cout << d.text;
            if (const int rc = write_json(json_path, to_json(d.report))) return rc;
            return d.valid ? 0 : 1;
        }
        if (suite.empty()) {
            std::cerr << app.help();
            return 2;
        }
        const SuiteReport report = run_suite(suite, cfg);
        if (json_path != "-") std::cout << to_text(report);
        if (const int rc = write_json(json_path, to_json(report))) return rc;
        return report.passed() ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

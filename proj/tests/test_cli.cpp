#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qkp/suites.hpp"

using namespace qkp::cli;

namespace {

Config small_config() {
    Config c;
    c.weight = 6;
    c.depth = 3;
    c.data_dir = QKP_DATA_DIR;
    return c;
}

const CheckRecord* find(const SuiteReport& r, const std::string& id) {
    for (const auto& c : r.checks)
        if (c.check_id == id) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("jackson suite passes and its records are sorted") {
    const SuiteReport r = run_suite("jackson", small_config());
    CHECK(r.passed());
    REQUIRE(r.checks.size() == 5);
    for (std::size_t i = 1; i < r.checks.size(); ++i) CHECK(r.checks[i - 1].check_id < r.checks[i].check_id);
    for (const auto& c : r.checks) {
        CHECK(c.status == Status::pass);
        CHECK(c.first_nonzero_term.empty());
    }
}

TEST_CASE("unknown suite is a usage error") {
    CHECK_THROWS_AS(run_suite("hirota", small_config()), UsageError);
}

TEST_CASE("corrupted corpus fails with the offending term") {
    Config c = small_config();
    c.corrupt_corpus = true;
    const SuiteReport r = run_suite("hirota-classical", c);
    CHECK_FALSE(r.passed());
    const CheckRecord* kp = find(r, "hirota-classical.kp-bilinear");
    REQUIRE(kp != nullptr);
    CHECK(kp->status == Status::fail);
    CHECK(kp->first_nonzero_term == "s_21: 24");
    // the control check does not depend on the corpus
    CHECK(find(r, "hirota-classical.kp-bilinear-control")->status == Status::pass);
}

TEST_CASE("diagnostics never fail a suite") {
    const SuiteReport r = run_suite("dressing", small_config());
    bool any_diag = false;
    for (const auto& c : r.checks) {
        if (c.status == Status::diagnostic) any_diag = true;
        else CHECK_MESSAGE(c.status == Status::pass, c.check_id);
    }
    CHECK(any_diag);
    CHECK(r.passed());
}

TEST_CASE("json report is deterministic and omits timing by default") {
    Config c = small_config();
    const std::string a = to_json(run_suite("qschur", c));
    c.threads = 2;
    const std::string b = to_json(run_suite("qschur", c));
    CHECK(a == b);
    CHECK(a.find("elapsed_ms") == std::string::npos);
    c.timing = true;
    CHECK(to_json(run_suite("qschur", c)).find("elapsed_ms") != std::string::npos);
}

TEST_CASE("identity evaluation") {
    const Config c = small_config();
    CHECK(eval_identity("d-power", {}, c) == "D^2 = q(q-1)^2x^2D_q^2+(q^2-1)xD_q+1");
    CHECK(eval_identity("kp-bilinear", {{"tau", "s_21"}}, c) == "residual = 0");
    CHECK(eval_identity("kp-bilinear", {{"tau", "control"}}, c) == "residual = 24");
    CHECK(eval_identity("q-schur", {{"k", "1"}}, c) == "p~_1 = t1 + x");
    const std::string a0 = eval_identity("dressing-a0", {{"tau", "s_2"}}, c);
    CHECK(a0.substr(a0.rfind('\n') + 1) == "residual = 0");
    CHECK_THROWS_AS(eval_identity("nope", {}, c), UsageError);
    CHECK_THROWS_AS(eval_identity("d-power", {{"m", "2"}}, c), UsageError);
    CHECK_THROWS_AS(eval_identity("d-power", {{"n", "two"}}, c), UsageError);
    CHECK_THROWS_AS(eval_identity("kp-bilinear", {{"tau", "s_9"}}, c), UsageError);
}

TEST_CASE("factor terms ignore factor order") {
    CHECK(factor_terms("(q-1)^3q^3x^3D_q^3+1") == factor_terms("q^3x^3(q-1)^3D_q^3+1"));
    CHECK_FALSE(factor_terms("qx+1") == factor_terms("qx-1"));
    CHECK_FALSE(factor_terms("q^2x") == factor_terms("qx"));
}

TEST_CASE("derive reports curvature and rejects invalid calculi") {
    const Config c = small_config();
    const std::string dir = std::string(QKP_DATA_DIR) + "/calculi/";
    const Derivation b = derive(dir + "burgers.calc", c);
    CHECK(b.valid);
    CHECK(b.text.find("dx*dt: -eta*u*u_x - 1/2*eta*u_xx - u_t + w_x") != std::string::npos);
    CHECK(b.report.passed());

    CHECK_FALSE(derive(dir + "qburgers.calc", c).valid);

    // a calculus whose rules break d^2 = 0
    const auto bad = std::filesystem::temp_directory_path() / "qkp_bad.calc";
    {
        std::ifstream in(dir + "burgers.calc");
        std::ofstream out(bad);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("rule dt*x", 0) == 0) line = "rule dt*x = x*dt + dx";
            out << line << "\n";
        }
    }
    const Derivation d = derive(bad.string(), c);
    CHECK_FALSE(d.valid);
    CHECK(d.text.find("validation: FAILED") != std::string::npos);
    std::filesystem::remove(bad);
}

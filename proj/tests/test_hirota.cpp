#include "doctest.h"

#include <random>

#include "qkp/error.hpp"
#include "qkp/hirota.hpp"
#include "qkp/jackson.hpp"
#include "qkp/orepsdo.hpp"

using namespace qkp;

namespace {

MultiPoly T(int i, int p = 1) { return MultiPoly::variable(var::t(i), p); }
MultiPoly D(int i, int p = 1) { return hirota_symbol(i, p); }

// P(d_s) a(t+s) b(t-s)|_{s=0}, with s carried by the y slots.
MultiPoly taylor_oracle(const MultiPoly& P, const MultiPoly& a, const MultiPoly& b) {
    auto shift = [](const MultiPoly& f, int sign) {
        std::vector<std::pair<int, MultiPoly>> r;
        for (int i = 1; i <= kMaxY; ++i) r.emplace_back(var::t(i), T(i) + MultiPoly::variable(var::y(i)) * QRat(sign));
        return f.substitute(r);
    };
    const MultiPoly prod = shift(a, 1) * shift(b, -1);
    MultiPoly out;
    for (const auto& [alpha, c] : P.terms()) {
        MultiPoly part = prod;
        QRat fact(1);
        for (int i = 1; i <= kMaxY; ++i) {
            part = part.coefficient(var::y(i), alpha[var::t(i)]);
            for (int k = 2; k <= alpha[var::t(i)]; ++k) fact *= QRat(k);
        }
        // drop leftover y dependence: only the s = 0 value is wanted
        out += part.filtered([](const Exponents& e) { return y_weight_of(e) == 0; }) * (c * fact);
    }
    return out;
}

MultiPoly random_poly(std::mt19937& rng, int max_weight, int terms, int max_slot = 4) {
    std::uniform_int_distribution<int> slot(1, max_slot), coeff(-3, 3);
    MultiPoly p = 1;
    for (int k = 0; k < terms; ++k) {
        MultiPoly m = 1;
        int w = 0;
        while (true) {
            const int s = slot(rng);
            if (w + s > max_weight) break;
            m = m * T(s);
            w += s;
            if (coeff(rng) > 1) break;
        }
        p += m * QRat(coeff(rng));
    }
    return p;
}

bool all_zero(const std::vector<YResidual>& rs) {
    for (const auto& r : rs)
        if (!r.residual.is_zero()) return false;
    return true;
}

const MultiPoly kSample = MultiPoly(1) + T(1) + T(1, 2) * QRat::frac(1, 2) + T(2);

}  // namespace

TEST_CASE("hirota_apply examples") {
    const MultiPoly a = MultiPoly(1) + T(1) * T(2) + T(3, 2);
    CHECK(hirota_apply(D(1), a, a).is_zero());
    CHECK(hirota_apply(D(1, 2), T(1), T(1)) == MultiPoly(-2));
    CHECK(hirota_apply(D(1), T(1), T(2)) == T(2));
}

TEST_CASE("hirota_apply matches the Taylor oracle and is bilinear") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const MultiPoly a = random_poly(rng, 6, 4), b = random_poly(rng, 6, 4), c = random_poly(rng, 5, 3);
        const MultiPoly P = random_poly(rng, 5, 3) - MultiPoly(1);
        CHECK(hirota_apply(P, a, b) == taylor_oracle(P, a, b));
        CHECK(hirota_apply(P, a + c * QRat(3), b) == hirota_apply(P, a, b) + hirota_apply(P, c, b) * QRat(3));
    }
}

TEST_CASE("odd Hirota monomials annihilate the diagonal") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const MultiPoly tau = random_poly(rng, 7, 5);
        const MultiPoly P = random_poly(rng, 6, 4).filtered([](const Exponents& e) {
            int d = 0;
            for (auto v : e) d += v;
            return d % 2 == 1;
        });
        CHECK(hirota_apply(P, tau, tau).is_zero());
    }
}

TEST_CASE("KP bilinear residual") {
    CHECK(kp_bilinear_residual(1).is_zero());
    CHECK(kp_bilinear_residual(kSample).is_zero());
    CHECK(kp_bilinear_residual(control_tau().tau) == MultiPoly(24));
    for (int n = 0; n <= 6; ++n)
        for (const auto& p : partitions(n)) CHECK_MESSAGE(kp_bilinear_residual(translated_schur_tau(p)).is_zero(), partition_id(p));
}

TEST_CASE("tau corpus") {
    const auto corpus = schur_corpus();
    REQUIRE(corpus.size() == 7);
    CHECK(corpus[2].tau == kSample);
    for (const auto& s : corpus) CHECK(s.tau.constant_term().is_one());
    CHECK(schur_function({1, 1}) == T(1, 2) * QRat::frac(1, 2) - T(2));
    const auto r1 = random_controls(5, 20, 8), r2 = random_controls(5, 20, 8);
    REQUIRE(r1.size() == 20);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].tau == r2[i].tau);
        CHECK(r1[i].tau.max_weight() <= 8);
    }
}

TEST_CASE("hierarchy equations") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 5; ++trial) CHECK(hierarchy_eq(1, random_poly(rng, 7, 5)).is_zero());
    for (const auto& s : schur_corpus()) {
        CHECK(hierarchy_eq(3, s.tau).is_zero());
        CHECK(hierarchy_eq(3, s.tau) == kp_bilinear_residual(s.tau) * QRat::frac(-1, 12));
    }
    const MultiPoly c = control_tau().tau;
    CHECK_FALSE(hierarchy_eq(3, c).is_zero());
    CHECK(hierarchy_eq(3, c) == kp_bilinear_residual(c) * QRat::frac(-1, 12));
}

TEST_CASE("generating Hirota identity") {
    for (const auto& r : generating_hirota(1, 4)) CHECK(r.residual.is_zero());
    const MultiPoly c = control_tau().tau;
    bool found = false;
    for (const auto& r : generating_hirota(c, 3)) {
        Exponents y3{};
        y3[var::y(3)] = 1;
        if (r.y == y3) {
            CHECK(r.residual == hierarchy_eq(3, c));
            found = true;
        }
    }
    CHECK(found);
    for (const auto& s : schur_corpus()) CHECK_MESSAGE(all_zero(generating_hirota(s.tau, 5)), s.id);
}

TEST_CASE("bilinear residue") {
    CHECK(all_zero(bilinear_residue_check(1, 4)));
    for (const auto& s : schur_corpus()) CHECK_MESSAGE(all_zero(bilinear_residue_check(s.tau, 4)), s.id);
    CHECK_FALSE(all_zero(bilinear_residue_check(control_tau().tau, 4)));
}

TEST_CASE("s_n and the Miwa-shift identity") {
    const MultiPoly tau = translated_schur_tau({2, 1});
    CHECK(sn_from_tau(0, tau, 6) == TruncSeries(1));
    CHECK(sn_from_tau(1, tau, 6).is_zero());
    const TruncSeries u = series_log(TruncSeries(tau, Trunc::at_weight(6))).partial(var::t(1)).partial(var::t(1));
    CHECK(sn_from_tau(2, tau, 6) == u);
    CHECK_THROWS_WITH_AS(sn_from_tau(2, T(1), 4), "tau not normalized", MathError);
    for (const auto& r : random_controls(42, 20, 8))
        for (int n = 0; n <= 6; ++n) CHECK_MESSAGE(sn_identity_residual(n, r.tau).is_zero(), r.id);
}

TEST_CASE("KP flow") {
    const FlowCheck one = kp_flow_check(1, 6);
    CHECK(one.r1.is_zero());
    CHECK(one.r2.is_zero());
    for (const auto& s : schur_corpus()) {
        const FlowCheck f = kp_flow_check(s.tau, 9);
        CHECK_MESSAGE(f.r1.is_zero(), s.id);
        CHECK_MESSAGE(f.r2.is_zero(), s.id);
        CHECK(f.r2.weight_cap() >= 5);
    }
    const FlowCheck c = kp_flow_check(control_tau().tau, 6);
    CHECK_FALSE((c.r1.is_zero() && c.r2.is_zero()));
}

TEST_CASE("differential Fay") {
    CHECK(fay_residual(1).is_zero());
    for (const auto& s : schur_corpus()) CHECK_MESSAGE(fay_residual(s.tau).is_zero(), s.id);
    CHECK_FALSE(fay_residual(control_tau().tau).is_zero());
    for (const auto& s : schur_corpus()) {
        const LogFay lf = fay_log_form(s.tau, 4, 8);
        CHECK_MESSAGE(lf.lhs == lf.rhs, s.id);
        const LogFay col = fay_collision(s.tau, 6, 8);
        CHECK_MESSAGE(col.lhs == col.rhs, s.id);
    }
    const LogFay bad = fay_log_form(control_tau().tau, 4, 8);
    CHECK_FALSE(bad.lhs == bad.rhs);
}

TEST_CASE("log encoding") {
    const LogEncoding one = log_encoding(1, 4, 6);
    for (const auto& p : one.plucker) CHECK(p.is_zero());
    for (const auto& s : schur_corpus()) {
        const LogEncoding e = log_encoding(s.tau, 4, 10);
        CHECK(e.plucker[4].weight_cap() >= 6);
        CHECK(e.Z[1].is_zero());
        for (int i = 1; i <= 4; ++i) CHECK_MESSAGE(e.plucker[i].is_zero(), s.id << " i=" << i);
        for (const auto& r : e.low_order) CHECK_MESSAGE(r.is_zero(), s.id);
        for (const auto& r : e.bridge) CHECK(r.is_zero());
    }
    const LogEncoding c = log_encoding(control_tau().tau, 4, 8);
    bool any = false;
    for (int i = 1; i <= 4; ++i) any = any || !c.plucker[i].is_zero();
    CHECK(any);
}

TEST_CASE("wave functions") {
    const WaveFunction one = wave_function(1, 3, WaveKind::psi, 5);
    CHECK((one.psi - exp_xi(AuxTag::z, 1, 5)).is_zero());

    const MultiPoly tau = MultiPoly(1) + T(1);
    const WaveFunction w = wave_function(tau, 2, WaveKind::psi, 5);
    const TruncSeries expect = -TruncSeries(tau, Trunc::at_weight(5)).inverse();
    CHECK(w.w[1] == expect);

    for (const auto& s : schur_corpus()) {
        const WaveFunction p = wave_function(s.tau, 4, WaveKind::psi, 7);
        const WaveFunction ps = wave_function(s.tau, 4, WaveKind::psi_star, 7);
        for (std::size_t j = 0; j < p.w.size(); ++j) {
            CHECK(p.w[j] == p.w_schur[j]);
            CHECK(ps.w[j] == ps.w_schur[j]);
        }
        const LaurentObject hat = p.psi_hat * ps.psi_hat;
        for (int n = 0; n <= 4; ++n) {
            CHECK_MESSAGE(hat.coeff(-n) == sn_from_tau(n, s.tau, 7), s.id << " n=" << n);
            CHECK(hat.coeff(-n).weight_cap() >= 7);
        }
    }
    // with the exponentials the unknown tail limits each coefficient to weight K - n
    const MultiPoly tau21 = translated_schur_tau({2, 1});
    const LaurentObject full =
        wave_function(tau21, 10, WaveKind::psi, 6).psi * wave_function(tau21, 10, WaveKind::psi_star, 6).psi;
    for (int n = 0; n <= 4; ++n) {
        CHECK(full.coeff(-n) == sn_from_tau(n, tau21, 6));
        CHECK(full.coeff(-n).weight_cap() >= 6);
    }
    CHECK_THROWS_AS(wave_function(T(1), 2, WaveKind::psi, 4), MathError);
}

TEST_CASE("q-bilinear identity") {
    CHECK(all_zero(q_bilinear_check(1, 1, 4)));
    for (const auto& s : schur_corpus()) CHECK_MESSAGE(all_zero(q_bilinear_check(s.tau, 1, 4)), s.id);
    CHECK(all_zero(q_bilinear_check(translated_schur_tau({2, 1}), 2, 3)));
    CHECK_FALSE(all_zero(q_bilinear_check(control_tau().tau, 1, 4)));
}

TEST_CASE("b_k coefficients") {
    for (int k = 1; k <= 4; ++k) CHECK(bk_coeff(2, 0, k).is_zero());
    const auto [e0, s0] = bk_expansion(1, 0, 4);
    CHECK(e0 == TruncSeries(1));
    CHECK(bk_coeff(0, 1, 1) == QRat::q() * QRat::q() - QRat::q());
    const auto [e, s] = bk_expansion(0, 1, 5);
    CHECK(e == s);
    // log D^n e_q - log D^{m+1} e_q with n = m + 1 + s
    const int m = 1, sh = 2, order = 5;
    const TruncSeries eq = eq_exp(order);
    const TruncSeries diff = series_log(apply_D(eq, m + 1 + sh)) - series_log(apply_D(eq, m + 1));
    MultiPoly expect;
    const MultiPoly xz = MultiPoly::variable(var::x) * MultiPoly::variable(var::aux0);
    for (int k = 1; k <= order; ++k) expect += pow(xz, k) * bk_coeff(m, sh, k);
    CHECK(diff == TruncSeries(expect, diff.trunc()));
}

TEST_CASE("q wave function") {
    CHECK(qwave_check(1, 3, 5).is_zero());
    for (const auto& s : schur_corpus()) {
        const LaurentObject r = qwave_check(s.tau, 5, 6);
        CHECK_MESSAGE(r.is_zero(), s.id);
        CHECK(r.coeff(0).weight_cap() >= 5);
    }
    const MultiPoly tau = translated_schur_tau({2});
    const OrePsiDO S = s_from_tau(tau_q_build(tau, 6), 3);
    std::vector<TruncSeries> w;
    for (int j = 0; j <= 3; ++j) w.push_back(S.coeff(-j));
    w[1] = w[1] + TruncSeries(MultiPoly::variable(var::x), w[1].trunc());
    CHECK_FALSE(qwave_residual(tau, w, 3, 6).is_zero());
}

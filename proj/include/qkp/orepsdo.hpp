#pragma once

// Pseudo-differential operators sum_{i<=M} a_i Delta^i over a twisted
// calculus Delta f = sigma(f) Delta + delta(f): classical (sigma = id,
// delta = d/dvar) or q-deformed (sigma = D, delta = D_q), plus dressing,
// adjoints and the qKP/qKdV operator formulas built on them.

#include <climits>
#include <map>
#include <string>
#include <vector>

#include "qkp/series.hpp"

namespace qkp {

struct Calculus {
    enum class Kind { classical, q, q_inverse };
    Kind kind = Kind::q;
    int var = var::x;  // differentiation variable of the classical kind

    static Calculus classical(int slot) { return {Kind::classical, slot}; }
    static Calculus q_calculus() { return {Kind::q, var::x}; }
    /// sigma = D^{-1}, delta = D_{1/q}; the home of adjoints of q-operators.
    static Calculus q_inverse() { return {Kind::q_inverse, var::x}; }

    TruncSeries sigma(const TruncSeries& f, int k) const;
    TruncSeries delta(const TruncSeries& f) const;
    /// Binomial coefficient of the power rule for Delta^i f (i any integer).
    QRat binomial(int i, int k) const;
    std::string symbol() const;
    friend bool operator==(const Calculus&, const Calculus&) = default;
};

class OrePsiDO {
public:
    static constexpr int kNoTail = INT_MIN / 4;
    using Coeffs = std::map<int, TruncSeries>;

    OrePsiDO() = default;
    OrePsiDO(Calculus calc, Coeffs coeffs, int low = kNoTail);

    static OrePsiDO identity(Calculus calc) { return delta_power(calc, 0); }
    static OrePsiDO delta_power(Calculus calc, int m);
    static OrePsiDO multiplication(Calculus calc, const TruncSeries& f);

    const Calculus& calculus() const { return calc_; }
    const Coeffs& coeffs() const { return coeffs_; }
    /// Exponents below low() are unknown.
    int low() const { return low_; }
    bool is_exact() const { return low_ == kNoTail; }
    TruncSeries coeff(int i) const;
    int max_exponent() const;

    OrePsiDO plus() const;
    OrePsiDO minus() const;
    /// Drops exponents below the new floor.
    OrePsiDO truncated_below(int floor) const;
    OrePsiDO map_coeffs(const std::function<TruncSeries(const TruncSeries&)>& f) const;

    friend OrePsiDO operator+(const OrePsiDO& a, const OrePsiDO& b);
    friend OrePsiDO operator-(const OrePsiDO& a, const OrePsiDO& b);
    friend OrePsiDO operator*(const QRat& c, const OrePsiDO& a);
    /// Equality of every known coefficient inside its truncation box.
    friend bool operator==(const OrePsiDO& a, const OrePsiDO& b);
    /// True when every known coefficient vanishes inside its box.
    bool is_zero() const;

    /// "a_M*Dq^M + ... + a_{-K}*Dq^{-K} + O(Dq^{-K-1})".
    std::string to_string() const;

private:
    Calculus calc_;
    Coeffs coeffs_;
    int low_ = kNoTail;
};

/// Normal-ordered product. Exponents below max(low_a + max_b, low_b + max_a,
/// floor) are discarded and the result records that bound.
OrePsiDO compose(const OrePsiDO& a, const OrePsiDO& b, int floor);
/// Commutator a b - b a.
OrePsiDO commutator(const OrePsiDO& a, const OrePsiDO& b, int floor);
/// a^k for k >= 0.
OrePsiDO power(const OrePsiDO& a, int k, int floor);

/// Inverse of 1 + (negative powers); "not monic-normalized" otherwise.
OrePsiDO invert(const OrePsiDO& s, int floor);

/// V* = sum (Delta*)^i v_i with D_q* = -q^{-1} D_{1/q} (result in the q_inverse
/// calculus) and D_{1/q}* = -q D_q (result back in the q calculus).
OrePsiDO adjoint(const OrePsiDO& v, int floor);

struct Dressing {
    OrePsiDO L;
    std::vector<TruncSeries> a;  // a_0 .. a_order
};

/// Solves L S = S Delta degree by degree for L = Delta + sum_{i>=0} a_i Delta^{-i}.
Dressing dress(const OrePsiDO& s, int order);

/// S = sum_{j<=J} (p_j(-d~) tau / tau) Delta^{-j}; "tau not normalized" unless
/// tau has constant term 1.
OrePsiDO s_from_tau(const TruncSeries& tau, int J, Calculus calc = Calculus::q_calculus());

/// tau(t + c(x)), truncated by weight.
TruncSeries tau_q_build(const MultiPoly& tau, int weight_cap);

struct UFormula {
    TruncSeries u84;  // (1-D) w2 - w^2 + w D w + D_q w, w = d1 tau / tau
    TruncSeries u88;  // the same with 1 - D written as -(q-1) x D_q
};
UFormula u_formula(const TruncSeries& tau_q);

struct QKdV {
    TruncSeries s0;
    TruncSeries u;
    TruncSeries u1_residual;  // (q-1) x u - s0 - D s0
    TruncSeries flow_rhs;     // D_q u - D_q^2 s0 - D_q s0^2
};
QKdV qkdv_pack(const TruncSeries& tau);

/// Residuals of the expansions of D_q s0, D_q^2 s0, the product rule for
/// D_q h^2 (h = d1 D_q log tau) and D_q s0^2; all vanish identically.
struct QKdVExpansions {
    TruncSeries dq_s0;
    TruncSeries dq2_s0;
    TruncSeries dq_h2;
    TruncSeries dq_s0_sq;
};
QKdVExpansions qkdv_expansions(const TruncSeries& tau);

/// Classical zero curvature d_m B_n - d_n B_m + sign [B_n, B_m] with
/// B_k = (L^k)_+, L = S d1 S^{-1}, S from tau in the t1 calculus.
OrePsiDO zs_residual(const MultiPoly& tau, int m, int n, int depth, int weight_cap, int sign = 1);

/// Coefficientwise x -> x/q with Delta^{-i} weighted by q^i.
OrePsiDO substitute_x_over_q(const OrePsiDO& v);

/// d1 S + (L)_- S for S built from tau_q; reported only.
OrePsiDO sato_flow_residual(const TruncSeries& tau_q, int depth);

}  // namespace qkp

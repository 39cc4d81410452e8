#pragma once

// Sparse multivariate polynomials over Q(q) in x, t1..t7 and auxiliary
// variables, weighted truncation, Laurent objects in one spectral variable,
// Schur polynomials and Miwa shifts.

#include <array>
#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qkp/qfield.hpp"

namespace qkp {

// Variable slots. x has weight 1, t_i and y_i weight i; the two auxiliary
// slots carry inverse powers of a spectral variable (z, lambda, mu) and have
// weight 0, so residue extraction is exact per power.
inline constexpr int kNumSlots = 16;
inline constexpr int kMaxTimes = 7;
inline constexpr int kMaxY = 6;

namespace var {
inline constexpr int x = 0;
constexpr int t(int i) { return i; }
constexpr int y(int i) { return kMaxTimes + i; }
inline constexpr int aux0 = 14;
inline constexpr int aux1 = 15;
}  // namespace var

int slot_weight(int slot);
std::string slot_name(int slot);
bool is_time_slot(int slot);
bool is_y_slot(int slot);
bool is_aux_slot(int slot);

using Exponents = std::array<std::uint8_t, kNumSlots>;

int weight_of(const Exponents& e);
int aux_degree(const Exponents& e);
/// Weight carried by the y slots alone.
int y_weight_of(const Exponents& e);

/// Graded order: weighted degree, then auxiliary degree, then
/// lexicographic with x < t1 < t2 < ... (higher slot exponents compare later).
struct MonomialOrder {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

inline constexpr int kExact = INT_MAX / 4;

/// Truncation box. A monomial is retained iff its weight <= weight, its
/// weight plus auxiliary degree <= total, its y-weight <= y_weight, and each
/// auxiliary exponent is within its own bound.
struct Trunc {
    int weight = kExact;
    int total = kExact;
    std::array<int, 2> aux{kExact, kExact};
    int y_weight = kExact;

    static Trunc exact() { return {}; }
    static Trunc at_weight(int w) { return {w, kExact, {kExact, kExact}, kExact}; }
    static Trunc at_y_weight(int w) { return {kExact, kExact, {kExact, kExact}, w}; }

    bool admits(const Exponents& e) const;
    bool is_exact() const;
    Trunc meet(const Trunc& o) const;
    /// Bound left after differentiating by something of weight w.
    Trunc lowered(int w) const;
    friend bool operator==(const Trunc&, const Trunc&) = default;
};

class MultiPoly {
public:
    using Terms = std::map<Exponents, QRat, MonomialOrder>;

    MultiPoly() = default;
    MultiPoly(const QRat& c);  // NOLINT(google-explicit-constructor)
    MultiPoly(long c) : MultiPoly(QRat(c)) {}  // NOLINT(google-explicit-constructor)

    static MultiPoly variable(int slot, int power = 1);
    static MultiPoly monomial(const Exponents& e, const QRat& c);

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    QRat constant_term() const;
    QRat coeff(const Exponents& e) const;
    int max_weight() const;
    int degree_in(int slot) const;

    void add_term(const Exponents& e, const QRat& c);

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& b);
    MultiPoly& operator-=(const MultiPoly& b);
    MultiPoly& operator*=(const QRat& c);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(MultiPoly a, const QRat& c) { return a *= c; }
    friend MultiPoly operator*(const QRat& c, MultiPoly a) { return a *= c; }
    friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.terms_ == b.terms_; }

    MultiPoly partial(int slot) const;
    MultiPoly truncated(const Trunc& tr) const;
    MultiPoly filtered(const std::function<bool(const Exponents&)>& keep) const;
    MultiPoly map_coeffs(const std::function<QRat(const QRat&)>& f) const;
    /// Per-monomial rescaling: each term c*m becomes f(m)*c*m.
    MultiPoly scale_terms(const std::function<QRat(const Exponents&)>& f) const;
    /// Replaces slot variables by polynomials; the result is truncated to tr.
    MultiPoly substitute(std::span<const std::pair<int, MultiPoly>> repl, const Trunc& tr = Trunc::exact()) const;
    /// Coefficient of slot^k, with that slot removed.
    MultiPoly coefficient(int slot, int k) const;
    /// Multiplies by slot^k.
    MultiPoly shifted(int slot, int k) const;

    /// Canonical text: descending monomial order, coefficients parenthesized
    /// when they are not plain rationals.
    std::string to_string() const;

private:
    Terms terms_;
};

MultiPoly mul_truncated(const MultiPoly& a, const MultiPoly& b, const Trunc& tr);
MultiPoly pow(const MultiPoly& a, int k, const Trunc& tr = Trunc::exact());

/// Polynomial together with the box in which its coefficients are known.
class TruncSeries {
public:
    TruncSeries() = default;
    TruncSeries(MultiPoly p, Trunc tr = Trunc::exact());  // NOLINT(google-explicit-constructor)
    TruncSeries(const QRat& c) : TruncSeries(MultiPoly(c)) {}  // NOLINT(google-explicit-constructor)
    TruncSeries(long c) : TruncSeries(MultiPoly(c)) {}  // NOLINT(google-explicit-constructor)

    const MultiPoly& poly() const { return poly_; }
    const Trunc& trunc() const { return trunc_; }
    int weight_cap() const { return trunc_.weight; }

    TruncSeries with_trunc(const Trunc& tr) const { return {poly_, trunc_.meet(tr)}; }

    TruncSeries operator-() const { return {-poly_, trunc_}; }
    friend TruncSeries operator+(const TruncSeries& a, const TruncSeries& b);
    friend TruncSeries operator-(const TruncSeries& a, const TruncSeries& b);
    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b);
    friend TruncSeries operator*(const TruncSeries& a, const QRat& c) { return {a.poly_ * c, a.trunc_}; }
    friend TruncSeries operator*(const QRat& c, const TruncSeries& a) { return {a.poly_ * c, a.trunc_}; }
    TruncSeries& operator+=(const TruncSeries& b) { return *this = *this + b; }
    TruncSeries& operator-=(const TruncSeries& b) { return *this = *this - b; }
    TruncSeries& operator*=(const TruncSeries& b) { return *this = *this * b; }

    /// Equality of every coefficient inside the common box.
    friend bool operator==(const TruncSeries& a, const TruncSeries& b);
    bool is_zero() const { return poly_.is_zero(); }

    TruncSeries partial(int slot) const;
    /// 1/s for s with constant term 1 ("bad constant term" otherwise).
    TruncSeries inverse() const;
    TruncSeries map_coeffs(const std::function<QRat(const QRat&)>& f) const { return {poly_.map_coeffs(f), trunc_}; }

    std::string to_string() const;

private:
    MultiPoly poly_;
    Trunc trunc_;
};

/// Lower bound on the weight of the true series: its lowest known term, or
/// the first weight beyond the box.
int weight_floor(const TruncSeries& s);
/// Box in which a*b is known: an unknown term of a meets b at weight >= weight_floor(b).
Trunc product_trunc(const TruncSeries& a, const TruncSeries& b);

/// The truncation box must be finite in every direction the argument
/// occupies, otherwise these throw "unbounded series".
TruncSeries series_exp(const TruncSeries& s);
TruncSeries series_log(const TruncSeries& s);
TruncSeries operator/(const TruncSeries& a, const TruncSeries& b);

/// Schur polynomials p_0..p_n evaluated at args (args[k-1] plays y_k):
/// sum_n p_n z^n = exp(sum_k y_k z^k).
std::vector<TruncSeries> schur_all(int n, std::span<const TruncSeries> args);
TruncSeries schur_p(int n, std::span<const TruncSeries> args);
/// p_n(t1, t2, ...), an exact polynomial in the time slots.
MultiPoly schur_time(int n);
/// p_n(y1, y2, ...) in the y slots (used as a symbolic template).
MultiPoly schur_symbolic(int n);

/// p_n(sign * d~) target, with d~ = (d1, d2/2, d3/3, ...).
MultiPoly schur_diff_apply(int n, int sign, const MultiPoly& target);
TruncSeries schur_diff_apply(int n, int sign, const TruncSeries& target);
/// Applies a polynomial in the y slots as a constant-coefficient operator,
/// y_k -> sign * d_k / k.
MultiPoly apply_y_operator(const MultiPoly& op, int sign, const MultiPoly& target);

enum class AuxTag { z, lambda, mu };
std::string aux_name(AuxTag tag);

/// Finite-tail Laurent expansion in one spectral variable with coefficients
/// in x, t. Coefficients at exponents below low() are unknown; above it each
/// coefficient is known within its own truncation box. Exponents above top()
/// are exactly zero; without a top the positive side is assumed graded (a
/// coefficient of z^e, e > 0, has weight >= e), which is what the
/// exponential factors exp(+-xi) produce.
class LaurentObject {
public:
    using Coeffs = std::map<int, TruncSeries>;
    static constexpr int kNoTail = INT_MIN / 4;
    static constexpr int kNoTop = INT_MAX / 4;

    LaurentObject() = default;
    LaurentObject(AuxTag tag, Coeffs coeffs, int low = kNoTail, int top = kNoTop);

    /// Reads an auxiliary slot as an inverse power: slot^k becomes tag^{-k}.
    static LaurentObject from_aux(const MultiPoly& p, int slot, AuxTag tag, const Trunc& tr = Trunc::exact(),
                                  int low = kNoTail);

    AuxTag tag() const { return tag_; }
    int low() const { return low_; }
    int top() const { return top_; }
    const Coeffs& coeffs() const { return coeffs_; }
    TruncSeries coeff(int e) const;
    int max_exponent() const;
    int min_exponent() const;

    friend LaurentObject operator*(const LaurentObject& a, const LaurentObject& b);
    friend LaurentObject operator+(const LaurentObject& a, const LaurentObject& b);
    friend LaurentObject operator-(const LaurentObject& a, const LaurentObject& b);
    bool is_zero() const;

    std::string to_string() const;

private:
    AuxTag tag_ = AuxTag::z;
    Coeffs coeffs_;
    int low_ = kNoTail;
    int top_ = kNoTop;
};

/// Formal residue: the coefficient of tag^{-1}.
TruncSeries residue(const LaurentObject& l);

/// target(t + sign*[aux^{-1}]) by direct substitution t_i -> t_i + sign*a^i/i
/// (the inverse power a = aux^{-1} lives in the given auxiliary slot).
MultiPoly miwa_substitute(const MultiPoly& target, int sign, int aux_slot, const Trunc& tr = Trunc::exact());
/// The same shift as sum_k p_k(sign*d~) target * a^k.
MultiPoly miwa_operator_sum(const MultiPoly& target, int sign, int aux_slot, const Trunc& tr = Trunc::exact());
/// Computes the shift both ways and throws "Miwa mismatch" if they differ.
MultiPoly miwa_shift_poly(const MultiPoly& target, int sign, int aux_slot);
LaurentObject miwa_shift(const MultiPoly& target, int sign, AuxTag tag);

/// xi(t, z) = sum_{k>=1} t_k z^k, truncated by weight.
LaurentObject xi(AuxTag tag, int weight_cap);
/// exp(+-xi(t, z)) with coefficients p_e(+-t), truncated by weight.
LaurentObject exp_xi(AuxTag tag, int sign, int weight_cap);

/// (1-q)^k / (k (1-q^k)), the k-th component of c(x) = [x]_q without x^k.
QRat c_coefficient(int k);
/// (1-q)^k x^k / (k (1-q^k)).
MultiPoly c_of_x(int k);
/// exp_q(xz) = exp(sum_k c_k (xz)^k); z is carried by the aux0 slot as a
/// positive power, truncation is by x-degree.
TruncSeries eq_exp(int weight_cap);
/// Coefficient of z^k in exp_q(xz) exp(xi(t, z)).
MultiPoly qschur(int k);

}  // namespace qkp

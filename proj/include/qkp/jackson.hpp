#pragma once

// The dilation D f(x) = f(qx), the Jackson derivative D_q, the difference
// operator D - 1 and conversions between powers of D and of D_q.

#include <climits>
#include <map>
#include <string>
#include <vector>

#include "qkp/series.hpp"

namespace qkp {

MultiPoly apply_D(const MultiPoly& p, int power = 1);
MultiPoly apply_Dq(const MultiPoly& p);
/// x^n -> x^{n+1}/[n+1]_q.
MultiPoly apply_Dq_inverse(const MultiPoly& p);
/// D_q^n for any integer n (negative powers use apply_Dq_inverse).
MultiPoly apply_Dq_power(const MultiPoly& p, int n);
MultiPoly apply_Delta(const MultiPoly& p);
/// D_q with q replaced by 1/q.
MultiPoly apply_D1q(const MultiPoly& p);
/// Applies the field automorphism q -> 1/q to every coefficient.
MultiPoly invert_q(const MultiPoly& p);

TruncSeries apply_D(const TruncSeries& s, int power = 1);
TruncSeries apply_Dq(const TruncSeries& s);
TruncSeries apply_D1q(const TruncSeries& s);

/// Normal form sum_m c_m(x) D_q^m, functions on the left. Entries with
/// m < low are unknown (truncated negative tail); exact_degree bounds the
/// x-degree of inputs on which a truncated positive tail is still exact.
struct OpNormal {
    static constexpr int kNoTail = INT_MIN / 4;
    static constexpr int kAnyDegree = INT_MAX / 4;

    std::map<int, MultiPoly> terms;
    int low = kNoTail;
    int exact_degree = kAnyDegree;

    static OpNormal identity();
    static OpNormal dq_power(int m);
    static OpNormal multiplication(const MultiPoly& f);

    bool is_exact() const { return low == kNoTail && exact_degree == kAnyDegree; }
    MultiPoly coeff(int m) const;
    /// Applies to a polynomial; throws "truncated operator" if the input lies
    /// outside the range where the truncation is exact.
    MultiPoly apply(const MultiPoly& p) const;

    friend OpNormal operator+(const OpNormal& a, const OpNormal& b);
    friend OpNormal operator-(const OpNormal& a, const OpNormal& b);
    friend bool operator==(const OpNormal& a, const OpNormal& b);

    /// "c_0 + (c_1)*Dq + (c_2)*Dq^2 ..." in ascending powers.
    std::string to_string() const;
};

/// Factored text in descending powers, e.g. "q(q-1)^2x^2D_q^2+(q^2-1)xD_q+1".
/// Each coefficient must be c(q) x^m with polynomial c, written as
/// integer * q^a * (q-1)^e1 * (q^k-1)^ek (largest k divided out first) * rest.
/// Throws "not factorable" otherwise.
std::string to_factored_string(const OpNormal& op);

/// D^n = sum_m [n m]_q (q-1)^m q^{m(m-1)/2} x^m D_q^m. For n < 0 the sum is
/// infinite and is cut at m <= depth (exact on x-degree <= depth).
OpNormal dn_to_dq(int n, int depth = 6);

/// D_q^n f = sum_k [n k]_q D^{n-k}(D_q^k f) D_q^{n-k}; for n < 0 the sum is
/// cut at k <= depth unless D_q^{depth+1} f vanishes.
OpNormal qleibniz(int n, const MultiPoly& f, int depth = 6);

/// Composition of normal forms via qleibniz.
OpNormal compose(const OpNormal& a, const OpNormal& b, int depth = 6);

/// x^{-n} sum_k a_k D^k: the shape of D_q^n written in dilations.
struct DForm {
    int x_power = 0;  // the prefactor is x^{x_power}, x_power <= 0
    std::map<int, QRat> d_coeffs;

    /// Throws "x-degree too low" when some monomial has x-degree < -x_power.
    MultiPoly apply(const MultiPoly& p) const;
};

/// D_q^n = q^{-n(n-1)/2} / (x^n (q-1)^n) sum_m (-1)^m q^{m(m-1)/2} [n m]_q D^{n-m}.
DForm dqn_to_d(int n);

/// Formal composition of letters, applied right to left.
class OpWord {
public:
    enum class Kind { D, Dq, Mul };
    struct Letter {
        Kind kind;
        int power = 1;
        MultiPoly f;
    };

    OpWord() = default;
    explicit OpWord(std::vector<Letter> letters) : letters_(std::move(letters)) {}

    static Letter D(int power = 1) { return {Kind::D, power, {}}; }
    static Letter Dq(int power = 1) { return {Kind::Dq, power, {}}; }
    static Letter Mul(const MultiPoly& f) { return {Kind::Mul, 1, f}; }

    const std::vector<Letter>& letters() const { return letters_; }
    MultiPoly apply(const MultiPoly& p) const;
    OpNormal normal_form(int depth = 6) const;

private:
    std::vector<Letter> letters_;
};

}  // namespace qkp

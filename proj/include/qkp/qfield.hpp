#pragma once

// Exact arithmetic in Q(q): rational functions in the deformation parameter q.

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace qkp {

/// Dense univariate polynomial in q with arbitrary-precision integer
/// coefficients. coeffs[k] is the coefficient of q^k; no trailing zeros.
class ZPoly {
public:
    ZPoly() = default;
    ZPoly(long c);  // NOLINT(google-explicit-constructor)
    explicit ZPoly(mpz_class c);
    explicit ZPoly(std::vector<mpz_class> coeffs);

    static ZPoly monomial(mpz_class c, std::size_t degree);

    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.size() <= 1; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const mpz_class& lead() const { return coeffs_.back(); }
    const std::vector<mpz_class>& coeffs() const { return coeffs_; }
    mpz_class coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : mpz_class(0); }

    ZPoly operator-() const;
    friend ZPoly operator+(const ZPoly& a, const ZPoly& b);
    friend ZPoly operator-(const ZPoly& a, const ZPoly& b);
    friend ZPoly operator*(const ZPoly& a, const ZPoly& b);
    friend ZPoly operator*(const ZPoly& a, const mpz_class& c);
    friend bool operator==(const ZPoly& a, const ZPoly& b) = default;

    mpz_class content() const;
    /// Divides every coefficient by c; c must divide all of them.
    ZPoly exact_div(const mpz_class& c) const;
    /// Exact division in Z[q]; throws if b does not divide *this.
    ZPoly exact_div(const ZPoly& b) const;
    /// Polynomial with coefficients reversed and trailing zeros of the
    /// original (low powers of q) removed first.
    ZPoly reversed() const;
    /// Number of leading zero low-order coefficients (the q-adic valuation).
    std::size_t valuation() const;

    mpq_class eval(const mpq_class& v) const;
    std::string to_string() const;

private:
    void trim();
    std::vector<mpz_class> coeffs_;
};

/// Primitive, positive-leading gcd in Z[q] (content gcd times the
/// primitive-part gcd from a primitive pseudo-remainder sequence).
ZPoly gcd(const ZPoly& a, const ZPoly& b);

/// Element of Q(q), kept in canonical form: gcd(num, den) = 1 and the
/// leading coefficient of den is positive. Equality is structural.
class QRat {
public:
    QRat() : num_(0), den_(1) {}
    QRat(long n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
    explicit QRat(const mpq_class& c);
    QRat(ZPoly num, ZPoly den);

    static QRat q() { return QRat(ZPoly::monomial(1, 1), ZPoly(1)); }
    static QRat q_pow(long k);
    static QRat frac(long n, long d) { return QRat(mpq_class(n, d)); }

    const ZPoly& num() const { return num_; }
    const ZPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_ == den_; }
    /// True when the value does not depend on q.
    bool is_rational() const { return num_.is_constant() && den_.is_constant(); }
    mpq_class as_rational() const;

    QRat operator-() const;
    QRat& operator+=(const QRat& b);
    QRat& operator-=(const QRat& b);
    QRat& operator*=(const QRat& b);
    QRat& operator/=(const QRat& b);
    friend QRat operator+(QRat a, const QRat& b) { return a += b; }
    friend QRat operator-(QRat a, const QRat& b) { return a -= b; }
    friend QRat operator*(QRat a, const QRat& b) { return a *= b; }
    friend QRat operator/(QRat a, const QRat& b) { return a /= b; }
    friend bool operator==(const QRat& a, const QRat& b) = default;

    QRat inverse() const;
    QRat pow(long k) const;
    /// Value at q = v; throws "pole at evaluation point" when den(v) = 0.
    mpq_class eval_at(const mpq_class& v) const;
    /// The field automorphism q -> 1/q.
    QRat invert_q() const;

    std::string to_string() const;

private:
    void canonicalize();
    ZPoly num_;
    ZPoly den_;
};

std::ostream& operator<<(std::ostream& os, const QRat& a);

/// Total order used only for deterministic containers (not a field order).
std::strong_ordering compare(const QRat& a, const QRat& b);

/// q-integer [n]_q = (q^n - 1)/(q - 1), any integer n.
QRat qint(long n);
/// q-factorial [1]_q ... [n]_q for n >= 0.
QRat qfactorial(long n);
/// Gaussian binomial [n]_q ... [n-m+1]_q / ([1]_q ... [m]_q), m >= 0.
QRat qbinom(long n, long m);
/// Ordinary (generalized) binomial n(n-1)...(n-m+1)/m!, m >= 0.
mpq_class binom(long n, long m);

}  // namespace qkp

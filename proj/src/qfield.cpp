#include "qkp/qfield.hpp"

#include <algorithm>
#include <ostream>
#include <utility>

#include "qkp/error.hpp"

namespace qkp {

// ---------------------------------------------------------------- ZPoly

ZPoly::ZPoly(long c) {
    if (c != 0) coeffs_.emplace_back(c);
}

ZPoly::ZPoly(mpz_class c) {
    if (c != 0) coeffs_.push_back(std::move(c));
}

ZPoly::ZPoly(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

ZPoly ZPoly::monomial(mpz_class c, std::size_t degree) {
    ZPoly p;
    if (c == 0) return p;
    p.coeffs_.assign(degree + 1, mpz_class(0));
    p.coeffs_[degree] = std::move(c);
    return p;
}

void ZPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

ZPoly ZPoly::operator-() const {
    ZPoly r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

ZPoly operator+(const ZPoly& a, const ZPoly& b) {
    const auto& big = a.coeffs_.size() >= b.coeffs_.size() ? a : b;
    const auto& small = a.coeffs_.size() >= b.coeffs_.size() ? b : a;
    ZPoly r = big;
    for (std::size_t i = 0; i < small.coeffs_.size(); ++i) r.coeffs_[i] += small.coeffs_[i];
    r.trim();
    return r;
}

ZPoly operator-(const ZPoly& a, const ZPoly& b) { return a + (-b); }

ZPoly operator*(const ZPoly& a, const ZPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpz_class> out(a.coeffs_.size() + b.coeffs_.size() - 1, mpz_class(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        if (a.coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return ZPoly(std::move(out));
}

ZPoly operator*(const ZPoly& a, const mpz_class& c) {
    if (c == 0) return {};
    ZPoly r = a;
    for (auto& x : r.coeffs_) x *= c;
    return r;
}

mpz_class ZPoly::content() const {
    mpz_class g = 0;
    for (const auto& c : coeffs_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

ZPoly ZPoly::exact_div(const mpz_class& c) const {
    ZPoly r = *this;
    for (auto& x : r.coeffs_) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
    return r;
}

ZPoly ZPoly::exact_div(const ZPoly& b) const {
    if (b.is_zero()) throw MathError("zero divisor");
    if (is_zero()) return {};
    if (degree() < b.degree()) throw MathError("inexact polynomial division");
    std::vector<mpz_class> rem = coeffs_;
    std::vector<mpz_class> quot(coeffs_.size() - b.coeffs_.size() + 1, mpz_class(0));
    const std::size_t db = b.coeffs_.size() - 1;
    for (std::size_t k = quot.size(); k-- > 0;) {
        const mpz_class& top = rem[k + db];
        if (top == 0) continue;
        if (!mpz_divisible_p(top.get_mpz_t(), b.lead().get_mpz_t())) throw MathError("inexact polynomial division");
        mpz_class c = top / b.lead();
        for (std::size_t j = 0; j <= db; ++j) rem[k + j] -= c * b.coeffs_[j];
        quot[k] = std::move(c);
    }
    for (const auto& r : rem)
        if (r != 0) throw MathError("inexact polynomial division");
    return ZPoly(std::move(quot));
}

std::size_t ZPoly::valuation() const {
    std::size_t v = 0;
    while (v < coeffs_.size() && coeffs_[v] == 0) ++v;
    return v;
}

ZPoly ZPoly::reversed() const {
    std::vector<mpz_class> r(coeffs_.begin() + static_cast<std::ptrdiff_t>(valuation()), coeffs_.end());
    std::reverse(r.begin(), r.end());
    return ZPoly(std::move(r));
}

mpq_class ZPoly::eval(const mpq_class& v) const {
    mpq_class acc = 0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * v + coeffs_[k];
    return acc;
}

std::string ZPoly::to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t k = coeffs_.size(); k-- > 0;) {
        const mpz_class& c = coeffs_[k];
        if (c == 0) continue;
        const bool neg = c < 0;
        mpz_class mag = abs(c);
        if (!out.empty()) out += neg ? "-" : "+";
        else if (neg) out += "-";
        if (k == 0) {
            out += mag.get_str();
            continue;
        }
        if (mag != 1) out += mag.get_str() + "*";
        out += "q";
        if (k > 1) out += "^" + std::to_string(k);
    }
    return out;
}

namespace {

ZPoly primitive_part(const ZPoly& p) {
    if (p.is_zero()) return p;
    mpz_class c = p.content();
    if (p.lead() < 0) c = -c;
    return p.exact_div(c);
}

// Pseudo-remainder of a by b (deg a >= deg b), made primitive.
ZPoly prem_primitive(ZPoly a, const ZPoly& b) {
    const int db = b.degree();
    while (!a.is_zero() && a.degree() >= db) {
        const int shift = a.degree() - db;
        mpz_class la = a.lead();
        a = a * b.lead() - ZPoly::monomial(la, static_cast<std::size_t>(shift)) * b;
        a = primitive_part(a);
    }
    return a;
}

}  // namespace

ZPoly gcd(const ZPoly& a, const ZPoly& b) {
    if (a.is_zero()) return b.is_zero() ? ZPoly() : (b.lead() < 0 ? -b : b);
    if (b.is_zero()) return a.lead() < 0 ? -a : a;
    mpz_class c;
    mpz_class ca = a.content(), cb = b.content();
    mpz_gcd(c.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
    if (a.is_constant() || b.is_constant()) return ZPoly(c);
    ZPoly x = primitive_part(a), y = primitive_part(b);
    if (x.degree() < y.degree()) std::swap(x, y);
    while (!y.is_zero()) {
        ZPoly r = prem_primitive(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return x * c;
}

// ---------------------------------------------------------------- QRat

QRat::QRat(const mpq_class& c) : num_(c.get_num()), den_(c.get_den()) {}

QRat::QRat(ZPoly num, ZPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw MathError("zero divisor");
    canonicalize();
}

void QRat::canonicalize() {
    if (num_.is_zero()) {
        den_ = ZPoly(1);
        return;
    }
    if (num_.is_constant() && den_.is_constant()) {
        mpq_class v(num_.lead(), den_.lead());
        v.canonicalize();
        num_ = ZPoly(v.get_num());
        den_ = ZPoly(v.get_den());
        return;
    }
    ZPoly g = gcd(num_, den_);
    if (!(g == ZPoly(1))) {
        num_ = num_.exact_div(g);
        den_ = den_.exact_div(g);
    }
    if (den_.lead() < 0) {
        num_ = -num_;
        den_ = -den_;
    }
}

QRat QRat::q_pow(long k) {
    if (k >= 0) return QRat(ZPoly::monomial(1, static_cast<std::size_t>(k)), ZPoly(1));
    QRat r;
    r.num_ = ZPoly(1);
    r.den_ = ZPoly::monomial(1, static_cast<std::size_t>(-k));
    return r;
}

mpq_class QRat::as_rational() const {
    if (!is_rational()) throw MathError("value depends on q");
    if (num_.is_zero()) return 0;
    mpq_class v(num_.lead(), den_.lead());
    v.canonicalize();
    return v;
}

QRat QRat::operator-() const {
    QRat r = *this;
    r.num_ = -r.num_;
    return r;
}

QRat& QRat::operator+=(const QRat& b) {
    if (b.is_zero()) return *this;
    if (is_zero()) return *this = b;
    if (is_rational() && b.is_rational()) return *this = QRat(as_rational() + b.as_rational());
    if (den_ == b.den_) {
        num_ = num_ + b.num_;
    } else {
        num_ = num_ * b.den_ + b.num_ * den_;
        den_ = den_ * b.den_;
    }
    canonicalize();
    return *this;
}

QRat& QRat::operator-=(const QRat& b) { return *this += -b; }

QRat& QRat::operator*=(const QRat& b) {
    if (is_zero() || b.is_zero()) return *this = QRat();
    if (is_rational() && b.is_rational()) return *this = QRat(as_rational() * b.as_rational());
    if (b.is_rational()) {
        mpq_class c = b.as_rational();
        num_ = num_ * c.get_num();
        den_ = den_ * c.get_den();
    } else {
        num_ = num_ * b.num_;
        den_ = den_ * b.den_;
    }
    canonicalize();
    return *this;
}

QRat& QRat::operator/=(const QRat& b) { return *this *= b.inverse(); }

QRat QRat::inverse() const {
    if (is_zero()) throw MathError("zero divisor");
    QRat r;
    r.num_ = den_;
    r.den_ = num_;
    if (r.den_.lead() < 0) {
        r.num_ = -r.num_;
        r.den_ = -r.den_;
    }
    return r;
}

QRat QRat::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    QRat acc(1), base = *this;
    while (k > 0) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

mpq_class QRat::eval_at(const mpq_class& v) const {
    mpq_class d = den_.eval(v);
    if (d == 0) throw MathError("pole at evaluation point");
    mpq_class r = num_.eval(v) / d;
    r.canonicalize();
    return r;
}

QRat QRat::invert_q() const {
    if (is_rational()) return *this;
    // p(1/q) = q^{-deg p} * reversed(p)
    const long total = static_cast<long>(den_.degree()) - num_.degree();
    ZPoly n = num_.reversed(), d = den_.reversed();
    if (total >= 0) n = n * ZPoly::monomial(1, static_cast<std::size_t>(total));
    else d = d * ZPoly::monomial(1, static_cast<std::size_t>(-total));
    return QRat(std::move(n), std::move(d));
}

std::string QRat::to_string() const {
    if (den_ == ZPoly(1)) return num_.to_string();
    auto single_term = [](const ZPoly& p) {
        return std::count_if(p.coeffs().begin(), p.coeffs().end(), [](const mpz_class& c) { return c != 0; }) == 1;
    };
    std::string n = num_.to_string();
    if (!single_term(num_) || (num_.lead() < 0 && !num_.is_constant())) n = "(" + n + ")";
    std::string d = den_.to_string();
    const bool bare = den_.is_constant() || (single_term(den_) && den_.lead() == 1);
    if (!bare) d = "(" + d + ")";
    return n + "/" + d;
}

std::ostream& operator<<(std::ostream& os, const QRat& a) { return os << a.to_string(); }

std::strong_ordering compare(const QRat& a, const QRat& b) {
    auto cmp_poly = [](const ZPoly& x, const ZPoly& y) {
        if (auto c = x.degree() <=> y.degree(); c != 0) return c;
        for (std::size_t k = x.coeffs().size(); k-- > 0;) {
            int s = cmp(x.coeffs()[k], y.coeffs()[k]);
            if (s != 0) return s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    };
    if (auto c = cmp_poly(a.num(), b.num()); c != 0) return c;
    return cmp_poly(a.den(), b.den());
}

// ------------------------------------------------------ q-combinatorics

QRat qint(long n) {
    if (n == 0) return QRat();
    const std::size_t m = static_cast<std::size_t>(n > 0 ? n : -n);
    std::vector<mpz_class> ones(m, mpz_class(1));
    ZPoly sum(std::move(ones));
    if (n > 0) return QRat(sum, ZPoly(1));
    return QRat(-sum, ZPoly::monomial(1, m));
}

QRat qfactorial(long n) {
    QRat acc(1);
    for (long k = 1; k <= n; ++k) acc *= qint(k);
    return acc;
}

QRat qbinom(long n, long m) {
    if (m < 0) throw MathError("qbinom requires m >= 0");
    if (n >= 0 && m > n) return QRat();
    ZPoly num(1), den(1);
    for (long k = 0; k < m; ++k) {
        QRat top = qint(n - k), bot = qint(k + 1);
        num = num * top.num() * bot.den();
        den = den * top.den() * bot.num();
    }
    return QRat(std::move(num), std::move(den));
}

mpq_class binom(long n, long m) {
    if (m < 0) return 0;
    mpq_class acc = 1;
    for (long k = 0; k < m; ++k) acc = acc * (n - k) / (k + 1);
    acc.canonicalize();
    return acc;
}

}  // namespace qkp

#include "qkp/jackson.hpp"

#include <algorithm>

#include "qkp/error.hpp"

namespace qkp {

MultiPoly apply_D(const MultiPoly& p, int power) {
    if (power == 0) return p;
    return p.scale_terms([power](const Exponents& e) { return QRat::q_pow(static_cast<long>(e[var::x]) * power); });
}

MultiPoly apply_Dq(const MultiPoly& p) {
    MultiPoly r;
    for (const auto& [e, c] : p.terms()) {
        if (e[var::x] == 0) continue;
        Exponents f = e;
        f[var::x] -= 1;
        r.add_term(f, c * qint(e[var::x]));
    }
    return r;
}

MultiPoly apply_Dq_inverse(const MultiPoly& p) {
    MultiPoly r;
    for (const auto& [e, c] : p.terms()) {
        Exponents f = e;
        if (f[var::x] == 255) throw MathError("exponent overflow");
        f[var::x] += 1;
        r.add_term(f, c / qint(f[var::x]));
    }
    return r;
}

MultiPoly apply_Dq_power(const MultiPoly& p, int n) {
    MultiPoly r = p;
    for (int i = 0; i < n && !r.is_zero(); ++i) r = apply_Dq(r);
    for (int i = 0; i < -n; ++i) r = apply_Dq_inverse(r);
    return r;
}

MultiPoly apply_Delta(const MultiPoly& p) { return apply_D(p, 1) - p; }

MultiPoly invert_q(const MultiPoly& p) {
    return p.map_coeffs([](const QRat& c) { return c.invert_q(); });
}

MultiPoly apply_D1q(const MultiPoly& p) { return invert_q(apply_Dq(invert_q(p))); }

TruncSeries apply_D(const TruncSeries& s, int power) { return {apply_D(s.poly(), power), s.trunc()}; }
TruncSeries apply_Dq(const TruncSeries& s) { return {apply_Dq(s.poly()), s.trunc().lowered(1)}; }
TruncSeries apply_D1q(const TruncSeries& s) { return {apply_D1q(s.poly()), s.trunc().lowered(1)}; }

// ---- OpNormal

OpNormal OpNormal::identity() { return dq_power(0); }

OpNormal OpNormal::dq_power(int m) {
    OpNormal r;
    r.terms.emplace(m, MultiPoly(1));
    return r;
}

OpNormal OpNormal::multiplication(const MultiPoly& f) {
    OpNormal r;
    if (!f.is_zero()) r.terms.emplace(0, f);
    return r;
}

MultiPoly OpNormal::coeff(int m) const {
    if (m < low) throw MathError("coefficient outside known range");
    auto it = terms.find(m);
    return it == terms.end() ? MultiPoly() : it->second;
}

MultiPoly OpNormal::apply(const MultiPoly& p) const {
    if (low != kNoTail || p.degree_in(var::x) > exact_degree) throw MathError("truncated operator");
    MultiPoly r;
    for (const auto& [m, c] : terms) r += c * apply_Dq_power(p, m);
    return r;
}

namespace {

void add_into(std::map<int, MultiPoly>& terms, int m, const MultiPoly& c) {
    if (c.is_zero()) return;
    auto& slot = terms[m];
    slot += c;
    if (slot.is_zero()) terms.erase(m);
}

OpNormal combine(const OpNormal& a, const OpNormal& b, int sign) {
    OpNormal r = a;
    for (const auto& [m, c] : b.terms) add_into(r.terms, m, sign > 0 ? c : -c);
    r.low = std::max(a.low, b.low);
    r.exact_degree = std::min(a.exact_degree, b.exact_degree);
    std::erase_if(r.terms, [&](const auto& kv) { return kv.first < r.low; });
    return r;
}

}  // namespace

OpNormal operator+(const OpNormal& a, const OpNormal& b) { return combine(a, b, 1); }
OpNormal operator-(const OpNormal& a, const OpNormal& b) { return combine(a, b, -1); }

bool operator==(const OpNormal& a, const OpNormal& b) {
    const int low = std::max(a.low, b.low);
    auto visible = [low](const OpNormal& o) {
        std::map<int, MultiPoly> t;
        for (const auto& [m, c] : o.terms)
            if (m >= low) t.emplace(m, c);
        return t;
    };
    return visible(a) == visible(b);
}

std::string OpNormal::to_string() const {
    std::string out;
    for (const auto& [m, c] : terms) {
        if (!out.empty()) out += " + ";
        if (m == 0) {
            out += c.size() > 1 ? "(" + c.to_string() + ")" : c.to_string();
            continue;
        }
        const std::string op = m == 1 ? "Dq" : "Dq^" + std::to_string(m);
        if (c == MultiPoly(1)) out += op;
        else if (c.size() == 1 && c.to_string().find(' ') == std::string::npos) out += c.to_string() + "*" + op;
        else out += "(" + c.to_string() + ")*" + op;
    }
    if (out.empty()) out = "0";
    if (low != kNoTail) out += " + O(Dq^" + std::to_string(low - 1) + ")";
    return out;
}

namespace {

// P is divisible by q^k - 1 iff the coefficient sums over each residue class mod k vanish.
bool divisible_by_qk_minus_1(const ZPoly& p, int k) {
    std::vector<mpz_class> sums(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) sums[i % static_cast<std::size_t>(k)] += p.coeffs()[i];
    return std::all_of(sums.begin(), sums.end(), [](const mpz_class& v) { return v == 0; });
}

std::string with_power(const std::string& base, int e) {
    return e == 1 ? base : base + "^" + std::to_string(e);
}

std::string factored_coeff(const QRat& c) {
    if (!c.den().is_constant() || c.den().coeff(0) != 1) throw MathError("not factorable");
    ZPoly p = c.num();
    std::string out;
    mpz_class content = p.content();
    if (p.lead() < 0) content = -content;
    p = p.exact_div(content);
    if (content == -1) out += "-";
    else if (content != 1) out += content.get_str();
    const std::size_t a = p.valuation();
    if (a > 0) {
        p = p.exact_div(ZPoly::monomial(1, a));
        out += with_power("q", static_cast<int>(a));
    }
    std::vector<std::pair<int, int>> cyclic;  // (k, multiplicity)
    for (int k = p.degree(); k >= 1; --k) {
        int e = 0;
        const ZPoly f = ZPoly::monomial(1, static_cast<std::size_t>(k)) - ZPoly(1);
        while (p.degree() >= k && divisible_by_qk_minus_1(p, k)) {
            p = p.exact_div(f);
            ++e;
        }
        if (e > 0) cyclic.emplace_back(k, e);
    }
    std::reverse(cyclic.begin(), cyclic.end());
    for (const auto& [k, e] : cyclic) out += with_power(k == 1 ? "(q-1)" : "(q^" + std::to_string(k) + "-1)", e);
    if (!(p == ZPoly(1))) out += "(" + p.to_string() + ")";
    return out;
}

}  // namespace

std::string to_factored_string(const OpNormal& op) {
    if (!op.is_exact()) throw MathError("not factorable");
    std::string out;
    for (auto it = op.terms.rbegin(); it != op.terms.rend(); ++it) {
        const auto& [m, c] = *it;
        if (c.size() != 1) throw MathError("not factorable");
        const auto& [e, coeff] = *c.terms().begin();
        Exponents xs{};
        xs[var::x] = e[var::x];
        if (e != xs) throw MathError("not factorable");
        std::string scalar = factored_coeff(coeff);
        std::string vars;
        if (e[var::x] > 0) vars += with_power("x", e[var::x]);
        if (m != 0) vars += with_power("D_q", m);
        if (vars.empty() && (scalar.empty() || scalar == "-")) scalar += "1";
        std::string term = scalar + vars;
        if (!out.empty() && term[0] != '-') out += "+";
        out += term;
    }
    return out.empty() ? "0" : out;
}

OpNormal dn_to_dq(int n, int depth) {
    OpNormal r;
    const int top = n >= 0 ? n : depth;
    const QRat qm1 = QRat::q() - 1;
    for (int m = 0; m <= top; ++m) {
        const QRat c = qbinom(n, m) * qm1.pow(m) * QRat::q_pow(static_cast<long>(m) * (m - 1) / 2);
        add_into(r.terms, m, MultiPoly::variable(var::x, m) * c);
    }
    if (n < 0) r.exact_degree = depth;
    return r;
}

OpNormal qleibniz(int n, const MultiPoly& f, int depth) {
    OpNormal r;
    MultiPoly dk = f;
    const int top = n >= 0 ? n : depth;
    for (int k = 0; k <= top && !dk.is_zero(); ++k) {
        add_into(r.terms, n - k, apply_D(dk, n - k) * qbinom(n, k));
        dk = apply_Dq(dk);
    }
    if (n < 0 && !dk.is_zero()) {
        r.low = n - depth;
        std::erase_if(r.terms, [&](const auto& kv) { return kv.first < r.low; });
    }
    return r;
}

OpNormal compose(const OpNormal& a, const OpNormal& b, int depth) {
    OpNormal r;
    if (a.terms.empty() || b.terms.empty()) return r;
    const int max_a = a.terms.rbegin()->first, max_b = b.terms.rbegin()->first;
    int low = OpNormal::kNoTail;
    if (a.low != OpNormal::kNoTail) low = std::max(low, a.low + max_b);
    if (b.low != OpNormal::kNoTail) low = std::max(low, b.low + max_a);
    int shift_b = INT_MIN;
    for (const auto& [j, c] : b.terms) shift_b = std::max(shift_b, c.degree_in(var::x) - j);
    for (const auto& [i, ai] : a.terms) {
        for (const auto& [j, bj] : b.terms) {
            const OpNormal l = qleibniz(i, bj, depth);
            if (l.low != OpNormal::kNoTail) low = std::max(low, l.low + j);
            for (const auto& [m, c] : l.terms) add_into(r.terms, m + j, ai * c);
        }
    }
    r.low = low;
    std::erase_if(r.terms, [&](const auto& kv) { return kv.first < low; });
    r.exact_degree = std::min(b.exact_degree, a.exact_degree == OpNormal::kAnyDegree
                                                  ? OpNormal::kAnyDegree
                                                  : a.exact_degree - std::max(shift_b, 0));
    return r;
}

// ---- DForm

MultiPoly DForm::apply(const MultiPoly& p) const {
    MultiPoly s;
    for (const auto& [k, a] : d_coeffs) s += apply_D(p, k) * a;
    MultiPoly r;
    for (const auto& [e, c] : s.terms()) {
        if (e[var::x] < -x_power) throw MathError("x-degree too low");
        Exponents f = e;
        f[var::x] = static_cast<std::uint8_t>(e[var::x] + x_power);
        r.add_term(f, c);
    }
    return r;
}

DForm dqn_to_d(int n) {
    if (n < 1) throw MathError("dqn_to_d needs n >= 1");
    DForm r;
    r.x_power = -n;
    const QRat pre = QRat::q_pow(-static_cast<long>(n) * (n - 1) / 2) / (QRat::q() - 1).pow(n);
    for (int m = 0; m <= n; ++m) {
        const QRat c = pre * QRat(m % 2 ? -1 : 1) * QRat::q_pow(static_cast<long>(m) * (m - 1) / 2) * qbinom(n, m);
        r.d_coeffs.emplace(n - m, c);
    }
    return r;
}

// ---- OpWord

MultiPoly OpWord::apply(const MultiPoly& p) const {
    MultiPoly r = p;
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
        switch (it->kind) {
            case Kind::D: r = apply_D(r, it->power); break;
            case Kind::Dq: r = apply_Dq_power(r, it->power); break;
            case Kind::Mul: r = it->f * r; break;
        }
    }
    return r;
}

OpNormal OpWord::normal_form(int depth) const {
    OpNormal r = OpNormal::identity();
    for (const auto& l : letters_) {
        OpNormal next;
        switch (l.kind) {
            case Kind::D: next = dn_to_dq(l.power, depth); break;
            case Kind::Dq: next = OpNormal::dq_power(l.power); break;
            case Kind::Mul: next = OpNormal::multiplication(l.f); break;
        }
        r = compose(r, next, depth);
    }
    return r;
}

}  // namespace qkp

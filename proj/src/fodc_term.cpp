#include <algorithm>
#include <cctype>
#include <set>

#include "qkp/error.hpp"
#include "qkp/fodc.hpp"

namespace qkp::fodc {

namespace {

bool is_derivation(LetterKind k) {
    return k == LetterKind::partial || k == LetterKind::jackson || k == LetterKind::jackson_hat;
}

// [n] in base Q = q^s: (Q^n - 1)/(Q - 1), any integer n.
QRat step_int(int s, long n) {
    if (n == 0) return QRat();
    return (QRat::q_pow(s * n) - QRat(1)) / (QRat::q_pow(s) - QRat(1));
}

void mul_monomial_into(Monomial& acc, const Monomial& m) {
    for (const auto& [a, e] : m) {
        int& slot = acc[a];
        slot += e;
        if (slot == 0) acc.erase(a);
    }
}

}  // namespace

std::pair<QRat, Word> canonical_word(Word w) {
    QRat factor(1);
    std::stable_sort(w.begin(), w.end(), [](const Letter& a, const Letter& b) { return a.var < b.var; });
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < w.size(); ++i) {
            Letter& a = w[i];
            if ((a.kind == LetterKind::dilation || a.kind == LetterKind::shift) && a.power == 0) {
                w.erase(w.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
            if (i + 1 == w.size()) break;
            Letter& b = w[i + 1];
            if (a.var != b.var) continue;
            if (a.kind == LetterKind::dilation && b.kind == LetterKind::dilation) {
                a.power += b.power;
                w.erase(w.begin() + static_cast<long>(i) + 1);
                changed = true;
                break;
            }
            if (a.kind == LetterKind::shift && b.kind == LetterKind::shift && a.param == b.param) {
                a.power += b.power;
                w.erase(w.begin() + static_cast<long>(i) + 1);
                changed = true;
                break;
            }
            // d D^k = q^k D^k d for every derivation letter
            if (is_derivation(a.kind) && b.kind == LetterKind::dilation) {
                factor *= QRat::q_pow(b.power);
                std::swap(a, b);
                changed = true;
                break;
            }
            if (a.kind == LetterKind::partial && b.kind == LetterKind::shift) {
                std::swap(a, b);
                changed = true;
                break;
            }
        }
    }
    return {factor, w};
}

// ------------------------------------------------------------ Term

Term::Term(const QRat& c) {
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
}

Term Term::atom(const Atom& a, int power) {
    Term t;
    if (power == 0) return Term(1);
    t.terms_.emplace(Monomial{{a, power}}, QRat(1));
    return t;
}

Term Term::monomial(const Monomial& m, const QRat& c) {
    Term t;
    t.add(m, c);
    return t;
}

void Term::add(const Monomial& m, const QRat& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (fresh) return;
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

std::optional<Atom> Term::as_single_atom() const {
    if (terms_.size() != 1) return std::nullopt;
    const auto& [m, c] = *terms_.begin();
    if (!c.is_one() || m.size() != 1 || m.begin()->second != 1) return std::nullopt;
    return m.begin()->first;
}

Term Term::operator-() const {
    Term r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

Term& Term::operator+=(const Term& b) {
    for (const auto& [m, c] : b.terms_) add(m, c);
    return *this;
}

Term& Term::operator-=(const Term& b) {
    for (const auto& [m, c] : b.terms_) add(m, -c);
    return *this;
}

Term& Term::operator*=(const QRat& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

Term operator*(const Term& a, const Term& b) {
    Term r;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            Monomial m = ma;
            mul_monomial_into(m, mb);
            r.add(m, ca * cb);
        }
    }
    return r;
}

Term Term::map_coeffs(const std::function<QRat(const QRat&)>& f) const {
    Term r;
    for (const auto& [m, c] : terms_) r.add(m, f(c));
    return r;
}

bool Term::mentions(AtomKind kind, const std::string& name) const {
    for (const auto& [m, c] : terms_)
        for (const auto& [a, e] : m)
            if (a.kind == kind && a.name == name) return true;
    return false;
}

namespace {

Term power_of(const Term& t, int n);

Term monomial_inverse(const Term& d) {
    if (d.terms().size() != 1) throw MathError("division by a non-monomial expression");
    const auto& [m, c] = *d.terms().begin();
    Monomial inv;
    for (const auto& [a, e] : m) {
        if (a.kind == AtomKind::func) throw MathError("division by a function symbol");
        inv[a] = -e;
    }
    return Term::monomial(inv, c.inverse());
}

Term power_of(const Term& t, int n) {
    if (n < 0) return power_of(monomial_inverse(t), -n);
    Term r(1);
    for (int i = 0; i < n; ++i) r = r * t;
    return r;
}

std::string letter_prefix(const Letter& l) {
    switch (l.kind) {
    case LetterKind::dilation:
        return "D_" + l.var + (l.power == 1 ? "" : "^" + std::to_string(l.power));
    case LetterKind::shift:
        return "S_" + l.var + "[" + (l.power == 1 ? "" : std::to_string(l.power)) + l.param + "]";
    case LetterKind::partial:
        return "d_" + l.var;
    case LetterKind::jackson:
        return "dq_" + l.var;
    case LetterKind::jackson_hat:
        return "dqh_" + l.var;
    }
    return "?";
}

}  // namespace

std::string atom_to_string(const Atom& a) {
    if (a.kind != AtomKind::func) return a.name;
    // trailing partials of each variable group become subscripts
    Word prefix;
    std::string subs;
    std::size_t i = 0;
    while (i < a.word.size()) {
        std::size_t j = i;
        while (j < a.word.size() && a.word[j].var == a.word[i].var) ++j;
        std::size_t k = j;
        while (k > i && a.word[k - 1].kind == LetterKind::partial) --k;
        prefix.insert(prefix.end(), a.word.begin() + static_cast<long>(i), a.word.begin() + static_cast<long>(k));
        for (std::size_t m = k; m < j; ++m) subs += a.word[m].var;
        i = j;
    }
    std::string out = a.name + (subs.empty() ? "" : "_" + subs);
    for (std::size_t m = prefix.size(); m-- > 0;) out = letter_prefix(prefix[m]) + "(" + out + ")";
    return out;
}

std::string Term::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
        std::string mono;
        for (const auto& [a, e] : m) {
            if (!mono.empty()) mono += "*";
            mono += atom_to_string(a);
            if (e != 1) mono += "^" + std::to_string(e);
        }
        std::string coef;
        bool neg = false;
        if (c.is_rational()) {
            mpq_class r = c.as_rational();
            neg = r < 0;
            if (neg) r = -r;
            if (r != 1 || mono.empty()) coef = r.get_str();
        } else {
            coef = "(" + c.to_string() + ")";
        }
        std::string piece = coef.empty() ? mono : (mono.empty() ? coef : coef + "*" + mono);
        if (out.empty()) out = neg ? "-" + piece : piece;
        else out += (neg ? " - " : " + ") + piece;
    }
    return out;
}

// ------------------------------------------------------------ letter action

namespace {

Term func_image(const Letter& l, const Atom& a) {
    Word w;
    w.reserve(a.word.size() + 1);
    w.push_back(l);
    w.insert(w.end(), a.word.begin(), a.word.end());
    auto [factor, cw] = canonical_word(std::move(w));
    return Term::atom({AtomKind::func, a.name, std::move(cw)}) * factor;
}

// Image of a single atom power under an algebra map letter.
Term automorphism_image(const Letter& l, const Atom& a, int e) {
    if (a.kind == AtomKind::func) {
        if (e < 0) throw MathError("negative power of a function symbol");
        return power_of(func_image(l, a), e);
    }
    if (a.kind != AtomKind::coord || a.name != l.var) return Term::atom(a, e);
    if (l.kind == LetterKind::dilation) return Term::atom(a, e) * QRat::q_pow(static_cast<long>(l.power) * e);
    if (e < 0) throw MathError("shift of a negative power of " + a.name);
    Term base = Term::atom(a) + Term::param(l.param) * QRat(l.power);
    return power_of(base, e);
}

Term derivation_on_factor(const Letter& l, const Atom& a, int e) {
    if (a.kind == AtomKind::func) return func_image(l, a);  // e == 1 here
    if (a.kind != AtomKind::coord || a.name != l.var) return Term();
    QRat c;
    switch (l.kind) {
    case LetterKind::partial: c = QRat(e); break;
    case LetterKind::jackson: c = step_int(-2, e); break;
    default: c = step_int(2, e); break;
    }
    return Term::atom(a, e - 1) * c;
}

Term apply_to_monomial(const Letter& l, const Monomial& m) {
    if (l.kind == LetterKind::dilation || l.kind == LetterKind::shift) {
        Term r(1);
        for (const auto& [a, e] : m) r = r * automorphism_image(l, a, e);
        return r;
    }
    // twisted Leibniz: L(fg) = L(f) g + sigma(f) L(g)
    Monomial constants;
    std::vector<std::pair<Atom, int>> factors;
    for (const auto& [a, e] : m) {
        const bool moves = a.kind == AtomKind::func || (a.kind == AtomKind::coord && a.name == l.var);
        if (!moves) {
            constants[a] = e;
        } else if (a.kind == AtomKind::func) {
            if (e < 0) throw MathError("negative power of a function symbol");
            for (int k = 0; k < e; ++k) factors.emplace_back(a, 1);
        } else {
            factors.emplace_back(a, e);
        }
    }
    std::optional<Letter> sigma;
    if (l.kind == LetterKind::jackson) sigma = Letter{LetterKind::dilation, l.var, -2, {}};
    if (l.kind == LetterKind::jackson_hat) sigma = Letter{LetterKind::dilation, l.var, 2, {}};
    Term result;
    Term left(1);
    for (std::size_t j = 0; j < factors.size(); ++j) {
        Term piece = left * derivation_on_factor(l, factors[j].first, factors[j].second);
        for (std::size_t i = j + 1; i < factors.size() && !piece.is_zero(); ++i)
            piece = piece * Term::atom(factors[i].first, factors[i].second);
        result += piece;
        const auto& [a, e] = factors[j];
        left = left * (sigma ? automorphism_image(*sigma, a, e) : Term::atom(a, e));
    }
    return result * Term::monomial(constants, QRat(1));
}

}  // namespace

Term apply_letter(const Letter& l, const Term& e) {
    Term r;
    for (const auto& [m, c] : e.terms()) r += apply_to_monomial(l, m) * c;
    return r;
}

Term apply_word(const Word& w, const Term& e) {
    Term r = e;
    for (std::size_t i = w.size(); i-- > 0;) r = apply_letter(w[i], r);
    return r;
}

// ------------------------------------------------------------ parser

namespace {

class Parser {
public:
    Parser(std::string_view s, const Symbols& sym) : s_(s), sym_(sym) {}

    Term parse_all() {
        Term t = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw MathError("parse error at column " + std::to_string(pos_ + 1) + ": " + msg + " in \"" + std::string(s_) + "\"");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    long integer() {
        skip();
        bool neg = accept('-');
        skip();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected integer");
        long v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) v = v * 10 + (s_[pos_++] - '0');
        return neg ? -v : v;
    }

    long exponent() {
        if (accept('(')) {
            long v = integer();
            expect(')');
            return v;
        }
        if (accept('{')) {
            long v = integer();
            expect('}');
            return v;
        }
        return integer();
    }

    Term expr() {
        Term t;
        if (accept('-')) t = -product();
        else {
            accept('+');
            t = product();
        }
        while (true) {
            if (accept('+')) t += product();
            else if (accept('-')) t -= product();
            else return t;
        }
    }

    Term product() {
        Term t = unary();
        while (true) {
            if (accept('*')) t = t * unary();
            else if (accept('/')) t = t * monomial_inverse(unary());
            else return t;
        }
    }

    Term unary() {
        if (accept('-')) return -unary();
        return power();
    }

    Term power() {
        Term b = primary();
        if (accept('^')) return power_of(b, static_cast<int>(exponent()));
        return b;
    }

    std::string identifier() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    bool is_coord(const std::string& n) const {
        return std::find(sym_.coords.begin(), sym_.coords.end(), n) != sym_.coords.end();
    }
    bool is_param(const std::string& n) const {
        return std::find(sym_.params.begin(), sym_.params.end(), n) != sym_.params.end();
    }
    bool is_func(const std::string& n) const {
        return std::find(sym_.funcs.begin(), sym_.funcs.end(), n) != sym_.funcs.end();
    }

    Term operand() {
        expect('(');
        Term t = expr();
        expect(')');
        return t;
    }

    Term primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') return operand();
        if (std::isdigit(static_cast<unsigned char>(c))) return Term(integer());
        if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected '") + c + "'");
        std::string id = identifier();
        auto us = id.find('_');
        std::string base = id.substr(0, us);
        std::string sub = us == std::string::npos ? "" : id.substr(us + 1);

        if (sub.empty()) {
            if (id == "q") return Term(QRat::q());
            if (is_param(id)) return Term::param(id);
            if (is_coord(id)) return Term::coord(id);
            if (is_func(id)) return Term::func(id);
            if (sym_.allow_diffs && id.size() > 1 && id[0] == 'd' && is_coord(id.substr(1)))
                return Term::atom({AtomKind::diff, id.substr(1), {}});
            fail("unknown symbol '" + id + "'");
        }
        if (is_func(base)) {
            Term t = Term::func(base);
            for (char v : sub) {
                if (!is_coord(std::string(1, v))) fail("unknown coordinate '" + std::string(1, v) + "' in subscript");
                t = apply_letter({LetterKind::partial, std::string(1, v), 1, {}}, t);
            }
            return t;
        }
        if (!is_coord(sub)) fail("unknown coordinate '" + sub + "'");
        if (base == "D") {
            int k = accept('^') ? static_cast<int>(exponent()) : 1;
            return apply_letter({LetterKind::dilation, sub, k, {}}, operand());
        }
        if (base == "S") {
            expect('[');
            skip();
            int k = 1;
            if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-'))
                k = static_cast<int>(integer());
            std::string p = identifier();
            if (!is_param(p)) fail("shift needs a parameter, got '" + p + "'");
            expect(']');
            return apply_letter({LetterKind::shift, sub, k, p}, operand());
        }
        LetterKind kind;
        if (base == "d") kind = LetterKind::partial;
        else if (base == "dq") kind = LetterKind::jackson;
        else if (base == "dqh") kind = LetterKind::jackson_hat;
        else fail("unknown operator '" + base + "'");
        return apply_letter({kind, sub, 1, {}}, operand());
    }

    std::string_view s_;
    const Symbols& sym_;
    std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(std::string_view text, const Symbols& sym) { return Parser(text, sym).parse_all(); }

// ------------------------------------------------------------ transformations

namespace {

// Rebuilds a term atom by atom; f maps a func atom (with its word) to a term.
Term rebuild(const Term& e, const std::function<QRat(const QRat&)>& coef,
             const std::function<Term(const Atom&)>& func_atom) {
    Term r;
    for (const auto& [m, c] : e.terms()) {
        Term piece(coef(c));
        for (const auto& [a, k] : m) {
            if (a.kind == AtomKind::func) piece = piece * power_of(func_atom(a), k);
            else piece = piece * Term::atom(a, k);
        }
        r += piece;
    }
    return r;
}

Term atom_with_word(const std::string& name, Word w) {
    auto [factor, cw] = canonical_word(std::move(w));
    return Term::atom({AtomKind::func, name, std::move(cw)}) * factor;
}

}  // namespace

Term classical_limit(const Term& e) {
    return rebuild(
        e,
        [](const QRat& c) {
            try {
                return QRat(c.eval_at(1));
            } catch (const MathError&) {
                throw MathError("pole at q = 1 in coefficient " + c.to_string());
            }
        },
        [](const Atom& a) {
            Word w;
            for (const Letter& l : a.word) {
                if (l.kind == LetterKind::dilation) continue;
                Letter n = l;
                if (n.kind == LetterKind::jackson || n.kind == LetterKind::jackson_hat) n.kind = LetterKind::partial;
                w.push_back(n);
            }
            return atom_with_word(a.name, std::move(w));
        });
}

Term invert_q(const Term& e) {
    return rebuild(
        e, [](const QRat& c) { return c.invert_q(); },
        [](const Atom& a) {
            Word w;
            for (const Letter& l : a.word) {
                Letter n = l;
                if (n.kind == LetterKind::dilation) n.power = -n.power;
                else if (n.kind == LetterKind::jackson) n.kind = LetterKind::jackson_hat;
                else if (n.kind == LetterKind::jackson_hat) n.kind = LetterKind::jackson;
                w.push_back(n);
            }
            return atom_with_word(a.name, std::move(w));
        });
}

Term substitute(const Term& e, const Atom& lhs, const Term& rhs) {
    if (lhs.kind != AtomKind::func) throw MathError("substitution target must be a function symbol");
    std::map<std::string, int> need;
    for (const Letter& l : lhs.word) {
        if (l.kind != LetterKind::partial) throw MathError("substitution target must be a pure partial derivative");
        ++need[l.var];
    }
    if (rhs.mentions(AtomKind::func, lhs.name) && !lhs.word.empty())
        throw MathError("substitution for " + atom_to_string(lhs) + " is circular");
    int matched = 0;
    Term r = rebuild(
        e, [](const QRat& c) { return c; },
        [&](const Atom& a) -> Term {
            if (a.name != lhs.name) return Term::atom(a);
            // strip the required partials from the tail of each variable group
            Word rest = a.word;
            for (const auto& [v, count] : need) {
                std::size_t end = rest.size();
                while (end > 0 && rest[end - 1].var != v) --end;
                int left = count;
                while (left > 0 && end > 0 && rest[end - 1].var == v && rest[end - 1].kind == LetterKind::partial) {
                    rest.erase(rest.begin() + static_cast<long>(end) - 1);
                    --end;
                    --left;
                }
                if (left > 0) return Term::atom(a);
            }
            ++matched;
            return apply_word(rest, rhs);
        });
    if (matched == 0) throw MathError("nothing matches " + atom_to_string(lhs));
    return r;
}

bool equal_up_to_scalar(const Term& a, const Term& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    const auto& [m, ca] = *a.terms().begin();
    auto it = b.terms().find(m);
    if (it == b.terms().end()) return false;
    return a * (it->second / ca) == b;
}

}  // namespace qkp::fodc

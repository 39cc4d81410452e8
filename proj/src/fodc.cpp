#include <algorithm>
#include <fstream>
#include <sstream>

#include "qkp/error.hpp"
#include "qkp/fodc.hpp"

namespace qkp::fodc {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

int index_of(const std::vector<std::string>& v, const std::string& name, const std::string& what) {
    auto it = std::find(v.begin(), v.end(), name);
    if (it == v.end()) throw MathError("unknown " + what + " '" + name + "'");
    return static_cast<int>(it - v.begin());
}

constexpr long kStepBudget = 1'000'000;

}  // namespace

Symbols CalculusSpec::symbols(bool diffs) const { return {coords, params, funcs, diffs}; }

std::string CalculusSpec::basis_name(std::size_t b) const {
    return diff_name(basis.at(b).first) + "*" + diff_name(basis.at(b).second);
}

// ------------------------------------------------------------ file format

namespace {

struct SpecParser {
    CalculusSpec spec;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw MathError("calculus line " + std::to_string(line_no) + ": " + msg);
    }

    Diff diff_of(const std::string& name) const {
        if (name.size() < 2 || name[0] != 'd') throw MathError("not a differential: '" + name + "'");
        return index_of(spec.coords, name.substr(1), "differential");
    }

    Symbols sym(bool with_f) const {
        Symbols s = spec.symbols(true);
        if (with_f) s.funcs.push_back("F");
        return s;
    }

    // Splits "lhs = rhs".
    std::pair<std::string, std::string> equation(const std::string& rest) const {
        auto eq = rest.find('=');
        if (eq == std::string::npos) fail("expected '='");
        return {trim(rest.substr(0, eq)), trim(rest.substr(eq + 1))};
    }

    // Reads "da*db" as a differential pair.
    std::pair<Diff, Diff> diff_pair(const std::string& s) const {
        auto star = s.find('*');
        if (star == std::string::npos) fail("expected a product of two differentials");
        return {diff_of(trim(s.substr(0, star))), diff_of(trim(s.substr(star + 1)))};
    }

    std::optional<std::size_t> basis_index(Diff a, Diff b) const {
        for (std::size_t i = 0; i < spec.basis.size(); ++i) {
            auto [x, y] = spec.basis[i];
            if ((x == a && y == b) || (x == b && y == a)) return i;
        }
        return std::nullopt;
    }

    // Splits a sum into coefficients per differential (degree 1) or per
    // basis element (degree 2).
    std::vector<Term> form(const std::string& text, int degree, bool with_f) const {
        Term t = parse_term(text, sym(with_f));
        const std::size_t n = degree == 1 ? spec.coords.size() : spec.basis.size();
        std::vector<Term> out(n);
        for (const auto& [m, c] : t.terms()) {
            Monomial rest;
            std::vector<Diff> ds;
            for (const auto& [a, e] : m) {
                if (a.kind != AtomKind::diff) {
                    rest[a] = e;
                    continue;
                }
                if (e < 0) fail("negative power of a differential");
                for (int k = 0; k < e; ++k) ds.push_back(index_of(spec.coords, a.name, "coordinate"));
            }
            if (static_cast<int>(ds.size()) != degree) fail("term of wrong form degree in '" + text + "'");
            std::size_t slot;
            if (degree == 1) {
                slot = static_cast<std::size_t>(ds[0]);
            } else {
                auto b = basis_index(ds[0], ds[1]);
                if (!b || ds[0] == ds[1]) fail("no basis element for this 2-form in '" + text + "'");
                slot = *b;
            }
            out[slot].add(rest, c);
        }
        return out;
    }

    Term expr(const std::string& text) const { return parse_term(text, spec.symbols()); }

    void sized() {
        const std::size_t n = spec.coords.size();
        spec.rules.assign(n, std::vector<std::optional<std::vector<Term>>>(n));
        spec.lift.assign(n, std::vector<Term>(n));
        spec.df.assign(n, Term());
    }

    Step step(const std::string& kw, const std::string& rest) const {
        Step s;
        s.text = trim(kw + " " + rest);
        if (kw == "limit") s.kind = Step::Kind::limit;
        else if (kw == "invert") s.kind = Step::Kind::invert;
        else if (kw == "subst") {
            s.kind = Step::Kind::subst;
            auto [l, r] = equation(rest);
            auto atom = expr(l).as_single_atom();
            if (!atom || atom->kind != AtomKind::func) fail("substitution target must be a function atom");
            s.lhs = *atom;
            s.rhs = expr(r);
        } else if (kw == "diff") {
            s.kind = Step::Kind::diff;
            s.var = trim(rest);
            index_of(spec.coords, s.var, "coordinate");
        } else if (kw == "scale") {
            s.kind = Step::Kind::scale;
            s.rhs = expr(rest);
        } else if (kw == "add") {
            s.kind = Step::Kind::add;
            s.rhs = expr(rest);
        } else {
            fail("unknown step '" + kw + "'");
        }
        return s;
    }

    void run(std::string_view text) {
        std::istringstream in{std::string(text)};
        std::optional<Scenario> open;
        bool have_target = false;
        for (std::string raw; std::getline(in, raw);) {
            ++line_no;
            auto hash = raw.find('#');
            std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            auto sp = line.find(' ');
            std::string kw = line.substr(0, sp);
            std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
            try {
                if (open) {
                    if (kw == "end") {
                        if (!have_target) fail("check '" + open->label + "' has no target");
                        spec.scenarios.push_back(std::move(*open));
                        open.reset();
                    } else if (kw == "identity") open->identity = rest;
                    else if (kw == "diagnostic") open->diagnostic = true;
                    else if (kw == "from") {
                        if (rest.rfind("curvature", 0) == 0) {
                            auto [a, b] = diff_pair(trim(rest.substr(9)));
                            auto idx = basis_index(a, b);
                            if (!idx || spec.basis[*idx] != std::pair{a, b}) fail("not a basis element: " + rest);
                            open->from_curvature = spec.basis[*idx];
                        } else {
                            open->source = expr(rest);
                        }
                    } else if (kw == "target") {
                        open->target = expr(rest);
                        have_target = true;
                    } else {
                        open->steps.push_back(step(kw, rest));
                    }
                    continue;
                }
                if (kw == "name") spec.name = rest;
                else if (kw == "coordinates") {
                    spec.coords = words(rest);
                    for (const auto& c : spec.coords)
                        if (c.size() != 1) fail("coordinate names are single letters");
                    sized();
                } else if (kw == "parameters") spec.params = words(rest);
                else if (kw == "functions") spec.funcs = words(rest);
                else if (kw == "basis") {
                    for (const auto& w : words(rest)) spec.basis.push_back(diff_pair(w));
                } else if (kw == "commute") {
                    auto [l, r] = equation(rest);
                    auto star = l.find('*');
                    if (star == std::string::npos) fail("expected 'a*b = theta'");
                    int j = index_of(spec.coords, trim(l.substr(0, star)), "coordinate");
                    int i = index_of(spec.coords, trim(l.substr(star + 1)), "coordinate");
                    if (j <= i) fail("commute takes the later coordinate first");
                    // c_j c_i = theta c_i c_j with theta on the right
                    Term theta = expr(r);
                    std::optional<int> k;
                    for (int e = -8; e <= 8 && !k; ++e)
                        if (theta == Term(QRat::q_pow(e))) k = e;
                    if (!k) fail("commutation factor must be a power of q");
                    spec.commute[{j, i}] = *k;
                } else if (kw == "rule") {
                    auto [l, r] = equation(rest);
                    auto star = l.find('*');
                    if (star == std::string::npos) fail("expected 'dxi*c = ...'");
                    Diff xi = diff_of(trim(l.substr(0, star)));
                    int c = index_of(spec.coords, trim(l.substr(star + 1)), "coordinate");
                    auto& slot = spec.rules[static_cast<std::size_t>(xi)][static_cast<std::size_t>(c)];
                    if (slot) ++spec.rule_duplicates;
                    slot = form(r, 1, false);
                } else if (kw == "wedge") {
                    auto [l, r] = equation(rest);
                    auto pr = diff_pair(l);
                    spec.wedge[pr] = trim(r) == "0" ? std::vector<Term>(spec.basis.size()) : form(r, 2, false);
                } else if (kw == "lift") {
                    auto [l, r] = equation(rest);
                    auto star = l.find('*');
                    if (star == std::string::npos || trim(l.substr(star + 1)) != "F") fail("expected 'dxi*F = ...'");
                    Diff xi = diff_of(trim(l.substr(0, star)));
                    spec.lift[static_cast<std::size_t>(xi)] = form(r, 1, true);
                } else if (kw == "df") {
                    auto [l, r] = equation(rest);
                    if (l != "F") fail("expected 'df F = ...'");
                    spec.df = form(r, 1, true);
                } else if (kw == "connection") {
                    spec.connection = form(rest, 1, false);
                } else if (kw == "check") {
                    open = Scenario{};
                    open->label = rest;
                    have_target = false;
                } else {
                    fail("unknown directive '" + kw + "'");
                }
            } catch (const MathError& e) {
                std::string what = e.what();
                if (what.rfind("calculus line", 0) == 0) throw;
                fail(what);
            }
        }
        if (open) fail("unterminated check '" + open->label + "'");
        if (spec.coords.empty()) throw MathError("calculus declares no coordinates");
    }
};

}  // namespace

CalculusSpec parse_calculus(std::string_view text) {
    SpecParser p;
    p.run(text);
    return std::move(p.spec);
}

CalculusSpec load_calculus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MathError("cannot open calculus file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_calculus(ss.str());
}

// ------------------------------------------------------------ rules

Term apply_linear_rule(const Term& rule, const Term& f) {
    Term r;
    for (const auto& [m, c] : rule.terms()) {
        Monomial rest;
        const Atom* fa = nullptr;
        for (const auto& [a, e] : m) {
            if (a.kind == AtomKind::func && a.name == "F") {
                if (e != 1 || fa) throw MathError("rule is not linear in F");
                fa = &a;
            } else {
                rest[a] = e;
            }
        }
        if (!fa) throw MathError("rule term without F");
        r += Term::monomial(rest, c) * apply_word(fa->word, f);
    }
    return r;
}

Term coord_product(const Term& a, const Term& b, const CalculusSpec& spec) {
    if (spec.commute.empty()) return a * b;
    Term r;
    for (const auto& [ma, ca] : a.terms()) {
        for (const auto& [mb, cb] : b.terms()) {
            long k = 0;
            for (const auto& [aa, ea] : ma) {
                if (aa.kind != AtomKind::coord) continue;
                int j = index_of(spec.coords, aa.name, "coordinate");
                for (const auto& [ab, eb] : mb) {
                    if (ab.kind != AtomKind::coord) continue;
                    auto it = spec.commute.find({j, index_of(spec.coords, ab.name, "coordinate")});
                    if (it != spec.commute.end()) k += static_cast<long>(it->second) * ea * eb;
                }
            }
            r += Term::monomial(ma, ca) * Term::monomial(mb, cb) * QRat::q_pow(k);
        }
    }
    return r;
}

namespace {

// Reduces an ordered list of differentials: degree 2 goes to the basis.
std::vector<std::pair<std::vector<Diff>, Term>> reduce_key(const std::vector<Diff>& key, const CalculusSpec& spec) {
    if (key.size() < 2) return {{key, Term(1)}};
    if (key.size() > 2) throw MathError("forms of degree above 2 are not supported");
    std::pair<Diff, Diff> pr{key[0], key[1]};
    for (const auto& b : spec.basis)
        if (b == pr) return {{key, Term(1)}};
    auto it = spec.wedge.find(pr);
    if (it == spec.wedge.end())
        throw MathError("no product rule for " + spec.diff_name(key[0]) + "*" + spec.diff_name(key[1]));
    std::vector<std::pair<std::vector<Diff>, Term>> out;
    for (std::size_t i = 0; i < spec.basis.size(); ++i)
        if (!it->second[i].is_zero()) out.push_back({{spec.basis[i].first, spec.basis[i].second}, it->second[i]});
    return out;
}

void add_form(FormExpr& f, const std::vector<Diff>& key, const Term& c, const CalculusSpec& spec) {
    if (c.is_zero()) return;
    for (const auto& [k, w] : reduce_key(key, spec)) {
        Term& slot = f[k];
        slot += c * w;
        if (slot.is_zero()) f.erase(k);
    }
}

struct Folder {
    const CalculusSpec& spec;
    long steps = 0;

    void tick() {
        if (++steps > kStepBudget) throw MathError("non-terminating rule set");
    }

    FormExpr left_mul(const FormFactor& f, const FormExpr& cur) {
        FormExpr out;
        for (const auto& [key, c] : cur) {
            tick();
            if (!f.diff) {
                add_form(out, key, coord_product(f.coeff, c, spec), spec);
                continue;
            }
            const auto xi = static_cast<std::size_t>(*f.diff);
            for (std::size_t eta = 0; eta < spec.coords.size(); ++eta) {
                Term moved = apply_linear_rule(spec.lift[xi][eta], c);
                if (moved.is_zero()) continue;
                std::vector<Diff> k{static_cast<Diff>(eta)};
                k.insert(k.end(), key.begin(), key.end());
                add_form(out, k, moved, spec);
            }
        }
        return out;
    }

    FormExpr fold_right(const FormProduct& p) {
        FormExpr cur{{{}, Term(1)}};
        for (std::size_t i = p.size(); i-- > 0;) cur = left_mul(p[i], cur);
        return cur;
    }

    FormExpr fold_left(const FormProduct& p) {
        FormExpr cur{{{}, Term(1)}};
        for (const FormFactor& f : p) {
            FormExpr next;
            for (const auto& [key, c] : cur) {
                tick();
                if (f.diff) {
                    std::vector<Diff> k = key;
                    k.push_back(*f.diff);
                    add_form(next, k, c, spec);
                    continue;
                }
                // c * omega * f: move f through omega first
                FormProduct tail;
                for (Diff d : key) tail.push_back({d, Term()});
                tail.push_back({std::nullopt, f.coeff});
                for (const auto& [k2, c2] : fold_right(tail)) add_form(next, k2, coord_product(c, c2, spec), spec);
            }
            cur = std::move(next);
        }
        return cur;
    }
};

}  // namespace

std::vector<std::pair<QRat, FormProduct>> parse_form_input(std::string_view text, const CalculusSpec& spec) {
    // split on top-level + and -, then on top-level *
    std::vector<std::pair<QRat, FormProduct>> out;
    std::string s(text);
    std::vector<std::pair<int, std::string>> summands;
    int depth = 0;
    int sign = 1;
    std::string cur;
    auto flush = [&] {
        std::string t = trim(cur);
        if (!t.empty()) summands.emplace_back(sign, t);
        cur.clear();
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        const bool exponent_sign = i > 0 && s[i - 1] == '^';
        if (depth == 0 && (c == '+' || c == '-') && !exponent_sign) {
            flush();
            sign = c == '-' ? -1 : 1;
            continue;
        }
        cur += c;
    }
    flush();
    Symbols sym = spec.symbols();
    for (const auto& [sg, t] : summands) {
        FormProduct prod;
        std::string piece;
        int d = 0;
        auto push = [&] {
            std::string f = trim(piece);
            piece.clear();
            if (f.size() == 2 && f[0] == 'd' &&
                std::find(spec.coords.begin(), spec.coords.end(), f.substr(1)) != spec.coords.end()) {
                prod.push_back({index_of(spec.coords, f.substr(1), "coordinate"), Term()});
            } else {
                prod.push_back({std::nullopt, parse_term(f, sym)});
            }
        };
        for (char c : t) {
            if (c == '(' || c == '[') ++d;
            if (c == ')' || c == ']') --d;
            if (d == 0 && c == '*') {
                push();
                continue;
            }
            piece += c;
        }
        push();
        out.emplace_back(QRat(sg), std::move(prod));
    }
    return out;
}

FormExpr normal_order(const std::vector<std::pair<QRat, FormProduct>>& e, const CalculusSpec& spec, FoldOrder order) {
    Folder f{spec};
    FormExpr out;
    for (const auto& [c, p] : e) {
        FormExpr part = order == FoldOrder::right_to_left ? f.fold_right(p) : f.fold_left(p);
        for (const auto& [k, v] : part) add_form(out, k, v * c, spec);
    }
    return out;
}

std::string form_to_string(const FormExpr& f, const CalculusSpec& spec) {
    if (f.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : f) {
        std::string piece = "(" + c.to_string() + ")";
        for (Diff d : k) piece += "*" + spec.diff_name(d);
        out += (out.empty() ? "" : " + ") + piece;
    }
    return out;
}

std::vector<Term> curvature(const std::vector<Term>& A, const CalculusSpec& spec) {
    const std::size_t n = spec.coords.size();
    if (A.size() != n) throw MathError("connection needs one coefficient per differential");
    FormExpr F;
    for (std::size_t xi = 0; xi < n; ++xi) {
        if (A[xi].is_zero()) continue;
        for (std::size_t z = 0; z < n; ++z)
            add_form(F, {static_cast<Diff>(z), static_cast<Diff>(xi)}, apply_linear_rule(spec.df[z], A[xi]), spec);
        for (std::size_t eta = 0; eta < n; ++eta) {
            if (A[eta].is_zero()) continue;
            for (std::size_t z = 0; z < n; ++z) {
                Term moved = apply_linear_rule(spec.lift[xi][z], A[eta]);
                add_form(F, {static_cast<Diff>(z), static_cast<Diff>(eta)}, coord_product(A[xi], moved, spec), spec);
            }
        }
    }
    std::vector<Term> out;
    for (const auto& [a, b] : spec.basis) {
        auto it = F.find({a, b});
        out.push_back(it == F.end() ? Term() : it->second);
    }
    return out;
}

// ------------------------------------------------------------ validation

namespace {

using Matrix = std::vector<std::vector<Term>>;

struct Validator {
    const CalculusSpec& spec;
    std::size_t n;
    ValidationReport report;
    std::map<std::vector<int>, Matrix> sigma_memo;
    std::map<std::vector<int>, std::vector<Term>> d_memo;

    explicit Validator(const CalculusSpec& s) : spec(s), n(s.coords.size()) {}

    Term mono(const std::vector<int>& e) const {
        Term t(1);
        for (std::size_t i = 0; i < n; ++i)
            if (e[i] != 0) t = t * Term::coord(spec.coords[i], e[i]);
        return t;
    }

    std::string mono_text(const std::vector<int>& e) const { return mono(e).to_string(); }

    Matrix rule_matrix(std::size_t c) const {
        Matrix m(n, std::vector<Term>(n));
        for (std::size_t xi = 0; xi < n; ++xi) m[xi] = *spec.rules[xi][c];
        return m;
    }

    Matrix mat_mul(const Matrix& a, const Matrix& b) const {
        Matrix r(n, std::vector<Term>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < n; ++j) r[i][j] += coord_product(a[i][k], b[k][j], spec);
        return r;
    }

    // sigma of a normal-ordered monomial from the coordinate rules
    const Matrix& sigma(const std::vector<int>& e) {
        if (auto it = sigma_memo.find(e); it != sigma_memo.end()) return it->second;
        Matrix r(n, std::vector<Term>(n));
        std::size_t c = 0;
        while (c < n && e[c] == 0) ++c;
        if (c == n) {
            for (std::size_t i = 0; i < n; ++i) r[i][i] = Term(1);
        } else {
            std::vector<int> rest = e;
            --rest[c];
            r = mat_mul(rule_matrix(c), sigma(rest));
        }
        return sigma_memo.emplace(e, std::move(r)).first->second;
    }

    const std::vector<Term>& d_rec(const std::vector<int>& e) {
        if (auto it = d_memo.find(e); it != d_memo.end()) return it->second;
        std::vector<Term> r(n);
        std::size_t c = 0;
        while (c < n && e[c] == 0) ++c;
        if (c < n) {
            std::vector<int> rest = e;
            --rest[c];
            const Matrix& s = sigma(rest);
            const std::vector<Term> dr = d_rec(rest);
            Term cc = Term::coord(spec.coords[c]);
            for (std::size_t eta = 0; eta < n; ++eta) r[eta] = s[c][eta] + coord_product(cc, dr[eta], spec);
        }
        return d_memo.emplace(e, std::move(r)).first->second;
    }

    std::vector<Term> df(const Term& f) const {
        std::vector<Term> r(n);
        for (std::size_t xi = 0; xi < n; ++xi) r[xi] = apply_linear_rule(spec.df[xi], f);
        return r;
    }

    std::vector<std::vector<int>> monomials(int max_degree) const {
        std::vector<std::vector<int>> out;
        std::vector<int> e(n, 0);
        std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
            if (i == n) {
                out.push_back(e);
                return;
            }
            for (int k = 0; k <= left; ++k) {
                e[i] = k;
                rec(i + 1, left - k);
            }
            e[i] = 0;
        };
        rec(0, max_degree);
        return out;
    }

    void fail(const std::string& check, const std::string& detail) { report.failures.push_back({check, detail}); }

    void completeness() {
        ++report.checks_run;
        for (std::size_t xi = 0; xi < n; ++xi)
            for (std::size_t c = 0; c < n; ++c)
                if (!spec.rules[xi][c]) fail("rule-table", "no rule for " + spec.diff_name(static_cast<Diff>(xi)) + "*" + spec.coords[c]);
        if (spec.rule_duplicates > 0) fail("rule-table", std::to_string(spec.rule_duplicates) + " duplicate rule(s)");
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                std::pair<Diff, Diff> pr{static_cast<Diff>(a), static_cast<Diff>(b)};
                bool in_basis = std::find(spec.basis.begin(), spec.basis.end(), pr) != spec.basis.end();
                if (!in_basis && !spec.wedge.count(pr))
                    fail("rule-table", "no product rule for " + spec.diff_name(pr.first) + "*" + spec.diff_name(pr.second));
            }
    }

    void lift_and_df(int max_degree) {
        for (const auto& e : monomials(max_degree)) {
            ++report.checks_run;
            Term m = mono(e);
            const Matrix& s = sigma(e);
            for (std::size_t xi = 0; xi < n; ++xi)
                for (std::size_t eta = 0; eta < n; ++eta) {
                    Term lifted = apply_linear_rule(spec.lift[xi][eta], m);
                    if (!(lifted == s[xi][eta]))
                        fail("lift-rule", spec.diff_name(static_cast<Diff>(xi)) + "*" + mono_text(e) + " -> " +
                                              spec.diff_name(static_cast<Diff>(eta)) + ": rule gives " + lifted.to_string() +
                                              ", coordinate rules give " + s[xi][eta].to_string());
                }
            std::vector<Term> want = d_rec(e);
            std::vector<Term> got = df(m);
            for (std::size_t xi = 0; xi < n; ++xi)
                if (!(want[xi] == got[xi]))
                    fail("df-rule", "d(" + mono_text(e) + ") " + spec.diff_name(static_cast<Diff>(xi)) + " part: rule gives " +
                                        got[xi].to_string() + ", recursion gives " + want[xi].to_string());
        }
    }

    void leibniz(int max_degree) {
        auto all = monomials(max_degree);
        for (const auto& f : all) {
            for (const auto& g : all) {
                int deg = 0;
                for (std::size_t i = 0; i < n; ++i) deg += f[i] + g[i];
                int df_deg = 0, dg_deg = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    df_deg += f[i];
                    dg_deg += g[i];
                }
                if (df_deg == 0 || dg_deg == 0 || deg > max_degree) continue;
                ++report.checks_run;
                Term F = mono(f), G = mono(g);
                std::vector<Term> lhs = df(coord_product(F, G, spec));
                std::vector<Term> a = df(F), b = df(G);
                std::vector<Term> rhs(n);
                for (std::size_t xi = 0; xi < n; ++xi)
                    for (std::size_t eta = 0; eta < n; ++eta)
                        rhs[eta] += coord_product(a[xi], apply_linear_rule(spec.lift[xi][eta], G), spec);
                for (std::size_t eta = 0; eta < n; ++eta) rhs[eta] += coord_product(F, b[eta], spec);
                for (std::size_t eta = 0; eta < n; ++eta)
                    if (!(lhs[eta] == rhs[eta]))
                        fail("leibniz", "d(" + F.to_string() + " * " + G.to_string() + ") " +
                                            spec.diff_name(static_cast<Diff>(eta)) + " part: " + lhs[eta].to_string() +
                                            " vs " + rhs[eta].to_string());
            }
        }
    }

    void d_squared() {
        std::vector<Term> probes;
        for (std::size_t i = 0; i < n; ++i) probes.push_back(Term::coord(spec.coords[i]));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                probes.push_back(coord_product(Term::coord(spec.coords[i]), Term::coord(spec.coords[j]), spec));
        for (const Term& p : probes) {
            ++report.checks_run;
            std::vector<Term> first = df(p);
            FormExpr dd;
            for (std::size_t xi = 0; xi < n; ++xi)
                for (std::size_t z = 0; z < n; ++z)
                    add_form(dd, {static_cast<Diff>(z), static_cast<Diff>(xi)}, apply_linear_rule(spec.df[z], first[xi]), spec);
            if (!dd.empty()) fail("d-squared", "d(d(" + p.to_string() + ")) = " + form_to_string(dd, spec));
        }
    }

    void bimodule() {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                QRat theta(1);
                if (auto it = spec.commute.find({static_cast<int>(j), static_cast<int>(i)}); it != spec.commute.end())
                    theta = QRat::q_pow(it->second);
                Matrix ji = mat_mul(rule_matrix(j), rule_matrix(i));
                Matrix ij = mat_mul(rule_matrix(i), rule_matrix(j));
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        if (!(ji[a][b] == ij[a][b] * theta))
                            report.diagnostics.push_back(
                                {"bimodule", "rule matrices of " + spec.coords[j] + " and " + spec.coords[i] +
                                                 " disagree with the coordinate commutation at (" + spec.diff_name(static_cast<Diff>(a)) +
                                                 ", " + spec.diff_name(static_cast<Diff>(b)) + ")"});
            }
    }
};

}  // namespace

ValidationReport validate_calculus(const CalculusSpec& spec) {
    Validator v(spec);
    v.completeness();
    if (!v.report.ok()) return v.report;
    try {
        v.lift_and_df(3);
        v.leibniz(3);
        v.d_squared();
        v.bimodule();
    } catch (const MathError& e) {
        v.fail("evaluation", e.what());
    }
    return v.report;
}

// ------------------------------------------------------------ scenarios

Term run_steps(Term e, const std::vector<Step>& steps) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Step& s = steps[i];
        try {
            switch (s.kind) {
            case Step::Kind::limit: e = classical_limit(e); break;
            case Step::Kind::invert: e = invert_q(e); break;
            case Step::Kind::subst: e = substitute(e, s.lhs, s.rhs); break;
            case Step::Kind::diff: e = apply_letter({LetterKind::partial, s.var, 1, {}}, e); break;
            case Step::Kind::scale:
                if (s.rhs.is_zero()) throw MathError("scaling by zero");
                e = e * s.rhs;
                break;
            case Step::Kind::add: e += s.rhs; break;
            }
        } catch (const MathError& err) {
            throw MathError("step " + std::to_string(i + 1) + " (" + s.text + "): " + err.what());
        }
    }
    return e;
}

ScenarioResult run_scenario(const Scenario& s, const CalculusSpec& spec) {
    ScenarioResult r{s.label, s.identity, s.diagnostic, false, "", s.target.to_string(), ""};
    try {
        Term e = s.source;
        if (s.from_curvature) {
            std::vector<Term> F = curvature(spec.connection, spec);
            auto it = std::find(spec.basis.begin(), spec.basis.end(), *s.from_curvature);
            e = F[static_cast<std::size_t>(it - spec.basis.begin())];
        }
        e = run_steps(std::move(e), s.steps);
        r.result = e.to_string();
        r.pass = equal_up_to_scalar(e, s.target);
    } catch (const MathError& err) {
        r.error = err.what();
    }
    return r;
}

// ------------------------------------------------------------ Cole-Hopf

MultiPoly heat_polynomial(int n, const QRat& alpha) {
    MultiPoly h;
    mpz_class nf = 1;
    for (int i = 2; i <= n; ++i) nf *= i;
    for (int k = 0; 2 * k <= n; ++k) {
        mpz_class kf = 1, rf = 1;
        for (int i = 2; i <= k; ++i) kf *= i;
        for (int i = 2; i <= n - 2 * k; ++i) rf *= i;
        QRat c = QRat(mpq_class(nf, kf * rf)) * alpha.pow(k);
        h += MultiPoly::variable(var::x, n - 2 * k) * MultiPoly::variable(var::t(1), k) * c;
    }
    return h;
}

MultiPoly cole_hopf_residual(const MultiPoly& psi, const QRat& alpha, const QRat& beta, int sign) {
    const int x = var::x, t = var::t(1);
    const QRat s(sign);
    MultiPoly px = psi.partial(x), pxx = px.partial(x), pxxx = pxx.partial(x);
    MultiPoly pt = psi.partial(t), pxt = px.partial(t);
    MultiPoly ux_num = pxx * psi - px * px;  // psi^2 u_x / (s alpha)
    MultiPoly r = s * alpha * (psi * (pxt * psi - px * pt));
    r += QRat(2) * s * s * alpha * alpha * (px * ux_num);
    r += s * alpha * alpha * (pxxx * psi * psi - QRat(3) * psi * px * pxx + QRat(2) * px * px * px);
    r += s * alpha * beta * (psi * ux_num);
    return r;
}

}  // namespace qkp::fodc

#pragma once

// First-order differential calculi and zero curvature. Function symbols
// u, w, v, psi carry operator words (partials, dilations, shifts, Jackson
// derivatives); coefficients commute and sit left of the differentials.
// Also the Cole-Hopf residual for Burgers-type equations.

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkp/qfield.hpp"
#include "qkp/series.hpp"

namespace qkp::fodc {

// ------------------------------------------------------------ term algebra

enum class LetterKind {
    shift,        // f(v) -> f(v + power*param)
    dilation,     // f(v) -> f(q^power v)
    partial,
    jackson,      // (f(q^-2 v) - f(v)) / ((q^-2 - 1) v)
    jackson_hat,  // same with q^2
};

struct Letter {
    LetterKind kind;
    std::string var;
    int power = 1;
    std::string param;  // shift only
    auto operator<=>(const Letter&) const = default;
};

/// Operator word, outermost letter first.
using Word = std::vector<Letter>;

/// Brings a word to normal form: letters grouped by variable, dilations and
/// shifts moved outward, equal neighbours merged. Returns the scalar picked
/// up from d D^k = q^k D^k d.
std::pair<QRat, Word> canonical_word(Word w);

enum class AtomKind { param, coord, func, diff };

struct Atom {
    AtomKind kind;
    std::string name;
    Word word;  // func only
    auto operator<=>(const Atom&) const = default;
};

/// Atom -> exponent. Only params and coordinates take negative exponents.
using Monomial = std::map<Atom, int>;

/// Commutative polynomial over Q(q) in atoms.
class Term {
public:
    using Terms = std::map<Monomial, QRat>;

    Term() = default;
    Term(const QRat& c);  // NOLINT(google-explicit-constructor)
    Term(long c) : Term(QRat(c)) {}  // NOLINT(google-explicit-constructor)

    static Term atom(const Atom& a, int power = 1);
    static Term coord(const std::string& name, int power = 1) { return atom({AtomKind::coord, name, {}}, power); }
    static Term param(const std::string& name, int power = 1) { return atom({AtomKind::param, name, {}}, power); }
    static Term func(const std::string& name) { return atom({AtomKind::func, name, {}}); }
    static Term monomial(const Monomial& m, const QRat& c);

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    void add(const Monomial& m, const QRat& c);
    /// Present when the term is a single monomial with coefficient one.
    std::optional<Atom> as_single_atom() const;

    Term operator-() const;
    Term& operator+=(const Term& b);
    Term& operator-=(const Term& b);
    Term& operator*=(const QRat& c);
    friend Term operator+(Term a, const Term& b) { return a += b; }
    friend Term operator-(Term a, const Term& b) { return a -= b; }
    friend Term operator*(const Term& a, const Term& b);
    friend Term operator*(Term a, const QRat& c) { return a *= c; }
    friend Term operator*(const QRat& c, Term a) { return a *= c; }
    friend bool operator==(const Term& a, const Term& b) = default;

    Term map_coeffs(const std::function<QRat(const QRat&)>& f) const;
    bool mentions(AtomKind kind, const std::string& name) const;

    /// Canonical text, readable back by parse_term.
    std::string to_string() const;

private:
    Terms terms_;
};

std::string atom_to_string(const Atom& a);

Term apply_letter(const Letter& l, const Term& e);
/// Applies the innermost letter first.
Term apply_word(const Word& w, const Term& e);

/// Names the parser resolves; differentials are "d" + coordinate.
struct Symbols {
    std::vector<std::string> coords;
    std::vector<std::string> params;
    std::vector<std::string> funcs;
    bool allow_diffs = false;
};

/// Grammar: sums of products of numbers, q, params, coordinates, function
/// symbols with partial subscripts (u_xt), and operator applications
/// D_x^k(e), S_x[a](e), S_x[2a](e), d_x(e), dq_x(e), dqh_x(e).
/// Throws MathError with the offending position.
Term parse_term(std::string_view text, const Symbols& sym);

/// q -> 1: dilations dropped, Jackson letters become partials. Throws on a pole.
Term classical_limit(const Term& e);
/// The automorphism q -> 1/q: D^k -> D^-k and dq <-> dqh.
Term invert_q(const Term& e);
/// Replaces the function atom lhs (a bare symbol or a pure partial of one)
/// and all its descendants. Throws when nothing matches.
Term substitute(const Term& e, const Atom& lhs, const Term& rhs);
/// a = c b for some nonzero c in Q(q).
bool equal_up_to_scalar(const Term& a, const Term& b);

// ------------------------------------------------------------ calculi

/// Index into the differential list, equal to the coordinate index.
using Diff = int;

struct Step {
    enum class Kind { limit, invert, subst, diff, scale, add } kind;
    std::string text;
    Atom lhs{AtomKind::func, "", {}};
    Term rhs;
    std::string var;
};

struct Scenario {
    std::string label;
    std::string identity;      // descriptive name of the displayed result
    bool diagnostic = false;
    std::optional<std::pair<Diff, Diff>> from_curvature;
    Term source;               // used when not from_curvature
    std::vector<Step> steps;
    Term target;
};

struct CalculusSpec {
    std::string name;
    std::vector<std::string> coords;
    std::vector<std::string> params;
    std::vector<std::string> funcs;
    std::vector<std::pair<Diff, Diff>> basis;
    /// rules[xi][c][eta]: d_xi * c = sum_eta rules[xi][c][eta] d_eta (absent when undeclared).
    std::vector<std::vector<std::optional<std::vector<Term>>>> rules;
    int rule_duplicates = 0;
    /// Coordinate commutation c_j c_i = q^k c_i c_j for j > i; absent means 1.
    std::map<std::pair<int, int>, int> commute;
    /// Non-basis products d_a d_b as combinations of basis elements.
    std::map<std::pair<Diff, Diff>, std::vector<Term>> wedge;
    /// lift[xi][eta]: d_xi * F = sum_eta lift[xi][eta](F) d_eta, linear in F.
    std::vector<std::vector<Term>> lift;
    /// df[xi]: dF = sum_xi df[xi](F) d_xi.
    std::vector<Term> df;
    std::vector<Term> connection;  // coefficient of each differential, may be empty
    std::vector<Scenario> scenarios;

    Symbols symbols(bool diffs = false) const;
    std::string diff_name(Diff d) const { return "d" + coords.at(static_cast<std::size_t>(d)); }
    std::string basis_name(std::size_t b) const;
};

/// Declarative text format, one directive per line; see data/calculi.
CalculusSpec parse_calculus(std::string_view text);
CalculusSpec load_calculus(const std::string& path);

/// Generic rule F -> rule(f), i.e. every F atom O(F) becomes O(f).
Term apply_linear_rule(const Term& rule, const Term& f);

/// Graded expression: key is the ordered list of differentials (empty for
/// degree 0; degree-2 keys are basis pairs after normal ordering).
using FormExpr = std::map<std::vector<Diff>, Term>;

enum class FoldOrder { right_to_left, left_to_right };

/// One factor of an unordered product: a coefficient or a differential.
struct FormFactor {
    std::optional<Diff> diff;
    Term coeff;
};
using FormProduct = std::vector<FormFactor>;
/// Sum of ordered products, e.g. "dx*u - u*dt*dx".
std::vector<std::pair<QRat, FormProduct>> parse_form_input(std::string_view text, const CalculusSpec& spec);

/// Moves coefficients left of differentials with the lift rules and reduces
/// 2-forms to the basis. Throws "non-terminating rule set" when the fold
/// exceeds its step budget.
FormExpr normal_order(const std::vector<std::pair<QRat, FormProduct>>& e, const CalculusSpec& spec,
                      FoldOrder order = FoldOrder::right_to_left);
std::string form_to_string(const FormExpr& f, const CalculusSpec& spec);

/// Coefficient of each basis 2-form in dA + A^2.
std::vector<Term> curvature(const std::vector<Term>& A, const CalculusSpec& spec);

struct ValidationIssue {
    std::string check;
    std::string detail;
};
struct ValidationReport {
    std::vector<ValidationIssue> failures;
    std::vector<ValidationIssue> diagnostics;  // never affect ok()
    int checks_run = 0;
    bool ok() const { return failures.empty(); }
};
ValidationReport validate_calculus(const CalculusSpec& spec);

/// Product with the coordinate commutation applied between coordinate atoms;
/// function symbols commute with everything (pointwise products).
Term coord_product(const Term& a, const Term& b, const CalculusSpec& spec);

struct ScenarioResult {
    std::string label;
    std::string identity;
    bool diagnostic = false;
    bool pass = false;
    std::string result;  // canonical text of the final expression
    std::string target;
    std::string error;   // non-empty when a step was rejected
};
/// Runs the source through the steps and compares with the target up to scalar.
ScenarioResult run_scenario(const Scenario& s, const CalculusSpec& spec);
Term run_steps(Term e, const std::vector<Step>& steps);

// ------------------------------------------------------------ Cole-Hopf

/// h_n(x, alpha t) = sum_k n!/(k!(n-2k)!) x^{n-2k} (alpha t)^k in slots x and t1.
MultiPoly heat_polynomial(int n, const QRat& alpha);
/// psi^3 (u_t + 2 u u_x + alpha u_xx + beta u_x) with u = sign*alpha psi_x/psi,
/// psi in slots x and t1. The default sign is the transform as stated.
MultiPoly cole_hopf_residual(const MultiPoly& psi, const QRat& alpha, const QRat& beta, int sign = -1);

}  // namespace qkp::fodc

#include "qkp/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <type_traits>

#include "json.hpp"
#include "qkp/error.hpp"
#include "qkp/fodc.hpp"
#include "qkp/hirota.hpp"
#include "qkp/jackson.hpp"
#include "qkp/orepsdo.hpp"

namespace qkp::cli {

namespace {

const QRat q = QRat::q();
MultiPoly X(int k = 1) { return MultiPoly::variable(var::x, k); }
MultiPoly T(int i, int k = 1) { return MultiPoly::variable(var::t(i), k); }

// ------------------------------------------------------------ residual text

std::string first_term(const MultiPoly& p) {
    if (p.is_zero()) return "";
    const auto& [e, c] = *p.terms().begin();
    return MultiPoly::monomial(e, c).to_string();
}
std::string first_term(const TruncSeries& s) { return first_term(s.poly()); }
std::string first_term(const OrePsiDO& op) {
    for (auto it = op.coeffs().rbegin(); it != op.coeffs().rend(); ++it)
        if (!it->second.is_zero())
            return "(" + first_term(it->second) + ")*" + op.calculus().symbol() + "^" + std::to_string(it->first);
    return "";
}
std::string first_term(const LaurentObject& l) {
    for (auto it = l.coeffs().rbegin(); it != l.coeffs().rend(); ++it)
        if (!it->second.is_zero())
            return "(" + first_term(it->second) + ")*" + aux_name(l.tag()) + "^" + std::to_string(it->first);
    return "";
}
std::string first_term(const OpNormal& op) {
    for (const auto& [m, c] : op.terms)
        if (!c.is_zero()) return "(" + first_term(c) + ")*Dq^" + std::to_string(m);
    return "";
}
std::string first_term(const std::vector<YResidual>& rs) {
    for (const auto& r : rs)
        if (!r.residual.is_zero()) return "[" + MultiPoly::monomial(r.y, QRat(1)).to_string() + "] " + first_term(r.residual);
    return "";
}
std::string first_term(const fodc::Term& t) {
    if (t.is_zero()) return "";
    const auto& [m, c] = *t.terms().begin();
    return fodc::Term::monomial(m, c).to_string();
}

bool is_zero(const OpNormal& op) {
    return std::all_of(op.terms.begin(), op.terms.end(), [](const auto& kv) { return kv.second.is_zero(); });
}
bool is_zero(const std::vector<YResidual>& rs) {
    return std::all_of(rs.begin(), rs.end(), [](const YResidual& r) { return r.residual.is_zero(); });
}
template <class R>
bool is_zero(const R& r) {
    return r.is_zero();
}

/// Collects residuals; the first nonzero one names the failure.
class Tally {
public:
    template <class R>
    void zero(const std::string& where, const R& residual) {
        ++count_;
        if (!is_zero(residual) && first_.empty()) first_ = where + ": " + first_term(residual);
    }
    template <class R>
    void nonzero(const std::string& where, const R& residual) {
        ++count_;
        if (is_zero(residual) && first_.empty()) first_ = where + ": residual vanishes";
    }
    void expect(bool ok, const std::string& where, const std::string& text) {
        ++count_;
        if (!ok && first_.empty()) first_ = where + ": " + text;
    }
    void error(const std::string& where, const std::exception& e) { expect(false, where, std::string("error: ") + e.what()); }
    bool holds() const { return first_.empty(); }
    const std::string& first() const { return first_; }
    int count() const { return count_; }

private:
    std::string first_;
    int count_ = 0;
};

using Params = std::map<std::string, std::string>;

CheckRecord record(std::string id, std::string identity, Params params, const Tally& t, bool diagnostic = false) {
    CheckRecord r;
    r.check_id = std::move(id);
    r.identity = std::move(identity);
    r.parameters = std::move(params);
    r.holds = t.holds();
    r.status = diagnostic ? Status::diagnostic : (t.holds() ? Status::pass : Status::fail);
    r.first_nonzero_term = t.first();
    r.detail = "cases: " + std::to_string(t.count());
    return r;
}

/// One job of a suite; fodc jobs yield several records.
struct CheckDef {
    std::string id;
    std::function<std::vector<CheckRecord>()> run;

    template <class F>
    CheckDef(std::string i, F f) : id(std::move(i)) {
        if constexpr (std::is_same_v<std::invoke_result_t<F>, CheckRecord>)
            run = [f] { return std::vector<CheckRecord>{f()}; };
        else
            run = std::move(f);
    }
};

std::string str(int v) { return std::to_string(v); }

// ------------------------------------------------------------ samples

std::vector<TauSample> corpus(const Config& c) {
    std::vector<TauSample> v = schur_corpus();
    if (c.corrupt_corpus)
        for (auto& s : v)
            if (s.id == "s_21") s.tau = control_tau().tau;
    return v;
}

std::vector<TauSample> partition_taus(const Config& c, int max_size) {
    std::vector<TauSample> v;
    for (int n = 0; n <= max_size; ++n)
        for (const auto& p : partitions(n)) v.push_back({partition_id(p), translated_schur_tau(p), true});
    if (c.corrupt_corpus)
        for (auto& s : v)
            if (s.id == "s_21") s.tau = control_tau().tau;
    return v;
}

int time_vars(const Config& c) { return std::clamp(c.vars, 1, kMaxTimes); }

/// 1 + four random monomials in x and t_1..t_min(N,3), rational coefficients.
MultiPoly random_unit_series(std::mt19937_64& rng, const Config& c) {
    std::uniform_int_distribution<int> coef(-3, 3), slot(1, std::min(time_vars(c), 3)), ex(1, 2), xe(0, 2);
    MultiPoly p(1);
    for (int i = 0; i < 4; ++i) {
        Exponents e{};
        e[var::t(slot(rng))] = static_cast<std::uint8_t>(ex(rng));
        e[var::x] = static_cast<std::uint8_t>(xe(rng));
        p += MultiPoly::monomial(e, QRat(coef(rng)));
    }
    return p;
}

/// Random polynomial in x (degree <= max_x) and t_1..t_N with Q(q) coefficients.
MultiPoly random_xt_poly(std::mt19937_64& rng, const Config& c, int max_x) {
    std::uniform_int_distribution<int> coef(-3, 3), ex(0, max_x), slot(1, time_vars(c)), te(0, 1);
    MultiPoly p;
    for (int i = 0; i < 5; ++i) {
        Exponents e{};
        e[var::x] = static_cast<std::uint8_t>(ex(rng));
        e[var::t(slot(rng))] = static_cast<std::uint8_t>(te(rng));
        p += MultiPoly::monomial(e, QRat(coef(rng)) + QRat(coef(rng)) * q);
    }
    return p;
}

// ------------------------------------------------------------ factored display text

// Parses "3q^2-q+1" (no parentheses) into Q(q).
QRat parse_q_poly(const std::string& s) {
    QRat r;
    std::size_t i = 0;
    while (i < s.size()) {
        long sign = 1;
        if (s[i] == '+' || s[i] == '-') sign = s[i++] == '-' ? -1 : 1;
        long c = 1;
        bool digits = false;
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) {
            c = std::stol(s.substr(i, j - i));
            digits = true;
            i = j;
        }
        long e = 0;
        if (i < s.size() && s[i] == 'q') {
            e = 1;
            ++i;
            if (i < s.size() && s[i] == '^') {
                j = ++i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                e = std::stol(s.substr(i, j - i));
                i = j;
            }
        } else if (!digits) {
            throw UsageError("bad q-polynomial: " + s);
        }
        r += QRat(sign * c) * QRat::q_pow(e);
    }
    return r;
}

struct Factor {
    std::string base;  // "q", "x", "D_q", "(..)" or an integer
    int power = 1;
    std::string text;
};

std::vector<std::pair<int, std::vector<Factor>>> split_factors(const std::string& text) {
    std::vector<std::pair<int, std::vector<Factor>>> terms;
    std::size_t i = 0;
    int sign = 1;
    std::vector<Factor> cur;
    auto flush = [&] {
        if (!cur.empty()) terms.emplace_back(sign, std::move(cur));
        cur.clear();
    };
    while (i < text.size()) {
        const char ch = text[i];
        if (ch == ' ' || ch == '*') {
            ++i;
            continue;
        }
        if (ch == '+' || ch == '-') {
            flush();
            sign = ch == '-' ? -1 : 1;
            ++i;
            continue;
        }
        Factor f;
        const std::size_t start = i;
        if (ch == '(') {
            int depth = 0;
            do {
                if (text[i] == '(') ++depth;
                if (text[i] == ')') --depth;
                ++i;
            } while (i < text.size() && depth > 0);
            if (depth != 0) throw UsageError("unbalanced parentheses");
            f.base = text.substr(start, i - start);
        } else if (text.compare(i, 3, "D_q") == 0) {
            f.base = "D_q";
            i += 3;
        } else if (ch == 'q' || ch == 'x') {
            f.base = std::string(1, ch);
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            f.base = text.substr(start, i - start);
        } else {
            throw UsageError(std::string("unexpected '") + ch + "' in factored text");
        }
        if (i < text.size() && text[i] == '^') {
            std::size_t j = ++i;
            if (j < text.size() && text[j] == '-') ++j;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            f.power = std::stoi(text.substr(i, j - i));
            i = j;
        }
        f.text = text.substr(start, i - start);
        cur.push_back(std::move(f));
    }
    flush();
    return terms;
}

OpNormal parse_factored(const std::string& text) {
    OpNormal op;
    for (const auto& [sign, factors] : split_factors(text)) {
        QRat c(sign);
        int xs = 0, m = 0;
        for (const auto& f : factors) {
            if (f.base == "x") xs += f.power;
            else if (f.base == "D_q") m += f.power;
            else if (f.base == "q") c *= QRat::q_pow(f.power);
            else if (f.base.front() == '(') c *= parse_q_poly(f.base.substr(1, f.base.size() - 2)).pow(f.power);
            else c *= QRat(std::stol(f.base)).pow(f.power);
        }
        MultiPoly& slot = op.terms[m];
        slot += X(xs) * c;
    }
    return op;
}

constexpr const char* kDisplayD2 = "qx^2(q-1)^2D_q^2+(q^2-1)xD_q+1";
constexpr const char* kDisplayD3 = "(q-1)^3q^3x^3D_q^3+qx^2(q-1)(q^3-1)D_q^2+(q^3-1)xD_q+1";

// (1 + (q-1) x Dq)^n by repeated composition
OpNormal dilation_brute_force(int n) {
    const OpNormal step =
        OpNormal::identity() + compose(OpNormal::multiplication(X() * (q - 1)), OpNormal::dq_power(1));
    OpNormal r = OpNormal::identity();
    for (int i = 0; i < n; ++i) r = compose(r, step);
    return r;
}

// ------------------------------------------------------------ jackson

std::vector<CheckDef> jackson_checks(const Config& cfg) {
    std::vector<CheckDef> out;
    out.push_back({"jackson.d-power-normal-form", [] {
                       Tally t;
                       for (int n = 0; n <= 8; ++n) t.zero("n=" + str(n), dn_to_dq(n) - dilation_brute_force(n));
                       return record("jackson.d-power-normal-form",
                                     "D^n as a Jackson normal form equals (1+(q-1)xD_q)^n expanded", {{"n_max", "8"}},
                                     t);
                   }});
    for (const auto& [n, display] : {std::pair{2, kDisplayD2}, std::pair{3, kDisplayD3}}) {
        const std::string id = "jackson.d-power-display-" + str(n);
        out.push_back({id, [n, display, id] {
                           Tally t;
                           std::string rendered;
                           try {
                               rendered = to_factored_string(dn_to_dq(n));
                               t.expect(factor_terms(rendered) == factor_terms(display), "factors",
                                        rendered + " vs " + display);
                               t.zero("operator", dn_to_dq(n) - parse_factored(display));
                           } catch (const std::exception& e) {
                               t.error("render", e);
                           }
                           CheckRecord r = record(id, "factored rendering of D^" + str(n) + " matches the displayed formula",
                                                  {{"n", str(n)}}, t);
                           r.detail = rendered;
                           return r;
                       }});
    }
    out.push_back({"jackson.dq-power-roundtrip", [] {
                       Tally t;
                       for (int n = 0; n <= 6; ++n)
                           for (int r = 0; r <= 10; ++r) {
                               MultiPoly via;
                               for (const auto& [m, c] : dn_to_dq(n).terms)
                                   via += c * (m == 0 ? X(r) : dqn_to_d(m).apply(X(r)));
                               t.zero("n=" + str(n) + " r=" + str(r), via - apply_D(X(r), n));
                           }
                       return record("jackson.dq-power-roundtrip",
                                     "D_q^m rewritten in dilations, composed with D^n in D_q powers, acts as D^n",
                                     {{"n_max", "6"}, {"r_max", "10"}}, t);
                   }});
    out.push_back({"jackson.q-leibniz", [cfg] {
                       Tally t;
                       std::mt19937_64 rng(cfg.seed ^ 0x1eb1u);
                       for (int n = -3; n <= 4; ++n)
                           for (int i = 0; i < 5; ++i) {
                               const MultiPoly f = random_xt_poly(rng, cfg, 3), g = random_xt_poly(rng, cfg, 3);
                               const std::string where = "n=" + str(n) + " sample=" + str(i);
                               try {
                                   t.zero(where, qleibniz(n, f, cfg.depth).apply(g) - apply_Dq_power(f * g, n));
                               } catch (const std::exception& e) {
                                   t.error(where, e);
                               }
                           }
                       return record("jackson.q-leibniz", "q-Leibniz normal form of D_q^n f agrees with direct application",
                                     {{"n_range", "-3..4"}, {"samples", "5"}, {"depth", str(cfg.depth)}}, t);
                   }});
    return out;
}

// ------------------------------------------------------------ qschur

std::vector<CheckDef> qschur_checks(const Config&) {
    std::vector<CheckDef> out;
    out.push_back({"qschur.shifted-times", [] {
                       Tally t;
                       for (int k = 0; k <= 8; ++k) {
                           std::vector<TruncSeries> args;
                           for (int i = 1; i <= std::max(k, 1); ++i)
                               args.emplace_back((i <= kMaxTimes ? T(i) : MultiPoly()) + c_of_x(i));
                           t.zero("k=" + str(k), qschur(k) - schur_p(k, args).poly());
                       }
                       return record("qschur.shifted-times", "q-Schur polynomial equals p_k(t + c(x))", {{"k_max", "8"}}, t);
                   }});
    out.push_back({"qschur.lowering", [] {
                       Tally t;
                       for (int k = 0; k <= 8; ++k) {
                           t.zero("D_q k=" + str(k), apply_Dq(qschur(k)) - qschur(k - 1));
                           t.zero("d1 k=" + str(k), qschur(k).partial(var::t(1)) - qschur(k - 1));
                       }
                       return record("qschur.lowering", "D_q and d/dt1 both lower the q-Schur index by one",
                                     {{"k_max", "8"}}, t);
                   }});
    out.push_back({"qschur.display", [] {
                       Tally t;
                       t.zero("k=0", qschur(0) - MultiPoly(1));
                       t.zero("k=1", qschur(1) - (X() + T(1)));
                       t.zero("k=2", qschur(2) - (X(2) * ((q - 1) / (q * q - 1)) + T(1) * X() +
                                                  T(1, 2) * QRat::frac(1, 2) + T(2)));
                       return record("qschur.display", "first q-Schur polynomials match their displayed values",
                                     {{"k_max", "2"}}, t);
                   }});
    return out;
}

// ------------------------------------------------------------ hirota-classical

std::vector<CheckDef> hirota_classical_checks(const Config& cfg) {
    std::vector<CheckDef> out;
    const std::string P = "hirota-classical.";
    out.push_back({P + "kp-bilinear", [cfg, P] {
                       Tally t;
                       for (const auto& s : partition_taus(cfg, 6)) t.zero(s.id, kp_bilinear_residual(s.tau));
                       return record(P + "kp-bilinear", "KP bilinear equation on translated Schur taus",
                                     {{"partition_size_max", "6"}}, t);
                   }});
    out.push_back({P + "kp-bilinear-control", [P] {
                       Tally t;
                       const MultiPoly r = kp_bilinear_residual(control_tau().tau);
                       t.expect(r == MultiPoly(24), "control", "residual " + r.to_string() + ", expected 24");
                       return record(P + "kp-bilinear-control", "KP bilinear residual of 1 + t1^2 is 24",
                                     {{"tau", control_tau().id}}, t);
                   }});
    out.push_back({P + "hierarchy", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg))
                           for (int n = 1; n <= 5; ++n) t.zero(s.id + " n=" + str(n), hierarchy_eq(n, s.tau));
                       t.nonzero("control n=3", hierarchy_eq(3, control_tau().tau));
                       return record(P + "hierarchy", "Hirota form of the n-th hierarchy equation", {{"n_max", "5"}}, t);
                   }});
    out.push_back({P + "generating", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) t.zero(s.id, generating_hirota(s.tau, 5));
                       return record(P + "generating", "generating Hirota identity, every y-coefficient",
                                     {{"y_weight", "5"}}, t);
                   }});
    out.push_back({P + "sn-formal", [cfg, P] {
                       Tally t;
                       for (const auto& r : random_controls(cfg.seed, 20, 8))
                           for (int n = 0; n <= 6; ++n) t.zero(r.id + " n=" + str(n), sn_identity_residual(n, r.tau));
                       return record(P + "sn-formal", "s_n from Miwa shifts equals p_n(D~)tau.tau for any polynomial",
                                     {{"samples", "20"}, {"sample_weight", "8"}, {"n_max", "6"}}, t);
                   }});
    out.push_back({P + "fay", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) t.zero(s.id, fay_residual(s.tau));
                       t.nonzero("control", fay_residual(control_tau().tau));
                       return record(P + "fay", "differential Fay identity as a bivariate polynomial", {}, t);
                   }});
    out.push_back({P + "fay-log", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) {
                           const LogFay lf = fay_log_form(s.tau, 4, cfg.weight);
                           t.zero(s.id, lf.lhs - lf.rhs);
                       }
                       return record(P + "fay-log", "logarithmic form of the differential Fay identity",
                                     {{"order", "4"}, {"weight", str(cfg.weight)}}, t);
                   }});
    out.push_back({P + "log-encoding", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) {
                           const LogEncoding e = log_encoding(s.tau, 4, cfg.weight);
                           for (std::size_t i = 0; i < e.low_order.size(); ++i)
                               t.zero(s.id + " lambda^-" + str(static_cast<int>(i) + 2), e.low_order[i]);
                           for (int i = 1; i <= 4; ++i) t.zero(s.id + " i=" + str(i), e.plucker[static_cast<std::size_t>(i)]);
                       }
                       return record(P + "log-encoding",
                                     "low-order relations in f = d1 log tau and the Schur relations for p_i(Z)",
                                     {{"order", "4"}, {"weight", str(cfg.weight)}}, t);
                   }});
    out.push_back({P + "log-bridge", [cfg, P] {
                       Tally t;
                       for (const auto& r : random_controls(cfg.seed + 1, 5, 6)) {
                           const LogEncoding e = log_encoding(r.tau, 4, cfg.weight);
                           for (std::size_t i = 0; i < e.bridge.size(); ++i) t.zero(r.id + " #" + str(static_cast<int>(i)), e.bridge[i]);
                       }
                       return record(P + "log-bridge", "d1^2 of p_k p_m(-d~) log tau equals p_k p_m(-d~) u",
                                     {{"samples", "5"}, {"sample_weight", "6"}, {"weight", str(cfg.weight)}}, t);
                   }});
    out.push_back({P + "kp-flow", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) {
                           const FlowCheck f = kp_flow_check(s.tau, cfg.weight);
                           t.zero(s.id + " r1", f.r1);
                           t.zero(s.id + " r2", f.r2);
                       }
                       return record(P + "kp-flow", "s_4 flow and the KP equation for u = d1^2 log tau",
                                     {{"weight", str(cfg.weight)}}, t);
                   }});
    out.push_back({P + "bilinear-residue", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) t.zero(s.id, bilinear_residue_check(s.tau, 6));
                       t.nonzero("control", bilinear_residue_check(control_tau().tau, 4));
                       return record(P + "bilinear-residue", "residue form of the bilinear identity", {{"y_weight", "6"}}, t);
                   }});
    out.push_back({P + "wave-product", [cfg, P] {
                       Tally t;
                       const int w = std::min(cfg.weight, 7);
                       for (const auto& s : corpus(cfg)) {
                           const WaveFunction p = wave_function(s.tau, 4, WaveKind::psi, w);
                           const WaveFunction ps = wave_function(s.tau, 4, WaveKind::psi_star, w);
                           const LaurentObject hat = p.psi_hat * ps.psi_hat;
                           for (int n = 0; n <= 4; ++n)
                               t.zero(s.id + " n=" + str(n), hat.coeff(-n) - sn_from_tau(n, s.tau, w));
                       }
                       return record(P + "wave-product", "coefficients of psi psi* without exponentials are s_n",
                                     {{"z_order", "4"}, {"weight", str(w)}}, t);
                   }});
    out.push_back({P + "zero-curvature", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) t.zero(s.id, zs_residual(s.tau, 2, 3, cfg.depth, 8));
                       t.nonzero("control", zs_residual(control_tau().tau, 2, 3, cfg.depth, 8));
                       return record(P + "zero-curvature", "zero curvature of (L^2)_+ and (L^3)_+ in the t1 calculus",
                                     {{"m", "2"}, {"n", "3"}, {"depth", str(cfg.depth)}, {"weight", "8"}}, t);
                   }});
    return out;
}

// ------------------------------------------------------------ hirota-q

std::vector<CheckDef> hirota_q_checks(const Config& cfg) {
    std::vector<CheckDef> out;
    const std::string P = "hirota-q.";
    out.push_back({P + "bilinear", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) t.zero(s.id + " n=1", q_bilinear_check(s.tau, 1, 4));
                       t.zero("s_21 n=2", q_bilinear_check(translated_schur_tau({2, 1}), 2, 3));
                       t.nonzero("control", q_bilinear_check(control_tau().tau, 1, 4));
                       return record(P + "bilinear", "q-bilinear residue identity with both factors D^n tau_q",
                                     {{"y_weight", "4"}}, t);
                   }});
    out.push_back({P + "wave", [cfg, P] {
                       Tally t;
                       const int w = std::min(cfg.weight, 6);
                       for (const auto& s : corpus(cfg)) t.zero(s.id, qwave_check(s.tau, 5, w));
                       const MultiPoly tau = translated_schur_tau({2});
                       const OrePsiDO S = s_from_tau(tau_q_build(tau, w), 3);
                       std::vector<TruncSeries> wt;
                       for (int j = 0; j <= 3; ++j) wt.push_back(S.coeff(-j));
                       wt[1] = wt[1] + TruncSeries(X(), wt[1].trunc());
                       t.nonzero("perturbed", qwave_residual(tau, wt, 3, w));
                       return record(P + "wave", "q wave function from Miwa shifts equals the dressed q-exponential",
                                     {{"z_order", "5"}, {"weight", str(w)}}, t);
                   }});
    out.push_back({P + "exponential-ratio", [P] {
                       Tally t;
                       for (int m = 0; m <= 2; ++m)
                           for (int s = 0; s <= 2; ++s) {
                               const auto [e, sch] = bk_expansion(m, s, 5);
                               t.zero("m=" + str(m) + " s=" + str(s), e - sch);
                           }
                       return record(P + "exponential-ratio", "exp of the b_k series equals its Schur expansion",
                                     {{"order", "5"}}, t);
                   }});
    return out;
}

// ------------------------------------------------------------ dressing

std::vector<TruncSeries> dressing_samples(const Config& cfg) {
    std::mt19937_64 rng(cfg.seed ^ 0xd7e5u);
    std::vector<TruncSeries> v;
    for (int i = 0; i < 20; ++i) v.emplace_back(random_unit_series(rng, cfg), Trunc::at_weight(std::min(cfg.weight, 7)));
    return v;
}

std::vector<CheckDef> dressing_checks(const Config& cfg) {
    std::vector<CheckDef> out;
    const std::string P = "dressing.";
    const Params sample_params{{"samples", "20"}, {"weight", str(std::min(cfg.weight, 7))}};
    out.push_back({P + "u-two-forms", [cfg, P, sample_params] {
                       Tally t;
                       const auto v = dressing_samples(cfg);
                       for (std::size_t i = 0; i < v.size(); ++i) {
                           const UFormula u = u_formula(v[i]);
                           t.zero("sample " + str(static_cast<int>(i)), u.u84 - u.u88);
                       }
                       return record(P + "u-two-forms", "u written with 1 - D equals u written with -(q-1)xD_q",
                                     sample_params, t);
                   }});
    out.push_back({P + "u-is-a1", [cfg, P, sample_params] {
                       Tally t;
                       const auto v = dressing_samples(cfg);
                       for (std::size_t i = 0; i < v.size(); ++i) {
                           const std::string where = "sample " + str(static_cast<int>(i));
                           const OrePsiDO S = s_from_tau(v[i], 3);
                           const Dressing d = dress(S, 1);
                           t.zero(where + " a1", d.a[1] - u_formula(v[i]).u84);
                           const TruncSeries w1 = S.coeff(-1);
                           t.zero(where + " a0", d.a[0] - (w1 - apply_D(w1)));
                       }
                       return record(P + "u-is-a1", "dressing coefficients a0 = w1 - D(w1) and a1 = u", sample_params, t);
                   }});
    out.push_back({P + "classical-limit", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) {
                           const UFormula u = u_formula(tau_q_build(s.tau, cfg.weight));
                           const MultiPoly at_one = u.u84.poly().map_coeffs([](const QRat& c) { return QRat(c.eval_at(1)); });
                           const MultiPoly at_x0 = at_one.filtered([](const Exponents& e) { return e[var::x] == 0; });
                           const TruncSeries expect =
                               series_log(TruncSeries(s.tau, Trunc::at_weight(cfg.weight))).partial(var::t(1)).partial(var::t(1));
                           t.zero(s.id, TruncSeries(at_x0, u.u84.trunc()) - expect);
                       }
                       return record(P + "classical-limit", "u at q = 1, x = 0 equals d1^2 log tau",
                                     {{"weight", str(cfg.weight)}}, t);
                   }});
    out.push_back({P + "sato-flow", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg))
                           t.zero(s.id, sato_flow_residual(tau_q_build(s.tau, std::min(cfg.weight, 7)), std::min(cfg.depth, 4)));
                       return record(P + "sato-flow", "first qKP Sato flow d1 S + (L)_- S = 0 for S built from tau_q",
                                     {{"depth", str(std::min(cfg.depth, 4))}, {"weight", str(std::min(cfg.weight, 7))}}, t,
                                     true);
                   }});
    out.push_back({P + "x-over-q", [cfg, P] {
                       // the literal x -> x/q rule is multiplicative iff it is conjugation by a dilation
                       Tally t;
                       const int d = std::min(cfg.depth, 4);
                       for (const auto& s : corpus(cfg)) {
                           const OrePsiDO S = s_from_tau(tau_q_build(s.tau, 6), d);
                           const OrePsiDO Si = invert(S, -d);
                           const OrePsiDO lhs = compose(substitute_x_over_q(S), substitute_x_over_q(Si), -d);
                           t.zero(s.id, (lhs - OrePsiDO::identity(S.calculus())).truncated_below(-d));
                       }
                       return record(P + "x-over-q", "coefficient rule V -> V_{x/q} respects S S^-1 = 1",
                                     {{"depth", str(d)}, {"weight", "6"}}, t, true);
                   }});
    return out;
}

// ------------------------------------------------------------ qkdv

std::vector<CheckDef> qkdv_checks(const Config& cfg) {
    std::vector<CheckDef> out;
    const std::string P = "qkdv.";
    out.push_back({P + "u-relation", [cfg, P] {
                       Tally t;
                       for (const auto& s : corpus(cfg)) t.zero(s.id, qkdv_pack(tau_q_build(s.tau, cfg.weight)).u1_residual);
                       return record(P + "u-relation", "(q-1)x u = s0 + D(s0) for s0, u built from log tau_q",
                                     {{"weight", str(cfg.weight)}}, t);
                   }});
    out.push_back({P + "operator-expansions", [cfg, P] {
                       Tally t;
                       std::mt19937_64 rng(cfg.seed ^ 0x9cd7u);
                       for (int i = 0; i < 5; ++i) {
                           const QKdVExpansions e =
                               qkdv_expansions(TruncSeries(random_unit_series(rng, cfg), Trunc::at_weight(std::min(cfg.weight, 7))));
                           const std::string w = "sample " + str(i);
                           t.zero(w + " D_q s0", e.dq_s0);
                           t.zero(w + " D_q^2 s0", e.dq2_s0);
                           t.zero(w + " D_q h^2", e.dq_h2);
                           t.zero(w + " D_q s0^2", e.dq_s0_sq);
                       }
                       return record(P + "operator-expansions", "expansions of D_q s0, D_q^2 s0, D_q h^2 and D_q s0^2",
                                     {{"samples", "5"}, {"weight", str(std::min(cfg.weight, 7))}}, t);
                   }});
    return out;
}

// ------------------------------------------------------------ fodc

std::vector<std::string> calculus_files(const Config& cfg) {
    std::vector<std::string> files;
    const std::filesystem::path dir = std::filesystem::path(cfg.data_dir) / "calculi";
    if (!std::filesystem::is_directory(dir)) throw UsageError("no calculus directory at " + dir.string());
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".calc") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    return files;
}

CheckRecord validation_record(const fodc::CalculusSpec& spec, const std::string& file) {
    const fodc::ValidationReport v = fodc::validate_calculus(spec);
    Tally t;
    for (const auto& f : v.failures) t.expect(false, f.check, f.detail);
    CheckRecord r = record("fodc." + spec.name + ".validation", "d^2 = 0, Leibniz rule and rule-table consistency",
                           {{"file", std::filesystem::path(file).filename().string()}}, t);
    r.detail = std::to_string(v.checks_run) + " checks, " + std::to_string(v.failures.size()) + " failures, " +
               std::to_string(v.diagnostics.size()) + " notes";
    return r;
}

// result - c target for the scalar c matching the target's first monomial
std::string scenario_residual(const fodc::ScenarioResult& res, const fodc::CalculusSpec& spec) {
    if (!res.error.empty()) return "error: " + res.error;
    try {
        const fodc::Symbols sym = spec.symbols();
        const fodc::Term a = fodc::parse_term(res.result, sym), b = fodc::parse_term(res.target, sym);
        if (b.is_zero()) return first_term(a);
        const auto& [m, c] = *b.terms().begin();
        const auto it = a.terms().find(m);
        const fodc::Term d = it == a.terms().end() ? a : a - b * (it->second / c);
        return first_term(d.is_zero() ? a : d);
    } catch (const std::exception& e) {
        return res.result;
    }
}

std::vector<CheckRecord> calculus_records(const std::string& file) {
    std::vector<CheckRecord> out;
    fodc::CalculusSpec spec;
    try {
        spec = fodc::load_calculus(file);
    } catch (const std::exception& e) {
        Tally t;
        t.error("load", e);
        out.push_back(record("fodc." + std::filesystem::path(file).stem().string() + ".validation",
                             "calculus file parses", {{"file", std::filesystem::path(file).filename().string()}}, t));
        return out;
    }
    out.push_back(validation_record(spec, file));
    for (const auto& s : spec.scenarios) {
        const fodc::ScenarioResult res = fodc::run_scenario(s, spec);
        Tally t;
        t.expect(res.pass, "result", scenario_residual(res, spec));
        CheckRecord r = record("fodc." + spec.name + "." + s.label, s.identity.empty() ? s.label : s.identity,
                               {{"file", std::filesystem::path(file).filename().string()}}, t, s.diagnostic);
        r.detail = res.error.empty() ? res.result : res.error;
        out.push_back(std::move(r));
    }
    return out;
}

// ------------------------------------------------------------ cole-hopf

std::vector<CheckDef> cole_hopf_checks(const Config&) {
    std::vector<CheckDef> out;
    const std::string P = "cole-hopf.";
    out.push_back({P + "heat-polynomials", [P] {
                       Tally t;
                       for (int n = 0; n <= 8; ++n)
                           t.zero("n=" + str(n), fodc::cole_hopf_residual(fodc::heat_polynomial(n, 1), 1, 0));
                       return record(P + "heat-polynomials",
                                     "psi^3-cleared Burgers residual of u = -alpha psi_x/psi for heat polynomials",
                                     {{"alpha", "1"}, {"beta", "0"}, {"degree_max", "8"}}, t);
                   }});
    out.push_back({P + "control", [P] {
                       Tally t;
                       t.nonzero("psi=x^2", fodc::cole_hopf_residual(X(2), 1, 0));
                       return record(P + "control", "the residual is nonzero for psi = x^2", {{"alpha", "1"}}, t);
                   }});
    out.push_back({P + "backward-heat", [P] {
                       Tally t;
                       for (int n = 0; n <= 8; ++n) {
                           t.zero("n=" + str(n), fodc::cole_hopf_residual(fodc::heat_polynomial(n, -1), 1, 0, 1));
                           // psi(x - beta t, t) solves psi_t = -alpha psi_xx - beta psi_x
                           const MultiPoly x = X(), t1 = T(1);
                           const std::vector<std::pair<int, MultiPoly>> drift{{var::x, x + t1 * QRat::frac(1, 3)}};
                           t.zero("n=" + str(n) + " beta=-1/3",
                                  fodc::cole_hopf_residual(fodc::heat_polynomial(n, -1).substitute(drift), 1,
                                                           QRat::frac(-1, 3), 1));
                       }
                       return record(P + "backward-heat", "u = +alpha psi_x/psi with psi_t = -alpha psi_xx - beta psi_x",
                                     {{"alpha", "1"}, {"beta", "0, -1/3"}, {"degree_max", "8"}}, t, true);
                   }});
    return out;
}

// ------------------------------------------------------------ runner

std::vector<CheckDef> suite_checks(const std::string& name, const Config& cfg) {
    if (name == "jackson") return jackson_checks(cfg);
    if (name == "qschur") return qschur_checks(cfg);
    if (name == "hirota-classical") return hirota_classical_checks(cfg);
    if (name == "hirota-q") return hirota_q_checks(cfg);
    if (name == "dressing") return dressing_checks(cfg);
    if (name == "qkdv") return qkdv_checks(cfg);
    if (name == "cole-hopf") return cole_hopf_checks(cfg);
    if (name == "fodc") {
        std::vector<CheckDef> out;
        for (const auto& f : calculus_files(cfg)) {
            // one job per file; records are split out after the run
            out.push_back({"fodc." + std::filesystem::path(f).stem().string(), [f] { return calculus_records(f); }});
        }
        return out;
    }
    if (name == "all") {
        std::vector<CheckDef> out;
        for (const auto& s : suite_names())
            if (s != "all")
                for (auto& d : suite_checks(s, cfg)) out.push_back(std::move(d));
        return out;
    }
    throw UsageError("unknown suite '" + name + "'");
}

}  // namespace

std::string status_name(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::diagnostic: return "diagnostic";
    }
    return "fail";
}

bool SuiteReport::passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckRecord& r) { return r.status == Status::fail; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"jackson", "qschur",   "hirota-classical", "hirota-q", "dressing",
                                                "qkdv",    "fodc",     "cole-hopf",        "all"};
    return names;
}

SuiteReport run_suite(const std::string& name, const Config& config) {
    const std::vector<CheckDef> defs = suite_checks(name, config);
    std::vector<std::vector<CheckRecord>> results(defs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < defs.size(); i = next++) {
            const auto start = std::chrono::steady_clock::now();
            try {
                results[i] = defs[i].run();
            } catch (const std::exception& e) {
                Tally t;
                t.error("run", e);
                results[i] = {record(defs[i].id, "check completes", {}, t)};
            }
            const double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            for (auto& r : results[i]) r.elapsed_ms = config.timing ? ms / static_cast<double>(results[i].size()) : 0;
        }
    };
    unsigned n = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    n = std::clamp<unsigned>(n, 1, static_cast<unsigned>(std::max<std::size_t>(defs.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    SuiteReport report{name, config, {}};
    for (auto& rs : results)
        for (auto& r : rs) report.checks.push_back(std::move(r));
    std::sort(report.checks.begin(), report.checks.end(),
              [](const CheckRecord& a, const CheckRecord& b) { return a.check_id < b.check_id; });
    return report;
}

std::string to_json(const SuiteReport& report) {
    nlohmann::json j;
    j["suite"] = report.suite;
    j["seed"] = report.config.seed;
    j["config"] = {{"weight", report.config.weight}, {"vars", report.config.vars}, {"depth", report.config.depth}};
    j["passed"] = report.passed();
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& r : report.checks) {
        nlohmann::json c;
        c["check_id"] = r.check_id;
        c["identity"] = r.identity;
        c["parameters"] = r.parameters;
        c["status"] = status_name(r.status);
        c["holds"] = r.holds;
        c["first_nonzero_term"] = r.holds ? nlohmann::json(nullptr) : nlohmann::json(r.first_nonzero_term);
        c["detail"] = r.detail;
        if (report.config.timing) c["elapsed_ms"] = r.elapsed_ms;
        checks.push_back(std::move(c));
    }
    j["checks"] = std::move(checks);
    return j.dump(2) + "\n";
}

std::string to_text(const SuiteReport& report) {
    std::ostringstream os;
    int counts[3] = {0, 0, 0};
    for (const auto& r : report.checks) {
        ++counts[static_cast<int>(r.status)];
        os << status_name(r.status);
        if (r.status == Status::diagnostic) os << (r.holds ? " (holds)" : " (does not hold)");
        os << "  " << r.check_id;
        if (!r.holds) os << "  [" << r.first_nonzero_term << "]";
        if (report.config.timing) os << "  " << static_cast<long>(r.elapsed_ms) << " ms";
        os << "\n";
    }
    os << "suite " << report.suite << ": " << (report.passed() ? "PASS" : "FAIL") << " (" << counts[0] << " pass, "
       << counts[1] << " fail, " << counts[2] << " diagnostic)\n";
    return os.str();
}

std::vector<std::vector<std::string>> factor_terms(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    for (const auto& [sign, factors] : split_factors(text)) {
        std::vector<std::string> term{sign < 0 ? "-" : "+"};
        for (const auto& f : factors) term.push_back(f.text);
        std::sort(term.begin() + 1, term.end());
        out.push_back(std::move(term));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ------------------------------------------------------------ identity catalog

namespace {

int get_int(const Params& p, const std::string& key) {
    const std::string& v = p.at(key);
    try {
        std::size_t used = 0;
        const int r = std::stoi(v, &used);
        if (used == v.size()) return r;
    } catch (const std::exception&) {
    }
    throw UsageError("parameter " + key + " must be an integer, got '" + v + "'");
}

TauSample get_tau(const Params& p, const Config& cfg) {
    const std::string& id = p.at("tau");
    if (id == control_tau().id || id == "control") return control_tau();
    for (const auto& s : partition_taus(Config{}, 6))
        if (s.id == id) return s;
    for (const auto& r : random_controls(cfg.seed, 20, 8))
        if (r.id == id) return r;
    throw UsageError("unknown tau '" + id + "' (partition ids s_empty, s_1, s_21, ... up to size 6, or control)");
}

std::string text_of(const MultiPoly& p) { return p.is_zero() ? "0" : p.to_string(); }
std::string text_of(const TruncSeries& s) { return s.is_zero() ? "0" : s.to_string(); }
std::string text_of(const std::vector<YResidual>& rs) {
    std::string out;
    for (const auto& r : rs)
        if (!r.residual.is_zero())
            out += (out.empty() ? "" : "\n") + ("[" + MultiPoly::monomial(r.y, QRat(1)).to_string() + "] ") +
                   r.residual.to_string();
    return out.empty() ? "0" : out;
}

std::string render_dform(const DForm& f) {
    std::string sum;
    for (auto it = f.d_coeffs.rbegin(); it != f.d_coeffs.rend(); ++it) {
        if (it->second.is_zero()) continue;
        if (!sum.empty()) sum += " + ";
        sum += "(" + it->second.to_string() + ")*D^" + std::to_string(it->first);
    }
    return "x^" + std::to_string(f.x_power) + "*(" + sum + ")";
}

struct Entry {
    IdentityInfo info;
    std::function<std::string(const Params&, const Config&)> eval;
};

const std::vector<Entry>& catalog() {
    static const std::vector<Entry> entries{
        {{"d-power", "D^n in the Jackson normal form, factored", {{"n", "2"}}},
         [](const Params& p, const Config& c) {
             const int n = get_int(p, "n");
             const OpNormal op = dn_to_dq(n, c.depth);
             return "D^" + std::to_string(n) + " = " + (n >= 0 ? to_factored_string(op) : op.to_string());
         }},
        {{"dq-power", "D_q^n as x^-n times a polynomial in D", {{"n", "2"}}},
         [](const Params& p, const Config&) {
             const int n = get_int(p, "n");
             if (n < 1) throw UsageError("n must be >= 1");
             return "D_q^" + std::to_string(n) + " = " + render_dform(dqn_to_d(n));
         }},
        {{"q-schur", "q-Schur polynomial p~_k(x, t)", {{"k", "2"}}},
         [](const Params& p, const Config&) {
             const int k = get_int(p, "k");
             return "p~_" + std::to_string(k) + " = " + text_of(qschur(k));
         }},
        {{"kp-bilinear", "(D1^4 + 3 D2^2 - 4 D1 D3) tau.tau", {{"tau", "s_21"}}},
         [](const Params& p, const Config& c) { return "residual = " + text_of(kp_bilinear_residual(get_tau(p, c).tau)); }},
        {{"hierarchy", "(D1 Dn - 2 p_{n+1}(D~)) tau.tau", {{"n", "3"}, {"tau", "s_21"}}},
         [](const Params& p, const Config& c) {
             return "residual = " + text_of(hierarchy_eq(get_int(p, "n"), get_tau(p, c).tau));
         }},
        {{"sn-identity", "sum_j p_j(-d~)tau p_{n-j}(d~)tau - p_n(D~)tau.tau", {{"n", "2"}, {"tau", "s_21"}}},
         [](const Params& p, const Config& c) {
             return "residual = " + text_of(sn_identity_residual(get_int(p, "n"), get_tau(p, c).tau));
         }},
        {{"fay", "differential Fay identity cleared of 1/(lambda mu)", {{"tau", "s_21"}}},
         [](const Params& p, const Config& c) { return "residual = " + text_of(fay_residual(get_tau(p, c).tau)); }},
        {{"q-bilinear", "q-bilinear residue identity, y-coefficients", {{"n", "1"}, {"tau", "s_21"}, {"y_weight", "4"}}},
         [](const Params& p, const Config& c) {
             return "residual = " + text_of(q_bilinear_check(get_tau(p, c).tau, get_int(p, "n"), get_int(p, "y_weight")));
         }},
        {{"dressing-a0", "a0 of L = S Delta S^-1 against w1 - D(w1)", {{"tau", "s_21"}}},
         [](const Params& p, const Config& c) {
             const OrePsiDO S = s_from_tau(tau_q_build(get_tau(p, c).tau, c.weight), 3);
             const Dressing d = dress(S, 1);
             const TruncSeries w1 = S.coeff(-1);
             return "a0 = " + text_of(d.a[0]) + "\nw1 - D(w1) = " + text_of(w1 - apply_D(w1)) +
                    "\nresidual = " + text_of(d.a[0] - (w1 - apply_D(w1)));
         }},
        {{"dressing-a1", "a1 of the dressed operator against both closed forms of u", {{"tau", "s_21"}}},
         [](const Params& p, const Config& c) {
             const TruncSeries tq = tau_q_build(get_tau(p, c).tau, c.weight);
             const UFormula u = u_formula(tq);
             const Dressing d = dress(s_from_tau(tq, 3), 1);
             return "u = " + text_of(u.u84) + "\nresidual (two forms) = " + text_of(u.u84 - u.u88) +
                    "\nresidual (a1 - u) = " + text_of(d.a[1] - u.u84);
         }},
        {{"qkdv", "s0, u and (q-1)x u - s0 - D(s0) from log tau_q", {{"tau", "s_21"}}},
         [](const Params& p, const Config& c) {
             const QKdV k = qkdv_pack(tau_q_build(get_tau(p, c).tau, c.weight));
             return "s0 = " + text_of(k.s0) + "\nu = " + text_of(k.u) + "\nresidual = " + text_of(k.u1_residual);
         }},
        {{"zero-curvature", "d_m B_n - d_n B_m + [B_n, B_m] in the t1 calculus", {{"m", "2"}, {"n", "3"}, {"tau", "s_21"}}},
         [](const Params& p, const Config& c) {
             const OrePsiDO r = zs_residual(get_tau(p, c).tau, get_int(p, "m"), get_int(p, "n"), c.depth, 8);
             return "residual = " + (r.is_zero() ? std::string("0") : r.to_string());
         }},
        {{"cole-hopf", "psi^3 (u_t + 2 u u_x + u_xx) for u = sign psi_x/psi, psi a heat polynomial",
          {{"n", "2"}, {"sign", "-1"}}},
         [](const Params& p, const Config&) {
             const int sign = get_int(p, "sign");
             if (sign != 1 && sign != -1) throw UsageError("sign must be 1 or -1");
             const MultiPoly psi = fodc::heat_polynomial(get_int(p, "n"), sign < 0 ? 1 : -1);
             return "psi = " + text_of(psi) + "\nresidual = " + text_of(fodc::cole_hopf_residual(psi, 1, 0, sign));
         }},
    };
    return entries;
}

}  // namespace

const std::vector<IdentityInfo>& identity_catalog() {
    static const std::vector<IdentityInfo> infos = [] {
        std::vector<IdentityInfo> v;
        for (const auto& e : catalog()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

std::string eval_identity(const std::string& id, const std::map<std::string, std::string>& params,
                          const Config& config) {
    for (const auto& e : catalog()) {
        if (e.info.id != id) continue;
        Params p = e.info.defaults;
        for (const auto& [k, v] : params) {
            if (!p.count(k)) throw UsageError("identity " + id + " takes no parameter '" + k + "'");
            p[k] = v;
        }
        return e.eval(p, config);
    }
    throw UsageError("unknown identity '" + id + "'");
}

Derivation derive(const std::string& path, const Config& config) {
    const fodc::CalculusSpec spec = fodc::load_calculus(path);
    const fodc::ValidationReport v = fodc::validate_calculus(spec);
    std::ostringstream os;
    os << "calculus " << spec.name << "\n";
    os << "validation: " << (v.ok() ? "ok" : "FAILED") << " (" << v.checks_run << " checks)\n";
    for (const auto& f : v.failures) os << "  failure " << f.check << ": " << f.detail << "\n";
    for (const auto& d : v.diagnostics) os << "  note " << d.check << ": " << d.detail << "\n";
    if (!spec.connection.empty()) {
        os << "curvature:\n";
        const std::vector<fodc::Term> F = fodc::curvature(spec.connection, spec);
        for (std::size_t b = 0; b < F.size(); ++b)
            os << "  " << spec.basis_name(b) << ": " << (F[b].is_zero() ? "0" : F[b].to_string()) << "\n";
    }
    Derivation out;
    out.valid = v.ok();
    out.report = SuiteReport{"derive:" + spec.name, config, calculus_records(path)};
    std::sort(out.report.checks.begin(), out.report.checks.end(),
              [](const CheckRecord& a, const CheckRecord& b) { return a.check_id < b.check_id; });
    for (const auto& s : spec.scenarios) {
        const fodc::ScenarioResult r = fodc::run_scenario(s, spec);
        os << "check " << r.label << ": "
           << (r.diagnostic ? (r.pass ? "diagnostic (holds)" : "diagnostic (does not hold)") : (r.pass ? "pass" : "fail"))
           << "\n";
        if (!r.error.empty()) os << "  error: " << r.error << "\n";
        else os << "  result: " << r.result << "\n  target: " << r.target << "\n";
    }
    out.text = os.str();
    return out;
}

}  // namespace qkp::cli

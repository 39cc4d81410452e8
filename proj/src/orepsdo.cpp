#include "qkp/orepsdo.hpp"

#include <algorithm>

#include "qkp/error.hpp"
#include "qkp/jackson.hpp"

namespace qkp {

// ---- Calculus

TruncSeries Calculus::sigma(const TruncSeries& f, int k) const {
    switch (kind) {
        case Kind::classical: return f;
        case Kind::q: return apply_D(f, k);
        case Kind::q_inverse: return apply_D(f, -k);
    }
    return f;
}

TruncSeries Calculus::delta(const TruncSeries& f) const {
    switch (kind) {
        case Kind::classical: return f.partial(var);
        case Kind::q: return apply_Dq(f);
        case Kind::q_inverse: return apply_D1q(f);
    }
    return f;
}

QRat Calculus::binomial(int i, int k) const {
    switch (kind) {
        case Kind::classical: return QRat(binom(i, k));
        case Kind::q: return qbinom(i, k);
        case Kind::q_inverse: return qbinom(i, k).invert_q();
    }
    return QRat();
}

std::string Calculus::symbol() const {
    switch (kind) {
        case Kind::classical: return "d[" + slot_name(var) + "]";
        case Kind::q: return "Dq";
        case Kind::q_inverse: return "D1q";
    }
    return "?";
}

// ---- OrePsiDO

OrePsiDO::OrePsiDO(Calculus calc, Coeffs coeffs, int low) : calc_(calc), coeffs_(std::move(coeffs)), low_(low) {
    std::erase_if(coeffs_, [&](const auto& kv) {
        return kv.first < low_ || (kv.second.is_zero() && kv.second.trunc().is_exact());
    });
}

OrePsiDO OrePsiDO::delta_power(Calculus calc, int m) { return {calc, {{m, TruncSeries(1)}}}; }

OrePsiDO OrePsiDO::multiplication(Calculus calc, const TruncSeries& f) { return {calc, {{0, f}}}; }

TruncSeries OrePsiDO::coeff(int i) const {
    if (i < low_) throw MathError("coefficient outside known range");
    auto it = coeffs_.find(i);
    return it == coeffs_.end() ? TruncSeries() : it->second;
}

int OrePsiDO::max_exponent() const { return coeffs_.empty() ? low_ : coeffs_.rbegin()->first; }

OrePsiDO OrePsiDO::plus() const {
    if (low_ > 0) throw MathError("depth exhausted");
    Coeffs c;
    for (const auto& [i, a] : coeffs_)
        if (i >= 0) c.emplace(i, a);
    return {calc_, std::move(c)};
}

OrePsiDO OrePsiDO::minus() const {
    Coeffs c;
    for (const auto& [i, a] : coeffs_)
        if (i < 0) c.emplace(i, a);
    return {calc_, std::move(c), low_};
}

OrePsiDO OrePsiDO::truncated_below(int floor) const { return {calc_, coeffs_, std::max(low_, floor)}; }

OrePsiDO OrePsiDO::map_coeffs(const std::function<TruncSeries(const TruncSeries&)>& f) const {
    Coeffs c;
    for (const auto& [i, a] : coeffs_) c.emplace(i, f(a));
    return {calc_, std::move(c), low_};
}

namespace {

void accumulate(OrePsiDO::Coeffs& c, int i, const TruncSeries& v) {
    auto it = c.find(i);
    if (it == c.end()) c.emplace(i, v);
    else it->second = it->second + v;
}

void require_same(const OrePsiDO& a, const OrePsiDO& b) {
    if (!(a.calculus() == b.calculus())) throw MathError("incompatible calculi");
}

OrePsiDO combine(const OrePsiDO& a, const OrePsiDO& b, int sign) {
    require_same(a, b);
    OrePsiDO::Coeffs c = a.coeffs();
    for (const auto& [i, v] : b.coeffs()) accumulate(c, i, sign > 0 ? v : -v);
    return {a.calculus(), std::move(c), std::max(a.low(), b.low())};
}

}  // namespace

OrePsiDO operator+(const OrePsiDO& a, const OrePsiDO& b) { return combine(a, b, 1); }
OrePsiDO operator-(const OrePsiDO& a, const OrePsiDO& b) { return combine(a, b, -1); }

OrePsiDO operator*(const QRat& c, const OrePsiDO& a) {
    return a.map_coeffs([&](const TruncSeries& s) { return s * c; });
}

bool operator==(const OrePsiDO& a, const OrePsiDO& b) { return (a - b).is_zero(); }

bool OrePsiDO::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

std::string OrePsiDO::to_string() const {
    std::string out;
    const std::string d = calc_.symbol();
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        if (it->second.is_zero()) continue;
        if (!out.empty()) out += " + ";
        out += "(" + it->second.poly().to_string() + ")";
        if (it->first != 0) out += "*" + d + "^" + std::to_string(it->first);
    }
    if (out.empty()) out = "0";
    if (low_ != kNoTail) out += " + O(" + d + "^" + std::to_string(low_ - 1) + ")";
    return out;
}

OrePsiDO compose(const OrePsiDO& a, const OrePsiDO& b, int floor) {
    require_same(a, b);
    const Calculus& calc = a.calculus();
    if (a.coeffs().empty() || b.coeffs().empty()) return {calc, {}, std::max({a.low(), b.low()})};
    int low = OrePsiDO::kNoTail;
    if (a.low() != OrePsiDO::kNoTail) low = std::max(low, a.low() + b.max_exponent());
    if (b.low() != OrePsiDO::kNoTail) low = std::max(low, b.low() + a.max_exponent());
    const int cut = std::max(low, floor);
    bool truncated = false;
    OrePsiDO::Coeffs out;
    for (const auto& [j, bj] : b.coeffs()) {
        std::vector<TruncSeries> deltas{bj};  // delta^k b_j
        for (const auto& [i, ai] : a.coeffs()) {
            for (int k = 0;; ++k) {
                if (i >= 0 && k > i) break;
                const int e = i - k + j;
                if (static_cast<int>(deltas.size()) <= k) deltas.push_back(calc.delta(deltas.back()));
                const TruncSeries& dk = deltas[static_cast<std::size_t>(k)];
                if (dk.is_zero() && dk.trunc().is_exact()) break;
                if (e < cut) {
                    truncated = true;
                    break;
                }
                accumulate(out, e, ai * calc.sigma(dk, i - k) * calc.binomial(i, k));
            }
        }
    }
    if (truncated) low = std::max(low, floor);
    return {calc, std::move(out), low};
}

OrePsiDO commutator(const OrePsiDO& a, const OrePsiDO& b, int floor) {
    return compose(a, b, floor) - compose(b, a, floor);
}

OrePsiDO power(const OrePsiDO& a, int k, int floor) {
    if (k < 0) throw MathError("negative power");
    OrePsiDO r = OrePsiDO::identity(a.calculus());
    for (int i = 0; i < k; ++i) r = compose(r, a, floor);
    return r;
}

OrePsiDO invert(const OrePsiDO& s, int floor) {
    if (s.max_exponent() != 0 || !(s.coeff(0).poly() == MultiPoly(1))) throw MathError("not monic-normalized");
    const OrePsiDO neg = OrePsiDO::identity(s.calculus()) - s;
    OrePsiDO term = OrePsiDO::identity(s.calculus()), sum = term;
    for (int k = 1; k <= -floor + 1; ++k) {
        term = compose(term, neg, floor);
        if (term.coeffs().empty()) break;
        sum = sum + term;
    }
    return sum.truncated_below(std::max(floor, s.low()));
}

OrePsiDO adjoint(const OrePsiDO& v, int floor) {
    Calculus target;
    QRat star;  // Delta* = star * Delta_target
    switch (v.calculus().kind) {
        case Calculus::Kind::q:
            target = Calculus::q_inverse();
            star = -QRat::q_pow(-1);
            break;
        case Calculus::Kind::q_inverse:
            target = Calculus::q_calculus();
            star = -QRat::q();
            break;
        case Calculus::Kind::classical:
            target = v.calculus();
            star = QRat(-1);
            break;
    }
    OrePsiDO r(target, {});
    for (const auto& [i, vi] : v.coeffs()) {
        const OrePsiDO term =
            compose(OrePsiDO::delta_power(target, i), OrePsiDO::multiplication(target, vi), floor);
        r = r + star.pow(i) * term;
    }
    int low = r.low();
    if (v.low() != OrePsiDO::kNoTail) low = std::max(low, std::max(v.low(), floor));
    return r.truncated_below(low);
}

Dressing dress(const OrePsiDO& s, int order) {
    if (s.max_exponent() != 0 || !(s.coeff(0).poly() == MultiPoly(1))) throw MathError("not monic-normalized");
    if (s.low() > -(order + 1))
        throw MathError("insufficient validity depth: need " + std::to_string(order + 1));
    const Calculus& calc = s.calculus();
    const int floor = -order;
    OrePsiDO r = compose(OrePsiDO::delta_power(calc, 1), s, floor);
    Dressing d;
    OrePsiDO::Coeffs lc{{1, TruncSeries(1)}};
    for (int k = 0; k <= order; ++k) {
        const TruncSeries ak = s.coeff(-(k + 1)) - r.coeff(-k);
        d.a.push_back(ak);
        lc.emplace(-k, ak);
        r = r + compose(OrePsiDO(calc, {{-k, ak}}), s, floor);
    }
    d.L = OrePsiDO(calc, std::move(lc), floor);
    return d;
}

OrePsiDO s_from_tau(const TruncSeries& tau, int J, Calculus calc) {
    if (!tau.poly().constant_term().is_one()) throw MathError("tau not normalized");
    const TruncSeries inv = tau.inverse();
    OrePsiDO::Coeffs c;
    c.emplace(0, TruncSeries(1));
    for (int j = 1; j <= J; ++j) c.emplace(-j, schur_diff_apply(j, -1, tau) * inv);
    return {calc, std::move(c), -J};
}

TruncSeries tau_q_build(const MultiPoly& tau, int weight_cap) {
    std::vector<std::pair<int, MultiPoly>> shift;
    for (int i = 1; i <= kMaxTimes; ++i) shift.emplace_back(var::t(i), MultiPoly::variable(var::t(i)) + c_of_x(i));
    const Trunc tr = Trunc::at_weight(weight_cap);
    return {tau.substitute(shift, tr), tr};
}

UFormula u_formula(const TruncSeries& tau_q) {
    if (!tau_q.poly().constant_term().is_one()) throw MathError("tau not normalized");
    const TruncSeries inv = tau_q.inverse();
    const TruncSeries w = tau_q.partial(var::t(1)) * inv;
    const TruncSeries w2 = schur_diff_apply(2, -1, tau_q) * inv;
    const TruncSeries qx(MultiPoly::variable(var::x) * (QRat::q() - 1));
    UFormula r;
    r.u84 = w2 - apply_D(w2) - w * w + w * apply_D(w) + apply_Dq(w);
    r.u88 = -(qx * apply_Dq(w2)) + w * qx * apply_Dq(w) + apply_Dq(w);
    return r;
}

QKdV qkdv_pack(const TruncSeries& tau) {
    const TruncSeries L = series_log(tau);
    const QRat qm1 = QRat::q() - 1;
    const TruncSeries qx(MultiPoly::variable(var::x) * qm1);
    QKdV r;
    r.s0 = qx * apply_Dq(L).partial(var::t(1));
    r.u = apply_Dq((L + apply_D(L)).partial(var::t(1)));
    r.u1_residual = qx * r.u - r.s0 - apply_D(r.s0);
    r.flow_rhs = apply_Dq(r.u) - apply_Dq(apply_Dq(r.s0)) - apply_Dq(r.s0 * r.s0);
    return r;
}

QKdVExpansions qkdv_expansions(const TruncSeries& tau) {
    const TruncSeries L = series_log(tau);
    const QRat q = QRat::q(), qm1 = q - 1;
    const TruncSeries x(MultiPoly::variable(var::x));
    const TruncSeries d1 = apply_Dq(L), d2 = apply_Dq(d1), d3 = apply_Dq(d2);
    const TruncSeries h = d1.partial(var::t(1));
    const TruncSeries s0 = x * h * qm1;
    QKdVExpansions r;
    r.dq_s0 = apply_Dq(s0) - (x * d2 * q + d1).partial(var::t(1)) * qm1;
    r.dq2_s0 = apply_Dq(apply_Dq(s0)) - (x * d3 * (q * q) + d2 * q + d2).partial(var::t(1)) * qm1;
    r.dq_h2 = apply_Dq(h * h) - (apply_D(h) * apply_Dq(h) + apply_Dq(h) * h);
    r.dq_s0_sq = apply_Dq(s0 * s0) - (x * x * apply_Dq(h * h) * (q * q) + x * h * h * qint(2)) * qm1.pow(2);
    return r;
}

OrePsiDO zs_residual(const MultiPoly& tau, int m, int n, int depth, int weight_cap, int sign) {
    const Calculus calc = Calculus::classical(var::t(1));
    const int J = depth + std::max(m, n) + 1;
    const OrePsiDO S = s_from_tau(TruncSeries(tau, Trunc::at_weight(weight_cap)), J, calc);
    const OrePsiDO Sinv = invert(S, -J);
    const OrePsiDO L = compose(compose(S, OrePsiDO::delta_power(calc, 1), -J), Sinv, -J);
    const OrePsiDO Bn = power(L, n, -J).plus(), Bm = power(L, m, -J).plus();
    auto dt = [](int k) {
        return [k](const TruncSeries& s) { return s.partial(var::t(k)); };
    };
    const OrePsiDO curv = Bn.map_coeffs(dt(m)) - Bm.map_coeffs(dt(n));
    const OrePsiDO comm = commutator(Bn, Bm, -depth);
    return sign > 0 ? curv + comm : curv - comm;
}

OrePsiDO substitute_x_over_q(const OrePsiDO& v) {
    OrePsiDO::Coeffs c;
    for (const auto& [e, f] : v.coeffs()) c.emplace(e, apply_D(f, -1) * QRat::q_pow(-e));
    return {v.calculus(), std::move(c), v.low()};
}

OrePsiDO sato_flow_residual(const TruncSeries& tau_q, int depth) {
    const Calculus calc = Calculus::q_calculus();
    const int J = depth + 1;
    const OrePsiDO S = s_from_tau(tau_q, J, calc);
    const OrePsiDO L = compose(compose(S, OrePsiDO::delta_power(calc, 1), -J), invert(S, -J), -J);
    const OrePsiDO dS = S.map_coeffs([](const TruncSeries& s) { return s.partial(var::t(1)); });
    return (dS + compose(L.minus(), S, -J)).truncated_below(-depth);
}

}  // namespace qkp

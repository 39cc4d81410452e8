#include "qkp/series.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "qkp/error.hpp"

namespace qkp {

int slot_weight(int slot) {
    if (slot == var::x) return 1;
    if (is_time_slot(slot)) return slot;
    if (is_y_slot(slot)) return slot - kMaxTimes;
    return 0;
}

bool is_time_slot(int slot) { return slot >= 1 && slot <= kMaxTimes; }
bool is_y_slot(int slot) { return slot > kMaxTimes && slot <= kMaxTimes + kMaxY; }
bool is_aux_slot(int slot) { return slot == var::aux0 || slot == var::aux1; }

std::string slot_name(int slot) {
    if (slot == var::x) return "x";
    if (is_time_slot(slot)) return "t" + std::to_string(slot);
    if (is_y_slot(slot)) return "y" + std::to_string(slot - kMaxTimes);
    if (slot == var::aux0) return "w";
    if (slot == var::aux1) return "v";
    throw MathError("bad variable slot");
}

int weight_of(const Exponents& e) {
    int w = e[var::x];
    for (int i = 1; i <= kMaxTimes; ++i) w += i * e[var::t(i)];
    for (int i = 1; i <= kMaxY; ++i) w += i * e[var::y(i)];
    return w;
}

int aux_degree(const Exponents& e) { return e[var::aux0] + e[var::aux1]; }

int y_weight_of(const Exponents& e) {
    int w = 0;
    for (int i = 1; i <= kMaxY; ++i) w += i * e[var::y(i)];
    return w;
}

bool MonomialOrder::operator()(const Exponents& a, const Exponents& b) const {
    const int wa = weight_of(a), wb = weight_of(b);
    if (wa != wb) return wa < wb;
    const int da = aux_degree(a), db = aux_degree(b);
    if (da != db) return da < db;
    for (int s = kNumSlots - 1; s >= 0; --s)
        if (a[s] != b[s]) return a[s] < b[s];
    return false;
}

// ---- Trunc

bool Trunc::admits(const Exponents& e) const {
    if (is_exact()) return true;
    if (y_weight < kExact && y_weight_of(e) > y_weight) return false;
    const int w = weight_of(e);
    if (w > weight) return false;
    if (e[var::aux0] > aux[0] || e[var::aux1] > aux[1]) return false;
    return w + aux_degree(e) <= total;
}

bool Trunc::is_exact() const {
    return weight >= kExact && total >= kExact && aux[0] >= kExact && aux[1] >= kExact && y_weight >= kExact;
}

Trunc Trunc::meet(const Trunc& o) const {
    return {std::min(weight, o.weight), std::min(total, o.total),
            {std::min(aux[0], o.aux[0]), std::min(aux[1], o.aux[1])}, std::min(y_weight, o.y_weight)};
}

Trunc Trunc::lowered(int w) const {
    Trunc r = *this;
    if (r.weight < kExact) r.weight -= w;
    if (r.total < kExact) r.total -= w;
    return r;
}

// ---- MultiPoly

MultiPoly::MultiPoly(const QRat& c) {
    if (!c.is_zero()) terms_.emplace(Exponents{}, c);
}

MultiPoly MultiPoly::variable(int slot, int power) {
    Exponents e{};
    e[slot] = static_cast<std::uint8_t>(power);
    return monomial(e, QRat(1));
}

MultiPoly MultiPoly::monomial(const Exponents& e, const QRat& c) {
    MultiPoly p;
    p.add_term(e, c);
    return p;
}

QRat MultiPoly::constant_term() const { return coeff(Exponents{}); }

QRat MultiPoly::coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? QRat() : it->second;
}

int MultiPoly::max_weight() const {
    int w = 0;
    for (const auto& [e, c] : terms_) w = std::max(w, weight_of(e));
    return w;
}

int MultiPoly::degree_in(int slot) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[slot]));
    return d;
}

void MultiPoly::add_term(const Exponents& e, const QRat& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (inserted) return;
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& b) {
    for (const auto& [e, c] : b.terms_) add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& b) {
    for (const auto& [e, c] : b.terms_) add_term(e, -c);
    return *this;
}

MultiPoly& MultiPoly::operator*=(const QRat& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    if (c.is_one()) return *this;
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

namespace {

Exponents add_exponents(const Exponents& a, const Exponents& b) {
    Exponents r;
    for (int s = 0; s < kNumSlots; ++s) {
        const int v = a[s] + b[s];
        if (v > 255) throw MathError("exponent overflow");
        r[s] = static_cast<std::uint8_t>(v);
    }
    return r;
}

}  // namespace

MultiPoly mul_truncated(const MultiPoly& a, const MultiPoly& b, const Trunc& tr) {
    MultiPoly r;
    const bool exact = tr.is_exact();
    for (const auto& [ea, ca] : a.terms()) {
        for (const auto& [eb, cb] : b.terms()) {
            Exponents e = add_exponents(ea, eb);
            if (!exact && !tr.admits(e)) continue;
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) { return mul_truncated(a, b, Trunc::exact()); }

MultiPoly pow(const MultiPoly& a, int k, const Trunc& tr) {
    if (k < 0) throw MathError("negative power");
    MultiPoly r = MultiPoly(1).truncated(tr);
    for (int i = 0; i < k; ++i) r = mul_truncated(r, a, tr);
    return r;
}

MultiPoly MultiPoly::partial(int slot) const {
    MultiPoly r;
    for (const auto& [e, c] : terms_) {
        if (e[slot] == 0) continue;
        Exponents f = e;
        f[slot] -= 1;
        r.add_term(f, c * QRat(static_cast<long>(e[slot])));
    }
    return r;
}

MultiPoly MultiPoly::truncated(const Trunc& tr) const {
    if (tr.is_exact()) return *this;
    return filtered([&](const Exponents& e) { return tr.admits(e); });
}

MultiPoly MultiPoly::filtered(const std::function<bool(const Exponents&)>& keep) const {
    MultiPoly r;
    for (const auto& [e, c] : terms_)
        if (keep(e)) r.terms_.emplace_hint(r.terms_.end(), e, c);
    return r;
}

MultiPoly MultiPoly::map_coeffs(const std::function<QRat(const QRat&)>& f) const {
    MultiPoly r;
    for (const auto& [e, c] : terms_) r.add_term(e, f(c));
    return r;
}

MultiPoly MultiPoly::scale_terms(const std::function<QRat(const Exponents&)>& f) const {
    MultiPoly r;
    for (const auto& [e, c] : terms_) r.add_term(e, f(e) * c);
    return r;
}

MultiPoly MultiPoly::substitute(std::span<const std::pair<int, MultiPoly>> repl, const Trunc& tr) const {
    std::vector<std::vector<MultiPoly>> powers(repl.size());
    auto power_of = [&](std::size_t i, int k) -> const MultiPoly& {
        auto& v = powers[i];
        if (v.empty()) v.push_back(MultiPoly(1));
        while (static_cast<int>(v.size()) <= k) v.push_back(mul_truncated(v.back(), repl[i].second, tr));
        return v[static_cast<std::size_t>(k)];
    };
    MultiPoly r;
    for (const auto& [e, c] : terms_) {
        Exponents rest = e;
        MultiPoly term = MultiPoly::monomial(Exponents{}, c);
        for (std::size_t i = 0; i < repl.size(); ++i) {
            const int s = repl[i].first;
            const int k = e[s];
            rest[s] = 0;
            if (k > 0) term = mul_truncated(term, power_of(i, k), tr);
            if (term.is_zero()) break;
        }
        if (term.is_zero()) continue;
        r += mul_truncated(term, MultiPoly::monomial(rest, QRat(1)), tr);
    }
    return r;
}

MultiPoly MultiPoly::coefficient(int slot, int k) const {
    MultiPoly r;
    for (const auto& [e, c] : terms_) {
        if (e[slot] != k) continue;
        Exponents f = e;
        f[slot] = 0;
        r.add_term(f, c);
    }
    return r;
}

MultiPoly MultiPoly::shifted(int slot, int k) const {
    MultiPoly r;
    for (const auto& [e, c] : terms_) {
        Exponents f = e;
        const int v = f[slot] + k;
        if (v < 0 || v > 255) throw MathError("exponent overflow");
        f[slot] = static_cast<std::uint8_t>(v);
        r.add_term(f, c);
    }
    return r;
}

namespace {

std::string monomial_string(const Exponents& e) {
    std::string s;
    for (int slot = 0; slot < kNumSlots; ++slot) {
        if (e[slot] == 0) continue;
        if (!s.empty()) s += "*";
        s += slot_name(slot);
        if (e[slot] > 1) s += "^" + std::to_string(e[slot]);
    }
    return s;
}

}  // namespace

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        const std::string m = monomial_string(e);
        bool neg = false;
        std::string cs;
        if (c.is_rational()) {
            mpq_class v = c.as_rational();
            neg = v < 0;
            if (neg) v = -v;
            cs = v == 1 && !m.empty() ? "" : v.get_str();
        } else {
            cs = "(" + c.to_string() + ")";
        }
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        out += cs;
        if (!cs.empty() && !m.empty()) out += "*";
        out += m;
    }
    return out;
}

// ---- TruncSeries

TruncSeries::TruncSeries(MultiPoly p, Trunc tr) : poly_(p.truncated(tr)), trunc_(tr) {}

TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) {
    const Trunc t = a.trunc_.meet(b.trunc_);
    return {(a.poly_ + b.poly_), t};
}

TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) {
    const Trunc t = a.trunc_.meet(b.trunc_);
    return {(a.poly_ - b.poly_), t};
}

namespace {

int add_caps(int a, int b) { return a >= kExact || b >= kExact ? kExact : a + b; }

}  // namespace

int weight_floor(const TruncSeries& s) {
    const int cap = s.trunc().weight;
    int lb = cap >= kExact ? kExact : cap + 1;
    for (const auto& [e, c] : s.poly().terms()) lb = std::min(lb, weight_of(e));
    return lb;
}

Trunc product_trunc(const TruncSeries& a, const TruncSeries& b) {
    Trunc t = a.trunc().meet(b.trunc());
    t.weight = std::min(add_caps(a.trunc().weight, weight_floor(b)), add_caps(b.trunc().weight, weight_floor(a)));
    return t;
}

TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    const Trunc t = product_trunc(a, b);
    TruncSeries r;
    r.poly_ = mul_truncated(a.poly_, b.poly_, t);
    r.trunc_ = t;
    return r;
}

bool operator==(const TruncSeries& a, const TruncSeries& b) {
    const Trunc t = a.trunc_.meet(b.trunc_);
    return a.poly_.truncated(t) == b.poly_.truncated(t);
}

TruncSeries TruncSeries::partial(int slot) const {
    Trunc t = trunc_;
    if (is_aux_slot(slot)) {
        int& cap = t.aux[slot == var::aux0 ? 0 : 1];
        if (cap < kExact) cap -= 1;
        if (t.total < kExact) t.total -= 1;
    } else {
        t = t.lowered(slot_weight(slot));
    }
    return {poly_.partial(slot), t};
}

std::string TruncSeries::to_string() const {
    std::string s = poly_.to_string();
    if (trunc_.weight < kExact) s += " + O(w>" + std::to_string(trunc_.weight) + ")";
    return s;
}

namespace {

// Ensures that powers of r eventually leave the truncation box.
void require_nilpotent(const MultiPoly& r, const Trunc& tr) {
    for (const auto& [e, c] : r.terms()) {
        const int w = weight_of(e);
        const bool shrinks = (w > 0 && tr.weight < kExact) || (w + aux_degree(e) > 0 && tr.total < kExact) ||
                             (e[var::aux0] > 0 && tr.aux[0] < kExact) || (e[var::aux1] > 0 && tr.aux[1] < kExact) ||
                             (y_weight_of(e) > 0 && tr.y_weight < kExact);
        if (!shrinks) throw MathError("unbounded series");
    }
}

MultiPoly without_constant(const MultiPoly& p) {
    return p.filtered([](const Exponents& e) { return e != Exponents{}; });
}

}  // namespace

TruncSeries TruncSeries::inverse() const {
    const QRat c = poly_.constant_term();
    if (c.is_zero()) throw MathError("bad constant term");
    const QRat ci = c.inverse();
    const MultiPoly r = without_constant(poly_) * ci;
    require_nilpotent(r, trunc_);
    const MultiPoly neg = -r;
    MultiPoly term = MultiPoly(1).truncated(trunc_), sum = term;
    while (!term.is_zero()) {
        term = mul_truncated(term, neg, trunc_);
        sum += term;
    }
    return {sum * ci, trunc_};
}

TruncSeries operator/(const TruncSeries& a, const TruncSeries& b) { return a * b.inverse(); }

TruncSeries series_exp(const TruncSeries& s) {
    if (!s.poly().constant_term().is_zero()) throw MathError("bad constant term");
    const Trunc& tr = s.trunc();
    require_nilpotent(s.poly(), tr);
    MultiPoly term = MultiPoly(1).truncated(tr), sum = term;
    for (long k = 1; !term.is_zero(); ++k) {
        term = mul_truncated(term, s.poly(), tr) * QRat::frac(1, k);
        sum += term;
    }
    return {sum, tr};
}

TruncSeries series_log(const TruncSeries& s) {
    if (!s.poly().constant_term().is_one()) throw MathError("bad constant term");
    const Trunc& tr = s.trunc();
    const MultiPoly r = without_constant(s.poly());
    require_nilpotent(r, tr);
    MultiPoly power = r, sum;
    for (long k = 1; !power.is_zero(); ++k) {
        sum += power * QRat::frac(k % 2 ? 1 : -1, k);
        power = mul_truncated(power, r, tr);
    }
    return {sum, tr};
}

// ---- Schur polynomials

std::vector<TruncSeries> schur_all(int n, std::span<const TruncSeries> args) {
    std::vector<TruncSeries> p;
    p.reserve(static_cast<std::size_t>(n) + 1);
    Trunc tr;
    for (const auto& a : args) tr = tr.meet(a.trunc());
    p.emplace_back(MultiPoly(1), tr);
    for (int m = 1; m <= n; ++m) {
        TruncSeries acc(MultiPoly(), tr);
        for (int k = 1; k <= m && k <= static_cast<int>(args.size()); ++k)
            acc += args[static_cast<std::size_t>(k - 1)] * p[static_cast<std::size_t>(m - k)] * QRat(k);
        p.push_back(acc * QRat::frac(1, m));
    }
    return p;
}

TruncSeries schur_p(int n, std::span<const TruncSeries> args) { return schur_all(n, args).back(); }

namespace {

std::vector<MultiPoly> schur_table(int n, int (*slot)(int), int count) {
    std::vector<TruncSeries> args;
    for (int k = 1; k <= count; ++k) args.emplace_back(MultiPoly::variable(slot(k)));
    std::vector<MultiPoly> out;
    for (const auto& s : schur_all(n, args)) out.push_back(s.poly());
    return out;
}

const MultiPoly& cached_schur(int n, bool symbolic) {
    static std::mutex mu;
    static std::vector<MultiPoly> time_cache, y_cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& cache = symbolic ? y_cache : time_cache;
    if (static_cast<int>(cache.size()) <= n)
        cache = symbolic ? schur_table(n, var::y, kMaxY) : schur_table(n, var::t, kMaxTimes);
    return cache[static_cast<std::size_t>(n)];
}

// Applies prod_k (sign/k)^{e_k} d_k^{e_k}, reading e_k from the slots given
// by slot(k).
MultiPoly apply_derivative_monomial(const Exponents& e, int (*slot)(int), int count, int sign,
                                    const MultiPoly& target) {
    MultiPoly r = target;
    QRat factor(1);
    for (int k = 1; k <= count && !r.is_zero(); ++k) {
        for (int j = 0; j < e[slot(k)]; ++j) {
            if (k > kMaxTimes) return MultiPoly();
            r = r.partial(var::t(k));
            factor *= QRat::frac(sign, k);
        }
    }
    return r * factor;
}

}  // namespace

MultiPoly schur_time(int n) {
    if (n < 0) return MultiPoly();
    return cached_schur(n, false);
}

MultiPoly schur_symbolic(int n) {
    if (n < 0) return MultiPoly();
    return cached_schur(n, true);
}

MultiPoly schur_diff_apply(int n, int sign, const MultiPoly& target) {
    if (n < 0) return MultiPoly();
    MultiPoly r;
    const MultiPoly op = schur_time(n);
    for (const auto& [e, c] : op.terms())
        r += apply_derivative_monomial(e, var::t, kMaxTimes, sign, target) * c;
    return r;
}

TruncSeries schur_diff_apply(int n, int sign, const TruncSeries& target) {
    return {schur_diff_apply(n, sign, target.poly()), target.trunc().lowered(n)};
}

MultiPoly apply_y_operator(const MultiPoly& op, int sign, const MultiPoly& target) {
    MultiPoly r;
    for (const auto& [e, c] : op.terms()) {
        Exponents rest = e;
        for (int k = 1; k <= kMaxY; ++k) rest[var::y(k)] = 0;
        MultiPoly d = apply_derivative_monomial(e, var::y, kMaxY, sign, target);
        r += mul_truncated(d, MultiPoly::monomial(rest, c), Trunc::exact());
    }
    return r;
}

// ---- LaurentObject

std::string aux_name(AuxTag tag) {
    switch (tag) {
        case AuxTag::z: return "z";
        case AuxTag::lambda: return "lambda";
        case AuxTag::mu: return "mu";
    }
    return "z";
}

LaurentObject::LaurentObject(AuxTag tag, Coeffs coeffs, int low, int top)
    : tag_(tag), coeffs_(std::move(coeffs)), low_(low), top_(top) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (it->first < low_ || it->first > top_) it = coeffs_.erase(it);
        else ++it;
    }
}

LaurentObject LaurentObject::from_aux(const MultiPoly& p, int slot, AuxTag tag, const Trunc& tr, int low) {
    const int which = slot == var::aux0 ? 0 : 1;
    if (!is_aux_slot(slot)) throw MathError("bad variable slot");
    int lo = low;
    if (tr.aux[which] < kExact) lo = std::max(lo, -tr.aux[which]);
    if (tr.total < kExact) lo = std::max(lo, -tr.total);
    Coeffs c;
    const int top = std::max(p.degree_in(slot), lo > kNoTail ? -lo : 0);
    for (int k = 0; k <= top; ++k) {
        Trunc ct = tr;
        ct.aux[which] = kExact;
        if (tr.total < kExact) {
            ct.weight = std::min(ct.weight, tr.total - k);
            ct.total = tr.total - k;
        }
        c.emplace(-k, TruncSeries(p.coefficient(slot, k), ct));
    }
    return {tag, std::move(c), lo, 0};
}

TruncSeries LaurentObject::coeff(int e) const {
    if (e < low_) throw MathError("coefficient outside known range");
    auto it = coeffs_.find(e);
    return it == coeffs_.end() ? TruncSeries() : it->second;
}

int LaurentObject::max_exponent() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
int LaurentObject::min_exponent() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }

bool LaurentObject::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

namespace {


}  // namespace

LaurentObject operator*(const LaurentObject& a, const LaurentObject& b) {
    if (a.tag_ != b.tag_) throw MathError("mismatched spectral variables");
    const int low = std::max(a.low_, b.low_);
    // The unknown tail of one factor meets coefficients of the other above
    // c - low, which have weight > c - low unless the other factor stops first.
    auto box = [&](int c, const Trunc& pair) {
        Trunc t = pair;
        if (a.low_ > LaurentObject::kNoTail && b.top_ > c - a.low_) t.weight = std::min(t.weight, c - a.low_);
        if (b.low_ > LaurentObject::kNoTail && a.top_ > c - b.low_) t.weight = std::min(t.weight, c - b.low_);
        return t;
    };
    const int top = a.top_ < LaurentObject::kNoTop && b.top_ < LaurentObject::kNoTop ? a.top_ + b.top_
                                                                                      : LaurentObject::kNoTop;
    LaurentObject::Coeffs out;
    for (const auto& [ea, ca] : a.coeffs_) {
        for (const auto& [eb, cb] : b.coeffs_) {
            const int c = ea + eb;
            if (c < low) continue;
            const Trunc t = box(c, product_trunc(ca, cb));
            if (t.weight < 0) continue;
            MultiPoly prod = mul_truncated(ca.poly(), cb.poly(), t);
            auto it = out.find(c);
            if (it == out.end()) out.emplace(c, TruncSeries(prod, t));
            else it->second = it->second + TruncSeries(prod, t);
        }
    }
    return {a.tag_, std::move(out), low, top};
}

namespace {

LaurentObject combine(const LaurentObject& a, const LaurentObject& b, int sign) {
    if (a.tag() != b.tag()) throw MathError("mismatched spectral variables");
    LaurentObject::Coeffs out = a.coeffs();
    for (const auto& [e, c] : b.coeffs()) {
        auto it = out.find(e);
        const TruncSeries v = sign > 0 ? c : -c;
        if (it == out.end()) out.emplace(e, v);
        else it->second = it->second + v;
    }
    const int top = std::max(a.top(), b.top());
    return {a.tag(), std::move(out), std::max(a.low(), b.low()), top};
}

}  // namespace

LaurentObject operator+(const LaurentObject& a, const LaurentObject& b) { return combine(a, b, 1); }
LaurentObject operator-(const LaurentObject& a, const LaurentObject& b) { return combine(a, b, -1); }

std::string LaurentObject::to_string() const {
    std::string out;
    const std::string z = aux_name(tag_);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        if (it->second.is_zero()) continue;
        if (!out.empty()) out += " + ";
        out += "(" + it->second.poly().to_string() + ")";
        if (it->first != 0) out += "*" + z + "^" + std::to_string(it->first);
    }
    if (out.empty()) out = "0";
    if (low_ > kNoTail) out += " + O(" + z + "^" + std::to_string(low_ - 1) + ")";
    return out;
}

TruncSeries residue(const LaurentObject& l) { return l.coeff(-1); }

// ---- Miwa shifts

MultiPoly miwa_substitute(const MultiPoly& target, int sign, int aux_slot, const Trunc& tr) {
    std::vector<std::pair<int, MultiPoly>> repl;
    for (int i = 1; i <= kMaxTimes; ++i)
        repl.emplace_back(var::t(i),
                          MultiPoly::variable(var::t(i)) + MultiPoly::variable(aux_slot, i) * QRat::frac(sign, i));
    return target.substitute(repl, tr);
}

MultiPoly miwa_operator_sum(const MultiPoly& target, int sign, int aux_slot, const Trunc& tr) {
    MultiPoly r;
    const int top = target.max_weight();
    for (int k = 0; k <= top; ++k) r += schur_diff_apply(k, sign, target).shifted(aux_slot, k);
    return r.truncated(tr);
}

MultiPoly miwa_shift_poly(const MultiPoly& target, int sign, int aux_slot) {
    MultiPoly a = miwa_substitute(target, sign, aux_slot);
    if (a != miwa_operator_sum(target, sign, aux_slot)) throw MathError("Miwa mismatch");
    return a;
}

LaurentObject miwa_shift(const MultiPoly& target, int sign, AuxTag tag) {
    return LaurentObject::from_aux(miwa_shift_poly(target, sign, var::aux0), var::aux0, tag);
}

LaurentObject xi(AuxTag tag, int weight_cap) {
    LaurentObject::Coeffs c;
    const Trunc tr = Trunc::at_weight(weight_cap);
    for (int k = 1; k <= kMaxTimes && k <= weight_cap; ++k) c.emplace(k, TruncSeries(MultiPoly::variable(var::t(k)), tr));
    return {tag, std::move(c)};
}

LaurentObject exp_xi(AuxTag tag, int sign, int weight_cap) {
    LaurentObject::Coeffs c;
    const Trunc tr = Trunc::at_weight(weight_cap);
    for (int e = 0; e <= weight_cap; ++e) {
        MultiPoly p = schur_time(e);
        if (sign < 0)
            p = p.scale_terms([](const Exponents& ex) {
                int d = 0;
                for (auto v : ex) d += v;
                return QRat(d % 2 ? -1 : 1);
            });
        c.emplace(e, TruncSeries(p, tr));
    }
    return {tag, std::move(c)};
}

// ---- q-exponential and q-Schur polynomials

QRat c_coefficient(int k) {
    if (k < 1) throw MathError("c_k needs k >= 1");
    const QRat one_minus_q = QRat(1) - QRat::q();
    return one_minus_q.pow(k) / (QRat(k) * (QRat(1) - QRat::q_pow(k)));
}

MultiPoly c_of_x(int k) { return MultiPoly::variable(var::x, k) * c_coefficient(k); }

TruncSeries eq_exp(int weight_cap) {
    MultiPoly s;
    for (int k = 1; k <= weight_cap; ++k) s += c_of_x(k).shifted(var::aux0, k);
    return series_exp(TruncSeries(s, Trunc::at_weight(weight_cap)));
}

MultiPoly qschur(int k) {
    if (k < 0) return MultiPoly();
    const MultiPoly e = eq_exp(k).poly();
    MultiPoly r;
    for (int j = 0; j <= k; ++j) r += e.coefficient(var::aux0, j) * schur_time(k - j);
    return r;
}

}  // namespace qkp

#include "qkp/hirota.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "qkp/error.hpp"
#include "qkp/jackson.hpp"
#include "qkp/orepsdo.hpp"

namespace qkp {

namespace {

MultiPoly t_var(int i) { return MultiPoly::variable(var::t(i)); }

int total_degree(const Exponents& e) {
    int d = 0;
    for (auto v : e) d += v;
    return d;
}

void require_unit(const MultiPoly& tau) {
    if (!tau.constant_term().is_one()) throw MathError("tau not normalized");
}

// Mixed partials of one polynomial, memoized by multi-index.
class DerivCache {
public:
    explicit DerivCache(const MultiPoly& p) { cache_.emplace(Exponents{}, p); }

    const MultiPoly& get(const Exponents& beta) {
        auto it = cache_.find(beta);
        if (it != cache_.end()) return it->second;
        int slot = 0;
        while (beta[slot] == 0) ++slot;
        Exponents prev = beta;
        prev[slot] -= 1;
        MultiPoly d = get(prev).partial(slot);
        return cache_.emplace(beta, std::move(d)).first->second;
    }

private:
    std::map<Exponents, MultiPoly> cache_;
};

void hirota_monomial(const Exponents& alpha, int slot, Exponents& beta, QRat weight, DerivCache& a, DerivCache& b,
                     MultiPoly& out) {
    if (slot > kMaxTimes) {
        Exponents rest{};
        for (int i = 1; i <= kMaxTimes; ++i) rest[i] = static_cast<std::uint8_t>(alpha[i] - beta[i]);
        const MultiPoly& da = a.get(beta);
        if (da.is_zero()) return;
        const MultiPoly& db = b.get(rest);
        if (db.is_zero()) return;
        out += (da * db) * weight;
        return;
    }
    const int n = alpha[slot];
    for (int k = 0; k <= n; ++k) {
        beta[slot] = static_cast<std::uint8_t>(k);
        const QRat c = QRat(binom(n, k)) * QRat((n - k) % 2 ? -1 : 1);
        hirota_monomial(alpha, slot + 1, beta, weight * c, a, b, out);
    }
    beta[slot] = 0;
}

// p_n(sign * 2y) in the y slots.
MultiPoly schur_y_scaled(int n, long factor) {
    return schur_symbolic(n).scale_terms([factor](const Exponents& e) { return QRat(factor).pow(total_degree(e)); });
}

Exponents y_part(const Exponents& e) {
    Exponents y{};
    for (int i = 1; i <= kMaxY; ++i) y[var::y(i)] = e[var::y(i)];
    return y;
}

Exponents without_y(const Exponents& e) {
    Exponents r = e;
    for (int i = 1; i <= kMaxY; ++i) r[var::y(i)] = 0;
    return r;
}

std::vector<YResidual> split_by_y(const MultiPoly& p) {
    std::map<Exponents, MultiPoly, MonomialOrder> groups;
    for (const auto& [e, c] : p.terms()) groups[y_part(e)].add_term(without_y(e), c);
    std::vector<YResidual> out;
    for (auto& [y, r] : groups) out.push_back({y, std::move(r)});
    return out;
}

// t_i -> t_i + sign*(y_i + a^i/i), a in aux0.
MultiPoly shift_y_miwa(const MultiPoly& tau, int sign, int y_weight) {
    std::vector<std::pair<int, MultiPoly>> repl;
    for (int i = 1; i <= kMaxTimes; ++i) {
        MultiPoly s = MultiPoly::variable(var::aux0, i) * QRat::frac(1, i);
        if (i <= kMaxY) s += MultiPoly::variable(var::y(i));
        repl.emplace_back(var::t(i), t_var(i) + s * QRat(sign));
    }
    return tau.substitute(repl, Trunc::at_y_weight(y_weight));
}

TruncSeries as_series(const MultiPoly& tau, int weight_cap) { return {tau, Trunc::at_weight(weight_cap)}; }

TruncSeries pm(int k, int m, const TruncSeries& f) { return schur_diff_apply(k, -1, schur_diff_apply(m, -1, f)); }

}  // namespace

HirotaPoly hirota_symbol(int i, int power) { return MultiPoly::variable(var::t(i), power); }

MultiPoly hirota_apply(const HirotaPoly& P, const MultiPoly& a, const MultiPoly& b) {
    DerivCache ca(a), cb(b);
    MultiPoly out;
    for (const auto& [alpha, c] : P.terms()) {
        Exponents beta{};
        hirota_monomial(alpha, 1, beta, c, ca, cb, out);
    }
    return out;
}

HirotaPoly schur_hirota(int n) {
    return schur_time(n).scale_terms([](const Exponents& e) {
        QRat s(1);
        for (int k = 2; k <= kMaxTimes; ++k)
            if (e[var::t(k)]) s *= QRat::frac(1, k).pow(e[var::t(k)]);
        return s;
    });
}

MultiPoly kp_bilinear_residual(const MultiPoly& tau) {
    const HirotaPoly P = hirota_symbol(1, 4) + hirota_symbol(2, 2) * QRat(3) - hirota_symbol(1) * hirota_symbol(3) * QRat(4);
    return hirota_apply(P, tau, tau);
}

MultiPoly hierarchy_eq(int n, const MultiPoly& tau) {
    if (n < 1 || n > kMaxTimes) throw MathError("hierarchy index out of range");
    const HirotaPoly P = hirota_symbol(1) * hirota_symbol(n) - schur_hirota(n + 1) * QRat(2);
    return hirota_apply(P, tau, tau);
}

MultiPoly generating_operator(int y_weight) {
    if (y_weight < 0 || y_weight > kMaxY) throw MathError("y weight out of range");
    const Trunc tr = Trunc::at_y_weight(y_weight);
    MultiPoly a;
    for (int i = 1; i <= y_weight; ++i) a += MultiPoly::variable(var::y(i)) * hirota_symbol(i);
    MultiPoly e = 1, term = 1;
    for (int k = 1; k <= y_weight; ++k) {
        term = mul_truncated(term, a, tr) * QRat::frac(1, k);
        e += term;
    }
    MultiPoly g;
    for (int n = 0; n <= y_weight; ++n) g += mul_truncated(schur_y_scaled(n, -2) * schur_hirota(n + 1), e, tr);
    return g;
}

std::vector<YResidual> generating_hirota(const MultiPoly& tau, int y_weight) {
    std::vector<YResidual> out = split_by_y(generating_operator(y_weight));
    for (auto& r : out) r.residual = hirota_apply(r.residual, tau, tau);
    return out;
}

std::vector<YResidual> bilinear_residue_check(const MultiPoly& tau, int y_weight) {
    if (y_weight < 0 || y_weight > kMaxY) throw MathError("y weight out of range");
    Trunc tr = Trunc::at_y_weight(y_weight);
    tr.aux[0] = y_weight + 1;
    const MultiPoly plus = shift_y_miwa(tau, 1, y_weight).truncated(tr);
    const MultiPoly minus = shift_y_miwa(tau, -1, y_weight).truncated(tr);
    const MultiPoly prod = mul_truncated(plus, minus, tr);
    // exp(-2 sum y_i lambda^i) = sum_n p_n(-2y) lambda^n meets lambda^{-n-1} in prod.
    MultiPoly res;
    for (int n = 0; n <= y_weight; ++n)
        res += mul_truncated(schur_y_scaled(n, -2), prod.coefficient(var::aux0, n + 1), Trunc::at_y_weight(y_weight));
    return split_by_y(res);
}

TruncSeries sn_from_tau(int n, const MultiPoly& tau, int weight_cap) {
    require_unit(tau);
    MultiPoly num;
    for (int j = 0; j <= n; ++j) num += schur_diff_apply(j, -1, tau) * schur_diff_apply(n - j, 1, tau);
    const TruncSeries inv = as_series(tau, weight_cap).inverse();
    return TruncSeries(num) * inv * inv;
}

MultiPoly sn_identity_residual(int n, const MultiPoly& tau) {
    MultiPoly lhs;
    for (int j = 0; j <= n; ++j) lhs += schur_diff_apply(j, -1, tau) * schur_diff_apply(n - j, 1, tau);
    return lhs - hirota_apply(schur_hirota(n), tau, tau);
}

FlowCheck kp_flow_check(const MultiPoly& tau, int weight_cap) {
    require_unit(tau);
    const int t1 = var::t(1), t2 = var::t(2), t3 = var::t(3);
    const TruncSeries u = sn_from_tau(2, tau, weight_cap);
    const TruncSeries s4 = sn_from_tau(4, tau, weight_cap);
    const TruncSeries u1 = u.partial(t1);
    const TruncSeries inner = u.partial(t3) - u1.partial(t1).partial(t1) * QRat::frac(1, 4) - u * u1 * QRat(3);
    return {s4.partial(t1) - u.partial(t3), inner.partial(t1) * QRat::frac(4, 3) - u.partial(t2).partial(t2)};
}

MultiPoly fay_residual(const MultiPoly& tau) {
    const MultiPoly w = MultiPoly::variable(var::aux0), v = MultiPoly::variable(var::aux1);
    const MultiPoly tl = miwa_shift_poly(tau, -1, var::aux0);
    const MultiPoly tm = miwa_shift_poly(tau, -1, var::aux1);
    const MultiPoly tml = miwa_shift_poly(tl, -1, var::aux1);
    const int t1 = var::t(1);
    return w * v * (tm.partial(t1) * tl - tm * tl.partial(t1)) - (v - w) * (tm * tl - tau * tml);
}

LogFay fay_log_form(const MultiPoly& tau, int order, int weight_cap) {
    require_unit(tau);
    const TruncSeries lt = series_log(as_series(tau, weight_cap));
    Trunc tr{weight_cap, weight_cap, {order, order}, kExact};
    MultiPoly lhs;
    for (int k = 1; k <= order; ++k)
        for (int m = 1; m <= order; ++m)
            lhs += pm(k, m, lt).poly().shifted(var::aux0, k).shifted(var::aux1, m);
    const TruncSeries f = lt.partial(var::t(1));
    MultiPoly r;
    for (int n = 1; n <= std::min(2 * order - 1, weight_cap); ++n) {
        const MultiPoly pf = schur_diff_apply(n, -1, f).poly();
        for (int a = 0; a <= n - 1; ++a) r -= pf.shifted(var::aux1, a + 1).shifted(var::aux0, n - a);
    }
    return {TruncSeries(lhs, tr), series_log(TruncSeries(MultiPoly(1) + r, tr))};
}

LogFay fay_collision(const MultiPoly& tau, int order, int weight_cap) {
    require_unit(tau);
    const TruncSeries lt = series_log(as_series(tau, weight_cap));
    Trunc tr{weight_cap, weight_cap, {order, 0}, kExact};
    MultiPoly lhs;
    for (int k = 1; k < order; ++k)
        for (int m = 1; k + m <= order; ++m) lhs += pm(k, m, lt).poly().shifted(var::aux0, k + m);
    const TruncSeries f = lt.partial(var::t(1));
    MultiPoly r;
    for (int n = 1; n <= kMaxTimes && n + 1 <= order; ++n)
        for (int l = 0; n + l + 1 <= order; ++l)
            r += schur_diff_apply(l, -1, f.partial(var::t(n))).poly().shifted(var::aux0, n + l + 1);
    return {TruncSeries(lhs, tr), series_log(TruncSeries(MultiPoly(1) + r, tr))};
}

LogEncoding log_encoding(const MultiPoly& tau, int max_order, int weight_cap) {
    require_unit(tau);
    const TruncSeries lt = series_log(as_series(tau, weight_cap));
    const int t1 = var::t(1);
    LogEncoding r;
    r.F.assign(max_order + 1, std::vector<TruncSeries>(max_order + 1));
    for (int k = 1; k <= max_order; ++k)
        for (int m = 1; m <= max_order; ++m) r.F[k][m] = pm(k, m, lt);
    r.Z.assign(max_order + 1, TruncSeries(MultiPoly(), Trunc::at_weight(weight_cap)));
    for (int j = 1; j <= max_order; ++j) {
        TruncSeries z(MultiPoly(), Trunc::at_weight(weight_cap - j));
        for (int k = 1; k < j; ++k) z += r.F[k][j - k];
        r.Z[j] = z;
    }
    const TruncSeries f = lt.partial(t1);
    const std::vector<TruncSeries> args(r.Z.begin() + 1, r.Z.end());
    const std::vector<TruncSeries> pz = schur_all(max_order, args);
    r.plucker.assign(max_order + 1, TruncSeries());
    for (int i = 1; i <= max_order; ++i) {
        TruncSeries rhs(MultiPoly(), Trunc::at_weight(weight_cap - i));
        for (int n = 1; n <= std::min(i - 1, kMaxTimes); ++n) rhs += schur_diff_apply(i - 1 - n, -1, f.partial(var::t(n)));
        r.plucker[i] = pz[i] - rhs;
    }

    const int t2 = var::t(2), t3 = var::t(3);
    auto p = [](int l, const TruncSeries& g) { return schur_diff_apply(l, -1, g); };
    const TruncSeries f11 = f.partial(t1).partial(t1);
    r.low_order.push_back(pm(1, 1, f) - f11);
    r.low_order.push_back(pm(1, 2, f) * QRat(2) - f.partial(t2).partial(t1) - p(1, f11));
    r.low_order.push_back(pm(1, 3, f) * QRat(2) + pm(2, 2, f) + pm(1, 1, f) * f.partial(t1) - f.partial(t3).partial(t1) -
                          p(1, f.partial(t2).partial(t1)) - p(2, f11));

    const TruncSeries u = f.partial(t1);
    for (int k = 1; k <= max_order; ++k)
        for (int m = 1; k + m <= max_order; ++m) r.bridge.push_back(r.F[k][m].partial(t1).partial(t1) - pm(k, m, u));
    return r;
}

WaveFunction wave_function(const MultiPoly& tau, int z_order, WaveKind kind, int weight_cap) {
    require_unit(tau);
    const int sign = kind == WaveKind::psi ? -1 : 1;
    const TruncSeries t = as_series(tau, weight_cap);
    const TruncSeries inv = t.inverse();
    const MultiPoly shifted = miwa_shift_poly(tau, sign, var::aux0);
    WaveFunction r;
    LaurentObject::Coeffs hat;
    for (int j = 0; j <= z_order; ++j) {
        r.w.push_back(TruncSeries(shifted.coefficient(var::aux0, j)) * inv);
        r.w_schur.push_back(TruncSeries(schur_diff_apply(j, sign, tau)) * inv);
        hat.emplace(-j, r.w.back());
    }
    r.psi_hat = LaurentObject(AuxTag::z, std::move(hat), -z_order, 0);
    r.psi = exp_xi(AuxTag::z, -sign, weight_cap) * r.psi_hat;
    return r;
}

std::vector<YResidual> q_bilinear_check(const MultiPoly& tau, int n, int y_weight) {
    if (n < 1) throw MathError("q-bilinear check needs n >= 1");
    const MultiPoly tq = tau_q_build(tau, std::max(tau.max_weight(), 0)).poly();
    return bilinear_residue_check(apply_D(tq, n), y_weight);
}

QRat bk_coeff(int m, int s, int k) {
    if (k < 1 || s < 0) throw MathError("b_k needs k >= 1, s >= 0");
    return c_coefficient(k) * QRat::q_pow(static_cast<long>(m + 1) * k) * (QRat::q_pow(static_cast<long>(s) * k) - 1);
}

std::pair<TruncSeries, TruncSeries> bk_expansion(int m, int s, int order) {
    Trunc tr = Trunc::at_weight(order);
    tr.aux[0] = order;
    const MultiPoly xz = MultiPoly::variable(var::x) * MultiPoly::variable(var::aux0);
    MultiPoly a;
    std::vector<TruncSeries> b;
    for (int k = 1; k <= order; ++k) {
        a += pow(xz, k) * bk_coeff(m, s, k);
        b.emplace_back(bk_coeff(m, s, k));
    }
    const std::vector<TruncSeries> p = schur_all(order, b);
    MultiPoly sum;
    for (int nu = 0; nu <= order; ++nu) sum += pow(xz, nu) * p[nu].poly().constant_term();
    return {series_exp(TruncSeries(a, tr)), TruncSeries(sum, tr)};
}

LaurentObject qwave_residual(const MultiPoly& tau, const std::vector<TruncSeries>& w_tilde, int z_order, int weight_cap) {
    const TruncSeries tq = tau_q_build(tau, weight_cap);
    require_unit(tq.poly());
    const TruncSeries inv = tq.inverse();
    // tau(t + c(x)) keeps the weight of tau, so a wide enough cap makes it exact
    const bool exact = tau.max_weight() <= weight_cap;
    const MultiPoly shifted = miwa_substitute(tq.poly(), -1, var::aux0);
    LaurentObject::Coeffs quot, hat;
    for (int j = 0; j <= z_order; ++j) {
        const Trunc tr = exact ? Trunc::exact() : Trunc::at_weight(weight_cap - j);
        quot.emplace(-j, TruncSeries(shifted.coefficient(var::aux0, j), tr) * inv);
        hat.emplace(-j, j < static_cast<int>(w_tilde.size()) ? w_tilde[j] : TruncSeries());
    }
    const TruncSeries eq = eq_exp(weight_cap);
    LaurentObject::Coeffs ec;
    for (int k = 0; k <= weight_cap; ++k)
        ec.emplace(k, TruncSeries(eq.poly().coefficient(var::aux0, k), Trunc::at_weight(weight_cap)));
    const LaurentObject e = LaurentObject(AuxTag::z, std::move(ec)) * exp_xi(AuxTag::z, 1, weight_cap);
    return LaurentObject(AuxTag::z, std::move(quot), -z_order, 0) * e -
           LaurentObject(AuxTag::z, std::move(hat), -z_order, 0) * e;
}

LaurentObject qwave_check(const MultiPoly& tau, int z_order, int weight_cap) {
    const OrePsiDO s = s_from_tau(tau_q_build(tau, weight_cap), z_order);
    std::vector<TruncSeries> w;
    for (int j = 0; j <= z_order; ++j) w.push_back(s.coeff(-j));
    return qwave_residual(tau, w, z_order, weight_cap);
}

// ---- tau corpus

std::vector<Partition> partitions(int n) {
    std::vector<Partition> out;
    Partition cur;
    std::function<void(int, int)> rec = [&](int rem, int cap) {
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        for (int k = std::min(rem, cap); k >= 1; --k) {
            cur.push_back(k);
            rec(rem - k, k);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

namespace {

MultiPoly det(const std::vector<std::vector<MultiPoly>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    MultiPoly r;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<MultiPoly>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<MultiPoly> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(std::move(row));
        }
        const MultiPoly term = m[0][j] * det(minor);
        r += j % 2 ? -term : term;
    }
    return r;
}

}  // namespace

MultiPoly schur_function(const Partition& lambda) {
    const int r = static_cast<int>(lambda.size());
    std::vector<std::vector<MultiPoly>> m(r, std::vector<MultiPoly>(r));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const int k = lambda[i] - i + j;
            if (k >= 0) m[i][j] = schur_time(k);
        }
    return det(m);
}

MultiPoly translated_schur_tau(const Partition& lambda) {
    const int r = std::max<int>(1, static_cast<int>(lambda.size()));
    std::vector<std::pair<int, MultiPoly>> shift;
    for (int k = 1; k <= kMaxTimes; ++k) shift.emplace_back(var::t(k), t_var(k) + MultiPoly(QRat::frac(r, k)));
    const MultiPoly s = schur_function(lambda).substitute(shift);
    const QRat c = s.constant_term();
    if (c.is_zero()) throw MathError("translated Schur polynomial vanishes at the origin");
    return s * c.inverse();
}

std::string partition_id(const Partition& lambda) {
    if (lambda.empty()) return "s_empty";
    std::string id = "s_";
    for (int p : lambda) id += std::to_string(p);
    return id;
}

std::vector<TauSample> schur_corpus() {
    const std::vector<Partition> parts{{}, {1}, {2}, {1, 1}, {2, 1}, {2, 2}, {3, 1, 1}};
    std::vector<TauSample> out;
    for (const auto& p : parts) out.push_back({partition_id(p), translated_schur_tau(p), true});
    return out;
}

TauSample control_tau() { return {"control_1_plus_t1sq", MultiPoly(1) + t_var(1) * t_var(1), false}; }

std::vector<TauSample> random_controls(std::uint64_t seed, int count, int max_weight) {
    std::mt19937_64 rng(seed);
    std::vector<Exponents> monos;
    for (int w = 1; w <= max_weight; ++w)
        for (const auto& p : partitions(w)) {
            if (p.front() > kMaxTimes) continue;
            Exponents e{};
            for (int part : p) e[var::t(part)] += 1;
            monos.push_back(e);
        }
    std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::vector<TauSample> out;
    for (int i = 0; i < count; ++i) {
        MultiPoly p = 1;
        for (int k = 0; k < 6; ++k) {
            const int c = coeff(rng);
            p.add_term(monos[pick(rng)], QRat(c == 0 ? 1 : c));
        }
        out.push_back({"rand_" + std::to_string(i), p, false});
    }
    return out;
}

}  // namespace qkp

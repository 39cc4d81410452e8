#pragma once

// Hirota bilinear derivatives and the classical KP checks expressed with
// them: bilinear identity, differential Fay, the log-encoded hierarchy, wave
// functions, and the q-bilinear specialization. Includes the tau corpus.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qkp/series.hpp"

namespace qkp {

/// Polynomial in Hirota symbols D1..D7, stored in the time slots (t_i plays D_i).
using HirotaPoly = MultiPoly;

HirotaPoly hirota_symbol(int i, int power = 1);

/// P(D) a.b = P(d_s) a(t+s) b(t-s) at s = 0.
MultiPoly hirota_apply(const HirotaPoly& P, const MultiPoly& a, const MultiPoly& b);

/// p_n(D~) with D~ = (D1, D2/2, D3/3, ...).
HirotaPoly schur_hirota(int n);

/// (D1^4 + 3 D2^2 - 4 D1 D3) tau.tau.
MultiPoly kp_bilinear_residual(const MultiPoly& tau);

/// (D1 Dn - 2 p_{n+1}(D~)) tau.tau; n = 3 is -1/12 of the KP form.
MultiPoly hierarchy_eq(int n, const MultiPoly& tau);

/// One residual per monomial in the y variables.
struct YResidual {
    Exponents y;  // only y slots are set
    MultiPoly residual;
};

/// The generating operator sum_n p_n(-2y) p_{n+1}(D~) exp(sum y_i D_i) as a
/// polynomial in y (y slots) with Hirota coefficients (time slots).
MultiPoly generating_operator(int y_weight);
/// Coefficients of every y-monomial up to y_weight applied to tau.tau.
std::vector<YResidual> generating_hirota(const MultiPoly& tau, int y_weight);

/// Residue in lambda of tau(t+y+[1/lambda]) tau(t-y-[1/lambda]) exp(-2 sum y_i lambda^i),
/// expanded in y up to y_weight.
std::vector<YResidual> bilinear_residue_check(const MultiPoly& tau, int y_weight);

/// s_n = sum_j p_j(-d~)tau p_{n-j}(d~)tau / tau^2 to weight cap.
TruncSeries sn_from_tau(int n, const MultiPoly& tau, int weight_cap);
/// sum_j p_j(-d~)tau p_{n-j}(d~)tau - p_n(D~) tau.tau.
MultiPoly sn_identity_residual(int n, const MultiPoly& tau);

struct FlowCheck {
    TruncSeries r1;  // d1 s4 - d3 u
    TruncSeries r2;  // 4/3 d1 (d3 u - d1^3 u/4 - 3 u d1 u) - d2^2 u
};
FlowCheck kp_flow_check(const MultiPoly& tau, int weight_cap);

/// Differential Fay multiplied through by 1/(lambda mu): a polynomial with
/// lambda^{-1} in aux0 and mu^{-1} in aux1.
MultiPoly fay_residual(const MultiPoly& tau);

struct LogFay {
    TruncSeries lhs;  // sum_{k,m>=1} p_k p_m(-d~) log tau lambda^{-k} mu^{-m}
    TruncSeries rhs;  // log(1 + sum (mu^{-n} - lambda^{-n})/(mu - lambda) p_n(-d~) d1 log tau)
};
/// Both sides to the given bi-order, each coefficient known to total weight_cap.
LogFay fay_log_form(const MultiPoly& tau, int order, int weight_cap);
/// Collision limit mu -> lambda, single spectral variable in aux0.
LogFay fay_collision(const MultiPoly& tau, int order, int weight_cap);

struct LogEncoding {
    std::vector<std::vector<TruncSeries>> F;  // F[k][m] = p_k p_m(-d~) log tau, 1 <= k, m <= max_order
    std::vector<TruncSeries> Z;               // Z[j] = sum_{k+m=j} F_km, j <= max_order
    std::vector<TruncSeries> plucker;         // index i: p_i(Z) - sum_{n+l=i-1} p_l(-d~) d_n d1 log tau
    std::vector<TruncSeries> low_order;       // the lambda^-2, ^-3, ^-4 identities in f = d1 log tau
    std::vector<TruncSeries> bridge;          // d1^2 F~_km - F_km(u), k + m <= max_order
};
LogEncoding log_encoding(const MultiPoly& tau, int max_order, int weight_cap);

enum class WaveKind { psi, psi_star };

struct WaveFunction {
    LaurentObject psi;
    LaurentObject psi_hat;            // psi without the exponential factor
    std::vector<TruncSeries> w;       // w_j from the Miwa-shift quotient
    std::vector<TruncSeries> w_schur; // p_j(-+d~) tau / tau
};
WaveFunction wave_function(const MultiPoly& tau, int z_order, WaveKind kind, int weight_cap);

/// The bilinear residue with both factors D^n tau_q, tau_q = tau(t + c(x)).
std::vector<YResidual> q_bilinear_check(const MultiPoly& tau, int n, int y_weight);

/// (1-q)^k/(k(1-q^k)) q^{(m+1)k} (q^{sk} - 1).
QRat bk_coeff(int m, int s, int k);
/// exp(sum_k b_k (xz)^k) and sum_nu p_nu(b) (xz)^nu; z in aux0.
std::pair<TruncSeries, TruncSeries> bk_expansion(int m, int s, int order);

/// psi_q from the Miwa quotient minus psi_hat_q exp_q(xz) exp(xi) with
/// psi_hat_q read off the dressing operator S.
LaurentObject qwave_residual(const MultiPoly& tau, const std::vector<TruncSeries>& w_tilde, int z_order, int weight_cap);
LaurentObject qwave_check(const MultiPoly& tau, int z_order, int weight_cap);

// ---- tau corpus

using Partition = std::vector<int>;

std::vector<Partition> partitions(int n);
/// Jacobi-Trudi determinant det(p_{lambda_i - i + j}(t)).
MultiPoly schur_function(const Partition& lambda);
/// s_lambda(t + r[1]) / s_lambda(r[1]) with r = length(lambda).
MultiPoly translated_schur_tau(const Partition& lambda);
std::string partition_id(const Partition& lambda);

struct TauSample {
    std::string id;
    MultiPoly tau;
    bool is_tau = true;
};
/// s_0, s_1, s_2, s_11, s_21, s_22, s_311 translated to unit constant term.
std::vector<TauSample> schur_corpus();
/// 1 + t1^2, the documented non-tau control.
TauSample control_tau();
/// Seeded random polynomials with unit constant term, weight <= max_weight.
std::vector<TauSample> random_controls(std::uint64_t seed, int count, int max_weight);

}  // namespace qkp

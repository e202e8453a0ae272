#include "ncmap/sequence.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ncmap/errors.hpp"
#include "ncmap/spectral.hpp"

namespace ncmap {

double epsilon(int m) {
    if (m < 2) throw Error(ErrorKind::BadPeriod, "epsilon needs m >= 2");
    return (1.0 - 1.0 / std::sqrt(static_cast<double>(m))) / (m - 1);
}

Eigen::MatrixXd build_P(const MapParameters& params, int m) {
    if (m < 2) throw Error(ErrorKind::BadPeriod, "P needs m >= 2");
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m - 1; ++i) {
        for (int j = 0; j < m - 1; ++j) {
            if (i == j) P(i, j) = params.c1();
            else if (j > i) P(i, j) = params.c2();
            else P(i, j) = params.alpha2();
        }
    }
    return P;
}

Eigen::MatrixXd compute_T_direct(const Eigen::MatrixXd& W, const MapParameters& params) {
    const int d = static_cast<int>(W.rows());
    const int m = static_cast<int>(W.cols());
    const double a2 = params.alpha2();
    const double g = params.gain();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < m; ++i) {
        T.noalias() += a2 * W.col(i) * W.col(i).transpose();
        for (int j = 0; j < i; ++j) {
            T.noalias() += g * W.col(i) * W.col(j).transpose();
        }
    }
    return T;
}

Eigen::MatrixXd compute_T_via_P(const Eigen::MatrixXd& W, const MapParameters& params) {
    if (W.cols() == 0) return Eigen::MatrixXd::Zero(W.rows(), W.rows());
    if (W.rowwise().sum().cwiseAbs().maxCoeff() > 1e-9) {
        throw Error(ErrorKind::ZeroSumViolated, "W 1 != 0");
    }
    const int m = static_cast<int>(W.cols());
    if (m < 2) return Eigen::MatrixXd::Zero(W.rows(), W.rows());
    return W * build_P(params, m) * W.transpose();
}

Eigen::MatrixXd build_C(int m) {
    if (m < 2) throw Error(ErrorKind::BadPeriod, "C needs m >= 2");
    const double e = epsilon(m + 1);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            double a = j > i ? 1.0 : -1.0;
            C(i, j) = a + e * 2.0 * (j - i);
        }
    }
    return C;
}

Eigen::MatrixXd build_P_tilde(const MapParameters& params, int m) {
    if (m < 3) throw Error(ErrorKind::BadPeriod, "P~ needs m >= 3");
    const double e = epsilon(m);
    Eigen::MatrixXd P = build_P(params, m);
    Eigen::MatrixXd J = Eigen::MatrixXd::Ones(m, m);
    Eigen::MatrixXd full = P - e * (J * P + P * J) + e * e * (J * P * J);
    return full.topLeftCorner(m - 1, m - 1);
}

Eigen::MatrixXd zero_sum_basis(int m) {
    if (m < 2) throw Error(ErrorKind::BadPeriod, "basis needs m >= 2");
    const double e = epsilon(m);
    Eigen::MatrixXd M(m, m - 1);
    M.topRows(m - 1) = Eigen::MatrixXd::Identity(m - 1, m - 1) -
                       e * Eigen::MatrixXd::Ones(m - 1, m - 1);
    M.row(m - 1).setConstant(-(1.0 - e * (m - 1)));
    return M;
}

InterlacingReport check_interlacing(int m_max, double margin) {
    InterlacingReport rep;
    rep.m_max = m_max;
    rep.min_margin = std::numeric_limits<double>::infinity();
    if (m_max < 2) return rep;
    std::vector<double> cur = skew_deltas(build_C(2));
    for (int m = 2; m <= m_max; ++m) {
        std::vector<double> next = skew_deltas(build_C(m + 1));
        auto at = [](const std::vector<double>& v, int k) {
            return k < static_cast<int>(v.size()) ? v[k] : 0.0;
        };
        for (int k = 0; k < m / 2; ++k) {
            double up = at(next, k), val = at(cur, k), lo = at(next, k + 1);
            double mg = std::min(up - val, val - lo);
            rep.min_margin = std::min(rep.min_margin, mg);
            if (!(up - val > margin && val - lo > margin && lo >= 0.0)) {
                rep.violations.push_back({m, k + 1, up, val, lo});
            }
        }
        cur = std::move(next);
    }
    return rep;
}

int default_m_cap(int n) { return std::max(64 * n, 512); }

std::vector<double> p_tilde_omegas(const MapParameters& params, int m) {
    Eigen::MatrixXd S = build_P_tilde(params, m);
    S.diagonal().array() -= params.mu();
    return skew_deltas(S);
}

bool targets_admissible(const std::vector<double>& omega, const std::vector<double>& omega_hat,
                        double tol) {
    const int L = static_cast<int>(omega.size());
    const int q = static_cast<int>(omega_hat.size());
    if (q > L) return false;
    const double t = tol * std::max(1.0, L ? omega[0] : 0.0);
    for (int k = 0; k < q; ++k) {
        if (omega[k] < omega_hat[k] - t) return false;
        if (omega_hat[k] < omega[L - q + k] - t) return false;
    }
    return true;
}

namespace {

bool upper_ok(const std::vector<double>& omega, const std::vector<double>& omega_hat) {
    const int q = static_cast<int>(omega_hat.size());
    if (q > static_cast<int>(omega.size())) return false;
    const double t = 1e-10 * std::max(1.0, omega.empty() ? 0.0 : omega[0]);
    for (int k = 0; k < q; ++k) {
        if (omega[k] < omega_hat[k] - t) return false;
    }
    return true;
}

void check_sorted_targets(const std::vector<double>& w) {
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (!(w[k] >= 0.0) || !std::isfinite(w[k])) {
            throw Error(ErrorKind::TargetsInfeasible, "targets must be finite and >= 0");
        }
        if (k && w[k] > w[k - 1]) {
            throw Error(ErrorKind::TargetsInfeasible, "targets must be sorted descending");
        }
    }
}

}  // namespace

SequenceLength find_sequence_length(const std::vector<double>& omega_hat, int r,
                                    const MapParameters& params, int m_cap) {
    check_sorted_targets(omega_hat);
    if (static_cast<int>(omega_hat.size()) != r / 2) {
        throw Error(ErrorKind::TargetsInfeasible, "need floor(r/2) targets");
    }
    const int m0 = std::max(r + 1, 3);
    if (m0 > m_cap) throw Error(ErrorKind::SearchExhausted, "m_cap below r+1");

    // The leading conditions omega_k(m) >= w^_k are monotone in m (interlacing of
    // successive P~ spectra), so the first m satisfying them is located by
    // galloping + bisection; the full check then scans upward one m at a time.
    auto up = [&](int m) { return upper_ok(p_tilde_omegas(params, m), omega_hat); };
    int lo = m0 - 1, hi = m0;
    if (!up(m0)) {
        int step = 1;
        lo = m0;
        hi = m0 + step;
        while (true) {
            if (hi > m_cap) {
                if (!up(m_cap)) {
                    throw Error(ErrorKind::SearchExhausted,
                                "no sequence length up to m_cap = " + std::to_string(m_cap));
                }
                hi = m_cap;
                break;
            }
            if (up(hi)) break;
            lo = hi;
            step *= 2;
            hi = lo + step;
        }
        while (hi - lo > 1) {
            int mid = lo + (hi - lo) / 2;
            if (up(mid)) hi = mid;
            else lo = mid;
        }
    }
    for (int m = hi; m <= m_cap; ++m) {
        std::vector<double> om = p_tilde_omegas(params, m);
        if (targets_admissible(om, omega_hat)) return {m, om};
    }
    throw Error(ErrorKind::SearchExhausted,
                "no sequence length up to m_cap = " + std::to_string(m_cap));
}

Eigen::MatrixXd calc_ps_matrix(const Eigen::MatrixXd& D, const std::vector<double>& omega_hat) {
    const int t = static_cast<int>(D.rows());
    std::vector<double> g = skew_deltas(D);
    const int T = static_cast<int>(g.size());
    const int q = static_cast<int>(omega_hat.size());
    if (q < 1 || T <= q) throw Error(ErrorKind::TargetsInfeasible, "nothing to reduce");
    if (!targets_admissible(g, omega_hat, 1e-9)) {
        throw Error(ErrorKind::TargetsInfeasible, "targets do not interlace D");
    }
    std::vector<double> nu(T - 1);
    for (int j = 0; j + 1 < T - 1; ++j) {
        double v = g[j + 1];
        if (j < q) v = std::max(v, omega_hat[j]);
        nu[j] = std::clamp(v, g[j + 1], g[j]);
    }
    nu[T - 2] = std::clamp(std::min(g[T - 2], omega_hat[q - 1]), g[T - 1], g[T - 2]);
    (void)t;
    return block_diag_skew(nu, 2 * (T - 1));
}

namespace {

// prod(num) / prod(den) in log space; long products overflow for large m
double product_ratio(const std::vector<double>& num, const std::vector<double>& den) {
    double logv = 0.0;
    bool neg = false;
    for (double v : num) {
        if (v == 0.0) return 0.0;
        logv += std::log(std::abs(v));
        neg ^= v < 0.0;
    }
    for (double v : den) {
        logv -= std::log(std::abs(v));
        neg ^= v < 0.0;
    }
    double r = std::exp(logv);
    return neg ? -r : r;
}

std::vector<double> shifted(const std::vector<double>& vals, double x) {
    std::vector<double> out;
    out.reserve(vals.size());
    for (double v : vals) out.push_back(x + v);
    return out;
}

}  // namespace

Eigen::MatrixXd calc_theta_sub(const Eigen::MatrixXd& D1, const Eigen::MatrixXd& D2) {
    const int r = static_cast<int>(D1.rows());
    const int s = static_cast<int>(D2.rows());
    if (r < 2 || s != 2 * ((r - 1) / 2)) {
        throw Error(ErrorKind::InterlacingViolated, "D2 must be 2*floor((r-1)/2) square");
    }
    const bool odd = (r % 2) == 1;
    const int k = r / 2;  // pairs of D1 entering the identity

    BlockSpectrum sp2 = skew_block_diagonalize(D2, 1e-9);
    std::vector<double> zeta = sp2.deltas();  // s/2 entries
    std::vector<double> delta = skew_deltas(D1);
    delta.resize(k);

    const double scale = std::max(1.0, delta.empty() ? 1.0 : delta[0] * delta[0]);
    const double ctol = 1e-9 * scale;

    // single-step interlacing delta_1 >= zeta_1 >= delta_2 >= ...
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        double hi = delta[i];
        double lo = i + 1 < delta.size() ? delta[i + 1] : 0.0;
        if (zeta[i] > hi + 1e-9 * std::sqrt(scale) || zeta[i] < lo - 1e-9 * std::sqrt(scale)) {
            throw Error(ErrorKind::InterlacingViolated, "D1 and D2 deltas do not interlace");
        }
    }

    // clusters of equal zeta^2 become one pole
    std::vector<double> dsq;
    for (double d : delta) dsq.push_back(d * d);
    struct Cluster { double u; int first; int mult; };
    std::vector<Cluster> cl;
    for (std::size_t i = 0; i < zeta.size(); ++i) {
        double u = zeta[i] * zeta[i];
        if (!cl.empty() && std::abs(cl.back().u - u) <= ctol) {
            cl.back().mult++;
        } else {
            cl.push_back({u, static_cast<int>(i), 1});
        }
    }
    for (const auto& c : cl) {
        for (int rep = 1; rep < c.mult; ++rep) {
            auto it = std::min_element(dsq.begin(), dsq.end(), [&](double x, double y) {
                return std::abs(x - c.u) < std::abs(y - c.u);
            });
            if (it == dsq.end() || std::abs(*it - c.u) > 1e3 * ctol) {
                throw Error(ErrorKind::InterlacingViolated, "repeated zeta without matching delta");
            }
            dsq.erase(it);
        }
    }
    std::vector<double> us;
    for (const auto& c : cl) us.push_back(c.u);

    auto clamp_weight = [&](double w) {
        if (w < -1e-8 * scale) {
            throw Error(ErrorKind::InterlacingViolated, "negative border weight");
        }
        return std::max(w, 0.0);
    };

    Eigen::VectorXd z = Eigen::VectorXd::Zero(r - 1);
    const double utol = 1e-12 * scale;
    int zero_cluster = -1;
    for (std::size_t c = 0; c < cl.size(); ++c) {
        if (!odd && cl[c].u <= utol) {
            zero_cluster = static_cast<int>(c);
            continue;
        }
        std::vector<double> den;
        for (std::size_t d = 0; d < cl.size(); ++d) {
            if (d != c) den.push_back(cl[d].u - cl[c].u);
        }
        if (!odd) den.push_back(cl[c].u);
        double w = product_ratio(shifted(dsq, -cl[c].u), den);
        if (!odd) w = -w;
        w = clamp_weight(w);
        int i = cl[c].first;
        z(2 * i) = std::sqrt(0.5 * w);
        z(2 * i + 1) = std::sqrt(0.5 * w);
    }
    if (!odd) {
        double z0sq;
        if (zero_cluster < 0) {
            z0sq = product_ratio(dsq, us);
        } else {
            // x divides both sides; cancel it against a zero delta
            auto it = std::min_element(dsq.begin(), dsq.end());
            if (it == dsq.end() || *it > 1e3 * ctol) {
                throw Error(ErrorKind::InterlacingViolated, "zero zeta without zero delta");
            }
            dsq.erase(it);
            std::vector<double> rest;
            for (std::size_t d = 0; d < cl.size(); ++d) {
                if (static_cast<int>(d) != zero_cluster) rest.push_back(cl[d].u);
            }
            z0sq = product_ratio(dsq, rest);
        }
        z(s) = std::sqrt(clamp_weight(z0sq));
    }

    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(r - 1, r - 1);
    E.topLeftCorner(s, s) = sp2.block_form();
    Eigen::MatrixXd Dbar = Eigen::MatrixXd::Zero(r, r);
    Dbar.topLeftCorner(r - 1, r - 1) = E;
    Dbar.block(0, r - 1, r - 1, 1) = z;
    Dbar.block(r - 1, 0, 1, r - 1) = -z.transpose();

    BlockSpectrum sp1 = skew_block_diagonalize(D1, 1e-9);
    BlockSpectrum spb = skew_block_diagonalize(Dbar, 1e-9);
    Eigen::MatrixXd theta = sp1.theta * spb.theta.transpose();
    Eigen::MatrixXd back = Eigen::MatrixXd::Identity(r, r);
    back.topLeftCorner(s, s) = sp2.theta.transpose();
    theta = theta * back;

    Eigen::MatrixXd lead = (theta.transpose() * D1 * theta).topLeftCorner(s, s);
    double res = s ? (lead - D2).cwiseAbs().maxCoeff() : 0.0;
    if (res > 1e-8 * std::sqrt(scale)) {
        throw Error(ErrorKind::NumericFailure,
                    "principal submatrix residual " + std::to_string(res));
    }
    return theta;
}

Eigen::MatrixXd calc_theta(const Eigen::MatrixXd& C, const std::vector<double>& omega_hat_in) {
    const int p = static_cast<int>(C.rows());
    const int q = static_cast<int>(omega_hat_in.size());
    check_sorted_targets(omega_hat_in);
    std::vector<double> eta = skew_deltas(C);
    const int L = static_cast<int>(eta.size());
    if (q < 1 || 2 * q > p) throw Error(ErrorKind::InterlacingViolated, "need 1 <= q <= p/2");
    const double tol = 1e-9;
    if (!targets_admissible(eta, omega_hat_in, tol)) {
        throw Error(ErrorKind::InterlacingViolated, "targets violate eta_k >= w^_k >= eta_{L-q+k}");
    }
    std::vector<double> w(omega_hat_in);
    for (int k = 0; k < q; ++k) w[k] = std::clamp(w[k], eta[L - q + k], eta[k]);

    Eigen::MatrixXd S = 0.5 * (C - C.transpose());
    Eigen::MatrixXd theta;
    if (p == 2 * q) {
        theta = skew_block_diagonalize(S, 1e-9).theta;
    } else {
        theta = Eigen::MatrixXd::Identity(p, p);
        Eigen::MatrixXd D = S;
        while (static_cast<int>((D.rows() + 1) / 2) > q) {
            Eigen::MatrixXd next = calc_ps_matrix(D, w);
            Eigen::MatrixXd sub = calc_theta_sub(D, next);
            const int t = static_cast<int>(D.rows());
            theta.leftCols(t) = theta.leftCols(t) * sub;
            D = next;
        }
    }
    Eigen::MatrixXd lead = (theta.transpose() * S * theta).topLeftCorner(2 * q, 2 * q);
    double res = (lead - block_diag_skew(w, 2 * q)).cwiseAbs().maxCoeff();
    if (res > 1e-7 * std::max(1.0, eta.empty() ? 1.0 : eta[0])) {
        throw Error(ErrorKind::NumericFailure, "calc_theta residual " + std::to_string(res));
    }
    return theta;
}

namespace {

std::vector<double> resolve_tde_gamma(TargetSpec& tgt, const MapParameters& params,
                                      const std::vector<double>& sigma_free, std::string& cas) {
    const int n = tgt.n;
    const double mu = params.mu();
    if (!tgt.gamma.empty()) {
        if (!sigma_free.empty()) {
            throw Error(ErrorKind::IncompatibleParams, "TdE: give gamma or sigma, not both");
        }
        cas = "III";
        return tgt.gamma;
    }
    std::vector<double> g(n);
    if (sigma_free.empty()) {
        const int m = 2 * n + 1;
        std::vector<double> om = p_tilde_omegas(params, m);
        for (int l = 0; l < n; ++l) {
            if (!(om[l] > 0)) throw Error(ErrorKind::NumericFailure, "zero omega in II.i");
            g[l] = mu / om[l];
        }
        cas = "II.i";
        return g;
    }
    std::vector<double> s;
    if (static_cast<int>(sigma_free.size()) == n) {
        s = sigma_free;
    } else if (static_cast<int>(sigma_free.size()) == 2 * n) {
        for (int l = 0; l < n; ++l) {
            double a = sigma_free[2 * l], b = sigma_free[2 * l + 1];
            if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
                throw Error(ErrorKind::IncompatibleParams,
                            "normal targets need sigma_{2l-1} = sigma_{2l}");
            }
            s.push_back(a);
        }
    } else {
        throw Error(ErrorKind::IncompatibleParams, "TdE sigma list must have n or 2n entries");
    }
    for (int l = 0; l < n; ++l) {
        if (!(s[l] > 0)) throw Error(ErrorKind::IncompatibleParams, "sigma must be > 0");
        g[l] = mu * s[l] * s[l];
    }
    cas = "II.ii";
    return g;
}

}  // namespace

ExplorationMatrix construct_W(const TargetSpec& target_in, const MapParameters& params,
                              const std::vector<double>& sigma_free,
                              const ConstructOptions& opts) {
    TargetSpec target = target_in;
    std::string cas;
    if (target.family == TargetFamily::TdE) {
        if (params.skew_regime()) {
            throw Error(ErrorKind::IncompatibleParams, "TdE needs 2*alpha2 - (alpha1+alpha2)^2 != 0");
        }
        target.gamma = resolve_tde_gamma(target, params, sigma_free, cas);
    }
    const Eigen::MatrixXd Td = target.materialize(params);
    const int n = target.n;
    const int r = numeric_rank(Td);
    if (r == 0) throw Error(ErrorKind::IncompatibleParams, "T_d = 0");
    if (r % 2 != 0) throw Error(ErrorKind::IncompatibleParams, "odd rank(T_d)");
    const int q = r / 2;
    const bool skew = params.skew_regime();
    const double mu = params.mu();

    BlockSpectrum spec = skew ? skew_block_diagonalize(Td, 1e-12) : normal_block_diagonalize(Td, 1e-9);
    if (static_cast<int>(spec.pairs.size()) < q) {
        throw Error(ErrorKind::NumericFailure, "rank and block count disagree");
    }

    std::vector<double> sigma(r), omega_hat(q);
    int m_fixed = 0;
    if (skew) {
        if (static_cast<int>(sigma_free.size()) == q) {
            cas = "I.i";
            m_fixed = r + 1;
            std::vector<double> om = p_tilde_omegas(params, m_fixed);
            for (int k = 0; k < q; ++k) {
                double s1 = sigma_free[k];
                if (!(s1 > 0)) throw Error(ErrorKind::IncompatibleParams, "sigma must be > 0");
                if (!(om[k] > 0)) throw Error(ErrorKind::NumericFailure, "zero omega in I.i");
                sigma[2 * k] = s1;
                sigma[2 * k + 1] = spec.pairs[k].delta / (om[k] * s1);
                omega_hat[k] = om[k];
            }
        } else if (static_cast<int>(sigma_free.size()) == r) {
            cas = "I.ii";
            for (int k = 0; k < q; ++k) {
                double s1 = sigma_free[2 * k], s2 = sigma_free[2 * k + 1];
                if (!(s1 > 0 && s2 > 0)) throw Error(ErrorKind::IncompatibleParams, "sigma must be > 0");
                sigma[2 * k] = s1;
                sigma[2 * k + 1] = s2;
                omega_hat[k] = spec.pairs[k].delta / (s1 * s2);
            }
        } else {
            throw Error(ErrorKind::IncompatibleParams,
                        "skew target of rank " + std::to_string(r) + " needs " +
                            std::to_string(q) + " or " + std::to_string(r) + " sigma values");
        }
    } else {
        if (target.family != TargetFamily::TdE && !sigma_free.empty()) {
            throw Error(ErrorKind::IncompatibleParams, "singular values are fixed by a normal target");
        }
        if (cas.empty()) cas = "III";
        for (int k = 0; k < q; ++k) {
            double g = spec.pairs[k].gamma;
            double s2 = g / mu;
            if (!(s2 > 0)) throw Error(ErrorKind::IncompatibleParams, "gamma/mu must be > 0");
            sigma[2 * k] = sigma[2 * k + 1] = std::sqrt(s2);
            omega_hat[k] = spec.pairs[k].delta * mu / g;
        }
    }

    // stable sort of targets; pos[k] = slot of block k after sorting
    std::vector<int> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return omega_hat[a] > omega_hat[b]; });
    std::vector<double> sorted(q);
    for (int j = 0; j < q; ++j) sorted[j] = omega_hat[order[j]];

    const int cap = opts.m_cap > 0 ? opts.m_cap : default_m_cap(n);
    int m = m_fixed;
    if (!m) m = find_sequence_length(sorted, r, params, cap).m;

    Eigen::MatrixXd Cm = build_P_tilde(params, m);
    Cm.diagonal().array() -= mu;
    Cm = 0.5 * (Cm - Cm.transpose());
    Eigen::MatrixXd theta_sorted = calc_theta(Cm, sorted);
    Eigen::MatrixXd theta = theta_sorted;
    for (int j = 0; j < q; ++j) {
        int k = order[j];
        theta.col(2 * k) = theta_sorted.col(2 * j);
        theta.col(2 * k + 1) = theta_sorted.col(2 * j + 1);
    }

    Eigen::MatrixXd V(m, m);
    V.leftCols(m - 1) = zero_sum_basis(m) * theta;
    V.col(m - 1).setConstant(1.0 / std::sqrt(static_cast<double>(m)));

    Eigen::VectorXd sv = Eigen::Map<Eigen::VectorXd>(sigma.data(), r);
    ExplorationMatrix em{.w = spec.theta.leftCols(r) * sv.asDiagonal() * V.leftCols(r).transpose(),
                         .m = m,
                         .u_factor = spec.theta,
                         .sigma = sigma,
                         .v_factor = V,
                         .target = target,
                         .params = params,
                         .sigma_case = cas};

    double wsum = em.w.rowwise().sum().cwiseAbs().maxCoeff();
    double recon = (compute_T_direct(em.w, params) - Td).cwiseAbs().maxCoeff();
    if (wsum > 1e-9 || recon > 1e-7) {
        throw Error(ErrorKind::NumericFailure, "construction residuals W1=" + std::to_string(wsum) +
                                                   " T=" + std::to_string(recon));
    }
    return em;
}

ExplorationMatrix reference_coordinate_sequence(int n, const MapParameters& params) {
    if (n < 1) throw Error(ErrorKind::ConfigError, "n must be >= 1");
    const int m = 4 * n;
    static const double ub[4] = {1, 0, -1, 0};
    static const double vb[4] = {0, 1, 0, -1};
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2 * n, m);
    for (int l = 0; l < m; ++l) {
        int i = (l / 4) % n;
        W(i, l) = ub[l % 4];
        W(n + i, l) = vb[l % 4];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
    std::vector<double> s;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > 1e-12) s.push_back(svd.singularValues()(i));
    }
    ExplorationMatrix em{.w = W,
                         .m = m,
                         .u_factor = svd.matrixU(),
                         .sigma = s,
                         .v_factor = svd.matrixV(),
                         .target = std::nullopt,
                         .params = params,
                         .sigma_case = "reference"};
    return em;
}

void write_W(std::ostream& os, const ExplorationMatrix& em) {
    os << "# ncmap W n=" << em.n() << " m=" << em.m << " alpha1=" << std::setprecision(17)
       << em.params.alpha1() << " alpha2=" << em.params.alpha2() << "\n";
    for (int i = 0; i < em.w.rows(); ++i) {
        for (int j = 0; j < em.w.cols(); ++j) {
            if (j) os << ' ';
            os << std::setprecision(17) << em.w(i, j);
        }
        os << "\n";
    }
}

void write_W_file(const std::string& path, const ExplorationMatrix& em) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path);
    write_W(f, em);
}

LoadedW read_W(std::istream& is) {
    LoadedW out;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ncmap W", 0) != 0) {
        throw Error(ErrorKind::ConfigError, "missing '# ncmap W' header");
    }
    std::istringstream hs(line.substr(9));
    std::string tok;
    bool got_n = false, got_m = false;
    while (hs >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
            if (key == "n") { out.n = std::stoi(val); got_n = true; }
            else if (key == "m") { out.m = std::stoi(val); got_m = true; }
            else if (key == "alpha1") out.alpha1 = std::stod(val);
            else if (key == "alpha2") out.alpha2 = std::stod(val);
        } catch (const std::exception&) {
            throw Error(ErrorKind::ConfigError, "bad header value '" + tok + "'");
        }
    }
    if (!got_n || !got_m || out.n < 1 || out.m < 1) {
        throw Error(ErrorKind::ConfigError, "header needs n and m");
    }
    out.w.resize(2 * out.n, out.m);
    for (int i = 0; i < 2 * out.n; ++i) {
        if (!std::getline(is, line)) throw Error(ErrorKind::ConfigError, "W file truncated");
        std::istringstream ls(line);
        for (int j = 0; j < out.m; ++j) {
            if (!(ls >> out.w(i, j))) throw Error(ErrorKind::ConfigError, "W row too short");
        }
    }
    return out;
}

LoadedW read_W_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot read " + path);
    return read_W(f);
}

}  // namespace ncmap

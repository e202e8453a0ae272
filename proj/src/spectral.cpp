#include "ncmap/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "ncmap/errors.hpp"

namespace ncmap {

namespace {

constexpr double kTieTol = 1e-10;

double zero_tolerance(const Eigen::MatrixXd& M) {
    double scale = M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
    return 1e-10 * std::max(1.0, scale * std::sqrt(static_cast<double>(M.rows())));
}

struct RawBlock {
    int col = 0;    // first column in the Schur basis
    int width = 1;  // 1 or 2
    double gamma = 0.0;
    double delta = 0.0;
    int col2 = -1;  // partner column for paired real eigenvalues
};

// Real Schur form of a skew matrix through the Hermitian matrix iS. Francis QR stalls on
// large purely imaginary spectra; the Hermitian solver does not.
void skew_schur(const Eigen::MatrixXd& S, Eigen::MatrixXd& Q, Eigen::MatrixXd& T) {
    const int p = static_cast<int>(S.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(std::complex<double>(0.0, 1.0) *
                                                       S.cast<std::complex<double>>());
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");
    }
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXcd& V = es.eigenvectors();
    const double ztol = zero_tolerance(S);
    Q.resize(p, p);
    int c = 0;
    // iS v = l v with l > 0 gives S Re v = l Im v, S Im v = -l Re v
    for (int j = p - 1; j >= 0 && lam(j) > ztol; --j) {
        Q.col(c++) = std::sqrt(2.0) * V.col(j).real();
        Q.col(c++) = std::sqrt(2.0) * V.col(j).imag();
    }
    const int npos = c / 2;
    const int nzero = p - 2 * npos;
    if (nzero > 0) {
        // real orthonormal basis of the kernel from the real and imaginary parts
        Eigen::MatrixXd K(p, 2 * nzero);
        for (int j = 0; j < nzero; ++j) {
            K.col(j) = V.col(npos + j).real();
            K.col(nzero + j) = V.col(npos + j).imag();
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU);
        Q.rightCols(nzero) = svd.matrixU().leftCols(nzero);
    }
    T = Eigen::MatrixXd::Zero(p, p);
    for (int k = 0; k < npos; ++k) {
        T(2 * k + 1, 2 * k) = lam(p - 1 - k);
        T(2 * k, 2 * k + 1) = -lam(p - 1 - k);
    }
}

// M already blockdiag([[0,-d],[d,0]] ...) with d descending and positive
bool canonical_skew(const Eigen::MatrixXd& M, BlockSpectrum& out) {
    const int p = static_cast<int>(M.rows());
    std::vector<BlockPair> pairs;
    int k = 0;
    for (; 2 * k + 1 < p && M(2 * k + 1, 2 * k) > 0.0; ++k) {
        double d = M(2 * k + 1, 2 * k);
        if (M(2 * k, 2 * k + 1) != -d) return false;
        if (k > 0 && d > pairs.back().delta) return false;
        pairs.push_back({0.0, d});
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < k; ++j) {
        B(2 * j + 1, 2 * j) = pairs[j].delta;
        B(2 * j, 2 * j + 1) = -pairs[j].delta;
    }
    if (M != B) return false;
    out.theta = Eigen::MatrixXd::Identity(p, p);
    out.pairs = std::move(pairs);
    out.zero_count = p - 2 * k;
    return true;
}

BlockSpectrum decompose(const Eigen::MatrixXd& M, bool skew) {
    const int p = static_cast<int>(M.rows());
    BlockSpectrum out;
    if (p == 0) {
        out.theta = Eigen::MatrixXd(0, 0);
        return out;
    }
    if (skew && canonical_skew(M, out)) return out;
    Eigen::MatrixXd Q, T;
    if (skew) {
        skew_schur(M, Q, T);
    } else {
        Eigen::RealSchur<Eigen::MatrixXd> schur(M);
        if (schur.info() != Eigen::Success) {
            throw Error(ErrorKind::ConvergenceFailure, "real Schur iteration did not converge");
        }
        Q = schur.matrixU();
        T = schur.matrixT();
    }
    const double ztol = zero_tolerance(M);

    std::vector<RawBlock> blocks;
    std::vector<RawBlock> reals;
    std::vector<int> zeros;
    for (int i = 0; i < p;) {
        if (i + 1 < p && T(i + 1, i) != 0.0) {
            RawBlock b;
            b.col = i;
            b.width = 2;
            b.gamma = 0.5 * (T(i, i) + T(i + 1, i + 1));
            b.delta = 0.5 * (T(i + 1, i) - T(i, i + 1));
            if (b.delta < 0.0) {
                Q.col(i).swap(Q.col(i + 1));
                b.delta = -b.delta;
            }
            if (skew) b.gamma = 0.0;
            if (std::hypot(b.gamma, b.delta) <= ztol) {
                zeros.push_back(i);
                zeros.push_back(i + 1);
            } else {
                blocks.push_back(b);
            }
            i += 2;
        } else {
            if (std::abs(T(i, i)) <= ztol || skew) {
                if (std::abs(T(i, i)) > ztol) {
                    throw Error(ErrorKind::NotSkewSymmetric, "nonzero real eigenvalue");
                }
                zeros.push_back(i);
            } else {
                RawBlock b;
                b.col = i;
                b.gamma = T(i, i);
                reals.push_back(b);
            }
            ++i;
        }
    }

    // equal real eigenvalues of a normal matrix pair up as (gamma, 0) blocks
    if (!reals.empty()) {
        std::stable_sort(reals.begin(), reals.end(),
                         [](const RawBlock& a, const RawBlock& b) { return a.gamma > b.gamma; });
        if (reals.size() % 2 != 0) {
            throw Error(ErrorKind::NotNormal, "real eigenvalue without an equal partner");
        }
        for (std::size_t k = 0; k < reals.size(); k += 2) {
            double g1 = reals[k].gamma, g2 = reals[k + 1].gamma;
            if (std::abs(g1 - g2) > 1e-8 * std::max(1.0, std::abs(g1))) {
                throw Error(ErrorKind::NotNormal, "real eigenvalues cannot be paired into 2x2 blocks");
            }
            RawBlock b;
            b.col = reals[k].col;
            b.col2 = reals[k + 1].col;
            b.width = 2;
            b.gamma = 0.5 * (g1 + g2);
            b.delta = 0.0;
            blocks.push_back(b);
        }
    }

    std::vector<std::size_t> order(blocks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const RawBlock& x = blocks[a];
        const RawBlock& y = blocks[b];
        if (std::abs(x.delta - y.delta) >= kTieTol) return x.delta > y.delta;
        if (std::abs(x.gamma - y.gamma) >= kTieTol) return x.gamma > y.gamma;
        return x.col < y.col;
    });

    out.theta.resize(p, p);
    int c = 0;
    for (std::size_t idx : order) {
        const RawBlock& b = blocks[idx];
        out.theta.col(c) = Q.col(b.col);
        out.theta.col(c + 1) = Q.col(b.col2 >= 0 ? b.col2 : b.col + 1);
        out.pairs.push_back({b.gamma, b.delta});
        c += 2;
    }
    for (int z : zeros) out.theta.col(c++) = Q.col(z);
    out.zero_count = static_cast<int>(zeros.size());

    // re-read the blocks in the final basis so pairs match theta exactly
    Eigen::MatrixXd B = out.theta.transpose() * M * out.theta;
    for (std::size_t k = 0; k < out.pairs.size(); ++k) {
        int i = static_cast<int>(2 * k);
        double g = skew ? 0.0 : 0.5 * (B(i, i) + B(i + 1, i + 1));
        double d = 0.5 * (B(i + 1, i) - B(i, i + 1));
        out.pairs[k] = {g, std::max(d, 0.0)};
    }
    double resid = (B - out.block_form()).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if (resid > kTolBlock * scale || orthogonality_defect(out.theta) > kTolOrth) {
        throw Error(ErrorKind::ConvergenceFailure, "block diagonalization residual too large");
    }
    return out;
}

}  // namespace

Eigen::MatrixXd BlockSpectrum::block_form() const {
    const int p = dim();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        int i = static_cast<int>(2 * k);
        B(i, i) = pairs[k].gamma;
        B(i + 1, i + 1) = pairs[k].gamma;
        B(i, i + 1) = -pairs[k].delta;
        B(i + 1, i) = pairs[k].delta;
    }
    return B;
}

std::vector<double> BlockSpectrum::deltas() const {
    std::vector<double> d;
    for (const auto& pr : pairs) d.push_back(pr.delta);
    for (int k = 0; k < (zero_count + 1) / 2; ++k) d.push_back(0.0);
    return d;
}

BlockSpectrum skew_block_diagonalize(const Eigen::MatrixXd& C, double tol) {
    if (C.rows() != C.cols()) throw Error(ErrorKind::NotSkewSymmetric, "matrix not square");
    if (C.size() && (C + C.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw Error(ErrorKind::NotSkewSymmetric, "C + C^T exceeds tolerance");
    }
    Eigen::MatrixXd S = 0.5 * (C - C.transpose());
    return decompose(S, true);
}

BlockSpectrum normal_block_diagonalize(const Eigen::MatrixXd& T, double tol) {
    if (T.rows() != T.cols()) throw Error(ErrorKind::NotNormal, "matrix not square");
    if (T.size() && (T * T.transpose() - T.transpose() * T).cwiseAbs().maxCoeff() > tol) {
        throw Error(ErrorKind::NotNormal, "T T^T - T^T T exceeds tolerance");
    }
    return decompose(T, false);
}

double orthogonality_defect(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::MatrixXd E = M.transpose() * M - Eigen::MatrixXd::Identity(M.cols(), M.cols());
    return E.cwiseAbs().maxCoeff();
}

std::vector<double> skew_deltas(const Eigen::MatrixXd& C) {
    const int p = static_cast<int>(C.rows());
    std::vector<double> d;
    if (p == 0) return d;
    Eigen::MatrixXd S = 0.5 * (C - C.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        std::complex<double>(0.0, 1.0) * S.cast<std::complex<double>>(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");
    }
    const double ztol = zero_tolerance(S);
    // spectrum is symmetric, the top ceil(p/2) values are the deltas
    for (int k = 0; k < (p + 1) / 2; ++k) {
        double v = es.eigenvalues()(p - 1 - k);
        d.push_back(v > ztol ? v : 0.0);
    }
    return d;
}

Eigen::MatrixXd block_diag_skew(const std::vector<double>& deltas, int dim) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < deltas.size() && 2 * k + 1 < static_cast<std::size_t>(dim); ++k) {
        int i = static_cast<int>(2 * k);
        B(i, i + 1) = -deltas[k];
        B(i + 1, i) = deltas[k];
    }
    return B;
}

}  // namespace ncmap

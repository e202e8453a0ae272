#include "ncmap/target.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "ncmap/errors.hpp"

namespace ncmap {

MapParameters::MapParameters(double alpha1, double alpha2) : alpha1_(alpha1), alpha2_(alpha2) {
    if (!std::isfinite(alpha1) || !std::isfinite(alpha2)) {
        throw Error(ErrorKind::IncompatibleParams, "alpha must be finite");
    }
    if (alpha1 + alpha2 == 0.0) {
        throw Error(ErrorKind::IncompatibleParams, "alpha1 + alpha2 must be nonzero");
    }
    double s = (alpha1 + alpha2) * (alpha1 + alpha2);
    c1_ = 2.0 * alpha2 - s;
    c2_ = alpha2 - s;
    mu_ = alpha2 - 0.5 * s;
}

bool MapParameters::skew_regime() const { return std::abs(c1_) < 1e-12; }

const char* family_name(TargetFamily f) {
    switch (f) {
        case TargetFamily::H1: return "H1";
        case TargetFamily::H2: return "H2";
        case TargetFamily::H3: return "H3";
        case TargetFamily::H4: return "H4";
        case TargetFamily::H5: return "H5";
        case TargetFamily::H6: return "H6";
        case TargetFamily::H7: return "H7";
        case TargetFamily::E1: return "E1";
        case TargetFamily::E2: return "E2";
        case TargetFamily::TdE: return "TdE";
    }
    return "?";
}

TargetFamily parse_target_family(const std::string& s) {
    for (auto f : {TargetFamily::H1, TargetFamily::H2, TargetFamily::H3, TargetFamily::H4,
                   TargetFamily::H5, TargetFamily::H6, TargetFamily::H7, TargetFamily::E1,
                   TargetFamily::E2, TargetFamily::TdE}) {
        if (s == family_name(f)) return f;
    }
    throw Error(ErrorKind::ConfigError, "unknown target family '" + s + "'");
}

bool is_skew_family(TargetFamily f) {
    return f != TargetFamily::E1 && f != TargetFamily::E2 && f != TargetFamily::TdE;
}

Eigen::MatrixXd antidiagonal_q(int n) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        int j = n - 1 - i;
        if (i > j) Q(i, j) = 1.0;
        if (i < j) Q(i, j) = -1.0;
    }
    return Q;
}

Eigen::MatrixXd TargetSpec::q() const {
    if (q_matrix) return *q_matrix;
    if (family == TargetFamily::E2) {
        return a * Eigen::MatrixXd::Identity(n, n) + antidiagonal_q(n);
    }
    return antidiagonal_q(n);
}

Eigen::MatrixXd TargetSpec::materialize_unchecked() const {
    if (n < 1) throw Error(ErrorKind::ConfigError, "n must be >= 1");
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd Q = q();
    if (Q.rows() != n || Q.cols() != n) {
        throw Error(ErrorKind::ConfigError, "Q must be n x n");
    }
    Eigen::MatrixXd T11 = Z, T12 = -I, T21 = I, T22 = Z;
    switch (family) {
        case TargetFamily::H1: break;
        case TargetFamily::H2: T11 = a * Q; T22 = b * Q; break;
        case TargetFamily::H3: T11 = a * Q; T22 = -b * Q; break;
        case TargetFamily::H4: T11 = Q; break;
        case TargetFamily::H5: T22 = Q; break;
        case TargetFamily::H6: T12 = -I - Q; T21 = I - Q; break;
        case TargetFamily::H7:
            T11 = a * Q; T12 = -I - c * Q; T21 = I - c * Q; T22 = b * Q;
            break;
        case TargetFamily::E1: T11 = a * I; T22 = a * I; break;
        case TargetFamily::E2: T11 = Q; T22 = Q; break;
        case TargetFamily::TdE: {
            if (static_cast<int>(gamma.size()) != n) {
                throw Error(ErrorKind::IncompatibleParams, "TdE needs n gamma values");
            }
            Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(gamma.data(), n);
            T11 = g.asDiagonal();
            T22 = T11;
            break;
        }
    }
    Eigen::MatrixXd T(2 * n, 2 * n);
    T << T11, T12, T21, T22;
    return T;
}

Eigen::MatrixXd TargetSpec::materialize(const MapParameters& params) const {
    switch (family) {
        case TargetFamily::H2:
        case TargetFamily::H3:
            if (!(a > 0 && b > 0)) throw Error(ErrorKind::ConstraintViolation, "a, b must be > 0");
            break;
        case TargetFamily::H7:
            if (!(a > 0 && b > 0)) throw Error(ErrorKind::ConstraintViolation, "a, b must be > 0");
            if (!(a * b > c * c)) throw Error(ErrorKind::ConstraintViolation, "H7 needs a*b > c^2");
            break;
        case TargetFamily::E1:
            if (a == 0.0) throw Error(ErrorKind::ConstraintViolation, "E1 needs a != 0");
            break;
        default: break;
    }
    if (q_matrix && is_skew_family(family) && family != TargetFamily::H1) {
        const Eigen::MatrixXd& Q = *q_matrix;
        if (Q.size() && (Q + Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw Error(ErrorKind::ConstraintViolation, "Q must be skew-symmetric");
        }
    }
    Eigen::MatrixXd T = materialize_unchecked();
    if (is_skew_family(family)) {
        if (!params.skew_regime()) {
            throw Error(ErrorKind::IncompatibleParams,
                        std::string(family_name(family)) +
                            " needs 2*alpha2 - (alpha1+alpha2)^2 = 0");
        }
        return T;
    }
    if (params.skew_regime()) {
        throw Error(ErrorKind::IncompatibleParams,
                    std::string(family_name(family)) +
                        " needs 2*alpha2 - (alpha1+alpha2)^2 != 0");
    }
    if ((T * T.transpose() - T.transpose() * T).cwiseAbs().maxCoeff() > 1e-10) {
        throw Error(ErrorKind::IncompatibleParams, "target is not normal");
    }
    Eigen::MatrixXd S = params.c1() * (T + T.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-12) {
        throw Error(ErrorKind::IncompatibleParams,
                    "(2*alpha2 - (alpha1+alpha2)^2)(T_d + T_d^T) is not positive definite");
    }
    return T;
}

int numeric_rank(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i) {
        if (s(i) > 1e-10 * s(0)) ++r;
    }
    return r;
}

}  // namespace ncmap

#include "ncmap/genfun.hpp"

#include <cmath>
#include <numbers>

#include "ncmap/errors.hpp"

namespace ncmap {

const char* pair_family_name(PairFamily f) {
    switch (f) {
        case PairFamily::H1_custom: return "H1_custom";
        case PairFamily::H2_sincos: return "H2_sincos";
        case PairFamily::H3_coshsinh: return "H3_coshsinh";
        case PairFamily::H4_const_lin: return "H4_const_lin";
        case PairFamily::H5_lin_const: return "H5_lin_const";
        case PairFamily::H6_exp: return "H6_exp";
        case PairFamily::H7_shifted: return "H7_shifted";
        case PairFamily::E1_radial: return "E1_radial";
        case PairFamily::E2_sincos: return "E2_sincos";
        case PairFamily::LOG_SPIRAL: return "LOG_SPIRAL";
    }
    return "?";
}

PairFamily parse_pair_family(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(PairFamily::LOG_SPIRAL); ++i) {
        auto f = static_cast<PairFamily>(i);
        if (s == pair_family_name(f)) return f;
    }
    throw Error(ErrorKind::ConfigError, "unknown generating pair '" + s + "'");
}

std::vector<double> chebyshev_points(double lo, double hi, int count) {
    std::vector<double> z(count);
    for (int i = 0; i < count; ++i) {
        double t = std::cos(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * count));
        z[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
    }
    return z;
}

GeneratingPair make_pair(PairFamily family, const PairParams& p) {
    if (p.sign != 1 && p.sign != -1) throw Error(ErrorKind::ConstraintViolation, "sign must be +-1");
    switch (family) {
        case PairFamily::H1_custom:
            throw Error(ErrorKind::ConstraintViolation, "H1_custom needs make_custom_pair");
        case PairFamily::H2_sincos:
        case PairFamily::H3_coshsinh:
            if (!(p.a > 0 && p.b > 0)) throw Error(ErrorKind::ConstraintViolation, "a, b must be > 0");
            break;
        case PairFamily::H4_const_lin:
        case PairFamily::H5_lin_const:
        case PairFamily::H6_exp:
            if (!(p.a > 0)) throw Error(ErrorKind::ConstraintViolation, "a must be > 0");
            break;
        case PairFamily::H7_shifted:
            if (!(p.a > 0 && p.b > 0)) throw Error(ErrorKind::ConstraintViolation, "a, b must be > 0");
            if (!(p.a * p.b > p.c * p.c)) throw Error(ErrorKind::ConstraintViolation, "H7 needs ab > c^2");
            break;
        case PairFamily::E1_radial:
            if (!(p.r0 > 0)) throw Error(ErrorKind::ConstraintViolation, "r0 must be > 0");
            break;
        case PairFamily::E2_sincos:
            if (!(p.b > 0)) throw Error(ErrorKind::ConstraintViolation, "b must be > 0");
            break;
        case PairFamily::LOG_SPIRAL:
            if (!(p.mu_gain > 0)) throw Error(ErrorKind::ConstraintViolation, "mu must be > 0");
            break;
    }
    GeneratingPair gp;
    gp.family_ = family;
    gp.params_ = p;
    return gp;
}

GeneratingPair make_custom_pair(const CustomFunctions& fns, double lo, double hi, int samples) {
    if (!fns.f || !fns.g || !fns.df || !fns.dg) {
        throw Error(ErrorKind::ConstraintViolation, "H1_custom needs f, g, f', g'");
    }
    for (double z : chebyshev_points(lo, hi, samples)) {
        double w = fns.dg(z) * fns.f(z) - fns.df(z) * fns.g(z);
        if (!std::isfinite(w) || std::abs(w + 1.0) > 1e-10) {
            throw Error(ErrorKind::WronskianFailed,
                        "g'f - f'g = " + std::to_string(w) + " at z = " + std::to_string(z));
        }
    }
    GeneratingPair gp;
    gp.family_ = PairFamily::H1_custom;
    gp.custom_ = fns;
    return gp;
}

bool GeneratingPair::in_domain(double z) const {
    if (family_ == PairFamily::LOG_SPIRAL) return z > 0.0;
    return std::isfinite(z);
}

PairValue GeneratingPair::evaluate(double z) const {
    if (!in_domain(z)) {
        throw Error(ErrorKind::DomainError, std::string(pair_family_name(family_)) +
                                                " outside its domain at z = " + std::to_string(z));
    }
    const PairParams& p = params_;
    const double s = p.sign;
    PairValue v;
    switch (family_) {
        case PairFamily::H1_custom:
            v = {custom_.f(z), custom_.g(z), custom_.df(z), custom_.dg(z)};
            break;
        case PairFamily::H2_sincos: {
            double k = std::sqrt(p.a * p.b), t = k * z + p.phi;
            double ia = 1.0 / std::sqrt(p.a), ib = 1.0 / std::sqrt(p.b);
            v = {ia * std::sin(t), ib * std::cos(t), ia * k * std::cos(t), -ib * k * std::sin(t)};
            break;
        }
        case PairFamily::H3_coshsinh: {
            double k = std::sqrt(p.a * p.b), t = k * z + p.phi;
            double ia = 1.0 / std::sqrt(p.a), ib = 1.0 / std::sqrt(p.b);
            v = {s * ia * std::cosh(t), -s * ib * std::sinh(t), s * ia * k * std::sinh(t),
                 -s * ib * k * std::cosh(t)};
            break;
        }
        case PairFamily::H4_const_lin: {
            double ra = std::sqrt(p.a);
            v = {s * ra, -s * z / ra, 0.0, -s / ra};
            break;
        }
        case PairFamily::H5_lin_const: {
            double ra = std::sqrt(p.a);
            v = {s * z / ra, s * ra, s / ra, 0.0};
            break;
        }
        case PairFamily::H6_exp: {
            double ia = 1.0 / std::sqrt(p.a);
            double em = std::exp(-0.5 * p.a * z), ep = std::exp(0.5 * p.a * z);
            v = {s * ia * em, -s * ia * ep, -s * ia * 0.5 * p.a * em, -s * ia * 0.5 * p.a * ep};
            break;
        }
        case PairFamily::H7_shifted: {
            double k = std::sqrt(p.a * p.b - p.c * p.c), t = k * z + p.phi;
            double cf = std::sqrt(p.b) / k, cg = 1.0 / std::sqrt(p.b), ck = p.c / k;
            double sn = std::sin(t), cs = std::cos(t);
            // the c/k sine term keeps a f^2 + b g^2 - 2c f g constant
            v = {cf * sn, cg * (cs + ck * sn), cf * k * cs, cg * k * (ck * cs - sn)};
            break;
        }
        case PairFamily::E1_radial: {
            double rr = std::sqrt(p.r0), t = z / p.r0 + p.phi;
            v = {rr * std::sin(t), rr * std::cos(t), rr * std::cos(t) / p.r0,
                 -rr * std::sin(t) / p.r0};
            break;
        }
        case PairFamily::E2_sincos: {
            double ib = 1.0 / std::sqrt(p.b), t = p.b * z + p.phi;
            v = {ib * std::sin(t), ib * std::cos(t), ib * p.b * std::cos(t), -ib * p.b * std::sin(t)};
            break;
        }
        case PairFamily::LOG_SPIRAL: {
            double rz = std::sqrt(z), t = p.mu_gain * std::log(z);
            double sn = std::sin(t), cs = std::cos(t);
            v = {rz * sn, rz * cs, (0.5 * sn + p.mu_gain * cs) / rz, (0.5 * cs - p.mu_gain * sn) / rz};
            break;
        }
    }
    return v;
}

PairValue evaluate(const GeneratingPair& pair, double z) { return pair.evaluate(z); }

double lie_bracket(const GeneratingPair& pair, double z) {
    PairValue v = pair.evaluate(z);
    return v.dg * v.f - v.df * v.g;
}

Eigen::MatrixXd bracket_residual(const GeneratingPair& pair, const Eigen::MatrixXd& Td, double z) {
    const int n = static_cast<int>(Td.rows() / 2);
    PairValue v = pair.evaluate(z);
    return v.df * v.f * Td.topLeftCorner(n, n) + v.df * v.g * Td.topRightCorner(n, n) +
           v.dg * v.f * Td.bottomLeftCorner(n, n) + v.dg * v.g * Td.bottomRightCorner(n, n) +
           Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd bracket_residual(const GeneratingPair& pair, const TargetSpec& target,
                                 const MapParameters& params, double z) {
    return bracket_residual(pair, target.materialize(params), z);
}

}  // namespace ncmap

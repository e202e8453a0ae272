#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "ncmap/target.hpp"

namespace ncmap {

enum class PairFamily {
    H1_custom,
    H2_sincos,
    H3_coshsinh,
    H4_const_lin,
    H5_lin_const,
    H6_exp,
    H7_shifted,
    E1_radial,
    E2_sincos,
    LOG_SPIRAL,
};

const char* pair_family_name(PairFamily f);
PairFamily parse_pair_family(const std::string& s);

struct PairParams {
    double a = 1.0;
    double b = 1.0;
    double c = 0.0;
    double phi = 0.0;
    double r0 = 1.0;       // E1_radial constant radius
    double mu_gain = 1.0;  // LOG_SPIRAL
    int sign = 1;          // branch selector for the +- families
};

struct PairValue {
    double f = 0.0;
    double g = 0.0;
    double df = 0.0;
    double dg = 0.0;
};

using ScalarFn = std::function<double(double)>;

struct CustomFunctions {
    ScalarFn f, g, df, dg;
};

class GeneratingPair {
public:
    PairFamily family() const { return family_; }
    const PairParams& params() const { return params_; }
    PairValue evaluate(double z) const;
    bool in_domain(double z) const;

private:
    friend GeneratingPair make_pair(PairFamily, const PairParams&);
    friend GeneratingPair make_custom_pair(const CustomFunctions&, double, double, int);
    PairFamily family_ = PairFamily::H2_sincos;
    PairParams params_;
    CustomFunctions custom_;
};

GeneratingPair make_pair(PairFamily family, const PairParams& params = {});
// H1_custom: validates g'f - f'g = -1 at `samples` Chebyshev points of [lo, hi]
GeneratingPair make_custom_pair(const CustomFunctions& fns, double lo = -10.0, double hi = 10.0,
                                int samples = 64);

PairValue evaluate(const GeneratingPair& pair, double z);

// f'f T11 + f'g T12 + g'f T21 + g'g T22 + I at z
Eigen::MatrixXd bracket_residual(const GeneratingPair& pair, const Eigen::MatrixXd& Td, double z);
Eigen::MatrixXd bracket_residual(const GeneratingPair& pair, const TargetSpec& target,
                                 const MapParameters& params, double z);

// g'f - f'g
double lie_bracket(const GeneratingPair& pair, double z);

std::vector<double> chebyshev_points(double lo, double hi, int count);

}  // namespace ncmap

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace ncmap {

struct MapParameters {
    MapParameters(double alpha1 = 0.5, double alpha2 = 0.5);

    double alpha1() const { return alpha1_; }
    double alpha2() const { return alpha2_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double mu() const { return mu_; }
    double gain() const { return (alpha1_ + alpha2_) * (alpha1_ + alpha2_); }
    // c1 == 0: skew targets; otherwise normal targets
    bool skew_regime() const;

    static MapParameters single_point() { return {1.0, 0.0}; }
    static MapParameters two_point() { return {0.5, 0.5}; }

private:
    double alpha1_, alpha2_, c1_, c2_, mu_;
};

enum class TargetFamily { H1, H2, H3, H4, H5, H6, H7, E1, E2, TdE };

const char* family_name(TargetFamily f);
TargetFamily parse_target_family(const std::string& s);
bool is_skew_family(TargetFamily f);

struct TargetSpec {
    TargetFamily family = TargetFamily::H1;
    int n = 1;
    double a = 1.0;
    double b = 1.0;
    double c = 0.0;
    std::vector<double> gamma;  // TdE diagonal, empty until resolved
    std::optional<Eigen::MatrixXd> q_matrix;

    Eigen::MatrixXd q() const;
    // Builds T_d and checks it against the family template and the map regime.
    Eigen::MatrixXd materialize(const MapParameters& params) const;
    Eigen::MatrixXd materialize_unchecked() const;
};

// n x n anti-diagonal skew matrix (+1 below, -1 above the anti-diagonal)
Eigen::MatrixXd antidiagonal_q(int n);

int numeric_rank(const Eigen::MatrixXd& M);

}  // namespace ncmap

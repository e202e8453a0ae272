#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ncmap/target.hpp"

namespace ncmap {

struct ExplorationMatrix {
    Eigen::MatrixXd w;         // 2n x m, columns w_l = [u_l; v_l]
    int m = 0;
    Eigen::MatrixXd u_factor;  // 2n x 2n
    std::vector<double> sigma; // sigma_1 .. sigma_r
    Eigen::MatrixXd v_factor;  // m x m
    std::optional<TargetSpec> target;
    MapParameters params;
    std::string sigma_case;    // I.i, I.ii, II.i, II.ii, III or "reference"

    int n() const { return static_cast<int>(w.rows() / 2); }
};

double epsilon(int m);

Eigen::MatrixXd build_P(const MapParameters& params, int m);
Eigen::MatrixXd compute_T_direct(const Eigen::MatrixXd& W, const MapParameters& params);
Eigen::MatrixXd compute_T_via_P(const Eigen::MatrixXd& W, const MapParameters& params);
Eigen::MatrixXd build_C(int m);
Eigen::MatrixXd build_P_tilde(const MapParameters& params, int m);
// m x (m-1) basis of the zero-sum subspace used for V (Theta = I)
Eigen::MatrixXd zero_sum_basis(int m);

struct InterlacingViolation {
    int m = 0;
    int k = 0;
    double upper = 0.0;  // omega^{m+1}_k
    double value = 0.0;  // omega^m_k
    double lower = 0.0;  // omega^{m+1}_{k+1}
};

struct InterlacingReport {
    int m_max = 0;
    std::vector<InterlacingViolation> violations;
    double min_margin = 0.0;
    bool ok() const { return violations.empty(); }
};

InterlacingReport check_interlacing(int m_max, double margin = 1e-12);

struct SequenceLength {
    int m = 0;
    std::vector<double> omega;  // deltas of P~(m) - mu*I, descending
};

int default_m_cap(int n);

// eigenvalue imaginary parts of P~(m) - mu I, with zero padding to ceil((m-1)/2)
std::vector<double> p_tilde_omegas(const MapParameters& params, int m);

bool targets_admissible(const std::vector<double>& omega, const std::vector<double>& omega_hat,
                        double tol = 1e-10);

SequenceLength find_sequence_length(const std::vector<double>& omega_hat, int r,
                                    const MapParameters& params, int m_cap = 512);

Eigen::MatrixXd calc_ps_matrix(const Eigen::MatrixXd& D, const std::vector<double>& omega_hat);
Eigen::MatrixXd calc_theta_sub(const Eigen::MatrixXd& D1, const Eigen::MatrixXd& D2);
Eigen::MatrixXd calc_theta(const Eigen::MatrixXd& C, const std::vector<double>& omega_hat);

struct ConstructOptions {
    int m_cap = 0;  // 0 -> default_m_cap(n)
};

ExplorationMatrix construct_W(const TargetSpec& target, const MapParameters& params,
                              const std::vector<double>& sigma_free,
                              const ConstructOptions& opts = {});

ExplorationMatrix reference_coordinate_sequence(int n,
                                                const MapParameters& params = MapParameters());

void write_W(std::ostream& os, const ExplorationMatrix& em);
void write_W_file(const std::string& path, const ExplorationMatrix& em);

struct LoadedW {
    Eigen::MatrixXd w;
    int n = 0;
    int m = 0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};
LoadedW read_W(std::istream& is);
LoadedW read_W_file(const std::string& path);

}  // namespace ncmap

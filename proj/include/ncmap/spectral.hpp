#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ncmap {

struct BlockPair {
    double gamma = 0.0;
    double delta = 0.0;
};

// theta^T M theta = blockdiag([[g,-d],[d,g]] ..., 0 ... 0)
struct BlockSpectrum {
    Eigen::MatrixXd theta;
    std::vector<BlockPair> pairs;
    int zero_count = 0;

    int dim() const { return static_cast<int>(theta.rows()); }
    Eigen::MatrixXd block_form() const;
    // ceil(p/2) deltas; trailing zeros stand in for the zero blocks
    std::vector<double> deltas() const;
};

constexpr double kTolOrth = 1e-9;
constexpr double kTolBlock = 1e-8;

BlockSpectrum skew_block_diagonalize(const Eigen::MatrixXd& C, double tol = 1e-10);
BlockSpectrum normal_block_diagonalize(const Eigen::MatrixXd& T, double tol = 1e-8);

double orthogonality_defect(const Eigen::MatrixXd& M);

// Skew deltas only, no eigenvectors. Same ordering and zero handling as deltas().
std::vector<double> skew_deltas(const Eigen::MatrixXd& C);

Eigen::MatrixXd block_diag_skew(const std::vector<double>& deltas, int dim);

}  // namespace ncmap

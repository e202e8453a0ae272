#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "ncmap/engine.hpp"
#include "ncmap/genfun.hpp"
#include "ncmap/sequence.hpp"

namespace ncmap {

struct VerificationReport {
    std::string check_name;
    std::vector<std::pair<std::string, double>> residuals;
    double threshold = 0.0;
    bool passed = false;
    double runtime_ms = 0.0;
    std::string note;

    double max_residual() const;
    // CHECK <name> PASS|FAIL max_residual=<v> threshold=<t>
    std::string line() const;
    void finalize();  // passed = max residual <= threshold
};

struct OrderFit {
    std::vector<double> h;
    std::vector<double> e;
    double slope = 0.0;
};

OrderFit fit_gradient_order(const Eigen::MatrixXd& W, const GeneratingPair& pair,
                            const MapParameters& params, ObjectivePort& J,
                            const Eigen::VectorXd& x0, const std::vector<double>& h_list);

// residual: 1.4 - slope (threshold 0), so PASS iff slope >= 1.4
VerificationReport gradient_order_check(const Eigen::MatrixXd& W, const GeneratingPair& pair,
                                        const MapParameters& params, ObjectivePort& J,
                                        const Eigen::VectorXd& x0,
                                        const std::vector<double>& h_list = {0.1, 0.05, 0.025,
                                                                             0.0125},
                                        double min_slope = 1.4);

// signed polygon areas of the partial-sum curves, one per coordinate pair
Eigen::MatrixXd shoelace_areas(const Eigen::MatrixXd& W);
VerificationReport shoelace_check(const Eigen::MatrixXd& W, double tol = 1e-10);

struct BrockettState {
    Eigen::VectorXd y;
    Eigen::MatrixXd Z;
};
BrockettState brockett_run(const Eigen::MatrixXd& W, const MapParameters& params);
// residuals are scaled by their thresholds (1e-9 for y_m, 1e-7 for Z_m); threshold 1
VerificationReport brockett_check(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Td,
                                   const MapParameters& params, double tol_y = 1e-9,
                                   double tol_z = 1e-7);

struct CatalogCase {
    std::string id;
    TargetSpec target;
    MapParameters params;
    std::vector<double> sigma_free;
    GeneratingPair pair;
    bool expect_reject = false;
};

struct CatalogOutcome {
    std::string id;
    std::string status;  // pass, fail, expected-rejection, unexpected-rejection, missing-rejection
    int m = 0;
    double recon = 0.0;
    double wsum = 0.0;
    double brockett = 0.0;
    double bracket = 0.0;
    std::string message;
};

struct CatalogResult {
    std::vector<CatalogOutcome> outcomes;
    VerificationReport report;
    int admissible = 0;
    int rejected_as_expected = 0;
};

std::vector<CatalogCase> default_catalog_grid(const std::vector<int>& ns = {1, 2, 3},
                                              const std::vector<double>& sigma_levels = {1.0});
CatalogResult catalog_sweep(const std::vector<CatalogCase>& grid, double tolerance = 1e-7,
                            int threads = 1);

// relative bracket residual on a Chebyshev grid
double bracket_grid_residual(const GeneratingPair& pair, const Eigen::MatrixXd& Td, double lo,
                             double hi, int points = 128);

VerificationReport interlacing_report(int m_max);

}  // namespace ncmap

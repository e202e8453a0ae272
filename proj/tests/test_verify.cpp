#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ncmap/errors.hpp"
#include "ncmap/verify.hpp"

using namespace ncmap;

namespace {

ObjectivePort quadratic(const Eigen::Vector2d& c) {
    return ObjectivePort([c](const Eigen::VectorXd& x) { return (x - c).squaredNorm(); },
                         [c](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * (x - c); });
}

const ExplorationMatrix& sim1() {
    static const ExplorationMatrix em = construct_W(TargetSpec{.family = TargetFamily::H1, .n = 2},
                                                    MapParameters::two_point(), {1, 1, 1, 1});
    return em;
}

Eigen::MatrixXd random_zero_sum(int n, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd W(2 * n, m);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < m; ++j) W(i, j) = nd(rng);
    W.col(m - 1) = -W.leftCols(m - 1).rowwise().sum();
    return W;
}

Eigen::MatrixXd heaviest_column_zeroed(Eigen::MatrixXd W) {
    Eigen::Index best = 0;
    W.colwise().norm().maxCoeff(&best);
    W.col(best).setZero();
    return W;
}

}  // namespace

TEST_CASE("report pass flag follows the threshold") {
    VerificationReport r{.check_name = "demo", .residuals = {{"a", 0.5}, {"b", 1.0}}, .threshold = 1.0};
    r.finalize();
    CHECK(r.passed);
    CHECK(r.max_residual() == 1.0);
    CHECK(r.line() == "CHECK demo PASS max_residual=1 threshold=1");
    r.residuals.push_back({"c", std::nan("")});
    r.finalize();
    CHECK_FALSE(r.passed);
    CHECK(r.line().rfind("CHECK demo FAIL", 0) == 0);
}

TEST_CASE("shoelace areas of the coordinate sequence") {
    auto em = reference_coordinate_sequence(1);
    Eigen::MatrixXd A = shoelace_areas(em.w);
    Eigen::MatrixXd ref(2, 2);
    ref << 0, -1, 1, 0;
    CHECK((A - ref).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(shoelace_check(em.w).passed);
}

TEST_CASE("degenerate polygon has no area") {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(4, 5);
    W.col(0) << 1, 2, -3, 0.5;
    W.col(1) = -W.col(0);
    CHECK(shoelace_areas(W).cwiseAbs().maxCoeff() == 0.0);
    CHECK(shoelace_check(W).passed);
}

TEST_CASE("shoelace matches T on random zero-sum W") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + trial % 3;
        int m = 2 + static_cast<int>(rng() % 15);
        auto rep = shoelace_check(random_zero_sum(n, m, rng));
        CHECK(rep.max_residual() <= 1e-10);
        CHECK(rep.passed);
    }
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 3);
    try {
        shoelace_areas(bad);
        FAIL("expected ZeroSumViolated");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroSumViolated);
    }
}

TEST_CASE("brockett recursion") {
    auto zero = brockett_check(Eigen::MatrixXd::Zero(4, 6), Eigen::MatrixXd::Zero(4, 4), MapParameters());
    CHECK(zero.max_residual() == 0.0);
    CHECK(zero.passed);

    TargetSpec h2{.family = TargetFamily::H2, .n = 2, .a = 1, .b = 1, .q_matrix = antidiagonal_q(2)};
    auto em = construct_W(h2, MapParameters::two_point(), {2, 2});
    REQUIRE(em.m == 4);
    Eigen::MatrixXd Td = h2.materialize(em.params);
    auto st = brockett_run(em.w, em.params);
    CHECK(st.y.norm() <= 1e-9);
    CHECK((st.Z - Td).cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(brockett_check(em.w, Td, em.params).passed);

    // wrong target is caught
    CHECK_FALSE(brockett_check(em.w, 2.0 * Td, em.params).passed);
}

TEST_CASE("catalog sweep") {
    auto grid = default_catalog_grid();
    auto res = catalog_sweep(grid, 1e-7, 4);
    CHECK(res.report.passed);
    CHECK(res.admissible >= 40);
    CHECK(res.rejected_as_expected > 0);
    for (const auto& o : res.outcomes) {
        INFO(o.id << " " << o.message);
        CHECK((o.status == "pass" || o.status == "expected-rejection"));
    }
    // H targets under the single-point map and TdE under the two-point map are gated
    int h_gate = 0, tde_gate = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid[i].expect_reject) continue;
        if (grid[i].target.family == TargetFamily::TdE) ++tde_gate;
        if (is_skew_family(grid[i].target.family)) ++h_gate;
        CHECK(res.outcomes[i].status == "expected-rejection");
    }
    CHECK(h_gate > 0);
    CHECK(tde_gate > 0);

    auto again = catalog_sweep(grid, 1e-7, 1);
    REQUIRE(again.report.residuals.size() == res.report.residuals.size());
    for (std::size_t i = 0; i < res.report.residuals.size(); ++i) {
        CHECK(again.report.residuals[i] == res.report.residuals[i]);
    }
}

TEST_CASE("catalog flags a rejection that does not happen") {
    auto grid = default_catalog_grid({1});
    grid.resize(1);
    grid[0].expect_reject = true;
    auto res = catalog_sweep(grid);
    CHECK(res.outcomes[0].status == "missing-rejection");
    CHECK_FALSE(res.report.passed);
}

TEST_CASE("gradient order at the minimizer") {
    auto J = quadratic({1, 2});
    Eigen::VectorXd x0(2);
    x0 << 1, 2;
    auto rep = gradient_order_check(sim1().w, make_pair(PairFamily::H2_sincos), sim1().params, J, x0);
    CHECK(rep.passed);
    auto fit = fit_gradient_order(sim1().w, make_pair(PairFamily::H2_sincos), sim1().params, J, x0,
                                  {0.1, 0.05, 0.025, 0.0125});
    for (std::size_t i = 0; i < fit.h.size(); ++i) CHECK(fit.e[i] <= 10.0 * std::pow(fit.h[i], 1.4));
}

TEST_CASE("gradient order is three halves for small steps") {
    auto pair = make_pair(PairFamily::H2_sincos);
    const std::vector<double> fine{1e-3, 5e-4, 2.5e-4, 1.25e-4};
    std::vector<double> slopes;
    for (auto start : {Eigen::Vector2d(0, 1), Eigen::Vector2d(2, 0), Eigen::Vector2d(-1, 3)}) {
        auto J = quadratic({1, 2});
        Eigen::VectorXd x0 = start;
        auto fit = fit_gradient_order(sim1().w, pair, sim1().params, J, x0, fine);
        CHECK(fit.slope >= 1.4);
        CHECK(fit.slope <= 1.6);
        slopes.push_back(fit.slope);
    }
    auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
    CHECK(*hi - *lo <= 0.1);
}

TEST_CASE("corrupted W loses the order") {
    auto J = quadratic({1, 2});
    Eigen::VectorXd x0(2);
    x0 << 0, 1;
    auto fit = fit_gradient_order(heaviest_column_zeroed(sim1().w), make_pair(PairFamily::H2_sincos),
                                  sim1().params, J, x0, {0.1, 0.05, 0.025, 0.0125});
    CHECK(fit.slope < 1.2);
}

TEST_CASE("order check needs a gradient") {
    ObjectivePort J([](const Eigen::VectorXd& x) { return x.squaredNorm(); });
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(gradient_order_check(sim1().w, make_pair(PairFamily::H2_sincos), sim1().params, J, x0),
                    Error);
}

TEST_CASE("interlacing report") {
    auto rep = interlacing_report(50);
    CHECK(rep.passed);
    CHECK(rep.note.find("empirical") != std::string::npos);
}

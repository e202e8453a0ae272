#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ncmap/engine.hpp"
#include "ncmap/errors.hpp"

using namespace ncmap;

namespace {

ObjectivePort quadratic(const Eigen::Vector2d& c, NoiseSpec noise = {}) {
    return ObjectivePort([c](const Eigen::VectorXd& x) { return (x - c).squaredNorm(); },
                         [c](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * (x - c); },
                         noise);
}

RunSetup sim1_setup() {
    TargetSpec h1{.family = TargetFamily::H1, .n = 2};
    auto em = construct_W(h1, MapParameters::two_point(), {1, 1, 1, 1});
    return {em.w, make_pair(PairFamily::H2_sincos), em.params};
}

}  // namespace

TEST_CASE("zero objective with the constant/linear pair moves along u") {
    ObjectivePort J([](const Eigen::VectorXd&) { return 0.0; });
    Eigen::MatrixXd W(4, 2);
    W << 1, -1, 2, -2, 3, -3, 4, -4;
    Eigen::VectorXd x(2);
    x << 0.5, -0.5;
    const double h = 0.09;
    for (auto prm : {MapParameters(0.5, 0.5), MapParameters(1, 0), MapParameters(0.3, 0.2)}) {
        auto nx = transition_step(x, 0, W, make_pair(PairFamily::H4_const_lin), prm, h, J);
        Eigen::VectorXd ref = x + std::sqrt(h) * (prm.alpha1() + prm.alpha2()) * W.col(0).head(2);
        CHECK((nx - ref).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("hand-evaluated single step") {
    auto em = reference_coordinate_sequence(1, MapParameters::single_point());
    ObjectivePort J([](const Eigen::VectorXd& x) { return x.squaredNorm(); });
    Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    auto nx = transition_step(x, 0, em.w, make_pair(PairFamily::H2_sincos), em.params, 0.04, J);
    CHECK(nx(0) == 0.0);
    // second column is v: 0.2 * cos(0) * 1
    auto nx2 = transition_step(x, 1, em.w, make_pair(PairFamily::H2_sincos), em.params, 0.04, J);
    CHECK(nx2(0) == doctest::Approx(0.2));
}

TEST_CASE("evaluation counts per step") {
    auto em = reference_coordinate_sequence(1);
    ObjectivePort J([](const Eigen::VectorXd& x) { return x.squaredNorm(); });
    Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    transition_step(x, 0, em.w, make_pair(PairFamily::H2_sincos), MapParameters::two_point(), 0.01, J);
    CHECK(J.eval_count() == 2);
    transition_step(x, 0, em.w, make_pair(PairFamily::H2_sincos), MapParameters::single_point(), 0.01, J);
    CHECK(J.eval_count() == 3);
}

TEST_CASE("step preconditions") {
    auto em = reference_coordinate_sequence(1);
    ObjectivePort J([](const Eigen::VectorXd& x) { return x.squaredNorm(); });
    Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    CHECK_THROWS_AS(transition_step(x, 0, em.w, make_pair(PairFamily::H2_sincos), em.params, 0.0, J), Error);
    Eigen::VectorXd x2 = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(transition_step(x2, 0, em.w, make_pair(PairFamily::H2_sincos), em.params, 0.1, J), Error);
    ObjectivePort bad([](const Eigen::VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); });
    try {
        transition_step(x, 0, em.w, make_pair(PairFamily::H2_sincos), em.params, 0.1, bad);
        FAIL("expected NonFiniteObjective");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonFiniteObjective);
    }
}

TEST_CASE("harmonic schedule") {
    auto s = harmonic_schedule(1.0, 4);
    const double ref[] = {1, 1, 1, 1, 0.5, 0.5, 0.5, 0.5};
    for (int k = 0; k < 8; ++k) CHECK(s.at(k) == ref[k]);
    CHECK(s.at(16) == doctest::Approx(0.2));
    auto s2 = harmonic_schedule(0.3, 7);
    for (int p = 0; p < 5; ++p)
        for (int k = p * 7; k < (p + 1) * 7; ++k) CHECK(s2.at(k) == s2.at(p * 7));
    CHECK_THROWS_AS(harmonic_schedule(0.0, 4), Error);
    CHECK_THROWS_AS(harmonic_schedule(1.0, 0), Error);
    CHECK(constant_schedule(0.2).at(1000) == 0.2);
}

TEST_CASE("sim1 converges near the minimizer") {
    auto setup = sim1_setup();
    auto J = quadratic({1, 2});
    Eigen::VectorXd x0(2);
    x0 << 0, 1;
    auto rec = run(setup, constant_schedule(0.05), {.max_iters = 400}, J, x0);
    CHECK(rec.stop_reason == "max_iters");
    CHECK(rec.iterates.size() == 401);
    CHECK(rec.objective_values.size() == rec.iterates.size());
    CHECK(rec.evals_per_iter == 2);
    CHECK(J.eval_count() == 400 * 2);
    CHECK(rec.evals_cum.back() == 800);
    Eigen::Vector2d c(1, 2);
    CHECK((rec.iterates.back() - c).norm() <= 0.25);
}

TEST_CASE("zero iterations") {
    auto setup = sim1_setup();
    auto J = quadratic({1, 2});
    Eigen::VectorXd x0(2);
    x0 << 0, 1;
    auto rec = run(setup, constant_schedule(0.05), {.max_iters = 0}, J, x0);
    CHECK(rec.iterates.size() == 1);
    CHECK(rec.iterates[0] == x0);
    CHECK(J.eval_count() == 0);
}

TEST_CASE("stop criteria") {
    auto setup = sim1_setup();
    Eigen::VectorXd x0(2);
    x0 << 0, 1;
    {
        auto J = quadratic({1, 2});
        auto rec = run(setup, constant_schedule(0.05), {.max_iters = 100000, .max_evals = 101}, J, x0);
        CHECK(rec.stop_reason == "max_evals");
        CHECK(J.eval_count() == 100);
    }
    {
        auto J = quadratic({1, 2});
        auto rec = run(setup, constant_schedule(0.05), {.max_iters = 100000, .j_threshold = 0.5}, J, x0);
        CHECK(rec.stop_reason == "threshold");
        CHECK(rec.objective_values.back() <= 0.5);
        CHECK(rec.objective_values[rec.objective_values.size() - 2] > 0.5);
    }
    {
        auto J = quadratic({1, 2});
        auto rec = run(setup, harmonic_schedule(0.05, static_cast<int>(setup.w.cols())),
                       {.max_iters = 100000, .stall_tol = 1e-3, .stall_patience = 2}, J, x0);
        CHECK(rec.stop_reason == "stall");
        CHECK((rec.iterates.size() - 1) % setup.w.cols() == 0);
    }
    {
        ObjectivePort J([](const Eigen::VectorXd& x) { return x(0) > 0.05 ? std::nan("") : x.squaredNorm(); });
        auto rec = run(setup, constant_schedule(0.05), {.max_iters = 1000}, J, x0);
        CHECK(rec.stop_reason == "diverged");
        CHECK(rec.iterates.size() < 1001);
    }
}

TEST_CASE("single-point map uses one evaluation per step") {
    TargetSpec tde{.family = TargetFamily::TdE, .n = 2};
    auto em = construct_W(tde, MapParameters::single_point(), {1, 1, 1, 1});
    RunSetup setup{em.w, make_pair(PairFamily::E2_sincos), em.params};
    auto J = quadratic({1, 2});
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
    auto rec = run(setup, constant_schedule(0.05), {.max_iters = 37}, J, x0);
    CHECK(rec.evals_per_iter == 1);
    CHECK(J.eval_count() == 37);
}

TEST_CASE("determinism and noise seeding") {
    auto setup = sim1_setup();
    Eigen::VectorXd x0(2);
    x0 << 0, 1;
    auto once = [&](NoiseSpec noise) {
        auto J = quadratic({1, 2}, noise);
        auto rec = run(setup, constant_schedule(0.05), {.max_iters = 200}, J, x0);
        std::ostringstream os;
        write_run_csv(os, rec);
        return os.str();
    };
    CHECK(once({}) == once({}));
    CHECK(once({.sigma = 0.1, .seed = 4}) == once({.sigma = 0.1, .seed = 4}));
    CHECK(once({.sigma = 0.1, .seed = 4}) != once({.sigma = 0.1, .seed = 5}));
    CHECK(once({.sigma = 0.1, .seed = 4}) != once({}));
}

TEST_CASE("run csv layout") {
    auto setup = sim1_setup();
    auto J = quadratic({1, 2});
    Eigen::VectorXd x0(2);
    x0 << 0, 1;
    auto rec = run(setup, constant_schedule(0.05), {.max_iters = 3}, J, x0);
    std::ostringstream os;
    write_run_csv(os, rec);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "k,x_1,x_2,J,h,evals_cum");
    int rows = 0;
    while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
        CHECK(line.rfind(std::to_string(rows) + ",", 0) == 0);
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("objective port counts") {
    auto J = quadratic({0, 0});
    Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    J.evaluate(x);
    J.evaluate(x);
    J.peek(x);
    CHECK(J.eval_count() == 2);
    CHECK(J.has_gradient());
    CHECK(J.gradient(x)(0) == 2.0);
    J.reset();
    CHECK(J.eval_count() == 0);
    ObjectivePort plain([](const Eigen::VectorXd& v) { return v.sum(); });
    CHECK_FALSE(plain.has_gradient());
}

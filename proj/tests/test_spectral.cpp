#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "ncmap/errors.hpp"
#include "ncmap/sequence.hpp"
#include "ncmap/spectral.hpp"

using namespace ncmap;

namespace {

double max_abs(const Eigen::MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

Eigen::MatrixXd random_skew(int p, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd A(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) A(i, j) = nd(rng);
    return A - A.transpose();
}

// deltas from a generic complex eigensolver, descending, padded to ceil(p/2)
std::vector<double> oracle_deltas(const Eigen::MatrixXd& C) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(C);
    std::vector<double> im;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double v = es.eigenvalues()(i).imag();
        if (v > 1e-9) im.push_back(v);
    }
    std::sort(im.rbegin(), im.rend());
    im.resize((C.rows() + 1) / 2, 0.0);
    return im;
}

void check_decomposition(const Eigen::MatrixXd& M, const BlockSpectrum& bs, double tol) {
    CHECK(orthogonality_defect(bs.theta) <= kTolOrth);
    CHECK(max_abs(bs.theta.transpose() * M * bs.theta - bs.block_form()) <= tol);
}

}  // namespace

TEST_CASE("canonical rotation block") {
    Eigen::MatrixXd C(2, 2);
    C << 0, -1, 1, 0;
    auto bs = skew_block_diagonalize(C);
    REQUIRE(bs.pairs.size() == 1);
    CHECK(bs.pairs[0].gamma == doctest::Approx(0.0));
    CHECK(bs.pairs[0].delta == doctest::Approx(1.0));
    CHECK(bs.zero_count == 0);
    CHECK(max_abs(bs.theta - Eigen::MatrixXd::Identity(2, 2)) < 1e-12);
}

TEST_CASE("zero matrix") {
    auto bs = skew_block_diagonalize(Eigen::MatrixXd::Zero(3, 3));
    for (const auto& p : bs.pairs) CHECK(p.delta == 0.0);
    CHECK(bs.zero_count == 3);
    CHECK(max_abs(bs.theta - Eigen::MatrixXd::Identity(3, 3)) < 1e-12);
}

TEST_CASE("C(4) deltas match a complex eigensolver") {
    Eigen::MatrixXd C = build_C(4);
    auto bs = skew_block_diagonalize(C);
    auto d = bs.deltas();
    auto ref = oracle_deltas(C);
    REQUIRE(d.size() == ref.size());
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == doctest::Approx(ref[i]).epsilon(1e-9));
    check_decomposition(C, bs, 1e-10);
}

TEST_CASE("random skew matrices against the oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        int p = 1 + trial % 12;
        Eigen::MatrixXd C = random_skew(p, rng);
        auto bs = skew_block_diagonalize(C);
        check_decomposition(C, bs, 1e-9);
        auto d = bs.deltas();
        auto ref = oracle_deltas(C);
        REQUIRE(d.size() == ref.size());
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d[i] - ref[i]) < 1e-9);
        CHECK(std::is_sorted(d.rbegin(), d.rend()));
        auto fast = skew_deltas(C);
        REQUIRE(fast.size() == d.size());
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(fast[i] - d[i]) < 1e-9);
    }
}

TEST_CASE("H1 target has unit pairs") {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(4, 4);
    T.topRightCorner(2, 2) = -Eigen::MatrixXd::Identity(2, 2);
    T.bottomLeftCorner(2, 2) = Eigen::MatrixXd::Identity(2, 2);
    auto bs = normal_block_diagonalize(T);
    REQUIRE(bs.pairs.size() == 2);
    for (const auto& p : bs.pairs) {
        CHECK(p.gamma == doctest::Approx(0.0));
        CHECK(p.delta == doctest::Approx(1.0));
    }
    CHECK(bs.zero_count == 0);
    check_decomposition(T, bs, 1e-10);
}

TEST_CASE("scaled identity") {
    for (int n : {1, 2, 3}) {
        Eigen::MatrixXd T = -0.7 * Eigen::MatrixXd::Identity(2 * n, 2 * n);
        auto bs = normal_block_diagonalize(T);
        REQUIRE(bs.pairs.size() == static_cast<std::size_t>(n));
        for (const auto& p : bs.pairs) {
            CHECK(p.gamma == doctest::Approx(-0.7));
            CHECK(p.delta == doctest::Approx(0.0));
        }
        check_decomposition(T, bs, 1e-12);
    }
}

TEST_CASE("TdE template with gamma 0.5") {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(4, 4);
    T.topLeftCorner(2, 2) = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    T.bottomRightCorner(2, 2) = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    T.topRightCorner(2, 2) = -Eigen::MatrixXd::Identity(2, 2);
    T.bottomLeftCorner(2, 2) = Eigen::MatrixXd::Identity(2, 2);
    auto bs = normal_block_diagonalize(T);
    REQUIRE(bs.pairs.size() == 2);
    for (const auto& p : bs.pairs) {
        CHECK(p.gamma == doctest::Approx(0.5));
        CHECK(p.delta == doctest::Approx(1.0));
    }
    check_decomposition(T, bs, 1e-10);
}

TEST_CASE("orthogonality defect") {
    CHECK(orthogonality_defect(Eigen::MatrixXd::Identity(3, 3)) == 0.0);
    CHECK(orthogonality_defect(2.0 * Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(3.0));
}

TEST_CASE("non-skew input is rejected") {
    Eigen::MatrixXd A(2, 2);
    A << 0, 1, 1, 0;
    CHECK_THROWS_AS(skew_block_diagonalize(A), Error);
    Eigen::MatrixXd N(2, 2);
    N << 1, 2, 0, 1;
    CHECK_THROWS_AS(normal_block_diagonalize(N), Error);
}

TEST_CASE("deterministic output") {
    std::mt19937_64 rng(11);
    Eigen::MatrixXd C = random_skew(9, rng);
    auto a = skew_block_diagonalize(C);
    auto b = skew_block_diagonalize(C);
    CHECK((a.theta.array() == b.theta.array()).all());
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i) CHECK(a.pairs[i].delta == b.pairs[i].delta);
}

TEST_CASE("large skew input") {
    Eigen::MatrixXd C = build_C(300);
    auto d = skew_deltas(C);
    CHECK(d.size() == 150);
    CHECK(std::is_sorted(d.rbegin(), d.rend()));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kerneig/discrete_l2.hpp"
#include "kerneig/linalg.hpp"
#include "oracles.hpp"

using namespace kerneig;

namespace {

Eigen::MatrixXd pts(std::initializer_list<double> xs) {
    Eigen::MatrixXd p(1, static_cast<Eigen::Index>(xs.size()));
    Eigen::Index j = 0;
    for (double x : xs) p(0, j++) = x;
    return p;
}

// (K(x, .), K(., y))_{L2} for min(x, y) - xy by a 10^6-panel trapezoid rule
double l2_translates(double x, double y) {
    return oracle::trapezoid([&](double t) { return oracle::bb1(x, t) * oracle::bb1(t, y); }, 0, 1, 1000000);
}

}  // namespace

TEST_CASE("discrete inner products") {
    const QuadratureSet disk = disk_grid(500), line = random_interval_points(10000, 3);
    std::vector<double> one(static_cast<std::size_t>(disk.size()), 1.0);
    CHECK(discrete_inner(one, one, disk) == doctest::Approx(std::numbers::pi).epsilon(1e-14));

    std::vector<double> f, g, ones(10000, 1.0);
    for (Eigen::Index j = 0; j < line.size(); ++j) {
        f.push_back(std::sin(std::numbers::pi * line.points()(0, j)));
        g.push_back(std::sin(2 * std::numbers::pi * line.points()(0, j)));
    }
    CHECK(discrete_inner(ones, ones, line) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(discrete_inner(f, g, line)) <= 0.02);
    CHECK_THROWS_AS(discrete_inner(f, one, line), std::invalid_argument);
}

TEST_CASE("pencil: single point") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(300, 1);
    const GramianPair exact = assemble_pencil(k, pts({0.5}), q, GramianMode::exact);
    CHECK(exact.A(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    long double series = 0.0L;
    for (long j = 200001; j >= 1; --j)
        series += oracle::bb_lambda(2, 0.0, j) * 2.0L * std::pow(std::sin(j * oracle::kPi / 2), 2);
    CHECK(exact.B(0, 0) == doctest::Approx(static_cast<double>(series)).epsilon(1e-12));

    const GramianPair disc = assemble_pencil(k, pts({0.3}), q, GramianMode::discrete);
    double ref = 0.0;
    for (Eigen::Index j = 0; j < q.size(); ++j) ref += std::pow(oracle::bb1(q.points()(0, j), 0.3), 2);
    CHECK(disc.B(0, 0) == doctest::Approx(q.weight() * ref).epsilon(1e-13));
    CHECK(disc.weight == q.weight());
}

TEST_CASE("pencil: exact B against trapezoid oracle on 3x3 cases") {
    const QuadratureSet q = random_interval_points(10, 0);
    const BrownianBridgeKernel k({1, 0.0, 0});
    for (const Eigen::MatrixXd& p : {pts({0.15, 0.5, 0.82}), pts({0.013, 0.4444, 0.9871})}) {
        const GramianPair pair = assemble_pencil(k, p, q, GramianMode::exact);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(pair.B(i, j) - l2_translates(p(0, i), p(0, j))) <= 1e-8 * pair.B.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("pencil: exact and discrete B agree on 500 quadrature points") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(500, 0);
    const Eigen::MatrixXd p = pts({0.1, 0.35, 0.5, 0.77, 0.9});
    const GramianPair e = assemble_pencil(k, p, q, GramianMode::exact);
    const GramianPair d = assemble_pencil(k, p, q, GramianMode::discrete);
    CHECK((e.B - d.B).cwiseAbs().maxCoeff() <= 5e-3);
    CHECK(e.A == d.A);
}

TEST_CASE("pencil: structure") {
    const KernelPtr k = make_kernel("matern1", 0, 0.0);
    const QuadratureSet q = disk_grid(300);
    Eigen::MatrixXd p(2, 4);
    p << 0.1, 0.5, -0.3, 0.0, 0.2, -0.1, 0.4, -0.7;
    const GramianPair pair = assemble_pencil(*k, p, q, GramianMode::discrete);
    CHECK(pair.A == pair.A.transpose());
    CHECK(pair.B == pair.B.transpose());
    // B = w V V^T with V_ij = K(x_i, q_j), expanded directly
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (Eigen::Index c = 0; c < q.size(); ++c)
                acc += (*k)(Point(p.col(i).data(), 2), q.point(c)) * (*k)(q.point(c), Point(p.col(j).data(), 2));
            CHECK(pair.B(i, j) == doctest::Approx(q.weight() * acc).epsilon(1e-12));
        }
    CHECK_THROWS_AS(assemble_pencil(*k, p, q, GramianMode::exact), std::invalid_argument);

    Eigen::MatrixXd twice(2, 2);
    twice << 0.1, 0.1, 0.2, 0.2;
    CHECK_THROWS_AS(assemble_pencil(*k, twice, q, GramianMode::discrete), SingularConfiguration);
}

TEST_CASE("Newton Gramian") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(10000, 2);

    SUBCASE("one point") {
        const GreedyResult g = greedy_select(k, q, 1, Criterion::linf);
        const GramianPair pair = assemble_pencil(k, g.basis.selected_points, q, GramianMode::exact);
        const Eigen::MatrixXd ge = newton_l2_gramian(g.basis, k, q, GramianMode::exact);
        CHECK(ge(0, 0) == doctest::Approx(pair.B(0, 0) / pair.A(0, 0)).epsilon(1e-12));
    }

    const GreedyResult g = greedy_select(k, q, 20, Criterion::linf);
    const Eigen::MatrixXd gd = newton_l2_gramian(g.basis, k, q, GramianMode::discrete);
    const Eigen::MatrixXd ge = newton_l2_gramian(g.basis, k, q, GramianMode::exact);

    SUBCASE("discrete trace is the quadrature of sum v_i^2") {
        CHECK(gd.trace() == doctest::Approx(q.weight() * g.basis.basis_values().squaredNorm()).epsilon(1e-13));
    }
    SUBCASE("exact against the dense oracle L^{-1} B L^{-T}") {
        const GramianPair pair = assemble_pencil(k, g.basis.selected_points, q, GramianMode::exact);
        const Eigen::LLT<Eigen::MatrixXd> llt(pair.A);
        const Eigen::MatrixXd half = llt.matrixL().solve(pair.B);
        const Eigen::MatrixXd ref = llt.matrixL().solve(half.transpose());
        CHECK((ge - ref).norm() <= 1e-9 * ref.norm());
    }
    SUBCASE("symmetric positive semidefinite") {
        CHECK(ge == ge.transpose());
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ge).eigenvalues().minCoeff() > 0.0);
    }
    SUBCASE("trace identity with exact Gramian") {
        const double total = 1.0 / 6.0;
        const double residual = std::abs(ge.trace() + power_l2_squared_interval(g.basis, k) - total) / total;
        CHECK(residual <= 1e-6);
    }

    CHECK_THROWS_AS(newton_l2_gramian(g.basis, k, random_interval_points(5), GramianMode::discrete), std::invalid_argument);
    const KernelPtr m = make_kernel("matern0", 0, 0.0);
    const QuadratureSet disk = disk_grid(100);
    const GreedyResult gm = greedy_select(*m, disk, 3, Criterion::linf);
    CHECK_THROWS_AS(newton_l2_gramian(gm.basis, *m, disk, GramianMode::exact), std::invalid_argument);
}

TEST_CASE("Newton Gramian: exact against discrete on a 10^4-point grid") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = interval_grid(10000);
    const GreedyResult g = greedy_select(k, q, 20, Criterion::linf);
    const Eigen::MatrixXd gd = newton_l2_gramian(g.basis, k, q, GramianMode::discrete);
    const Eigen::MatrixXd ge = newton_l2_gramian(g.basis, k, q, GramianMode::exact);
    CHECK((ge - gd).norm() <= 1e-2 * ge.norm());
}

TEST_CASE("squared factor reproduces the exact translate Gramian") {
    const BrownianBridgeKernel k({2, 1.0, 0});
    const Eigen::MatrixXd p = pts({0.2, 0.45, 0.7});
    const Eigen::MatrixXd f = squared_factor(k, p);
    const Eigen::MatrixXd b = kernel_matrix(*k.l2_squared(), p);
    CHECK((f.transpose() * f - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("matrix CSV") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.1, 0.1, 1.0 / 3.0;
    std::ostringstream out;
    write_matrix_csv(out, m);
    CHECK(out.str() == "1,0.1\n0.1,0.3333333333333333\n");
    CHECK(parse_gramian_mode("exact") == GramianMode::exact);
    CHECK(to_string(GramianMode::discrete) == "discrete");
    CHECK_THROWS(parse_gramian_mode("quadrature"));
}

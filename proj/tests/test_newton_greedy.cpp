#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kerneig/discrete_l2.hpp"
#include "kerneig/eigensolve.hpp"
#include "kerneig/linalg.hpp"
#include "kerneig/newton_greedy.hpp"
#include "oracles.hpp"

using namespace kerneig;

namespace {

QuadratureSet line(std::initializer_list<double> xs) {
    Eigen::MatrixXd p(1, static_cast<Eigen::Index>(xs.size()));
    Eigen::Index j = 0;
    for (double x : xs) p(0, j++) = x;
    return {p, Domain::unit_interval};
}

Eigen::MatrixXd selected_columns(const QuadratureSet& q, const NewtonBasis& b) {
    Eigen::MatrixXd out(q.dimension(), b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) out.col(i) = q.points().col(b.selected[i]);
    return out;
}

}  // namespace

TEST_CASE("first extension") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(40, 5);
    NewtonBasis b = newton_init(k, q);
    CHECK(b.size() == 0);
    newton_extend(b, 17, k, q);
    const double x1 = q.points()(0, 17);
    const double d = oracle::bb1(x1, x1);
    for (Eigen::Index j = 0; j < q.size(); ++j)
        CHECK(b.values(j, 0) == doctest::Approx(oracle::bb1(q.points()(0, j), x1) / std::sqrt(d)).epsilon(1e-13));
    CHECK(b.values(17, 0) == doctest::Approx(std::sqrt(d)));
    CHECK(std::abs(b.residual(17)) <= 1e-10 * d);
}

TEST_CASE("Schur complement example") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = line({0.25, 0.5});
    NewtonBasis b = newton_init(k, q);
    newton_extend(b, 1, k, q);
    CHECK(b.residual(0) == doctest::Approx(0.125).epsilon(1e-15));
    newton_extend(b, 0, k, q);
    CHECK(std::abs(b.residual(0)) <= 1e-10 * 0.1875);
    CHECK(std::abs(b.residual(1)) <= 1e-10 * 0.25);
}

TEST_CASE("breakdown on an exhausted pivot") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = line({0.25, 0.5});
    NewtonBasis b = newton_init(k, q);
    newton_extend(b, 1, k, q);
    CHECK_THROWS_AS(newton_extend(b, 1, k, q), NewtonBreakdown);
    CHECK_THROWS_AS(newton_extend(b, 5, k, q), std::out_of_range);
}

TEST_CASE("Newton values match a dense Cholesky oracle") {
    const KernelPtr k = make_kernel("matern2", 0, 0.0);
    const QuadratureSet q = disk_grid(300);
    const GreedyResult g = greedy_select(*k, q, 25, Criterion::linf);
    const Eigen::MatrixXd sel = selected_columns(q, g.basis);
    const Eigen::MatrixXd ref = oracle::newton_values(kernel_matrix(*k, q.points(), sel), kernel_matrix(*k, sel, sel));
    CHECK((g.basis.basis_values() - ref).cwiseAbs().maxCoeff() < 1e-8);

    // evaluation away from the candidates
    const std::array<double, 2> x{0.123, -0.456};
    const Eigen::VectorXd v = newton_evaluate(g.basis, *k, x);
    Eigen::MatrixXd px(2, 1);
    px << x[0], x[1];
    const Eigen::MatrixXd vref = oracle::newton_values(kernel_matrix(*k, px, sel), kernel_matrix(*k, sel, sel));
    CHECK((v.transpose() - vref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("first greedy point") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(500, 0);
    const GreedyResult g = greedy_select(k, q, 1, Criterion::linf);
    Eigen::Index nearest = 0;
    for (Eigen::Index j = 0; j < q.size(); ++j)
        if (std::abs(q.points()(0, j) - 0.5) < std::abs(q.points()(0, nearest) - 0.5)) nearest = j;
    CHECK(g.basis.selected.at(0) == nearest);

    // constant diagonal, column sup norm is K(x,x) = 1 everywhere: lowest index wins
    const KernelPtr m = make_kernel("matern0", 0, 0.0);
    CHECK(greedy_select(*m, disk_grid(200), 1, Criterion::linf).basis.selected.at(0) == 0);

    // brute force the printed first-point rule for both norms
    for (int beta : {2, 3}) {
        const BrownianBridgeKernel kb({beta, 1.0, 0});
        const QuadratureSet c = random_interval_points(200, 9);
        const Eigen::MatrixXd a = kernel_matrix(kb, c.points());
        Eigen::Index best_inf = 0, best_l2 = 0;
        double s_inf = -1, s_l2 = -1;
        for (Eigen::Index x = 0; x < c.size(); ++x) {
            const double inf = a.col(x).cwiseAbs().maxCoeff() / std::sqrt(a(x, x));
            const double l2 = c.weight() * a.col(x).squaredNorm() / a(x, x);
            if (inf > s_inf) s_inf = inf, best_inf = x;
            if (l2 > s_l2) s_l2 = l2, best_l2 = x;
        }
        CHECK(greedy_select(kb, c, 1, Criterion::linf).basis.selected.at(0) == best_inf);
        const GreedyResult gl = greedy_select(kb, c, 1, Criterion::l2);
        CHECK(gl.basis.selected.at(0) == best_l2);
        CHECK(gl.trace.at(0).score == doctest::Approx(s_l2).epsilon(1e-12));
    }
}

TEST_CASE("l2 scores equal the discrete norm of the tentative Newton function") {
    const BrownianBridgeKernel k({2, 0.0, 0});
    const QuadratureSet q = random_interval_points(150, 4);
    const Eigen::MatrixXd a = kernel_matrix(k, q.points());
    const GreedyResult g = greedy_select(k, q, 12, Criterion::l2);
    REQUIRE(g.basis.size() == 12);
    for (Eigen::Index step = 1; step < 12; ++step) {
        // brute force: Newton basis of the first `step` points plus each candidate
        std::vector<Eigen::Index> prefix(g.basis.selected.begin(), g.basis.selected.begin() + step);
        double best = -1;
        Eigen::Index arg = -1;
        for (Eigen::Index x = 0; x < q.size(); ++x) {
            if (std::find(prefix.begin(), prefix.end(), x) != prefix.end()) continue;
            std::vector<Eigen::Index> idx = prefix;
            idx.push_back(x);
            const auto n = static_cast<Eigen::Index>(idx.size());
            Eigen::MatrixXd kas(q.size(), n), kss(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                kas.col(i) = a.col(idx[i]);
                for (Eigen::Index l = 0; l < n; ++l) kss(i, l) = a(idx[i], idx[l]);
            }
            const Eigen::LLT<Eigen::MatrixXd> llt(kss);
            if (llt.info() != Eigen::Success || llt.matrixLLT()(n - 1, n - 1) < 1e-7 * std::sqrt(a(x, x))) continue;
            const Eigen::MatrixXd v = oracle::newton_values(kas, kss);
            const double score = q.weight() * v.col(n - 1).squaredNorm();
            if (score > best) best = score, arg = x;
        }
        CHECK(g.basis.selected[step] == arg);
        CHECK(g.trace[step].score == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("full selection interpolates every candidate") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(30, 2);
    const GreedyResult g = greedy_select(k, q, 30, Criterion::linf);
    CHECK(g.basis.size() == 30);
    CHECK_FALSE(g.breakdown);
    CHECK(g.basis.residual.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(power_l2_norm(g.basis, q).l2 < 1e-7);
}

TEST_CASE("power norm of the empty basis") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(1000, 8);
    const NewtonBasis b = newton_init(k, q);
    double ref = 0.0;
    for (Eigen::Index j = 0; j < q.size(); ++j) ref += oracle::bb1(q.points()(0, j), q.points()(0, j));
    CHECK(power_l2_norm(b, q).l2 == doctest::Approx(std::sqrt(ref / 1000)).epsilon(1e-14));
    CHECK(power_l2_norm(b, q).l2 == doctest::Approx(std::sqrt(1.0 / 6)).epsilon(2e-2));
    CHECK_THROWS(power_l2_norm(b, random_interval_points(10)));
}

TEST_CASE("discrete power norm against the trace identity with exact eigenvalues") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(10000, 1);
    const GreedyResult g = greedy_select(k, q, 10, Criterion::linf);
    const EigenApproximation e = eigs_newton(newton_l2_gramian(g.basis, k, q, GramianMode::exact));
    const double ref = std::sqrt(1.0 / 6 - e.eigenvalues.sum());
    CHECK(power_l2_norm(g.basis, q).l2 == doctest::Approx(ref).epsilon(1e-2));
}

TEST_CASE("Gauss power integral against a trapezoid oracle") {
    const BrownianBridgeKernel k({1, 0.0, 0});
    const QuadratureSet q = random_interval_points(200, 6);
    const GreedyResult g = greedy_select(k, q, 8, Criterion::linf);
    const Eigen::MatrixXd sel = g.basis.selected_points;
    const Eigen::MatrixXd kss = kernel_matrix(k, sel, sel);
    const auto p2 = [&](double x) {
        Eigen::MatrixXd px(1, 1);
        px(0, 0) = x;
        const Eigen::MatrixXd v = oracle::newton_values(kernel_matrix(k, px, sel), kss);
        return oracle::bb1(x, x) - v.squaredNorm();
    };
    CHECK(power_l2_squared_interval(g.basis, k) == doctest::Approx(oracle::trapezoid(p2, 0, 1, 200000)).epsilon(1e-6));
}

TEST_CASE("linf greedy: monotone max residual, determinism") {
    const KernelPtr k = make_kernel("matern1", 0, 0.0);
    const QuadratureSet q = disk_grid(1000);
    const GreedyResult g = greedy_select(*k, q, 40, Criterion::linf);
    for (std::size_t s = 1; s < g.trace.size(); ++s) CHECK(g.trace[s].residual_max <= g.trace[s - 1].residual_max);
    for (Criterion c : {Criterion::linf, Criterion::l2}) {
        const GreedyResult a = greedy_select(*k, q, 30, c), b = greedy_select(*k, q, 30, c);
        CHECK(a.basis.selected == b.basis.selected);
        CHECK(a.basis.residual == b.basis.residual);
    }
}

TEST_CASE("breakdown is reported, not thrown") {
    const BrownianBridgeKernel k({4, 0.0, 0});
    const QuadratureSet q = random_interval_points(500, 0);
    GreedyResult g;
    CHECK_NOTHROW(g = greedy_select(k, q, 300, Criterion::linf));
    CHECK(g.breakdown);
    CHECK(g.basis.size() < 300);
    CHECK(g.requested == 300);
    CHECK_THROWS(greedy_select(k, q, 501, Criterion::linf));
}

TEST_CASE("Newton basis invariants across the kernel zoo") {
    std::vector<std::pair<KernelPtr, QuadratureSet>> runs;
    const QuadratureSet disk = disk_grid(2000), interval = random_interval_points(500, 0);
    for (int b = 0; b <= 3; ++b) runs.emplace_back(make_kernel("matern" + std::to_string(b), 0, 0.0), disk);
    for (int b = 1; b <= 4; ++b)
        for (double e : {0.0, 1.0}) runs.emplace_back(make_kernel("bb", b, e), interval);

    for (const auto& [k, q] : runs)
        for (Criterion c : {Criterion::linf, Criterion::l2}) {
            CAPTURE(k->id());
            CAPTURE(to_string(c));
            const GreedyResult g = greedy_select(*k, q, 50, c);
            const NewtonBasis& b = g.basis;
            const Eigen::Index n = b.size();
            REQUIRE(n > 0);
            const Eigen::MatrixXd t = b.triangular();
            const double scale = std::sqrt(b.max_diagonal);

            // triangular structure
            CHECK(t.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() <= 1e-10 * scale);
            // zero residual at the pivots
            for (Eigen::Index s : b.selected)
                CHECK(std::abs(b.residual(s)) <= 1e-10 * k->diagonal(q.point(s)));
            // A = T T^T
            const Eigen::MatrixXd a = kernel_matrix(*k, b.selected_points);
            CHECK((t * t.transpose() - a).norm() <= 1e-10 * a.norm());
            // residual = diag - sum v^2 and pointwise monotone (Pythagoras over nested selections)
            Eigen::VectorXd r(q.size());
            for (Eigen::Index j = 0; j < q.size(); ++j) r(j) = k->diagonal(q.point(j));
            CHECK((r - b.basis_values().rowwise().squaredNorm() - b.residual).cwiseAbs().maxCoeff() <=
                  1e-12 * b.max_diagonal);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Eigen::VectorXd next = r - b.values.col(i).cwiseAbs2();
                CHECK((next.array() <= r.array()).all());
                r = next;
            }
        }
}

#include "kerneig/linalg.hpp"

#include <cmath>

namespace kerneig {

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& m, const std::string& what) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n) throw std::invalid_argument(what + ": matrix is not square");
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = m(j, j);
        if (j > 0) pivot -= l.row(j).head(j).squaredNorm();
        if (!(pivot > 0.0)) throw IllConditionedGramian(what + ": matrix is not positive definite", j);
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        if (j + 1 < n) {
            Eigen::VectorXd col = m.col(j).tail(n - j - 1);
            if (j > 0) col.noalias() -= l.bottomLeftCorner(n - j - 1, j) * l.row(j).head(j).transpose();
            l.col(j).tail(n - j - 1) = col / d;
        }
    }
    return l;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys) {
    const auto d = static_cast<std::size_t>(xs.rows());
    Eigen::MatrixXd k(xs.cols(), ys.cols());
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index j = 0; j < ys.cols(); ++j)
        for (Eigen::Index i = 0; i < xs.cols(); ++i)
            k(i, j) = kernel(Point(xs.col(i).data(), d), Point(ys.col(j).data(), d));
    return k;
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Eigen::MatrixXd& xs) {
    const auto d = static_cast<std::size_t>(xs.rows());
    const Eigen::Index n = xs.cols();
    Eigen::MatrixXd k(n, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i)
            k(i, j) = kernel(Point(xs.col(i).data(), d), Point(xs.col(j).data(), d));
    k.triangularView<Eigen::StrictlyLower>() = k.transpose();
    return k;
}

Eigen::VectorXd kernel_column(const Kernel& kernel, const Eigen::MatrixXd& points, Point x) {
    const auto d = static_cast<std::size_t>(points.rows());
    Eigen::VectorXd col(points.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < points.cols(); ++j) col(j) = kernel(Point(points.col(j).data(), d), x);
    return col;
}

GaussRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre needs order >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussRule rule;
    rule.nodes = solver.eigenvalues();
    rule.weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
    return rule;
}

}  // namespace kerneig

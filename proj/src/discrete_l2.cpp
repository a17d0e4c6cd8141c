#include "kerneig/discrete_l2.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

#include "kerneig/linalg.hpp"

namespace kerneig {

std::string to_string(GramianMode mode) { return mode == GramianMode::discrete ? "discrete" : "exact"; }

GramianMode parse_gramian_mode(const std::string& name) {
    if (name == "discrete") return GramianMode::discrete;
    if (name == "exact") return GramianMode::exact;
    throw std::invalid_argument("unknown gramian mode '" + name + "'");
}

double discrete_inner(std::span<const double> f, std::span<const double> g, const QuadratureSet& quad) {
    if (f.size() != g.size() || static_cast<Eigen::Index>(f.size()) != quad.size())
        throw std::invalid_argument("discrete_inner: value lists must match the quadrature size");
    double acc = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * g[j];
    return quad.weight() * acc;
}

namespace {

std::shared_ptr<const Kernel> require_squared(const Kernel& kernel) {
    auto squared = kernel.l2_squared();
    if (!squared) throw std::invalid_argument("exact L2 Gramian needs an expansion kernel; " + kernel.id() + " has none");
    return squared;
}

}  // namespace

int squared_truncation(const Eigensystem& es) {
    int j = 1;
    while (j < kMaxSquaredTerms && es.eigenvalue(j + 1) > 0.0) ++j;
    return j;
}

Eigen::MatrixXd squared_factor(const Eigensystem& es, const Eigen::MatrixXd& points) {
    const int terms = squared_truncation(es);
    Eigen::MatrixXd f(terms, points.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const Point x(points.col(i).data(), static_cast<std::size_t>(points.rows()));
        for (int j = 1; j <= terms; ++j) f(j - 1, i) = es.eigenvalue(j) * es.eigenfunction(j, x);
    }
    return f;
}

GramianPair assemble_pencil(const Kernel& kernel, const Eigen::MatrixXd& selected, const QuadratureSet& quad,
                            GramianMode mode) {
    GramianPair pair;
    pair.mode = mode;
    pair.A = kernel_matrix(kernel, selected);
    try {
        cholesky_lower(pair.A, "kernel matrix");
    } catch (const IllConditionedGramian& e) {
        throw SingularConfiguration("kernel matrix on the selected points is singular", e.minor_index());
    }
    if (mode == GramianMode::discrete) {
        const Eigen::MatrixXd values = kernel_matrix(kernel, selected, quad.points());
        pair.weight = quad.weight();
        pair.B = symmetrized(quad.weight() * values * values.transpose());
    } else {
        pair.B = kernel_matrix(*require_squared(kernel), selected);
    }
    return pair;
}

Eigen::MatrixXd newton_l2_gramian(const NewtonBasis& basis, const Kernel& kernel, const QuadratureSet& quad,
                                  GramianMode mode) {
    if (mode == GramianMode::discrete) {
        if (basis.candidate_count() != quad.size())
            throw std::invalid_argument("newton_l2_gramian: basis was not built on this quadrature set");
        const auto v = basis.basis_values();
        return symmetrized(quad.weight() * v.transpose() * v);
    }
    require_squared(kernel);
    const Eigen::MatrixXd t = basis.triangular();
    const auto lower = t.triangularView<Eigen::Lower>();
    if (const Eigensystem* es = kernel.eigensystem()) {
        // B = F^T F with F(j, i) = lambda_j phi_j(x_i), so G = X X^T with X = T^{-1} F^T.
        const Eigen::MatrixXd f = squared_factor(*es, basis.selected_points);
        const Eigen::MatrixXd x = lower.solve(f.transpose());
        return symmetrized(x * x.transpose());
    }
    const Eigen::MatrixXd b = kernel_matrix(*require_squared(kernel), basis.selected_points);
    Eigen::MatrixXd half = lower.solve(b);                          // T^{-1} B
    Eigen::MatrixXd g = lower.solve(half.transpose()).transpose();  // T^{-1} B T^{-T}
    return symmetrized(g);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    char buf[32];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j));
            if (j > 0) out << ',';
            out.write(buf, end - buf);
        }
        out << '\n';
    }
}

}  // namespace kerneig

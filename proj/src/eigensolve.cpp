#include "kerneig/eigensolve.hpp"

#include <algorithm>
#include <stdexcept>

#include "kerneig/linalg.hpp"

namespace kerneig {

std::string to_string(Method method) { return method == Method::direct ? "direct" : "newton"; }

Method parse_method(const std::string& name) {
    if (name == "direct") return Method::direct;
    if (name == "newton") return Method::newton;
    throw std::invalid_argument("unknown method '" + name + "'");
}

namespace {

// Reorders an ascending symmetric eigendecomposition to descending order.
void descending(Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    values.reverseInPlace();
    vectors = vectors.rowwise().reverse().eval();
}

// Largest-magnitude entry of each column made positive; first index wins ties.
void fix_signs(Eigen::MatrixXd& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        Eigen::Index at = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&at);
        if (vectors(at, j) < 0.0) vectors.col(j) *= -1.0;
    }
}

std::vector<bool> flag_unstable(const Eigen::VectorXd& values) {
    std::vector<bool> flags(static_cast<std::size_t>(values.size()), true);
    if (values.size() == 0) return flags;
    const double top = values.maxCoeff();
    for (Eigen::Index j = 0; j < values.size(); ++j)
        flags[static_cast<std::size_t>(j)] = !(top > 0.0) || values(j) <= kSolverFloor * top;
    return flags;
}

}  // namespace

Eigen::Index EigenApproximation::unstable_count() const {
    return static_cast<Eigen::Index>(std::count(unstable.begin(), unstable.end(), true));
}

Eigen::Index EigenApproximation::nonpositive_count() const {
    return (eigenvalues.array() <= 0.0).count();
}

SimultaneousDiagonalization simultaneous_diagonalize(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw std::invalid_argument("simultaneous_diagonalize: shape mismatch");
    const Eigen::MatrixXd l = cholesky_lower(b, "whitening Gramian");
    const auto lower = l.triangularView<Eigen::Lower>();
    // C = L^{-1} A L^{-T}
    const Eigen::MatrixXd half = lower.solve(a);
    const Eigen::MatrixXd c = symmetrized(lower.solve(half.transpose()));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
    if (solver.info() != Eigen::Success) throw std::runtime_error("simultaneous_diagonalize: eigensolver failed");
    SimultaneousDiagonalization out;
    out.sigma = solver.eigenvalues();
    Eigen::MatrixXd u = solver.eigenvectors();
    descending(out.sigma, u);
    out.change_of_basis = l.transpose().triangularView<Eigen::Upper>().solve(u);
    fix_signs(out.change_of_basis);
    return out;
}

EigenApproximation eigs_direct(const GramianPair& pair) {
    SimultaneousDiagonalization sd = simultaneous_diagonalize(pair.B, pair.A);
    EigenApproximation out;
    out.eigenvalues = std::move(sd.sigma);
    out.coefficients = std::move(sd.change_of_basis);
    out.basis = BasisTag::translates;
    out.unstable = flag_unstable(out.eigenvalues);
    return out;
}

Eigen::VectorXd eigs_direct_unswapped(const GramianPair& pair) {
    const SimultaneousDiagonalization sd = simultaneous_diagonalize(pair.A, pair.B);
    // sigma_j = 1 / lambda_j, so ascending sigma gives descending lambda.
    return sd.sigma.cwiseInverse().reverse();
}

EigenApproximation eigs_newton(const Eigen::MatrixXd& gramian) {
    if (gramian.rows() != gramian.cols()) throw std::invalid_argument("eigs_newton: Gramian must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized(gramian));
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigs_newton: eigensolver failed");
    EigenApproximation out;
    out.eigenvalues = solver.eigenvalues();
    out.coefficients = solver.eigenvectors();
    descending(out.eigenvalues, out.coefficients);
    fix_signs(out.coefficients);
    out.basis = BasisTag::newton;
    out.unstable = flag_unstable(out.eigenvalues);
    return out;
}

double eval_eigenfunction(const EigenApproximation& approx, const NewtonBasis& basis, Eigen::Index j, Point x,
                          const Kernel& kernel) {
    if (approx.basis != BasisTag::newton) throw std::invalid_argument("eval_eigenfunction: not a Newton-basis approximation");
    if (j < 0 || j >= approx.size()) throw std::out_of_range("eval_eigenfunction: index out of range");
    return approx.coefficients.col(j).dot(newton_evaluate(basis, kernel, x));
}

double eval_eigenfunction(const EigenApproximation& approx, const Eigen::MatrixXd& centers, Eigen::Index j,
                          Point x, const Kernel& kernel) {
    if (approx.basis != BasisTag::translates) throw std::invalid_argument("eval_eigenfunction: not a translate-basis approximation");
    if (j < 0 || j >= approx.size()) throw std::out_of_range("eval_eigenfunction: index out of range");
    return approx.coefficients.col(j).dot(kernel_column(kernel, centers, x));
}

}  // namespace kerneig

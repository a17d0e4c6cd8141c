#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerneig/discrete_l2.hpp"
#include "kerneig/kernels.hpp"
#include "kerneig/newton_greedy.hpp"

namespace kerneig {

/// Eigenvalues at or below this fraction of the largest one are flagged unstable.
inline constexpr double kSolverFloor = 1e-15;

enum class Method { direct, newton };

std::string to_string(Method method);
Method parse_method(const std::string& name);

/// C^T A C = diag(sigma) (descending) and C^T B C = I.
struct SimultaneousDiagonalization {
    Eigen::MatrixXd change_of_basis;
    Eigen::VectorXd sigma;
};

/// Whitens by B = L L^T and diagonalizes L^{-1} A L^{-T} = U Gamma U^T, giving
/// C = L^{-T} U. Throws IllConditionedGramian if B has no Cholesky factor.
SimultaneousDiagonalization simultaneous_diagonalize(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

enum class BasisTag { newton, translates };

/// Discrete eigenpairs of the restricted integral operator. Column j of
/// coefficients expresses sqrt(lambda_j) phi_j in the basis given by the tag.
struct EigenApproximation {
    Eigen::VectorXd eigenvalues;   ///< descending
    Eigen::MatrixXd coefficients;
    BasisTag basis = BasisTag::newton;
    std::vector<bool> unstable;    ///< eigenvalue <= floor * largest

    Eigen::Index size() const { return eigenvalues.size(); }
    Eigen::Index unstable_count() const;
    Eigen::Index nonpositive_count() const;
};

/// Direct construction with the roles of A and B swapped: whitening by A makes
/// the basis H-orthonormal and B's generalized eigenvalues are lambda_{j,N}.
EigenApproximation eigs_direct(const GramianPair& pair);

/// Unswapped form (whiten by B); eigenvalues are 1 / sigma_j. Kept for
/// checking the two orderings against each other.
Eigen::VectorXd eigs_direct_unswapped(const GramianPair& pair);

/// Eigendecomposition of the Newton basis L2 Gramian G = Q Lambda Q^T.
EigenApproximation eigs_newton(const Eigen::MatrixXd& gramian);

/// sqrt(lambda_j) phi_j(x) for a Newton-basis approximation.
double eval_eigenfunction(const EigenApproximation& approx, const NewtonBasis& basis, Eigen::Index j, Point x,
                          const Kernel& kernel);

/// sqrt(lambda_j) phi_j(x) for a translate-basis approximation on the given centers.
double eval_eigenfunction(const EigenApproximation& approx, const Eigen::MatrixXd& centers, Eigen::Index j,
                          Point x, const Kernel& kernel);

}  // namespace kerneig

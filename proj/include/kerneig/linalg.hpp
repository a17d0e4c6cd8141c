#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "kerneig/kernels.hpp"

namespace kerneig {

/// A Gramian that should be positive definite failed its Cholesky factorization.
/// minor_index is the 0-based size of the failing leading minor minus one.
class IllConditionedGramian : public std::runtime_error {
public:
    IllConditionedGramian(const std::string& what, Eigen::Index minor_index)
        : std::runtime_error(what + " (leading minor " + std::to_string(minor_index + 1) + ")"),
          minor_index_(minor_index) {}
    Eigen::Index minor_index() const { return minor_index_; }

private:
    Eigen::Index minor_index_;
};

/// Kernel matrix on a fixed point set failed to be positive definite.
class SingularConfiguration : public IllConditionedGramian {
public:
    using IllConditionedGramian::IllConditionedGramian;
};

/// Lower Cholesky factor of a symmetric matrix; throws IllConditionedGramian on
/// the first nonpositive pivot.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& m, const std::string& what = "Cholesky");

/// (M + M^T) / 2
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m);

/// K(x_i, y_j) with points stored column-wise.
Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys);

/// K(x_i, x_j), evaluated on the upper triangle and mirrored.
Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Eigen::MatrixXd& xs);

/// Kernel column K(c_j, x) over all points c_j.
Eigen::VectorXd kernel_column(const Kernel& kernel, const Eigen::MatrixXd& points, Point x);

struct GaussRule {
    Eigen::VectorXd nodes;    // on [-1, 1]
    Eigen::VectorXd weights;
};

/// Gauss-Legendre rule from the Golub-Welsch eigenproblem.
GaussRule gauss_legendre(int order);

}  // namespace kerneig

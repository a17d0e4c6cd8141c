#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "kerneig/kernels.hpp"
#include "kerneig/newton_greedy.hpp"
#include "kerneig/pointsets.hpp"

namespace kerneig {

/// How L2(Omega) inner products of kernel translates are obtained: the uniform
/// quadrature rule of a QuadratureSet, or the kernel's exact squared kernel.
enum class GramianMode { discrete, exact };

std::string to_string(GramianMode mode);
GramianMode parse_gramian_mode(const std::string& name);

/// The pencil (A, B) of the translate basis K(., x_i):
/// A_ij = K(x_i, x_j), B_ij = (K(., x_i), K(., x_j))_{L2}. Both symmetrized.
struct GramianPair {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    GramianMode mode = GramianMode::discrete;
    double weight = 0.0;  ///< quadrature weight in discrete mode, 0 otherwise
};

/// w * sum_j f_j g_j
double discrete_inner(std::span<const double> f, std::span<const double> g, const QuadratureSet& quad);

/// Throws SingularConfiguration if A is not positive definite.
GramianPair assemble_pencil(const Kernel& kernel, const Eigen::MatrixXd& selected, const QuadratureSet& quad,
                            GramianMode mode);

inline constexpr int kMaxSquaredTerms = 10000;

/// Number of expansion terms kept in the factor of the squared kernel:
/// kMaxSquaredTerms, or fewer if the eigenvalues underflow to zero.
int squared_truncation(const Eigensystem& es);

/// F(j, i) = lambda_j phi_j(x_i), so that F^T F is the truncated exact translate Gramian B.
Eigen::MatrixXd squared_factor(const Eigensystem& es, const Eigen::MatrixXd& points);

/// G_ik = (v_i, v_k)_{L2} for the Newton basis. Discrete mode uses the values
/// stored on the candidates; exact mode maps the exact translate Gramian B
/// through the triangular change of basis, G = T^{-1} B T^{-T}. For expansion
/// kernels this product is formed from the factor of B, G = X X^T with
/// X = T^{-1} F^T.
Eigen::MatrixXd newton_l2_gramian(const NewtonBasis& basis, const Kernel& kernel, const QuadratureSet& quad,
                                  GramianMode mode);

/// Full symmetric storage, row-major, one row per line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace kerneig

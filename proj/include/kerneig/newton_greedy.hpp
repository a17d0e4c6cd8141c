#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerneig/kernels.hpp"
#include "kerneig/pointsets.hpp"

namespace kerneig {

/// Pivots whose squared Power Function falls below this fraction of the largest
/// kernel diagonal are treated as breakdown.
inline constexpr double kBreakdownThreshold = 1e-13;

class NewtonBreakdown : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Newton basis v_1..v_n of span{K(., x_i)} over an ordered selection from a
/// candidate set. v_i is H-orthonormal and vanishes at x_k for k < i.
struct NewtonBasis {
    std::vector<Eigen::Index> selected;  ///< candidate indices, in selection order
    Eigen::MatrixXd values;              ///< m x capacity; values(j, i) = v_i(c_j)
    Eigen::VectorXd residual;            ///< r_j = P_n^2(c_j), raw (may go negative)
    Eigen::MatrixXd selected_points;     ///< d x n
    double max_diagonal = 0.0;

    Eigen::Index size() const { return static_cast<Eigen::Index>(selected.size()); }
    Eigen::Index candidate_count() const { return values.rows(); }
    auto basis_values() const { return values.leftCols(size()); }

    /// Lower triangular T with T(k, i) = v_i(x_k); T T^T reproduces the kernel
    /// matrix on the selected points.
    Eigen::MatrixXd triangular() const;
};

/// Empty basis: residual equals the kernel diagonal over the candidates.
NewtonBasis newton_init(const Kernel& kernel, const QuadratureSet& candidates, Eigen::Index capacity = 0);

/// Appends the Newton function pivoted at candidate new_index. Throws
/// NewtonBreakdown if the residual there is below the breakdown threshold.
void newton_extend(NewtonBasis& basis, Eigen::Index new_index, const Kernel& kernel,
                   const QuadratureSet& candidates);

/// (v_1(x), ..., v_n(x)) by forward substitution against the triangular factor.
Eigen::VectorXd newton_evaluate(const NewtonBasis& basis, const Kernel& kernel, Point x);

enum class Criterion { linf, l2 };

std::string to_string(Criterion criterion);
Criterion parse_criterion(const std::string& name);

struct GreedyStep {
    Eigen::Index step = 0;
    Eigen::Index candidate = 0;
    double score = 0.0;         ///< maximized quantity, see greedy_select
    double residual_max = 0.0;  ///< max_j r_j after the step
};

struct GreedyResult {
    NewtonBasis basis;
    std::vector<GreedyStep> trace;
    Eigen::Index requested = 0;
    bool breakdown = false;  ///< stopped before reaching the requested size
};

/// P-greedy selection of n points. The first point maximizes the norm of
/// K(., x) / sqrt(K(x, x)) over the candidates; later points maximize the norm
/// of the next Newton function. For criterion linf the later score is the
/// residual r (the squared Power Function); for l2 it is the squared discrete
/// L2 norm w (R^2)_xx / r_x with R the residual kernel. Ties go to the lowest
/// candidate index.
GreedyResult greedy_select(const Kernel& kernel, const QuadratureSet& candidates, Eigen::Index n,
                           Criterion criterion);

struct PowerNorm {
    double l2 = 0.0;            ///< sqrt(w sum_j max(r_j, 0))
    double min_residual = 0.0;  ///< raw minimum, negative values signal instability
    Eigen::Index negative_count = 0;
};

PowerNorm power_l2_norm(const NewtonBasis& basis, const QuadratureSet& quad);

/// Integral over [0, 1] of P_n^2(x) = K(x, x) - sum_i v_i(x)^2 by composite
/// Gauss-Legendre quadrature with panel breaks at the selected points. Returns
/// the squared norm, unclamped.
double power_l2_squared_interval(const NewtonBasis& basis, const Kernel& kernel, int order = 12);

}  // namespace kerneig

#include "kerneig/newton_greedy.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "kerneig/linalg.hpp"

namespace kerneig {

Eigen::MatrixXd NewtonBasis::triangular() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd t(n, n);
    for (Eigen::Index k = 0; k < n; ++k) t.row(k) = values.row(selected[k]).head(n);
    return t;
}

NewtonBasis newton_init(const Kernel& kernel, const QuadratureSet& candidates, Eigen::Index capacity) {
    const Eigen::Index m = candidates.size();
    NewtonBasis basis;
    basis.values.resize(m, std::max<Eigen::Index>(capacity, 1));
    basis.residual.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) basis.residual(j) = kernel.diagonal(candidates.point(j));
    basis.max_diagonal = basis.residual.maxCoeff();
    basis.selected_points.resize(candidates.dimension(), 0);
    return basis;
}

void newton_extend(NewtonBasis& basis, Eigen::Index new_index, const Kernel& kernel,
                   const QuadratureSet& candidates) {
    const Eigen::Index n = basis.size();
    const Eigen::Index m = basis.candidate_count();
    if (new_index < 0 || new_index >= m) throw std::out_of_range("newton_extend: candidate index out of range");
    const double pivot = basis.residual(new_index);
    if (!(pivot > kBreakdownThreshold * basis.max_diagonal))
        throw NewtonBreakdown("newton_extend: residual at pivot " + std::to_string(new_index) +
                              " is below the breakdown threshold");

    if (basis.values.cols() <= n) basis.values.conservativeResize(m, std::max<Eigen::Index>(2 * n, 8));

    Eigen::VectorXd u = kernel_column(kernel, candidates.points(), candidates.point(new_index));
    if (n > 0) u.noalias() -= basis.values.leftCols(n) * basis.values.row(new_index).head(n).transpose();
    Eigen::VectorXd v = u / std::sqrt(pivot);
    // rows pivoted earlier are structurally zero, as in pivoted Cholesky
    for (Eigen::Index s : basis.selected) v(s) = 0.0;

    basis.values.col(n) = v;
    basis.residual -= v.cwiseAbs2();
    basis.selected.push_back(new_index);
    basis.selected_points.conservativeResize(Eigen::NoChange, n + 1);
    basis.selected_points.col(n) = candidates.points().col(new_index);
}

Eigen::VectorXd newton_evaluate(const NewtonBasis& basis, const Kernel& kernel, Point x) {
    const Eigen::Index n = basis.size();
    const Eigen::MatrixXd t = basis.triangular();
    Eigen::VectorXd k(n);
    const auto d = static_cast<std::size_t>(basis.selected_points.rows());
    for (Eigen::Index i = 0; i < n; ++i) k(i) = kernel(Point(basis.selected_points.col(i).data(), d), x);
    return t.triangularView<Eigen::Lower>().solve(k);
}

std::string to_string(Criterion criterion) { return criterion == Criterion::linf ? "linf" : "l2"; }

Criterion parse_criterion(const std::string& name) {
    if (name == "linf") return Criterion::linf;
    if (name == "l2") return Criterion::l2;
    throw std::invalid_argument("unknown criterion '" + name + "'");
}

namespace {

// Scores for the l2 criterion: ||v^{(x)}||^2_{L2} = w (R^2)_{xx} / r_x with R the
// residual kernel K - V V^T on the candidates. (R^2)_{xx} is carried across
// steps with a rank-one update, which needs R v = K v - V (V^T v).
class L2Scorer {
public:
    L2Scorer(const Kernel& kernel, const QuadratureSet& candidates)
        : kernel_(kernel), candidates_(candidates) {
        const Eigen::Index m = candidates.size();
        if (m <= kStoredKernelLimit) gram_ = kernel_matrix(kernel, candidates.points());
        squared_.resize(m);
#pragma omp parallel for schedule(static)
        for (Eigen::Index x = 0; x < m; ++x) squared_(x) = column(x).squaredNorm();
    }

    const Eigen::VectorXd& squared_norms() const { return squared_; }

    // previous: the Newton values before v was appended (m x n)
    template <class Previous>
    void update(const Previous& previous, const Eigen::VectorXd& v) {
        Eigen::VectorXd rv = apply_kernel(v);
        if (previous.cols() > 0) rv.noalias() -= previous * (previous.transpose() * v);
        const double vv = v.squaredNorm();
        squared_ += (-2.0 * v.cwiseProduct(rv) + v.cwiseAbs2() * vv);
    }

private:
    static constexpr Eigen::Index kStoredKernelLimit = 6000;

    Eigen::VectorXd column(Eigen::Index x) const {
        if (gram_) return gram_->col(x);
        return kernel_column(kernel_, candidates_.points(), candidates_.point(x));
    }

    Eigen::VectorXd apply_kernel(const Eigen::VectorXd& v) const {
        if (gram_) return (*gram_) * v;
        const Eigen::Index m = candidates_.size();
        Eigen::VectorXd out(m);
#pragma omp parallel for schedule(static)
        for (Eigen::Index x = 0; x < m; ++x) out(x) = column(x).dot(v);
        return out;
    }

    const Kernel& kernel_;
    const QuadratureSet& candidates_;
    std::optional<Eigen::MatrixXd> gram_;
    Eigen::VectorXd squared_;
};

// First linf score: max_y |K(y, x)| / sqrt(K(x, x)) over the candidates.
Eigen::VectorXd first_linf_scores(const Kernel& kernel, const QuadratureSet& candidates,
                                  const Eigen::VectorXd& diagonal) {
    const Eigen::Index m = candidates.size();
    Eigen::VectorXd scores(m);
    if (kernel.peaks_on_diagonal()) return diagonal.cwiseMax(0.0).cwiseSqrt();
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index x = 0; x < m; ++x) {
        const Eigen::VectorXd col = kernel_column(kernel, candidates.points(), candidates.point(x));
        scores(x) = diagonal(x) > 0.0 ? col.cwiseAbs().maxCoeff() / std::sqrt(diagonal(x)) : 0.0;
    }
    return scores;
}

}  // namespace

GreedyResult greedy_select(const Kernel& kernel, const QuadratureSet& candidates, Eigen::Index n,
                           Criterion criterion) {
    const Eigen::Index m = candidates.size();
    if (n < 0 || n > m) throw std::invalid_argument("greedy_select: n must not exceed the candidate count");

    GreedyResult result;
    result.requested = n;
    result.basis = newton_init(kernel, candidates, n);
    NewtonBasis& basis = result.basis;
    std::vector<char> taken(static_cast<std::size_t>(m), 0);
    std::optional<L2Scorer> scorer;
    if (criterion == Criterion::l2) scorer.emplace(kernel, candidates);

    const double floor = kBreakdownThreshold * basis.max_diagonal;
    Eigen::VectorXd first;
    if (criterion == Criterion::linf && n > 0) first = first_linf_scores(kernel, candidates, basis.residual);
    for (Eigen::Index step = 0; step < n; ++step) {
        Eigen::Index best = -1;
        double best_score = -1.0;
        for (Eigen::Index x = 0; x < m; ++x) {
            if (taken[x]) continue;
            const double r = basis.residual(x);
            if (!(r > floor)) continue;
            double score = 0.0;
            if (criterion == Criterion::l2)
                score = candidates.weight() * scorer->squared_norms()(x) / r;
            else
                score = step == 0 ? first(x) : r;
            if (score > best_score) {
                best_score = score;
                best = x;
            }
        }
        if (best < 0) {
            result.breakdown = true;
            break;
        }
        newton_extend(basis, best, kernel, candidates);
        const Eigen::Index added = basis.size() - 1;
        if (scorer) scorer->update(basis.values.leftCols(added), basis.values.col(added));
        taken[best] = 1;
        result.trace.push_back({step, best, best_score, basis.residual.maxCoeff()});
    }
    return result;
}

PowerNorm power_l2_norm(const NewtonBasis& basis, const QuadratureSet& quad) {
    if (basis.residual.size() != quad.size())
        throw std::invalid_argument("power_l2_norm: residual does not match the quadrature set");
    PowerNorm out;
    out.l2 = std::sqrt(quad.weight() * basis.residual.cwiseMax(0.0).sum());
    out.min_residual = basis.residual.minCoeff();
    out.negative_count = (basis.residual.array() < 0.0).count();
    return out;
}

double power_l2_squared_interval(const NewtonBasis& basis, const Kernel& kernel, int order) {
    if (kernel.dimension() != 1) throw std::invalid_argument("power_l2_squared_interval needs a 1-d kernel");
    std::vector<double> breaks{0.0, 1.0};
    for (Eigen::Index i = 0; i < basis.size(); ++i) breaks.push_back(basis.selected_points(0, i));
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const GaussRule rule = gauss_legendre(order);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int q = 0; q < order; ++q) {
            const double x = mid + half * rule.nodes(q);
            const Point px(&x, 1);
            const double p2 = kernel.diagonal(px) - newton_evaluate(basis, kernel, px).squaredNorm();
            total += half * rule.weights(q) * p2;
        }
    }
    return total;
}

}  // namespace kerneig

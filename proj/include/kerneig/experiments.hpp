#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerneig/discrete_l2.hpp"
#include "kerneig/eigensolve.hpp"
#include "kerneig/newton_greedy.hpp"

namespace kerneig {

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

/// Numeric table written as CSV: header row, comma separated, shortest
/// round-trip decimal representation. Missing values are NaN ("nan").
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const;
    double at(std::size_t row, const std::string& name) const { return rows.at(row).at(column_index(name)); }
};

void write_csv(std::ostream& out, const Table& table);
Table read_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Slope fitting
// ---------------------------------------------------------------------------

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    Eigen::Index used = 0;
    Eigen::Index excluded = 0;  ///< nonpositive or non-finite values in the window
};

/// Least-squares slope of log y against log x over indices [first, last].
/// Nonpositive y are skipped and counted; fewer than two usable samples throws.
FitResult fit_decay_rate(std::span<const double> xs, std::span<const double> ys, Eigen::Index first,
                         Eigen::Index last);

/// Measured decay with a fitted slope compared against a reference.
struct DecayReport {
    std::vector<double> xs;
    std::vector<double> ys;
    Eigen::Index fit_first = 0;  ///< window into xs, inclusive
    Eigen::Index fit_last = 0;
    double fit_slope = 0.0;
    double reference_slope = 0.0;
    double tolerance = 0.0;
    Eigen::Index excluded = 0;
    bool passed = false;
};

Table decay_data_table(const DecayReport& report);
Table decay_summary_table(const DecayReport& report);
DecayReport decay_report_from_tables(const Table& data, const Table& summary);

/// Window [10, n/2] expressed as inclusive indices into a 1-based sequence of length n.
std::pair<Eigen::Index, Eigen::Index> default_fit_window(Eigen::Index n);

inline constexpr double kSlopeTolerance = 0.25;

// ---------------------------------------------------------------------------
// Matern kernels on the unit disk
// ---------------------------------------------------------------------------

struct MaternRun {
    int beta = 0;
    int dim = 2;
    double shape = 0.0;
    Eigen::Index grid_m = 0;
    Eigen::Index requested = 0;
    Eigen::Index achieved = 0;
    bool breakdown = false;
    Eigen::VectorXd eigenvalues;  ///< lambda_{j,n}, descending
    Eigen::Index unstable = 0;
    std::vector<double> gaps;     ///< total - sum_{j<=k} lambda_{j,k}, k = 1..achieved
    double total = 0.0;           ///< pi K(0, 0)
    double trace_residual = 0.0;  ///< |sum lambda + ||P||^2 - total| / total
    double power_min_residual = 0.0;
};

MaternRun run_matern(int beta, Eigen::Index grid_m, Eigen::Index n, double shape = 4.0,
                     Criterion criterion = Criterion::linf);

/// Slope of lambda_{j,n} against j over [10, n/2], reference -(beta + d) / d.
DecayReport matern_decay_report(const MaternRun& run);
DecayReport run_matern_decay(int beta, Eigen::Index grid_m, Eigen::Index n, double shape = 4.0);

struct SumGapReport {
    DecayReport decay;             ///< passed: slope within [lower, upper]
    double proven_slope = 0.0;     ///< -beta / d
    double observed_slope = 0.0;   ///< -(beta + d/2) / d
    double lower = 0.0;
    double upper = 0.0;
    bool closer_to_observed = false;
    Eigen::Index negative_gaps = 0;
};

SumGapReport matern_gap_report(const MaternRun& run);
SumGapReport run_matern_sum_gap(int beta, Eigen::Index grid_m, Eigen::Index n, double shape = 4.0);

// ---------------------------------------------------------------------------
// Brownian bridge kernels on [0, 1]
// ---------------------------------------------------------------------------

/// ||P||_{L2} along n for the direct and both greedy constructions, next to
/// the optimal-subspace values. Entries with a negative squared power are NaN.
struct BbPowerReport {
    int beta = 1;
    double eps = 0.0;
    Eigen::Index N = 0;
    Eigen::Index n = 0;
    std::uint64_t seed = 0;
    double total = 0.0;  ///< integral of K(x, x)

    /// Columns: n, direct, greedy_linf, greedy_l2, optimal_direct, oracle,
    /// oracle_2n, oracle_half.
    Table table;

    bool direct_failed = false;  ///< Cholesky of the kernel matrix failed
    std::string direct_error;
    Eigen::Index direct_nonpositive = 0;
    Eigen::Index direct_unstable = 0;
    Eigen::Index direct_negative_power = 0;
    Eigen::Index achieved_linf = 0;
    Eigen::Index achieved_l2 = 0;
    Eigen::Index greedy_negative_power = 0;
    bool greedy_breakdown = false;
    double greedy_min_residual = 0.0;  ///< most negative raw residual over both greedy runs, relative to max K(x,x)
    double trace_residual = 0.0;       ///< exact identity residual for greedy linf at full size
    bool instability = false;
};

BbPowerReport run_bb_power_decay(int beta, double eps, Eigen::Index N, Eigen::Index n, std::uint64_t seed = 0);

/// Per-index eigenvalue and eigenfunction comparison against the exact system.
struct BbEigsReport {
    int beta = 1;
    double eps = 0.0;
    Eigen::Index N = 0;
    Eigen::Index n = 0;
    std::uint64_t seed = 0;
    Criterion criterion = Criterion::linf;
    GramianMode gramian = GramianMode::exact;
    Method method = Method::newton;

    /// Columns: j, lambda_jn, lambda_exact, gap, eigenfunction_error, unstable.
    Table table;

    Eigen::Index achieved = 0;
    bool breakdown = false;
    bool ill_conditioned = false;  ///< direct method: Cholesky failure
    double min_gap = 0.0;
    Eigen::Index nonpositive = 0;
    Eigen::Index unstable = 0;
    double trace_residual = 0.0;  ///< trace identity against the integral (exact) or quadrature (discrete) of K(x, x); NaN for direct
    bool instability = false;
};

inline constexpr double kGapSlack = 1e-10;

/// Method newton selects n greedy points and diagonalizes their Newton Gramian;
/// method direct diagonalizes the pencil on all N points and keeps the first n
/// eigencouples. Breakdown and ill-conditioning are reported, not thrown.
BbEigsReport run_bb_eigencouples(int beta, double eps, Eigen::Index N, Eigen::Index n, std::uint64_t seed = 0,
                                 Criterion criterion = Criterion::linf, GramianMode gramian = GramianMode::exact,
                                 Method method = Method::newton);

/// Selection trace: step, candidate, x0[, x1], score, residual_max.
Table greedy_trace_table(const GreedyResult& result, const QuadratureSet& candidates);

/// Evaluation grid for eigenfunction errors.
inline constexpr Eigen::Index kEvaluationGrid = 1001;

}  // namespace kerneig

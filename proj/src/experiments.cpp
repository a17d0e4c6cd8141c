#include "kerneig/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "kerneig/linalg.hpp"
#include "kerneig/pointsets.hpp"

namespace kerneig {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sqrt_or_nan(double squared) { return squared >= 0.0 ? std::sqrt(squared) : kNaN; }

}  // namespace

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::size_t Table::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("table has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    char buf[32];
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw std::invalid_argument("write_csv: ragged row");
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, row[c]);
            if (c) out << ',';
            out.write(buf, end - buf);
        }
        out << '\n';
    }
}

Table read_csv(std::istream& in) {
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: missing header");
    {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t stop = std::min(line.find(',', start), line.size());
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + stop, value);
            if (ec != std::errc() || ptr != line.data() + stop)
                throw std::runtime_error("read_csv: bad number '" + line.substr(start, stop - start) + "'");
            row.push_back(value);
            start = stop + 1;
        }
        if (row.size() != table.columns.size()) throw std::runtime_error("read_csv: ragged row");
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

FitResult fit_decay_rate(std::span<const double> xs, std::span<const double> ys, Eigen::Index first,
                         Eigen::Index last) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_decay_rate: length mismatch");
    if (first < 0 || last >= static_cast<Eigen::Index>(xs.size()) || last - first + 1 < 2)
        throw std::invalid_argument("fit_decay_rate: window must hold at least two samples");
    FitResult fit;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (Eigen::Index i = first; i <= last; ++i) {
        const double x = xs[static_cast<std::size_t>(i)], y = ys[static_cast<std::size_t>(i)];
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(y)) {
            ++fit.excluded;
            continue;
        }
        const double lx = std::log(x), ly = std::log(y);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
        ++fit.used;
    }
    if (fit.used < 2) throw std::invalid_argument("fit_decay_rate: fewer than two positive samples in the window");
    const double k = static_cast<double>(fit.used);
    const double denom = k * sxx - sx * sx;
    if (!(denom > 0.0)) throw std::invalid_argument("fit_decay_rate: degenerate abscissae");
    fit.slope = (k * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / k;
    return fit;
}

std::pair<Eigen::Index, Eigen::Index> default_fit_window(Eigen::Index n) { return {9, n / 2 - 1}; }

Table decay_data_table(const DecayReport& report) {
    Table t{{"index", "x", "y", "in_window"}, {}};
    for (std::size_t i = 0; i < report.xs.size(); ++i) {
        const auto at = static_cast<Eigen::Index>(i);
        const bool in = at >= report.fit_first && at <= report.fit_last;
        t.rows.push_back({static_cast<double>(i), report.xs[i], report.ys[i], in ? 1.0 : 0.0});
    }
    return t;
}

Table decay_summary_table(const DecayReport& r) {
    return Table{{"fit_first", "fit_last", "fit_slope", "reference_slope", "tolerance", "excluded", "passed"},
                 {{static_cast<double>(r.fit_first), static_cast<double>(r.fit_last), r.fit_slope,
                   r.reference_slope, r.tolerance, static_cast<double>(r.excluded), r.passed ? 1.0 : 0.0}}};
}

DecayReport decay_report_from_tables(const Table& data, const Table& summary) {
    DecayReport r;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        r.xs.push_back(data.at(i, "x"));
        r.ys.push_back(data.at(i, "y"));
    }
    r.fit_first = static_cast<Eigen::Index>(summary.at(0, "fit_first"));
    r.fit_last = static_cast<Eigen::Index>(summary.at(0, "fit_last"));
    r.fit_slope = summary.at(0, "fit_slope");
    r.reference_slope = summary.at(0, "reference_slope");
    r.tolerance = summary.at(0, "tolerance");
    r.excluded = static_cast<Eigen::Index>(summary.at(0, "excluded"));
    r.passed = summary.at(0, "passed") != 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Matern
// ---------------------------------------------------------------------------

MaternRun run_matern(int beta, Eigen::Index grid_m, Eigen::Index n, double shape, Criterion criterion) {
    const MaternKernel kernel(MaternSpec{beta, shape, 2});
    const QuadratureSet grid = disk_grid(grid_m);
    const GreedyResult greedy = greedy_select(kernel, grid, n, criterion);

    MaternRun run;
    run.beta = beta;
    run.dim = kernel.dimension();
    run.shape = shape;
    run.grid_m = grid.size();
    run.requested = n;
    run.achieved = greedy.basis.size();
    run.breakdown = greedy.breakdown;
    run.total = kernel_trace(kernel);

    const Eigen::MatrixXd g = newton_l2_gramian(greedy.basis, kernel, grid, GramianMode::discrete);
    const EigenApproximation approx = eigs_newton(g);
    run.eigenvalues = approx.eigenvalues;
    run.unstable = approx.unstable_count();

    // Along a nested greedy sequence the leading block of G is the Gramian of
    // the first k Newton functions, and sum_j lambda_{j,k} is its trace.
    double mass = 0.0;
    for (Eigen::Index k = 0; k < g.rows(); ++k) {
        mass += g(k, k);
        run.gaps.push_back(run.total - mass);
    }
    const PowerNorm power = power_l2_norm(greedy.basis, grid);
    run.power_min_residual = power.min_residual;
    run.trace_residual = std::abs(g.trace() + power.l2 * power.l2 - run.total) / run.total;
    return run;
}

namespace {

DecayReport fitted(std::vector<double> xs, std::vector<double> ys) {
    DecayReport r;
    r.xs = std::move(xs);
    r.ys = std::move(ys);
    const auto [first, last] = default_fit_window(static_cast<Eigen::Index>(r.xs.size()));
    r.fit_first = first;
    r.fit_last = last;
    const FitResult fit = fit_decay_rate(r.xs, r.ys, first, last);
    r.fit_slope = fit.slope;
    r.excluded = fit.excluded;
    r.tolerance = kSlopeTolerance;
    return r;
}

std::vector<double> one_based(Eigen::Index count) {
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i + 1);
    return xs;
}

}  // namespace

DecayReport matern_decay_report(const MaternRun& run) {
    std::vector<double> ys(run.eigenvalues.data(), run.eigenvalues.data() + run.eigenvalues.size());
    DecayReport r = fitted(one_based(run.eigenvalues.size()), std::move(ys));
    const double d = run.dim;
    r.reference_slope = -(run.beta + d) / d;
    r.passed = std::abs(r.fit_slope - r.reference_slope) <= r.tolerance;
    return r;
}

DecayReport run_matern_decay(int beta, Eigen::Index grid_m, Eigen::Index n, double shape) {
    return matern_decay_report(run_matern(beta, grid_m, n, shape));
}

SumGapReport matern_gap_report(const MaternRun& run) {
    SumGapReport out;
    out.decay = fitted(one_based(static_cast<Eigen::Index>(run.gaps.size())), run.gaps);
    const double d = run.dim;
    out.proven_slope = -run.beta / d;
    out.observed_slope = -(run.beta + d / 2.0) / d;
    out.lower = -(run.beta + d) / d - kSlopeTolerance;
    out.upper = -run.beta / d + kSlopeTolerance;
    out.decay.reference_slope = out.observed_slope;
    const double s = out.decay.fit_slope;
    out.decay.passed = s >= out.lower && s <= out.upper;
    out.closer_to_observed = std::abs(s - out.observed_slope) < std::abs(s - out.proven_slope);
    for (double g : run.gaps)
        if (g < 0.0) ++out.negative_gaps;
    return out;
}

SumGapReport run_matern_sum_gap(int beta, Eigen::Index grid_m, Eigen::Index n, double shape) {
    return matern_gap_report(run_matern(beta, grid_m, n, shape));
}

// ---------------------------------------------------------------------------
// Brownian bridge
// ---------------------------------------------------------------------------

namespace {

// Most negative raw residual relative to the largest diagonal.
double relative_min_residual(const NewtonBasis& basis) {
    return basis.residual.minCoeff() / basis.max_diagonal;
}

}  // namespace

BbPowerReport run_bb_power_decay(int beta, double eps, Eigen::Index N, Eigen::Index n, std::uint64_t seed) {
    const BrownianBridgeKernel kernel(BrownianBridgeSpec{beta, eps, 0});
    const auto squared = kernel.l2_squared();
    const QuadratureSet points = random_interval_points(N, seed);
    if (n > N) throw std::invalid_argument("run_bb_power_decay: n must not exceed N");

    BbPowerReport rep;
    rep.beta = beta;
    rep.eps = eps;
    rep.N = N;
    rep.n = n;
    rep.seed = seed;
    rep.total = kernel_trace(kernel);
    rep.table.columns = {"n", "direct", "greedy_linf", "greedy_l2", "optimal_direct", "oracle", "oracle_2n", "oracle_half"};

    const Eigen::MatrixXd b_exact = kernel_matrix(*squared, points.points());
    std::vector<double> direct(n + 1, kNaN), optimal(n + 1, kNaN);
    direct[0] = optimal[0] = std::sqrt(rep.total);
    try {
        // Selection-time quadrature on the N points, performance measured exactly.
        const GramianPair pair = assemble_pencil(kernel, points.points(), points, GramianMode::discrete);
        const EigenApproximation approx = eigs_direct(pair);
        rep.direct_nonpositive = approx.nonpositive_count();
        rep.direct_unstable = approx.unstable_count();
        double mass = 0.0;
        for (Eigen::Index k = 1; k <= n; ++k) {
            const auto c = approx.coefficients.col(k - 1);
            mass += c.dot(b_exact * c);
            direct[k] = sqrt_or_nan(rep.total - mass);
        }
        const GramianPair exact_pair{pair.A, b_exact, GramianMode::exact, 0.0};
        const EigenApproximation best = eigs_direct(exact_pair);
        rep.direct_nonpositive += best.nonpositive_count();
        rep.direct_unstable += best.unstable_count();
        mass = 0.0;
        for (Eigen::Index k = 1; k <= n; ++k) {
            mass += best.eigenvalues(k - 1);
            optimal[k] = sqrt_or_nan(rep.total - mass);
        }
    } catch (const IllConditionedGramian& e) {
        rep.direct_failed = true;
        rep.direct_error = e.what();
    }
    for (Eigen::Index k = 1; k <= n; ++k) {
        if (!rep.direct_failed && std::isnan(direct[k])) ++rep.direct_negative_power;
    }

    std::vector<double> greedy_power[2];
    rep.greedy_min_residual = 0.0;
    for (int which = 0; which < 2; ++which) {
        const Criterion criterion = which == 0 ? Criterion::linf : Criterion::l2;
        const GreedyResult greedy = greedy_select(kernel, points, n, criterion);
        (which == 0 ? rep.achieved_linf : rep.achieved_l2) = greedy.basis.size();
        rep.greedy_breakdown = rep.greedy_breakdown || greedy.breakdown;
        rep.greedy_min_residual = std::min(rep.greedy_min_residual, relative_min_residual(greedy.basis));

        const Eigen::MatrixXd g = newton_l2_gramian(greedy.basis, kernel, points, GramianMode::exact);
        auto& power = greedy_power[which];
        power.assign(n + 1, kNaN);
        power[0] = std::sqrt(rep.total);
        double mass = 0.0;
        for (Eigen::Index k = 1; k <= greedy.basis.size(); ++k) {
            mass += g(k - 1, k - 1);
            power[k] = sqrt_or_nan(rep.total - mass);
            if (std::isnan(power[k])) ++rep.greedy_negative_power;
        }
        if (which == 0 && greedy.basis.size() > 0) {
            const double p2 = power_l2_squared_interval(greedy.basis, kernel);
            rep.trace_residual = std::abs(g.trace() + p2 - rep.total) / rep.total;
        }
    }

    for (Eigen::Index k = 0; k <= n; ++k) {
        rep.table.rows.push_back({static_cast<double>(k), direct[k], greedy_power[0][k], greedy_power[1][k],
                                  optimal[k], std::sqrt(kernel.tail_sum(static_cast<int>(k))),
                                  std::sqrt(kernel.tail_sum(static_cast<int>(2 * k))),
                                  std::sqrt(kernel.tail_sum(static_cast<int>(k / 2)))});
    }

    const bool direct_instability = rep.direct_failed || rep.direct_nonpositive > 0 || rep.direct_negative_power > 0;
    rep.instability = direct_instability || rep.greedy_breakdown || rep.greedy_negative_power > 0 ||
                      rep.greedy_min_residual < -kBreakdownThreshold;
    return rep;
}

BbEigsReport run_bb_eigencouples(int beta, double eps, Eigen::Index N, Eigen::Index n, std::uint64_t seed,
                                 Criterion criterion, GramianMode gramian, Method method) {
    const BrownianBridgeKernel kernel(BrownianBridgeSpec{beta, eps, 0});
    const QuadratureSet points = random_interval_points(N, seed);

    BbEigsReport rep;
    rep.beta = beta;
    rep.eps = eps;
    rep.N = N;
    rep.n = n;
    rep.seed = seed;
    rep.criterion = criterion;
    rep.gramian = gramian;
    rep.method = method;
    rep.table.columns = {"j", "lambda_jn", "lambda_exact", "gap", "eigenfunction_error", "unstable"};

    const QuadratureSet grid = interval_grid(kEvaluationGrid);
    const double total = kernel_trace(kernel);
    EigenApproximation approx;
    Eigen::MatrixXd approx_at_grid;

    if (method == Method::newton) {
        const GreedyResult greedy = greedy_select(kernel, points, n, criterion);
        const NewtonBasis& basis = greedy.basis;
        rep.achieved = basis.size();
        rep.breakdown = greedy.breakdown;
        const Eigen::MatrixXd g = newton_l2_gramian(basis, kernel, points, gramian);
        approx = eigs_newton(g);
        Eigen::MatrixXd newton_at_grid(grid.size(), basis.size());
        for (Eigen::Index q = 0; q < grid.size(); ++q)
            newton_at_grid.row(q) = newton_evaluate(basis, kernel, grid.point(q)).transpose();
        approx_at_grid = newton_at_grid * approx.coefficients;
        double p2 = 0.0, mass = total;
        if (gramian == GramianMode::exact) {
            p2 = power_l2_squared_interval(basis, kernel);
        } else {
            p2 = std::pow(power_l2_norm(basis, points).l2, 2);
            mass = 0.0;
            for (Eigen::Index q = 0; q < points.size(); ++q) mass += kernel.diagonal(points.point(q));
            mass *= points.weight();
        }
        rep.trace_residual = std::abs(g.trace() + p2 - mass) / mass;
        rep.breakdown = rep.breakdown || relative_min_residual(basis) < -kBreakdownThreshold;
    } else {
        try {
            const GramianPair pair = assemble_pencil(kernel, points.points(), points, gramian);
            approx = eigs_direct(pair);
        } catch (const IllConditionedGramian&) {
            rep.ill_conditioned = true;
            rep.instability = true;
            rep.min_gap = std::numeric_limits<double>::quiet_NaN();
            rep.trace_residual = std::numeric_limits<double>::quiet_NaN();
            return rep;
        }
        const Eigen::Index keep = std::min<Eigen::Index>(n, approx.size());
        approx.eigenvalues.conservativeResize(keep);
        approx.coefficients.conservativeResize(Eigen::NoChange, keep);
        approx.unstable.resize(static_cast<std::size_t>(keep));
        rep.achieved = keep;
        approx_at_grid = kernel_matrix(kernel, grid.points(), points.points()) * approx.coefficients;
        rep.trace_residual = std::numeric_limits<double>::quiet_NaN();
    }
    rep.nonpositive = approx.nonpositive_count();
    rep.unstable = approx.unstable_count();

    rep.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < approx.size(); ++j) {
        const double exact = kernel.eigenvalue(static_cast<int>(j + 1));
        const double gap = exact - approx.eigenvalues(j);
        rep.min_gap = std::min(rep.min_gap, gap);
        double err2 = 0.0;
        for (Eigen::Index q = 0; q < grid.size(); ++q) {
            const double truth = std::sqrt(exact) * kernel.eigenfunction(static_cast<int>(j + 1), grid.point(q));
            const double diff = std::abs(approx_at_grid(q, j)) - std::abs(truth);
            err2 += diff * diff;
        }
        rep.table.rows.push_back({static_cast<double>(j + 1), approx.eigenvalues(j), exact, gap,
                                  std::sqrt(err2 / static_cast<double>(grid.size())),
                                  approx.unstable[static_cast<std::size_t>(j)] ? 1.0 : 0.0});
    }
    rep.instability = rep.breakdown || rep.nonpositive > 0 || rep.unstable > 0;
    return rep;
}

Table greedy_trace_table(const GreedyResult& result, const QuadratureSet& candidates) {
    Table t;
    t.columns = {"step", "candidate"};
    for (int k = 0; k < candidates.dimension(); ++k) t.columns.push_back("x" + std::to_string(k));
    t.columns.push_back("score");
    t.columns.push_back("residual_max");
    for (const GreedyStep& s : result.trace) {
        std::vector<double> row{static_cast<double>(s.step), static_cast<double>(s.candidate)};
        for (int k = 0; k < candidates.dimension(); ++k) row.push_back(candidates.points()(k, s.candidate));
        row.push_back(s.score);
        row.push_back(s.residual_max);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace kerneig

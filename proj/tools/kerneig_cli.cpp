// Command-line driver for the kernel eigenvalue experiments.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "kerneig/discrete_l2.hpp"
#include "kerneig/eigensolve.hpp"
#include "kerneig/experiments.hpp"
#include "kerneig/kernels.hpp"
#include "kerneig/newton_greedy.hpp"
#include "kerneig/pointsets.hpp"

namespace {

using namespace kerneig;

struct Options {
    int beta = 1;
    double eps = 0.0;
    double shape = 4.0;
    long grid_m = 10000;
    long points = 500;
    long n = 50;
    std::uint64_t seed = 0;
    std::string criterion = "linf";
    std::string method = "newton";
    std::string gramian = "exact";
    std::string domain = "interval";
    std::string kernel = "bb";
    std::string out;
    std::string gnuplot;
    std::string gramian_out;
};

// Writes to --out when given, otherwise to stdout.
void emit(const Options& opt, const Table& table, const std::string& suffix = "") {
    if (opt.out.empty()) {
        write_csv(std::cout, table);
        return;
    }
    std::ofstream file(opt.out + suffix);
    if (!file) throw std::runtime_error("cannot open " + opt.out + suffix);
    write_csv(file, table);
}

void emit_gnuplot(const Options& opt, const std::string& body) {
    if (opt.gnuplot.empty()) return;
    std::ofstream file(opt.gnuplot);
    if (!file) throw std::runtime_error("cannot open " + opt.gnuplot);
    file << "set datafile separator ','\nset logscale xy\nset key top right\n" << body;
}

std::string data_path(const Options& opt) { return opt.out.empty() ? "data.csv" : opt.out; }

int matern_decay(const Options& opt) {
    const MaternRun run = run_matern(opt.beta, opt.grid_m, opt.n, opt.shape);
    const DecayReport rep = matern_decay_report(run);
    emit(opt, decay_data_table(rep));
    if (!opt.out.empty()) emit(opt, decay_summary_table(rep), ".summary.csv");
    std::fprintf(stderr,
                 "matern%d grid m=%ld n=%ld: slope %.4f, reference %.4f, tolerance %.2f, trace residual %.2e -> %s\n",
                 opt.beta, static_cast<long>(run.grid_m), static_cast<long>(run.achieved), rep.fit_slope,
                 rep.reference_slope, rep.tolerance, run.trace_residual, rep.passed ? "PASS" : "FAIL");
    emit_gnuplot(opt, "plot '" + data_path(opt) + "' every ::1 using 2:3 with lines title 'lambda_{j,n}', " +
                          "x**(" + std::to_string(rep.reference_slope) + ")*" + std::to_string(rep.ys.front()) +
                          " title 'reference'\n");
    return rep.passed ? 0 : 1;
}

int matern_gap(const Options& opt) {
    const MaternRun run = run_matern(opt.beta, opt.grid_m, opt.n, opt.shape);
    const SumGapReport rep = matern_gap_report(run);
    emit(opt, decay_data_table(rep.decay));
    if (!opt.out.empty()) emit(opt, decay_summary_table(rep.decay), ".summary.csv");
    std::fprintf(stderr,
                 "matern%d sum gap: slope %.4f in [%.3f, %.3f]; proven %.3f, observed-rate %.3f, closer to %s; "
                 "negative gaps %ld -> %s\n",
                 opt.beta, rep.decay.fit_slope, rep.lower, rep.upper, rep.proven_slope, rep.observed_slope,
                 rep.closer_to_observed ? "observed" : "proven", static_cast<long>(rep.negative_gaps),
                 rep.decay.passed ? "PASS" : "FAIL");
    emit_gnuplot(opt, "plot '" + data_path(opt) + "' every ::1 using 2:3 with lines title 'gap(n)'\n");
    return rep.decay.passed && rep.negative_gaps == 0 ? 0 : 1;
}

int bb_power(const Options& opt) {
    const BbPowerReport rep = run_bb_power_decay(opt.beta, opt.eps, opt.points, opt.n, opt.seed);
    emit(opt, rep.table);
    bool above_oracle = true;
    for (std::size_t k = 0; k < rep.table.rows.size(); ++k) {
        for (const char* column : {"greedy_linf", "greedy_l2"}) {
            const double value = rep.table.at(k, column);
            if (!std::isnan(value) && value < rep.table.at(k, "oracle") - 1e-6) above_oracle = false;
        }
    }
    std::fprintf(stderr,
                 "bb beta=%d eps=%g N=%ld n=%ld: direct %s (nonpositive %ld, negative power %ld); greedy linf %ld, "
                 "l2 %ld points, negative power %ld; instability %s; greedy above oracle: %s\n",
                 opt.beta, opt.eps, static_cast<long>(rep.N), static_cast<long>(rep.n),
                 rep.direct_failed ? "FAILED" : "ok", static_cast<long>(rep.direct_nonpositive),
                 static_cast<long>(rep.direct_negative_power), static_cast<long>(rep.achieved_linf),
                 static_cast<long>(rep.achieved_l2), static_cast<long>(rep.greedy_negative_power),
                 rep.instability ? "yes" : "no", above_oracle ? "yes" : "NO");
    if (rep.direct_failed) std::fprintf(stderr, "direct: %s\n", rep.direct_error.c_str());
    const std::string file = data_path(opt);
    emit_gnuplot(opt, "plot for [c in 'direct greedy_linf greedy_l2 oracle oracle_half'] '" + file +
                          "' using 1:(column(c)) with lines title c\n");
    return above_oracle ? 0 : 1;
}

int bb_eigs(const Options& opt) {
    const BbEigsReport rep = run_bb_eigencouples(opt.beta, opt.eps, opt.points, opt.n, opt.seed,
                                                 parse_criterion(opt.criterion), parse_gramian_mode(opt.gramian),
                                                 parse_method(opt.method));
    emit(opt, rep.table);
    const bool ok = rep.min_gap >= -kGapSlack;
    std::fprintf(stderr, "bb beta=%d eps=%g N=%ld n=%ld (%s): min gap %.3e, nonpositive %ld, trace residual %.2e -> %s\n",
                 opt.beta, opt.eps, static_cast<long>(rep.N), static_cast<long>(rep.achieved), opt.method.c_str(),
                 rep.min_gap, static_cast<long>(rep.nonpositive), rep.trace_residual, ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

int greedy_trace(const Options& opt) {
    const KernelPtr kernel = make_kernel(opt.kernel, opt.beta, opt.eps, opt.shape);
    const Domain domain = parse_domain(opt.domain);
    if ((domain == Domain::unit_disk) != (kernel->dimension() == 2))
        throw std::invalid_argument("kernel " + kernel->id() + " does not live on the " + opt.domain);
    const QuadratureSet candidates =
        domain == Domain::unit_disk ? disk_grid(opt.grid_m) : random_interval_points(opt.points, opt.seed);
    const GreedyResult result = greedy_select(*kernel, candidates, opt.n, parse_criterion(opt.criterion));
    emit(opt, greedy_trace_table(result, candidates));
    if (!opt.gramian_out.empty()) {
        std::ofstream file(opt.gramian_out);
        write_matrix_csv(file, newton_l2_gramian(result.basis, *kernel, candidates, parse_gramian_mode(opt.gramian)));
    }
    const PowerNorm power = power_l2_norm(result.basis, candidates);
    std::fprintf(stderr, "%s on %ld candidates: %ld points (%s), ||P||_L2 %.6e, min residual %.3e\n",
                 kernel->id().c_str(), static_cast<long>(candidates.size()), static_cast<long>(result.basis.size()),
                 result.breakdown ? "breakdown" : "complete", power.l2, power.min_residual);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mercer eigenvalue approximation on kernel-translate subspaces"};
    app.require_subcommand(1);
    Options opt;

    auto shared = [&opt](CLI::App* sub) {
        sub->add_option("--beta", opt.beta, "kernel order beta");
        sub->add_option("--eps", opt.eps, "Brownian bridge eps");
        sub->add_option("--shape", opt.shape, "Matern shape parameter");
        sub->add_option("--grid-m", opt.grid_m, "target disk grid size");
        sub->add_option("--points", opt.points, "number of random points in (0,1)");
        sub->add_option("--n", opt.n, "number of greedy points");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--criterion", opt.criterion, "greedy criterion")->check(CLI::IsMember({"linf", "l2"}));
        sub->add_option("--method", opt.method, "eigen method")->check(CLI::IsMember({"direct", "newton"}));
        sub->add_option("--gramian", opt.gramian, "L2 Gramian mode")->check(CLI::IsMember({"discrete", "exact"}));
        sub->add_option("--out", opt.out, "CSV output path (stdout if omitted)");
        sub->add_option("--gnuplot", opt.gnuplot, "write a gnuplot script for the output");
    };

    auto* decay = app.add_subcommand("matern-decay", "eigenvalue decay slope of Matern kernels on the unit disk");
    auto* gap = app.add_subcommand("matern-gap", "eigenvalue sum gap slope of Matern kernels on the unit disk");
    auto* power = app.add_subcommand("bb-power", "Power Function decay for Brownian bridge kernels");
    auto* eigs = app.add_subcommand("bb-eigs", "eigencouple convergence for Brownian bridge kernels");
    auto* trace = app.add_subcommand("greedy-trace", "greedy selection trace");
    for (auto* sub : {decay, gap, power, eigs, trace}) shared(sub);
    trace->add_option("--kernel", opt.kernel, "kernel id: matern0..matern3 or bb");
    trace->add_option("--domain", opt.domain, "candidate domain")->check(CLI::IsMember({"disk", "interval"}));
    trace->add_option("--gramian-out", opt.gramian_out, "write the Newton basis L2 Gramian as CSV");

    CLI11_PARSE(app, argc, argv);

    // per-subcommand defaults: 200 greedy points on the disk, 100 points for eigencouples
    for (auto* sub : {decay, gap})
        if (*sub && sub->count("--n") == 0) opt.n = 200;
    if (*eigs && eigs->count("--points") == 0) opt.points = 100;

    try {
        if (*decay) return matern_decay(opt);
        if (*gap) return matern_gap(opt);
        if (*power) return bb_power(opt);
        if (*eigs) return bb_eigs(opt);
        return greedy_trace(opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

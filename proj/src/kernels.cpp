#include "kerneig/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace kerneig {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxTruncation = 10000;
constexpr double kTruncationRatio = 1e-16;

// Bernoulli numbers B_0..B_16.
constexpr std::array<double, 17> kBernoulli = {
    1.0,           -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0, 0.0, -1.0 / 30.0, 0.0,
    5.0 / 66.0,    0.0,  -691.0 / 2730.0, 0.0, 7.0 / 6.0, 0.0, -3617.0 / 510.0};

constexpr int kMaxClosedFormBeta = 8;

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

double bernoulli_polynomial(int n, double t) {
    // B_n(t) = sum_i C(n, i) B_i t^{n-i}, Horner in t.
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) acc = acc * t + binomial(n, i) * kBernoulli[i];
    return acc;
}

// S_k(u) = sum_{j>=1} cos(j pi u) / (j pi)^{2k} for u in [0, 2].
double cosine_series_closed_form(int k, double u) {
    double factorial = 1.0;
    for (int i = 2; i <= 2 * k; ++i) factorial *= i;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    return sign * std::ldexp(1.0, 2 * k - 1) * bernoulli_polynomial(2 * k, 0.5 * u) / factorial;
}

// lambda_j(eps, beta) - lambda_j(0, beta), without cancellation.
double eps_correction(int beta, double eps, int j) {
    const double jp2 = (j * kPi) * (j * kPi);
    return std::pow(jp2, -beta) * std::expm1(-beta * std::log1p(eps * eps / jp2));
}

int correction_truncation(int beta, double eps) {
    if (eps == 0.0) return 0;
    const double threshold = kTruncationRatio * std::pow(kPi * kPi + eps * eps, -beta);
    for (int j = 1; j <= kMaxTruncation; ++j)
        if (std::abs(eps_correction(beta, eps, j)) <= threshold) return j;
    return kMaxTruncation;
}

// sum_{j<=terms} c_j [cos(j pi u) - cos(j pi v)], with cosines generated by
// complex rotation and re-anchored periodically.
template <class Coefficient>
double cosine_difference_sum(double u, double v, int terms, Coefficient&& coefficient) {
    const double cu = std::cos(kPi * u), su = std::sin(kPi * u);
    const double cv = std::cos(kPi * v), sv = std::sin(kPi * v);
    double ru = cu, iu = su, rv = cv, iv = sv;
    double acc = 0.0;
    for (int j = 1; j <= terms; ++j) {
        if (j % 256 == 0) {
            ru = std::cos(j * kPi * u), iu = std::sin(j * kPi * u);
            rv = std::cos(j * kPi * v), iv = std::sin(j * kPi * v);
        }
        acc += coefficient(j) * (ru - rv);
        const double nru = ru * cu - iu * su, niu = ru * su + iu * cu;
        const double nrv = rv * cv - iv * sv, niv = rv * sv + iv * cv;
        ru = nru, iu = niu, rv = nrv, iv = niv;
    }
    return acc;
}

constexpr double kMaxGreenEps = 300.0;

double bb_value(int beta, double eps, double x, double y, int correction_terms) {
    const double u = std::abs(x - y);
    const double v = x + y;
    if (beta > kMaxClosedFormBeta) {
        BrownianBridgeSpec spec{beta, eps, 0};
        return bb_series_eval(spec, x, y, default_truncation(beta, eps));
    }
    if (beta == 1 && eps > 0.0 && eps < kMaxGreenEps) {
        // Green's function of -u'' + eps^2 u with Dirichlet conditions
        const double lo = std::min(x, y), hi = std::max(x, y);
        return std::sinh(eps * lo) * std::sinh(eps * (1.0 - hi)) / (eps * std::sinh(eps));
    }
    double value = cosine_series_closed_form(beta, u) - cosine_series_closed_form(beta, v);
    if (eps != 0.0)
        value += cosine_difference_sum(u, v, correction_terms,
                                       [&](int j) { return eps_correction(beta, eps, j); });
    return value;
}

double bb_total(int beta, double eps, int correction_terms) {
    if (beta > kMaxClosedFormBeta) {
        double acc = 0.0;
        for (int j = default_truncation(beta, eps); j >= 1; --j)
            acc += std::pow(j * j * kPi * kPi + eps * eps, -beta);
        return acc;
    }
    double total = cosine_series_closed_form(beta, 0.0);
    for (int j = correction_terms; j >= 1; --j) total += eps_correction(beta, eps, j);
    return total;
}

}  // namespace

int default_truncation(int beta, double eps) {
    BrownianBridgeSpec spec{beta, eps, 0};
    const double threshold = kTruncationRatio * bb_eigenvalue(spec, 1);
    for (int j = 1; j <= kMaxTruncation; ++j)
        if (bb_eigenvalue(spec, j) <= threshold) return j;
    return kMaxTruncation;
}

double bb_eigenvalue(const BrownianBridgeSpec& spec, int j) {
    const double jp = j * kPi;
    return std::pow(jp * jp + spec.eps * spec.eps, -spec.beta);
}

double bb_eigenfunction(int j, double x) { return std::numbers::sqrt2 * std::sin(j * kPi * x); }

double bb_series_eval(const BrownianBridgeSpec& spec, double x, double y, int terms) {
    // 2 sin(a) sin(b) = cos(a - b) - cos(a + b)
    return cosine_difference_sum(std::abs(x - y), x + y, terms,
                                 [&](int j) { return bb_eigenvalue(spec, j); });
}

double bb_eval(const BrownianBridgeSpec& spec, double x, double y) {
    return bb_value(spec.beta, spec.eps, x, y, correction_truncation(spec.beta, spec.eps));
}

double bb_squared_kernel_eval(const BrownianBridgeSpec& spec, double x, double y) {
    return bb_value(2 * spec.beta, spec.eps, x, y, correction_truncation(2 * spec.beta, spec.eps));
}

BrownianBridgeKernel::BrownianBridgeKernel(BrownianBridgeSpec spec) : spec_(spec) {
    if (spec_.beta < 1) throw std::invalid_argument("Brownian bridge kernel needs beta >= 1");
    if (spec_.eps < 0.0) throw std::invalid_argument("Brownian bridge kernel needs eps >= 0");
    if (spec_.truncation_index <= 0) spec_.truncation_index = default_truncation(spec_.beta, spec_.eps);
    correction_terms_ = correction_truncation(spec_.beta, spec_.eps);
}

double BrownianBridgeKernel::eval(double x, double y) const {
    return bb_value(spec_.beta, spec_.eps, x, y, correction_terms_);
}

double BrownianBridgeKernel::operator()(Point x, Point y) const { return eval(x[0], y[0]); }

std::string BrownianBridgeKernel::id() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bb(beta=%d,eps=%g)", spec_.beta, spec_.eps);
    return buf;
}

std::optional<double> BrownianBridgeKernel::trace() const {
    return bb_total(spec_.beta, spec_.eps, correction_terms_);
}

std::shared_ptr<const Kernel> BrownianBridgeKernel::l2_squared() const {
    return std::make_shared<BrownianBridgeKernel>(
        BrownianBridgeSpec{2 * spec_.beta, spec_.eps, 0});
}

double BrownianBridgeKernel::eigenvalue(int j) const { return bb_eigenvalue(spec_, j); }

double BrownianBridgeKernel::eigenfunction(int j, Point x) const { return bb_eigenfunction(j, x[0]); }

double BrownianBridgeKernel::tail_sum(int n) const {
    constexpr int kDirectTerms = 20000;
    double acc = 0.0;
    for (int j = n + kDirectTerms; j > n; --j) acc += bb_eigenvalue(spec_, j);
    // Midpoint-rule remainder of the integral of (pi x)^{-2 beta}.
    const double from = n + kDirectTerms + 0.5;
    const int b = spec_.beta;
    acc += std::pow(kPi, -2.0 * b) * std::pow(from, 1.0 - 2.0 * b) / (2.0 * b - 1.0);
    return acc;
}

double matern_smoothness(int beta) {
    if (beta < 0) throw std::invalid_argument("Matern order must be nonnegative");
    return beta == 0 ? 0.05 : 0.5 * beta;
}

double matern_profile(double nu, double r) {
    if (r <= 0.0) return 1.0;
    if (nu == 0.5) return std::exp(-r);
    if (nu == 1.5) return (1.0 + r) * std::exp(-r);
    if (nu == 2.5) return (1.0 + r + r * r / 3.0) * std::exp(-r);
    if (r > 700.0) return 0.0;
    return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(r, nu) * std::cyl_bessel_k(nu, r);
}

double matern_eval(const MaternSpec& spec, Point x, Point y) {
    return MaternKernel(spec)(x, y);
}

MaternKernel::MaternKernel(MaternSpec spec) : spec_(spec), nu_(matern_smoothness(spec.beta)) {
    if (spec_.shape <= 0.0) throw std::invalid_argument("Matern shape must be positive");
}

double MaternKernel::operator()(Point x, Point y) const {
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sq += d * d;
    }
    return matern_profile(nu_, spec_.shape * std::sqrt(sq));
}

std::string MaternKernel::id() const { return "matern" + std::to_string(spec_.beta); }

std::optional<double> MaternKernel::trace() const {
    // unit disk for d = 2, unit interval otherwise
    return spec_.dim == 2 ? kPi : 1.0;
}

double kernel_trace(const Kernel& kernel) {
    if (auto t = kernel.trace()) return *t;
    throw std::invalid_argument("kernel " + kernel.id() + " has no known diagonal integral");
}

KernelPtr make_kernel(const std::string& id, int beta, double eps, double shape) {
    if (id == "bb") return std::make_shared<BrownianBridgeKernel>(BrownianBridgeSpec{beta, eps, 0});
    if (id.size() == 7 && id.starts_with("matern") && id[6] >= '0' && id[6] <= '3')
        return std::make_shared<MaternKernel>(MaternSpec{id[6] - '0', shape, 2});
    if (id == "matern") return std::make_shared<MaternKernel>(MaternSpec{beta, shape, 2});
    throw std::invalid_argument("unknown kernel id '" + id + "'");
}

}  // namespace kerneig

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

namespace kerneig {

using Point = std::span<const double>;

/// Known Mercer eigensystem of a kernel: eigenvalues lambda_j and
/// L2-orthonormal eigenfunctions phi_j, indexed from j = 1.
class Eigensystem {
public:
    virtual ~Eigensystem() = default;
    virtual double eigenvalue(int j) const = 0;
    virtual double eigenfunction(int j, Point x) const = 0;
    /// sum_{j>n} lambda_j, evaluated without cancellation against the total.
    virtual double tail_sum(int n) const = 0;
};

/// Continuous symmetric positive definite kernel on a compact domain.
/// Implementations are immutable and evaluate symmetrically: k(x, y) and
/// k(y, x) return bit-identical values.
class Kernel {
public:
    virtual ~Kernel() = default;

    virtual double operator()(Point x, Point y) const = 0;
    virtual double diagonal(Point x) const { return (*this)(x, x); }
    virtual int dimension() const = 0;
    virtual std::string id() const = 0;

    /// Integral of K(x, x) over the kernel's natural domain, when known in closed
    /// form or through the expansion.
    virtual std::optional<double> trace() const { return std::nullopt; }

    virtual const Eigensystem* eigensystem() const { return nullptr; }

    /// True when |K(x, y)| <= K(x, x) for all x, y, so that each translate
    /// attains its sup norm at its own center.
    virtual bool peaks_on_diagonal() const { return false; }

    /// Kernel K2(x, y) = (K(x, .), K(., y))_{L2}, when it can be evaluated exactly.
    virtual std::shared_ptr<const Kernel> l2_squared() const { return nullptr; }
};

using KernelPtr = std::shared_ptr<const Kernel>;

// ---------------------------------------------------------------------------
// Iterated Brownian bridge kernels on [0, 1]
// ---------------------------------------------------------------------------

struct BrownianBridgeSpec {
    int beta = 1;
    double eps = 0.0;
    int truncation_index = 0;  ///< J; 0 selects default_truncation(beta, eps)
};

/// Smallest J with lambda_J <= 1e-16 lambda_1, capped at 1e4.
int default_truncation(int beta, double eps);

/// lambda_j(eps, beta) = (j^2 pi^2 + eps^2)^(-beta).
double bb_eigenvalue(const BrownianBridgeSpec& spec, int j);

/// phi_j(x) = sqrt(2) sin(j pi x).
double bb_eigenfunction(int j, double x);

/// Plain truncated expansion sum_{j<=J} lambda_j phi_j(x) phi_j(y).
double bb_series_eval(const BrownianBridgeSpec& spec, double x, double y, int terms);

/// Full series value. eps = 0 uses the Bernoulli-polynomial closed form; eps > 0
/// adds a rapidly decaying correction series on top of it.
double bb_eval(const BrownianBridgeSpec& spec, double x, double y);

/// Same as bb_eval with beta doubled: the exact L2 inner product of two translates.
double bb_squared_kernel_eval(const BrownianBridgeSpec& spec, double x, double y);

class BrownianBridgeKernel final : public Kernel, public Eigensystem {
public:
    explicit BrownianBridgeKernel(BrownianBridgeSpec spec);

    double operator()(Point x, Point y) const override;
    int dimension() const override { return 1; }
    std::string id() const override;
    std::optional<double> trace() const override;
    const Eigensystem* eigensystem() const override { return this; }
    std::shared_ptr<const Kernel> l2_squared() const override;
    /// Holds for beta = 1, eps = 0, where K(x, y) = min(x, y) - xy.
    bool peaks_on_diagonal() const override { return spec_.beta == 1 && spec_.eps == 0.0; }

    double eigenvalue(int j) const override;
    double eigenfunction(int j, Point x) const override;
    double tail_sum(int n) const override;

    const BrownianBridgeSpec& spec() const { return spec_; }
    double eval(double x, double y) const;

private:
    BrownianBridgeSpec spec_;
    int correction_terms_;
};

// ---------------------------------------------------------------------------
// Matern kernels on R^d
// ---------------------------------------------------------------------------

struct MaternSpec {
    int beta = 1;        ///< order; native space H^{(beta + d)/2}
    double shape = 4.0;  ///< r = shape * |x - y|
    int dim = 2;
};

/// Matern smoothness nu for a given order: nu = beta / 2, except order 0, whose
/// target space H^1(R^2) has no continuous reproducing kernel. That order uses
/// the rough member nu = 0.05.
double matern_smoothness(int beta);

/// Normalized radial profile k(r) = 2^{1-nu}/Gamma(nu) r^nu K_nu(r), k(0) = 1.
double matern_profile(double nu, double r);

double matern_eval(const MaternSpec& spec, Point x, Point y);

class MaternKernel final : public Kernel {
public:
    explicit MaternKernel(MaternSpec spec);

    double operator()(Point x, Point y) const override;
    double diagonal(Point) const override { return 1.0; }
    bool peaks_on_diagonal() const override { return true; }
    int dimension() const override { return spec_.dim; }
    std::string id() const override;
    /// Integral of K(x,x) over the unit disk (dim 2) or unit interval (dim 1).
    std::optional<double> trace() const override;

    const MaternSpec& spec() const { return spec_; }
    double smoothness() const { return nu_; }

private:
    MaternSpec spec_;
    double nu_;
};

/// Closed-form or expansion-based integral of the diagonal; throws
/// std::invalid_argument when neither is available.
double kernel_trace(const Kernel& kernel);

/// Kernel zoo lookup: "matern0".."matern3", "bb".
KernelPtr make_kernel(const std::string& id, int beta, double eps, double shape = 4.0);

}  // namespace kerneig

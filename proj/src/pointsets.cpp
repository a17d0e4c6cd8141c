#include "kerneig/pointsets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace kerneig {

std::string to_string(Domain domain) {
    return domain == Domain::unit_disk ? "disk" : "interval";
}

Domain parse_domain(const std::string& name) {
    if (name == "disk") return Domain::unit_disk;
    if (name == "interval") return Domain::unit_interval;
    throw std::invalid_argument("unknown domain '" + name + "'");
}

double domain_measure(Domain domain) {
    return domain == Domain::unit_disk ? std::numbers::pi : 1.0;
}

QuadratureSet::QuadratureSet(Eigen::MatrixXd points, Domain domain)
    : points_(std::move(points)), domain_(domain) {
    if (points_.cols() == 0) throw std::invalid_argument("quadrature set must not be empty");
    const Eigen::Index expected_dim = domain_ == Domain::unit_disk ? 2 : 1;
    if (points_.rows() != expected_dim)
        throw std::invalid_argument("point dimension does not match the domain");
    weight_ = domain_measure(domain_) / static_cast<double>(points_.cols());
}

namespace {

Eigen::MatrixXd disk_grid_points(Eigen::Index per_axis) {
    std::vector<double> coords;
    const double denom = static_cast<double>(per_axis - 1);
    for (Eigen::Index iy = 0; iy < per_axis; ++iy) {
        // symmetric about the origin by construction
        const double y = static_cast<double>(2 * iy - (per_axis - 1)) / denom;
        for (Eigen::Index ix = 0; ix < per_axis; ++ix) {
            const double x = static_cast<double>(2 * ix - (per_axis - 1)) / denom;
            if (x * x + y * y <= 1.0 + 1e-12) {
                coords.push_back(x);
                coords.push_back(y);
            }
        }
    }
    return Eigen::Map<Eigen::MatrixXd>(coords.data(), 2, static_cast<Eigen::Index>(coords.size() / 2));
}

}  // namespace

QuadratureSet disk_grid(Eigen::Index target_count) {
    if (target_count < 1) throw std::invalid_argument("disk_grid needs target_count >= 1");
    for (Eigen::Index k = 3;; ++k) {
        Eigen::MatrixXd pts = disk_grid_points(k);
        if (pts.cols() >= target_count) return QuadratureSet(std::move(pts), Domain::unit_disk);
    }
}

QuadratureSet random_interval_points(Eigen::Index count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("random_interval_points needs count >= 1");
    std::mt19937_64 engine(seed);
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(count));
    while (static_cast<Eigen::Index>(xs.size()) < count) {
        // 53-bit mantissa draw in [0, 1); zero is rejected to stay in the open interval
        const double x = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        if (x > 0.0) xs.push_back(x);
        if (static_cast<Eigen::Index>(xs.size()) == count) {
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        }
    }
    return QuadratureSet(Eigen::Map<Eigen::MatrixXd>(xs.data(), 1, count), Domain::unit_interval);
}

QuadratureSet interval_grid(Eigen::Index count) {
    if (count < 2) throw std::invalid_argument("interval_grid needs at least two points");
    Eigen::MatrixXd pts(1, count);
    for (Eigen::Index j = 0; j < count; ++j) pts(0, j) = static_cast<double>(j) / static_cast<double>(count - 1);
    return QuadratureSet(std::move(pts), Domain::unit_interval);
}

double fill_distance(const Eigen::MatrixXd& selected, const QuadratureSet& candidates) {
    if (selected.cols() == 0) throw std::invalid_argument("fill_distance needs a nonempty selection");
    if (selected.rows() != candidates.dimension())
        throw std::invalid_argument("fill_distance dimension mismatch");
    double worst = 0.0;
    for (Eigen::Index j = 0; j < candidates.size(); ++j) {
        const double nearest =
            (selected.colwise() - candidates.points().col(j)).colwise().squaredNorm().minCoeff();
        worst = std::max(worst, nearest);
    }
    return std::sqrt(worst);
}

}  // namespace kerneig

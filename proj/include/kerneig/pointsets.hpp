#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "kerneig/kernels.hpp"

namespace kerneig {

enum class Domain { unit_disk, unit_interval };

std::string to_string(Domain domain);
Domain parse_domain(const std::string& name);

/// Measure of the domain: pi for the disk, 1 for the interval.
double domain_measure(Domain domain);

/// Ordered, pairwise distinct points with a single uniform quadrature weight
/// |domain| / m. Points are stored one per column.
class QuadratureSet {
public:
    QuadratureSet(Eigen::MatrixXd points, Domain domain);

    Eigen::Index size() const { return points_.cols(); }
    int dimension() const { return static_cast<int>(points_.rows()); }
    double weight() const { return weight_; }
    Domain domain() const { return domain_; }

    const Eigen::MatrixXd& points() const { return points_; }
    Point point(Eigen::Index j) const {
        return {points_.col(j).data(), static_cast<std::size_t>(points_.rows())};
    }

private:
    Eigen::MatrixXd points_;
    Domain domain_;
    double weight_;
};

/// Equispaced k x k grid on [-1, 1]^2 restricted to the closed unit disk, with
/// the smallest k whose retained count reaches target_count.
QuadratureSet disk_grid(Eigen::Index target_count);

/// Sorted i.i.d. uniform points in (0, 1), fully determined by the seed.
QuadratureSet random_interval_points(Eigen::Index count, std::uint64_t seed = 0);

/// Equispaced points 0, 1/(count-1), ..., 1.
QuadratureSet interval_grid(Eigen::Index count);

/// Largest distance from a candidate to its nearest selected point. selected
/// holds points column-wise.
double fill_distance(const Eigen::MatrixXd& selected, const QuadratureSet& candidates);

}  // namespace kerneig

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "corvo/core/pose.hpp"

namespace corvo {

// Index pairs (est, gt) matched by nearest timestamp within max_dt seconds.
std::vector<std::pair<std::size_t, std::size_t>> associate_trajectories(const Trajectory& est,
                                                                        const Trajectory& gt,
                                                                        double max_dt = 0.02);

// Rigid transform applied to est positions to best match gt (least squares).
struct TrajectoryAlignment {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
};

// Closed-form least-squares alignment over associated positions; throws
// DataError with fewer than 3 associations.
TrajectoryAlignment align_trajectories(const Trajectory& est, const Trajectory& gt,
                                       double max_dt = 0.02);

struct MetricReport {
    double rmse = 0.0;    // sqrt(mean of squared errors)
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;  // population
    double sse = 0.0;      // sum of squared errors
    // Root of the mean UNSQUARED error — a companion statistic kept alongside
    // the standard RMSE; not used for any acceptance decision.
    double root_mean_error = 0.0;
    std::vector<double> errors;  // per associated pose, meters

    std::string pretty() const;
    std::string csv() const;  // Table-style single data row with header
};

// Absolute trajectory error of est against gt, optionally after rigid
// alignment. Positions only; errors are Euclidean norms.
MetricReport compute_ate(const Trajectory& est, const Trajectory& gt, bool align = true,
                         double max_dt = 0.02);

// Endpoint drift: compare the estimated first-to-last relative pose against
// one anchored by an external fiducial. tag_first/tag_last are the fiducial's
// pose in the first/last camera frame; est poses are camera-to-world.
// Returns the translation norm of the residual; the rotation residual (deg)
// lands in rot_residual_deg when non-null.
double drift_error(const PoseSE3& est_first, const PoseSE3& est_last, const PoseSE3& tag_first,
                   const PoseSE3& tag_last, double* rot_residual_deg = nullptr);

}  // namespace corvo

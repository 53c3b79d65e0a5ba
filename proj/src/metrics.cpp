#include "corvo/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "corvo/core/errors.hpp"

namespace corvo {

std::vector<std::pair<std::size_t, std::size_t>> associate_trajectories(const Trajectory& est,
                                                                        const Trajectory& gt,
                                                                        double max_dt) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    // gt is time-ordered; walk it once with a moving lower bound.
    std::size_t lo = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double t = est[i].timestamp;
        while (lo + 1 < gt.size() && gt[lo + 1].timestamp <= t) ++lo;
        std::size_t best = lo;
        if (lo + 1 < gt.size() &&
            std::abs(gt[lo + 1].timestamp - t) < std::abs(gt[lo].timestamp - t))
            best = lo + 1;
        if (!gt.empty() && std::abs(gt[best].timestamp - t) <= max_dt) pairs.emplace_back(i, best);
    }
    return pairs;
}

TrajectoryAlignment align_trajectories(const Trajectory& est, const Trajectory& gt,
                                       double max_dt) {
    const auto pairs = associate_trajectories(est, gt, max_dt);
    if (pairs.size() < 3)
        throw DataError("align_trajectories: need at least 3 associated poses, have " +
                        std::to_string(pairs.size()));

    Eigen::Vector3d mean_e = Eigen::Vector3d::Zero(), mean_g = Eigen::Vector3d::Zero();
    for (const auto& [ie, ig] : pairs) {
        mean_e += est[ie].pose.translation;
        mean_g += gt[ig].pose.translation;
    }
    mean_e /= static_cast<double>(pairs.size());
    mean_g /= static_cast<double>(pairs.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& [ie, ig] : pairs)
        cov += (gt[ig].pose.translation - mean_g) * (est[ie].pose.translation - mean_e).transpose();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) S(2, 2) = -1.0;

    TrajectoryAlignment a;
    a.rotation = svd.matrixU() * S * svd.matrixV().transpose();
    a.translation = mean_g - a.rotation * mean_e;
    return a;
}

MetricReport compute_ate(const Trajectory& est, const Trajectory& gt, bool align, double max_dt) {
    const auto pairs = associate_trajectories(est, gt, max_dt);
    if (pairs.empty()) throw DataError("compute_ate: no associated poses");

    TrajectoryAlignment a;  // identity unless asked to align
    if (align) a = align_trajectories(est, gt, max_dt);

    MetricReport r;
    r.errors.reserve(pairs.size());
    for (const auto& [ie, ig] : pairs)
        r.errors.push_back((a.apply(est[ie].pose.translation) - gt[ig].pose.translation).norm());

    const double n = static_cast<double>(r.errors.size());
    double sum = 0.0, sum_sq = 0.0;
    for (double e : r.errors) {
        sum += e;
        sum_sq += e * e;
    }
    r.mean = sum / n;
    r.sse = sum_sq;
    r.rmse = std::sqrt(sum_sq / n);
    r.std_dev = std::sqrt(std::max(0.0, sum_sq / n - r.mean * r.mean));
    r.root_mean_error = std::sqrt(r.mean);

    std::vector<double> sorted = r.errors;
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    r.median = sorted[mid];
    if (sorted.size() % 2 == 0) {
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
        r.median = 0.5 * (r.median + lower);
    }
    return r;
}

std::string MetricReport::pretty() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "poses: %zu\nrmse:   %.6f m\nmean:   %.6f m\nmedian: %.6f m\nstd:    %.6f m\n"
                  "sse:    %.6f m^2\n",
                  errors.size(), rmse, mean, median, std_dev, sse);
    return buf;
}

std::string MetricReport::csv() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "rmse,mean,median,std,sse\n%.9g,%.9g,%.9g,%.9g,%.9g\n", rmse,
                  mean, median, std_dev, sse);
    return buf;
}

double drift_error(const PoseSE3& est_first, const PoseSE3& est_last, const PoseSE3& tag_first,
                   const PoseSE3& tag_last, double* rot_residual_deg) {
    if (!est_first.is_valid(1e-6) || !est_last.is_valid(1e-6) || !tag_first.is_valid(1e-6) ||
        !tag_last.is_valid(1e-6))
        throw DataError("drift_error: input pose violates SE(3) invariants");

    // The fiducial frame is static, so first-camera←last-camera from tags is
    // tag_first ∘ tag_last⁻¹; the odometry's version of the same transform is
    // est_first⁻¹ ∘ est_last.
    const PoseSE3 tag_rel = compose(tag_first, tag_last.inverse());
    const PoseSE3 est_rel = compose(est_first.inverse(), est_last);
    const PoseSE3 residual = compose(tag_rel.inverse(), est_rel);

    if (rot_residual_deg)
        *rot_residual_deg = rad_to_deg(geodesic_angle(residual.rotation, Eigen::Quaterniond::Identity()));
    return residual.translation.norm();
}

}  // namespace corvo

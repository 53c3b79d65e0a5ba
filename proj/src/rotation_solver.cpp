#include "corvo/rotation/rotation_solver.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "corvo/core/pose.hpp"

namespace corvo {

void RotationParams::validate() const {
    if (!(parallel_tol > 0.0 && parallel_tol < 1.0))
        throw ConfigError("parallel_tol must be in (0, 1)");
    if (!(nonparallel_min_angle > 0.0))
        throw ConfigError("nonparallel_min_angle must be positive");
    if (!(max_residual > 0.0)) throw ConfigError("max_residual must be positive");
}

std::string to_string(RotationCase c) {
    switch (c) {
        case RotationCase::kIdentity: return "identity";
        case RotationCase::kAxisFromNormal: return "axis_from_normal";
        case RotationCase::kAxisFromDiffs: return "axis_from_diffs";
    }
    return "unknown";
}

namespace {

constexpr double kDegenerateNorm = 1e-9;

// Angle about a known unit axis that carries nc onto nr. The cos and sin
// expressions share the denominator ‖N×nc‖², so atan2 recovers the full
// quadrant.
double angle_about_axis(const Eigen::Vector3d& axis, const Eigen::Vector3d& nr,
                        const Eigen::Vector3d& nc) {
    const Eigen::Vector3d cross = axis.cross(nc);
    const double denom = cross.squaredNorm();
    if (std::sqrt(denom) < kDegenerateNorm)
        throw DegeneratePairError("plane normal parallel to rotation axis");
    const double an = axis.dot(nc);
    const double cos_a = (nr.dot(nc) - an * an) / denom;
    const double sin_a = nr.dot(cross) / denom;
    return std::atan2(sin_a, cos_a);
}

void verify_pair(const Eigen::Matrix3d& rot, const Eigen::Vector3d& nr, const Eigen::Vector3d& nc,
                 double max_residual) {
    if (angle_between(rot * nc, nr) > max_residual)
        throw InconsistentPairError("rotation does not map normal pair within tolerance");
}

}  // namespace

PairRotation rotation_from_pair(const Eigen::Vector3d& n1r, const Eigen::Vector3d& n1c,
                                const Eigen::Vector3d& n2r, const Eigen::Vector3d& n2c,
                                const RotationParams& params) {
    const bool pair1_fixed = n1r.dot(n1c) >= params.parallel_tol;
    const bool pair2_fixed = n2r.dot(n2c) >= params.parallel_tol;

    PairRotation result;
    if (pair1_fixed && pair2_fixed) {
        result.rotation = Eigen::Matrix3d::Identity();
        result.case_tag = RotationCase::kIdentity;
    } else if (pair1_fixed || pair2_fixed) {
        // The unchanged normal must itself be the rotation axis.
        const Eigen::Vector3d& axis = pair1_fixed ? n1r : n2r;
        const Eigen::Vector3d& nr = pair1_fixed ? n2r : n1r;
        const Eigen::Vector3d& nc = pair1_fixed ? n2c : n1c;
        const double alpha = angle_about_axis(axis, nr, nc);
        result.rotation = Eigen::AngleAxisd(alpha, axis).toRotationMatrix();
        result.case_tag = RotationCase::kAxisFromNormal;
    } else {
        // Both normals moved: the axis is orthogonal to both difference
        // vectors. Its sign is immaterial — the recovered angle flips with it.
        Eigen::Vector3d axis = (n1r - n1c).cross(n2r - n2c);
        const double norm = axis.norm();
        if (norm < kDegenerateNorm)
            throw DegeneratePairError("difference vectors parallel; axis undefined");
        axis /= norm;
        const double alpha = angle_about_axis(axis, n1r, n1c);
        result.rotation = Eigen::AngleAxisd(alpha, axis).toRotationMatrix();
        result.case_tag = RotationCase::kAxisFromDiffs;
    }
    verify_pair(result.rotation, n1r, n1c, params.max_residual);
    verify_pair(result.rotation, n2r, n2c, params.max_residual);
    return result;
}

std::optional<RotationEstimate> estimate_rotation(const std::vector<PlaneMode>& modes,
                                                  const RotationParams& params) {
    params.validate();
    const int k = static_cast<int>(modes.size());
    if (k < 2) return std::nullopt;

    const double min_sep_cos = std::cos(params.nonparallel_min_angle);

    std::optional<RotationEstimate> best;
    long long best_weight = -1;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            if (modes[i].normal_ref.dot(modes[j].normal_ref) > min_sep_cos) continue;
            PairRotation cand;
            try {
                cand = rotation_from_pair(modes[i].normal_ref, modes[i].normal_cur,
                                          modes[j].normal_ref, modes[j].normal_cur, params);
            } catch (const DataError&) {
                continue;  // degenerate or inconsistent pair; try the next one
            }

            // Score against every Mode, weighted by pixel support.
            double weighted = 0.0, total_w = 0.0;
            for (const PlaneMode& m : modes) {
                const double w = m.pixel_count > 0 ? static_cast<double>(m.pixel_count) : 1.0;
                weighted += w * angle_between(cand.rotation * m.normal_cur, m.normal_ref);
                total_w += w;
            }
            const double residual = weighted / total_w;
            if (residual > params.max_residual) continue;

            const long long weight =
                static_cast<long long>(modes[i].pixel_count) + modes[j].pixel_count;
            const bool better =
                !best || residual < best->residual ||
                (residual == best->residual && weight > best_weight);
            if (better) {
                best = RotationEstimate{cand.rotation, residual, cand.case_tag, {i, j}};
                best_weight = weight;
            }
        }
    }
    return best;
}

}  // namespace corvo

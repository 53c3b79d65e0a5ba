#include "corvo/io/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "corvo/core/errors.hpp"

namespace corvo {

void write_trajectory(const Trajectory& traj, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw LoadError(path + ": cannot open for writing");
    std::fprintf(fp, "# timestamp tx ty tz qx qy qz qw\n");
    for (const TrajectoryEntry& e : traj) {
        const Eigen::Vector3d& t = e.pose.translation;
        const Eigen::Quaterniond& q = e.pose.rotation;
        std::fprintf(fp, "%.6f %.12g %.12g %.12g %.12g %.12g %.12g %.12g\n", e.timestamp, t.x(),
                     t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
    }
    std::fclose(fp);
}

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(path + ": cannot open");

    Trajectory traj;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;

        std::istringstream ss(line);
        TrajectoryEntry e;
        double tx, ty, tz, qx, qy, qz, qw;
        if (!(ss >> e.timestamp >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
            throw LoadError(path + ":" + std::to_string(line_no) + ": malformed trajectory line");
        e.pose.translation = Eigen::Vector3d(tx, ty, tz);
        e.pose.rotation = Eigen::Quaterniond(qw, qx, qy, qz);
        if (std::abs(e.pose.rotation.norm() - 1.0) > 1e-6)
            throw LoadError(path + ":" + std::to_string(line_no) + ": quaternion is not unit");
        e.pose.rotation.normalize();
        traj.push_back(e);
    }
    return traj;
}

}  // namespace corvo

#include "corvo/translation/axonometric.hpp"

#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "corvo/core/errors.hpp"

namespace corvo {

void ProjectionConfig::validate() const {
    if (!(r_x > 0.0) || !(r_y > 0.0)) throw ConfigError("projection resolution must be positive");
    if (grid_size < 32) throw ConfigError("grid_size must be >= 32");
    if ((grid_size & (grid_size - 1)) != 0) throw ConfigError("grid_size must be a power of two");
}

int AxonometricFrame::valid_count() const {
    int n = 0;
    for (std::size_t i = 0; i < valid.size(); ++i) n += valid[i] != 0;
    return n;
}

namespace {

struct Cell {
    double z = std::numeric_limits<double>::infinity();
    double color = 0.0;
    // Scan-order index of the winning point; breaks equal-z ties so any
    // partition of the input rows merges to the same result.
    std::size_t index = std::numeric_limits<std::size_t>::max();
};

struct CellGrid {
    int size;
    std::vector<Cell> cells;
    explicit CellGrid(int grid_size) : size(grid_size), cells(static_cast<std::size_t>(grid_size) * grid_size) {}
    Cell& at(int col, int row) { return cells[static_cast<std::size_t>(row) * size + col]; }
};

inline bool wins(const Cell& cand, const Cell& incumbent) {
    return cand.z < incumbent.z || (cand.z == incumbent.z && cand.index < incumbent.index);
}

void bin_rows(const PointCloud& cloud, const Image<double>& intensity,
              const ProjectionConfig& cfg, int row_begin, int row_end, CellGrid& grid) {
    const int w = cloud.width();
    const int half = cfg.grid_size / 2;
    for (int v = row_begin; v < row_end; ++v) {
        for (int u = 0; u < w; ++u) {
            if (!cloud.valid.at(u, v)) continue;
            const Eigen::Vector3d& p = cloud.points.at(u, v);
            const long col = half + std::lround(p.x() / cfg.r_x);
            const long row = half + std::lround(p.y() / cfg.r_y);
            if (col < 0 || col >= cfg.grid_size || row < 0 || row >= cfg.grid_size) continue;
            Cell cand;
            cand.z = p.z();
            cand.color = intensity.at(u, v);
            cand.index = static_cast<std::size_t>(v) * w + u;
            Cell& slot = grid.at(static_cast<int>(col), static_cast<int>(row));
            if (wins(cand, slot)) slot = cand;
        }
    }
}

AxonometricFrame grid_to_frame(const CellGrid& grid) {
    AxonometricFrame frame;
    frame.color = Image<double>(grid.size, grid.size, 0.0);
    frame.depth = Image<double>(grid.size, grid.size, 0.0);
    frame.valid = Mask(grid.size, grid.size, 0);
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const Cell& c = grid.cells[i];
        if (!std::isfinite(c.z)) continue;
        frame.color[i] = c.color;
        frame.depth[i] = c.z;
        frame.valid[i] = 1;
    }
    return frame;
}

void check_inputs(const PointCloud& cloud, const Image<double>& intensity,
                  const ProjectionConfig& cfg) {
    cfg.validate();
    if (!intensity.same_size(cloud.width(), cloud.height()))
        throw ConfigError("project_axonometric: intensity dimensions do not match cloud");
}

}  // namespace

AxonometricFrame project_axonometric(const PointCloud& aligned_cloud,
                                     const Image<double>& intensity,
                                     const ProjectionConfig& cfg) {
    check_inputs(aligned_cloud, intensity, cfg);
    const int h = aligned_cloud.height();

#ifdef _OPENMP
    const int chunks = std::max(1, std::min(omp_get_max_threads(), h));
#else
    const int chunks = 1;
#endif
    std::vector<CellGrid> partial(chunks, CellGrid(cfg.grid_size));

#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        const int begin = static_cast<int>(static_cast<long long>(h) * c / chunks);
        const int end = static_cast<int>(static_cast<long long>(h) * (c + 1) / chunks);
        bin_rows(aligned_cloud, intensity, cfg, begin, end, partial[c]);
    }

    // Fold the partial grids in fixed order; the (z, index) order makes the
    // outcome identical to the serial scan for any chunk count.
    CellGrid merged = std::move(partial[0]);
    for (int c = 1; c < chunks; ++c)
        for (std::size_t i = 0; i < merged.cells.size(); ++i)
            if (wins(partial[c].cells[i], merged.cells[i])) merged.cells[i] = partial[c].cells[i];

    return grid_to_frame(merged);
}

namespace reference {

AxonometricFrame project_axonometric(const PointCloud& aligned_cloud,
                                     const Image<double>& intensity,
                                     const ProjectionConfig& cfg) {
    check_inputs(aligned_cloud, intensity, cfg);
    CellGrid grid(cfg.grid_size);
    bin_rows(aligned_cloud, intensity, cfg, 0, aligned_cloud.height(), grid);
    return grid_to_frame(grid);
}

}  // namespace reference
}  // namespace corvo

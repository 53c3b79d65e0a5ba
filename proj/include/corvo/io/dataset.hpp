#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corvo/core/frame.hpp"

namespace corvo {

struct AssociationEntry {
    double timestamp = 0.0;
    std::string color_path;  // relative to the sequence root
    std::string depth_path;
};

// A sequence on disk: intrinsics plus time-ordered (color, depth) pairs.
// Parsed from a key=value manifest; see the README for the format.
struct SequenceManifest {
    std::string root;
    std::vector<AssociationEntry> entries;
    CameraIntrinsics intrinsics;
    std::string groundtruth_path;  // empty when absent
};

// Reads the manifest and its associations file; verifies every referenced
// file exists and that timestamps are non-decreasing.
SequenceManifest load_manifest(const std::string& manifest_path);

// Loads one frame: color collapsed to intensity, 16-bit depth scaled to
// meters; depth outside (0, max_range] is marked invalid.
Frame load_frame(const SequenceManifest& manifest, std::size_t index, double max_range = 10.0);

// Pull-based frame stream over any producer. next() may throw LoadError for
// an undecodable frame; callers may skip and continue.
class FrameSource {
  public:
    virtual ~FrameSource() = default;
    virtual std::optional<Frame> next() = 0;
};

class SequenceReader : public FrameSource {
  public:
    explicit SequenceReader(SequenceManifest manifest, double max_range = 10.0)
        : manifest_(std::move(manifest)), max_range_(max_range) {}

    std::optional<Frame> next() override;
    const SequenceManifest& manifest() const { return manifest_; }

  private:
    SequenceManifest manifest_;
    double max_range_;
    std::size_t pos_ = 0;
};

}  // namespace corvo

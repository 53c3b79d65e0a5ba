#include "corvo/io/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "corvo/core/errors.hpp"
#include "corvo/io/png_io.hpp"

namespace fs = std::filesystem;

namespace corvo {

namespace {

std::string join(const std::string& root, const std::string& rel) {
    return (fs::path(root) / rel).string();
}

std::vector<AssociationEntry> load_associations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(path + ": cannot open associations file");

    std::vector<AssociationEntry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;

        std::istringstream ss(line);
        std::vector<std::string> tok;
        std::string t;
        while (ss >> t) tok.push_back(t);

        AssociationEntry e;
        try {
            if (tok.size() == 3) {
                // timestamp color depth
                e.timestamp = std::stod(tok[0]);
                e.color_path = tok[1];
                e.depth_path = tok[2];
            } else if (tok.size() == 4) {
                // timestamp color timestamp depth (associate-tool output)
                e.timestamp = std::stod(tok[0]);
                e.color_path = tok[1];
                e.depth_path = tok[3];
            } else {
                throw std::invalid_argument("token count");
            }
        } catch (const std::exception&) {
            throw LoadError(path + ":" + std::to_string(line_no) + ": malformed association line");
        }
        if (!entries.empty() && e.timestamp < entries.back().timestamp)
            throw LoadError(path + ":" + std::to_string(line_no) + ": timestamps must not decrease");
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace

SequenceManifest load_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw LoadError(manifest_path + ": cannot open manifest");

    SequenceManifest m;
    m.root = fs::path(manifest_path).parent_path().string();
    if (m.root.empty()) m.root = ".";
    std::string associations = "associations.txt";

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw LoadError(manifest_path + ":" + std::to_string(line_no) + ": expected key=value");
        // Tolerate spaces around '='.
        std::string key = line.substr(start, eq - start);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::string value = line.substr(eq + 1);
        while (!value.empty() &&
               (value.back() == '\r' || value.back() == ' ' || value.back() == '\t'))
            value.pop_back();
        while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
            value.erase(value.begin());

        try {
            if (key == "fx") m.intrinsics.fx = std::stod(value);
            else if (key == "fy") m.intrinsics.fy = std::stod(value);
            else if (key == "cx") m.intrinsics.cx = std::stod(value);
            else if (key == "cy") m.intrinsics.cy = std::stod(value);
            else if (key == "width") m.intrinsics.width = std::stoi(value);
            else if (key == "height") m.intrinsics.height = std::stoi(value);
            else if (key == "depth_scale") m.intrinsics.depth_scale = std::stod(value);
            else if (key == "associations") associations = value;
            else if (key == "groundtruth") m.groundtruth_path = value;
            else
                throw LoadError(manifest_path + ":" + std::to_string(line_no) + ": unknown key '" +
                                key + "'");
        } catch (const LoadError&) {
            throw;
        } catch (const std::exception&) {
            throw LoadError(manifest_path + ":" + std::to_string(line_no) + ": bad value for '" +
                            key + "'");
        }
    }
    m.intrinsics.validate();

    m.entries = load_associations(join(m.root, associations));
    for (const AssociationEntry& e : m.entries) {
        if (!fs::exists(join(m.root, e.color_path)))
            throw LoadError(join(m.root, e.color_path) + ": referenced color file missing");
        if (!fs::exists(join(m.root, e.depth_path)))
            throw LoadError(join(m.root, e.depth_path) + ": referenced depth file missing");
    }
    if (!m.groundtruth_path.empty() && !fs::exists(join(m.root, m.groundtruth_path)))
        throw LoadError(join(m.root, m.groundtruth_path) + ": ground-truth file missing");
    return m;
}

Frame load_frame(const SequenceManifest& manifest, std::size_t index, double max_range) {
    if (index >= manifest.entries.size())
        throw LoadError("frame index out of range: " + std::to_string(index));
    const AssociationEntry& e = manifest.entries[index];

    Frame frame;
    frame.id = static_cast<std::int64_t>(index);
    frame.timestamp = e.timestamp;
    frame.intrinsics = manifest.intrinsics;
    frame.intensity = intensity_from_rgb(read_png_rgb8(join(manifest.root, e.color_path)));

    const Image<std::uint16_t> raw = read_png16(join(manifest.root, e.depth_path));
    if (!raw.same_size(manifest.intrinsics.width, manifest.intrinsics.height) ||
        !frame.intensity.same_size(manifest.intrinsics.width, manifest.intrinsics.height))
        throw LoadError(join(manifest.root, e.depth_path) + ": image size does not match intrinsics");

    frame.depth.meters = Image<double>(raw.width(), raw.height(), 0.0);
    frame.depth.valid = Mask(raw.width(), raw.height(), 0);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == 0) continue;
        const double z = raw[i] / manifest.intrinsics.depth_scale;
        if (z > max_range) continue;
        frame.depth.meters[i] = z;
        frame.depth.valid[i] = 1;
    }
    return frame;
}

std::optional<Frame> SequenceReader::next() {
    if (pos_ >= manifest_.entries.size()) return std::nullopt;
    return load_frame(manifest_, pos_++, max_range_);
}

}  // namespace corvo

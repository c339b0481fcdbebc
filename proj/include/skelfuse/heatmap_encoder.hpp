#pragma once

/// \file heatmap_encoder.hpp
/// \brief Gaussian heatmap volumes (channels x time x height x width) for 3D CNN classifiers.
///
/// A point (x, y, s) contributes s * exp(-((px - x)^2 + (py - y)^2) / (2 sigma^2)) to every
/// grid pixel (px, py) with |px - x| <= r and |py - y| <= r, r = ceil(3 sigma) + 1, and
/// nothing outside that window. Several points in one map composite by maximum.

#include "skelfuse/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace skelfuse {

struct ScoredPoint {
    double x = 0.0;
    double y = 0.0;
    double score = 0.0;
};

/// Single 2D map, row-major (y outer).
struct Heatmap {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;

    double at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
};

/// Half-width of the evaluation window.
int gaussian_window_radius(double sigma);

/// Max-composited Gaussian map. Throws std::invalid_argument if sigma <= 0.
Heatmap gaussian_heatmap(std::span<const ScoredPoint> points, std::size_t height, std::size_t width,
                         double sigma);

/// Frame indices floor(i * n / t_target) for i in [0, t_target).
std::vector<std::size_t> temporal_sample_indices(std::size_t n, std::size_t t_target);

template <typename T>
std::vector<T> temporal_sample(const std::vector<T>& frames, std::size_t t_target) {
    std::vector<T> out;
    for (auto i : temporal_sample_indices(frames.size(), t_target)) out.push_back(frames[i]);
    return out;
}

struct CropBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;
    friend bool operator==(const CropBox&, const CropBox&) = default;
};

/// Tight box over all detected joints of the clip, grown by 10% of its extent per side
/// (at least one pixel) and clamped to non-negative coordinates.
/// Throws ValidationError if the clip has no detected joint.
CropBox clip_crop_box(const Clip& clip);

enum class ObjectMode { MostRelevant, All };

struct HeatmapOptions {
    std::size_t t_target = 48;
    std::size_t height = 64;
    std::size_t width = 64;
    double sigma = 0.6;
    bool with_objects = true;
    bool with_skeleton = true;
    ObjectMode object_mode = ObjectMode::MostRelevant;
};

/// Maps an image coordinate into the heatmap grid: box edges land on the first and last
/// grid pixel, gx = (x - x0) * (width - 1) / (x1 - x0).
ScoredPoint to_grid(const ScoredPoint& p, const CropBox& box, std::size_t height, std::size_t width);

/// 24 x t_target x height x width volume. Channels 0-16 hold the joints of every person,
/// channels 17-23 one map per object class scaled by detection score. Detections are used
/// as given; filter them first. Throws std::invalid_argument for invalid options.
HeatmapVolume encode_clip_heatmaps(const Clip& clip, const HeatmapOptions& options);

/// "HMV1", four little-endian u32 dims, then little-endian float32 payload.
void write_volume(std::ostream& out, const HeatmapVolume& volume);
HeatmapVolume read_volume(std::istream& in);
void write_volume_file(const HeatmapVolume& volume, const std::filesystem::path& path);
HeatmapVolume read_volume_file(const std::filesystem::path& path);

/// Sidecar listing dims and `channel,<i>,<name>` lines.
std::string volume_manifest(const HeatmapVolume& volume);

} // namespace skelfuse

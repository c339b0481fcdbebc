#pragma once

// Random fixtures and brute-force reference constructions shared by the unit tests and
// the acceptance binary. The oracles only use core types and the standard library.

#include "skelfuse/core.hpp"
#include "skelfuse/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace skelfuse::testing {

inline Mask random_mask(Rng& rng, std::int32_t max_x = 200, std::int32_t max_y = 200, std::size_t max_pixels = 60) {
    const auto cx = static_cast<std::int32_t>(rng.range(0, max_x));
    const auto cy = static_cast<std::int32_t>(rng.range(0, max_y));
    const auto n = static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(max_pixels)));
    std::vector<Pixel> px;
    for (std::size_t i = 0; i < n; ++i) {
        px.push_back({cx + static_cast<std::int32_t>(rng.range(-8, 8)), cy + static_cast<std::int32_t>(rng.range(-8, 8))});
    }
    for (auto& p : px) {
        p.x = std::max(p.x, 0);
        p.y = std::max(p.y, 0);
    }
    return Mask(px);
}

inline Person random_person(Rng& rng, double missing_rate = 0.1) {
    Person p{};
    for (auto& k : p) {
        if (rng.bernoulli(missing_rate)) continue;
        k.x = rng.uniform(0.0, 640.0);
        k.y = rng.uniform(0.0, 480.0);
        k.score = rng.uniform(0.01, 1.0);
    }
    return p;
}

inline DetectionSet random_detections(Rng& rng, std::size_t max_per_class) {
    DetectionSet out;
    for (std::size_t c = 0; c < kNumObjectClasses; ++c) {
        const auto n = rng.below(max_per_class + 1);
        for (std::uint64_t i = 0; i < n; ++i) {
            // Coarse scores make equal scores (and so tie-breaks) likely.
            const double score = static_cast<double>(rng.range(0, 20)) / 20.0;
            out.emplace_back(object_from_index(c), score, random_mask(rng, 600, 440, 12));
        }
    }
    // Shuffle so that file order is not class order.
    for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
    return out;
}

/// A valid clip with 1-3 persons per frame and up to `max_per_class` detections per class.
inline Clip random_clip(Rng& rng, std::size_t frames, std::size_t max_per_class = 3) {
    Clip clip;
    clip.source_id = "rand";
    clip.label = {0, "pick up leg", 5};
    std::int64_t idx = rng.range(0, 5);
    for (std::size_t f = 0; f < frames; ++f) {
        ClipFrame frame;
        frame.skeleton.frame_index = idx;
        idx += rng.range(1, 3);
        const auto persons = rng.range(1, 3);
        for (std::int64_t p = 0; p < persons; ++p) frame.skeleton.persons.push_back(random_person(rng));
        // At least one detected joint so the crop box exists.
        auto& first = frame.skeleton.persons.front()[0];
        if (first.score == 0.0) first = {rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0), 0.5};
        frame.detections = random_detections(rng, max_per_class);
        clip.frames.push_back(std::move(frame));
    }
    return clip;
}

// ---------------------------------------------------------------------------
// Oracles

inline Point2 oracle_centroid(const std::vector<Pixel>& pixels) {
    // Duplicates count once.
    std::vector<Pixel> uniq = pixels;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::int64_t sx = 0, sy = 0;
    for (const auto& p : uniq) {
        sx += p.x;
        sy += p.y;
    }
    const auto n = static_cast<double>(uniq.size());
    return {static_cast<double>(sx) / n, static_cast<double>(sy) / n};
}

inline std::size_t oracle_reference_person(const SkeletonFrame& f) {
    std::size_t best = 0;
    double best_mean = -1.0;
    for (std::size_t i = 0; i < f.persons.size(); ++i) {
        double s = 0.0;
        for (const auto& k : f.persons[i]) s += k.score;
        const double mean = s / static_cast<double>(kNumJoints);
        if (mean > best_mean) {
            best_mean = mean;
            best = i;
        }
    }
    return best;
}

/// Index into `detections` of the most relevant candidate of class `c`, by exhaustive
/// ranking over (distance, -score, position).
inline std::optional<std::size_t> oracle_most_relevant(const DetectionSet& detections, const SkeletonFrame& f,
                                                       ObjectClass c) {
    const auto& person = f.persons[oracle_reference_person(f)];
    const auto& lw = person[9];
    const auto& rw = person[10];
    const bool use_l = lw.score > 0.0;
    const bool use_r = rw.score > 0.0;
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        const auto& d = detections[i];
        if (d.object_class() != c) continue;
        const auto cen = oracle_centroid(d.mask().pixels());
        double dist = 0.0;
        if (use_l) dist += std::hypot(cen.x - lw.x, cen.y - lw.y);
        if (use_r) dist += std::hypot(cen.x - rw.x, cen.y - rw.y);
        if (!best) {
            best = i;
            best_d = dist;
            continue;
        }
        const double bs = detections[*best].score();
        const bool better = (use_l || use_r) ? (dist < best_d || (dist == best_d && d.score() > bs)) : d.score() > bs;
        if (better) {
            best = i;
            best_d = dist;
        }
    }
    return best;
}

inline std::uint8_t oracle_byte(double v, double lo, double hi) {
    double u = 255.0 * (v - lo) / (hi - lo);
    u = std::clamp(u, 0.0, 255.0);
    return static_cast<std::uint8_t>(std::floor(u + 0.5));
}

/// Per-pixel construction of the column image, straight from the raw arrays.
inline EncodedImage oracle_image(const Clip& clip, double lo, double hi, bool with_objects, bool with_skeleton) {
    EncodedImage img(24, clip.frames.size());
    const auto put = [&](std::size_t row, std::size_t col, double x, double y) {
        img.at(row, col, 0) = std::max<std::uint8_t>(oracle_byte(x, lo, hi), 1);
        img.at(row, col, 1) = std::max<std::uint8_t>(oracle_byte(y, lo, hi), 1);
        img.at(row, col, 2) = 0;
    };
    for (std::size_t col = 0; col < clip.frames.size(); ++col) {
        const auto& f = clip.frames[col];
        for (std::size_t row = 0; row < 24; ++row) {
            if (row < 17) {
                if (!with_skeleton || f.skeleton.persons.empty()) continue;
                const auto& k = f.skeleton.persons[oracle_reference_person(f.skeleton)][row];
                if (k.score > 0.0) put(row, col, k.x, k.y);
            } else {
                if (!with_objects || f.skeleton.persons.empty()) continue;
                const auto best = oracle_most_relevant(f.detections, f.skeleton, object_from_index(row - 17));
                if (!best) continue;
                const auto cen = oracle_centroid(f.detections[*best].mask().pixels());
                put(row, col, cen.x, cen.y);
            }
        }
    }
    return img;
}

/// Per-voxel construction of a heatmap volume: for every voxel, the maximum over every
/// contributing point whose window contains it.
inline HeatmapVolume oracle_volume(const Clip& clip, std::size_t t_target, std::size_t h, std::size_t w, double sigma,
                                   bool with_objects, bool with_skeleton, bool all_objects) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& f : clip.frames) {
        for (const auto& p : f.skeleton.persons) {
            for (const auto& k : p) {
                if (k.score <= 0.0) continue;
                x0 = std::min(x0, k.x);
                x1 = std::max(x1, k.x);
                y0 = std::min(y0, k.y);
                y1 = std::max(y1, k.y);
            }
        }
    }
    const double mx = std::max(0.1 * (x1 - x0), 1.0), my = std::max(0.1 * (y1 - y0), 1.0);
    x0 = std::max(x0 - mx, 0.0);
    y0 = std::max(y0 - my, 0.0);
    x1 += mx;
    y1 += my;
    const double r = std::ceil(3.0 * sigma) + 1.0;

    struct P {
        std::size_t channel;
        double gx, gy, s;
    };
    HeatmapVolume vol(24, static_cast<std::uint32_t>(t_target), static_cast<std::uint32_t>(h),
                      static_cast<std::uint32_t>(w));
    const std::size_t n = clip.frames.size();
    for (std::size_t t = 0; t < t_target; ++t) {
        const auto& f = clip.frames[(t * n) / t_target];
        std::vector<P> pts;
        const auto add = [&](std::size_t ch, double x, double y, double s) {
            pts.push_back({ch, (x - x0) * static_cast<double>(w - 1) / (x1 - x0),
                           (y - y0) * static_cast<double>(h - 1) / (y1 - y0), s});
        };
        if (with_skeleton) {
            for (const auto& p : f.skeleton.persons) {
                for (std::size_t j = 0; j < 17; ++j) {
                    if (p[j].score > 0.0) add(j, p[j].x, p[j].y, p[j].score);
                }
            }
        }
        if (with_objects) {
            for (std::size_t c = 0; c < 7; ++c) {
                if (all_objects) {
                    for (const auto& d : f.detections) {
                        if (index_of(d.object_class()) != c) continue;
                        const auto cen = oracle_centroid(d.mask().pixels());
                        add(17 + c, cen.x, cen.y, d.score());
                    }
                } else if (!f.skeleton.persons.empty()) {
                    const auto best = oracle_most_relevant(f.detections, f.skeleton, object_from_index(c));
                    if (!best) continue;
                    const auto& d = f.detections[*best];
                    const auto cen = oracle_centroid(d.mask().pixels());
                    add(17 + c, cen.x, cen.y, d.score());
                }
            }
        }
        for (std::size_t py = 0; py < h; ++py) {
            for (std::size_t px = 0; px < w; ++px) {
                for (const auto& p : pts) {
                    if (!(p.s > 0.0)) continue;
                    const double dx = static_cast<double>(px) - p.gx;
                    const double dy = static_cast<double>(py) - p.gy;
                    if (std::abs(dx) > r || std::abs(dy) > r) continue;
                    const auto v = static_cast<float>(std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)) * p.s);
                    auto& dst = vol.at(p.channel, t, py, px);
                    dst = std::max(dst, v);
                }
            }
        }
    }
    return vol;
}

inline std::vector<std::vector<std::size_t>> oracle_confusion(const std::vector<int>& preds,
                                                              const std::vector<int>& labels, std::size_t k) {
    std::vector<std::vector<std::size_t>> m(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < preds.size(); ++i) ++m[labels[i]][preds[i]];
    return m;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; ++i) {
            path_ = base / ("skelfuse-" + tag + "-" + std::to_string(i));
            if (std::filesystem::create_directories(path_)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace skelfuse::testing

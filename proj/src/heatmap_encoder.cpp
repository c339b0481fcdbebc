#include "skelfuse/heatmap_encoder.hpp"

#include "skelfuse/objects.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace skelfuse {

namespace {

/// Inclusive integer pixel range [lo, hi] within |p - c| <= r, clipped to [0, n).
bool window(double c, int r, std::size_t n, std::size_t& lo, std::size_t& hi) {
    const double a = std::max(std::ceil(c - r), 0.0);
    const double b = std::min(std::floor(c + r), static_cast<double>(n) - 1.0);
    if (!(a <= b)) return false;
    lo = static_cast<std::size_t>(a);
    hi = static_cast<std::size_t>(b);
    return true;
}

/// Renders one point into a map of doubles or floats by maximum.
template <typename T>
void splat(T* map, std::size_t height, std::size_t width, const ScoredPoint& p, double sigma, int radius) {
    if (!(p.score > 0.0)) return;
    std::size_t x_lo, x_hi, y_lo, y_hi;
    if (!window(p.x, radius, width, x_lo, x_hi) || !window(p.y, radius, height, y_lo, y_hi)) return;
    const double denom = 2.0 * sigma * sigma;
    for (std::size_t py = y_lo; py <= y_hi; ++py) {
        const double dy = static_cast<double>(py) - p.y;
        for (std::size_t px = x_lo; px <= x_hi; ++px) {
            const double dx = static_cast<double>(px) - p.x;
            const auto v = static_cast<T>(std::exp(-(dx * dx + dy * dy) / denom) * p.score);
            T& dst = map[py * width + px];
            if (v > dst) dst = v;
        }
    }
}

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("sigma must be positive and finite");
    }
}

} // namespace

int gaussian_window_radius(double sigma) {
    return static_cast<int>(std::ceil(3.0 * sigma)) + 1;
}

Heatmap gaussian_heatmap(std::span<const ScoredPoint> points, std::size_t height, std::size_t width,
                         double sigma) {
    check_sigma(sigma);
    Heatmap out{height, width, std::vector<double>(height * width, 0.0)};
    const int radius = gaussian_window_radius(sigma);
    for (const auto& p : points) splat(out.values.data(), height, width, p, sigma, radius);
    return out;
}

std::vector<std::size_t> temporal_sample_indices(std::size_t n, std::size_t t_target) {
    if (n == 0 || t_target == 0) {
        throw std::invalid_argument("temporal_sample: need at least one frame and t_target >= 1");
    }
    std::vector<std::size_t> out(t_target);
    for (std::size_t i = 0; i < t_target; ++i) out[i] = i * n / t_target;
    return out;
}

CropBox clip_crop_box(const Clip& clip) {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    double x1 = -x0;
    double y1 = -x0;
    for (const auto& f : clip.frames) {
        for (const auto& person : f.skeleton.persons) {
            for (const auto& kp : person) {
                if (!kp.detected()) continue;
                x0 = std::min(x0, kp.x);
                y0 = std::min(y0, kp.y);
                x1 = std::max(x1, kp.x);
                y1 = std::max(y1, kp.y);
            }
        }
    }
    if (x0 > x1) {
        throw ValidationError("clip '" + clip.source_id + "' has no detected joints to crop around");
    }
    const double mx = std::max(0.1 * (x1 - x0), 1.0);
    const double my = std::max(0.1 * (y1 - y0), 1.0);
    return {std::max(x0 - mx, 0.0), std::max(y0 - my, 0.0), x1 + mx, y1 + my};
}

ScoredPoint to_grid(const ScoredPoint& p, const CropBox& box, std::size_t height, std::size_t width) {
    return {(p.x - box.x0) * static_cast<double>(width - 1) / (box.x1 - box.x0),
            (p.y - box.y0) * static_cast<double>(height - 1) / (box.y1 - box.y0), p.score};
}

HeatmapVolume encode_clip_heatmaps(const Clip& clip, const HeatmapOptions& opt) {
    if (!opt.with_objects && !opt.with_skeleton) {
        throw std::invalid_argument("encode_clip_heatmaps: at least one of skeleton/objects must be enabled");
    }
    if (opt.t_target == 0 || opt.height == 0 || opt.width == 0) {
        throw std::invalid_argument("encode_clip_heatmaps: t_target, height and width must be positive");
    }
    check_sigma(opt.sigma);
    validate(clip);

    const CropBox box = clip_crop_box(clip);
    const auto indices = temporal_sample_indices(clip.length(), opt.t_target);
    const int radius = gaussian_window_radius(opt.sigma);
    HeatmapVolume vol(static_cast<std::uint32_t>(kNumChannels), static_cast<std::uint32_t>(opt.t_target),
                      static_cast<std::uint32_t>(opt.height), static_cast<std::uint32_t>(opt.width));
    const auto map_of = [&](std::size_t channel, std::size_t t) { return &vol.at(channel, t, 0, 0); };
    const auto draw = [&](std::size_t channel, std::size_t t, double x, double y, double score) {
        splat(map_of(channel, t), opt.height, opt.width, to_grid({x, y, score}, box, opt.height, opt.width),
              opt.sigma, radius);
    };

    for (std::size_t t = 0; t < indices.size(); ++t) {
        const auto& frame = clip.frames[indices[t]];
        if (opt.with_skeleton) {
            for (const auto& person : frame.skeleton.persons) {
                for (std::size_t j = 0; j < kNumJoints; ++j) {
                    if (person[j].detected()) draw(j, t, person[j].x, person[j].y, person[j].score);
                }
            }
        }
        if (opt.with_objects) {
            if (opt.object_mode == ObjectMode::All) {
                for (const auto& p : object_points_all(frame.detections)) {
                    draw(kNumJoints + index_of(p.object_class), t, p.x, p.y, p.score);
                }
            } else {
                for (const auto& p : select_most_relevant(frame.detections, frame.skeleton)) {
                    if (p.present) draw(kNumJoints + index_of(p.object_class), t, p.x, p.y, p.score);
                }
            }
        }
    }
    return vol;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError(0, "truncated HMV1 header");
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
}

} // namespace

void write_volume(std::ostream& out, const HeatmapVolume& vol) {
    out.write("HMV1", 4);
    put_u32(out, vol.channels);
    put_u32(out, vol.frames);
    put_u32(out, vol.height);
    put_u32(out, vol.width);
    for (float f : vol.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

HeatmapVolume read_volume(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "HMV1", 4) != 0) {
        throw ParseError(0, "not an HMV1 volume");
    }
    const auto c = get_u32(in);
    const auto t = get_u32(in);
    const auto h = get_u32(in);
    const auto w = get_u32(in);
    HeatmapVolume vol(c, t, h, w);
    for (auto& f : vol.values) {
        unsigned char b[4];
        if (!in.read(reinterpret_cast<char*>(b), 4)) throw ParseError(0, "truncated HMV1 payload");
        f = std::bit_cast<float>(std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
                                 std::uint32_t{b[3]} << 24);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError(0, "trailing bytes after HMV1 payload");
    return vol;
}

void write_volume_file(const HeatmapVolume& volume, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    // One buffered write; put_u32 per value is slow on unbuffered streams.
    std::ostringstream buf(std::ios::binary);
    write_volume(buf, volume);
    const auto bytes = buf.str();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

HeatmapVolume read_volume_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_volume(in);
}

std::string volume_manifest(const HeatmapVolume& volume) {
    std::ostringstream os;
    os << "channels=" << volume.channels << "\nframes=" << volume.frames << "\nheight=" << volume.height
       << "\nwidth=" << volume.width << "\n";
    const auto labels = channel_manifest();
    for (std::size_t i = 0; i < labels.size(); ++i) os << "channel," << i << "," << labels[i] << "\n";
    return os.str();
}

} // namespace skelfuse

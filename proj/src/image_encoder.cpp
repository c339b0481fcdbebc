#include "skelfuse/image_encoder.hpp"

#include "skelfuse/objects.hpp"
#include "skelfuse/text.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace skelfuse {

Normalizer fit_normalizer(std::span<const Clip> clips) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& clip : clips) {
        for (const auto& f : clip.frames) {
            for (const auto& person : f.skeleton.persons) {
                for (const auto& kp : person) {
                    if (!kp.detected()) continue;
                    lo = std::min({lo, kp.x, kp.y});
                    hi = std::max({hi, kp.x, kp.y});
                }
            }
        }
    }
    if (!(hi > lo)) {
        throw ValidationError("cannot fit normalizer: no detected joints or degenerate coordinate range");
    }
    return Normalizer(lo, hi);
}

std::uint8_t normalize_coord(double v, const Normalizer& n) {
    const double u = 255.0 * (v - n.c_min()) / (n.c_max() - n.c_min());
    return static_cast<std::uint8_t>(std::round(std::clamp(u, 0.0, 255.0)));
}

namespace {

void put_point(EncodedImage& img, std::size_t row, std::size_t col, double x, double y, const Normalizer& n) {
    img.at(row, col, 0) = std::max<std::uint8_t>(normalize_coord(x, n), 1);
    img.at(row, col, 1) = std::max<std::uint8_t>(normalize_coord(y, n), 1);
}

} // namespace

EncodedImage encode_clip_image(const Clip& clip, const Normalizer& n, bool with_objects, bool with_skeleton) {
    if (!with_objects && !with_skeleton) {
        throw std::invalid_argument("encode_clip_image: at least one of skeleton/objects must be enabled");
    }
    validate(clip);
    EncodedImage img(kNumChannels, clip.length());
    for (std::size_t col = 0; col < clip.length(); ++col) {
        const auto& frame = clip.frames[col];
        if (with_skeleton) {
            if (const auto ref = frame.skeleton.reference_person()) {
                const auto& person = frame.skeleton.persons[*ref];
                for (std::size_t j = 0; j < kNumJoints; ++j) {
                    if (person[j].detected()) put_point(img, j, col, person[j].x, person[j].y, n);
                }
            }
        }
        if (with_objects) {
            const auto points = select_most_relevant(frame.detections, frame.skeleton);
            for (std::size_t c = 0; c < kNumObjectClasses; ++c) {
                if (points[c].present) put_point(img, kNumJoints + c, col, points[c].x, points[c].y, n);
            }
        }
    }
    return img;
}

EncodedImage resize_bilinear(const EncodedImage& img, std::size_t out_h, std::size_t out_w) {
    if (out_h == 0 || out_w == 0) {
        throw std::invalid_argument("resize_bilinear: output dimensions must be positive");
    }
    if (img.rows == 0 || img.cols == 0) {
        throw std::invalid_argument("resize_bilinear: empty source image");
    }
    const auto src_coord = [](std::size_t i, std::size_t out, std::size_t in) {
        if (out == 1 || in == 1) return 0.0;
        return static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
    };
    EncodedImage out(out_h, out_w);
    for (std::size_t r = 0; r < out_h; ++r) {
        const double sy = src_coord(r, out_h, img.rows);
        const auto y0 = static_cast<std::size_t>(std::floor(sy));
        const auto y1 = std::min(y0 + 1, img.rows - 1);
        const double fy = sy - static_cast<double>(y0);
        for (std::size_t c = 0; c < out_w; ++c) {
            const double sx = src_coord(c, out_w, img.cols);
            const auto x0 = static_cast<std::size_t>(std::floor(sx));
            const auto x1 = std::min(x0 + 1, img.cols - 1);
            const double fx = sx - static_cast<double>(x0);
            for (std::size_t ch = 0; ch < 3; ++ch) {
                const double top = img.at(y0, x0, ch) * (1.0 - fx) + img.at(y0, x1, ch) * fx;
                const double bottom = img.at(y1, x0, ch) * (1.0 - fx) + img.at(y1, x1, ch) * fx;
                const double v = top * (1.0 - fy) + bottom * fy;
                out.at(r, c, ch) = static_cast<std::uint8_t>(std::round(std::clamp(v, 0.0, 255.0)));
            }
        }
    }
    return out;
}

void write_png(const EncodedImage& img, const std::filesystem::path& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
    if (!fp) throw Error("cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng error while writing " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols), static_cast<png_uint_32>(img.rows), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < img.rows; ++r) {
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() + r * img.cols * 3));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::string image_manifest(const EncodedImage& img, const Normalizer& n) {
    std::ostringstream os;
    os << "height=" << img.rows << "\n";
    os << "width=" << img.cols << "\n";
    os << "c_min=" << format_significant(n.c_min(), 9) << "\n";
    os << "c_max=" << format_significant(n.c_max(), 9) << "\n";
    const auto labels = channel_manifest();
    for (std::size_t i = 0; i < labels.size(); ++i) os << "row," << i << "," << labels[i] << "\n";
    return os.str();
}

std::string serialize_normalizer(const Normalizer& n) {
    return "c_min=" + format_double(n.c_min()) + "\nc_max=" + format_double(n.c_max()) + "\n";
}

Normalizer parse_normalizer(std::string_view text) {
    std::optional<double> lo;
    std::optional<double> hi;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
        const auto key = trim(line.substr(0, eq));
        double v = 0.0;
        if (!parse_double(trim(line.substr(eq + 1)), v)) throw ParseError(line_no, "bad number");
        if (key == "c_min") {
            lo = v;
        } else if (key == "c_max") {
            hi = v;
        } else {
            throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
        }
    }
    if (!lo || !hi) throw ParseError(0, "normalizer needs c_min and c_max");
    return Normalizer(*lo, *hi);
}

} // namespace skelfuse

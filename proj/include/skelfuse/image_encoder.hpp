#pragma once

/// \file image_encoder.hpp
/// \brief Column-image encoding of skeleton + object sequences for 2D CNN classifiers.
///
/// Every frame becomes one column. Rows 0-16 hold the joints of the reference person,
/// rows 17-23 the most relevant object of each class. A detected point is stored as
/// (R, G, B) = (u(x), u(y), 0) with u(v) = 255 (v - c_min) / (c_max - c_min), clamped,
/// rounded half away from zero and lifted to at least 1, so that (0, 0, 0) always
/// means "absent".

#include "skelfuse/core.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace skelfuse {

/// Pooled min/max over x and y of all detected joints of all persons in `clips`.
/// Throws ValidationError if no joint is detected or the range is degenerate.
Normalizer fit_normalizer(std::span<const Clip> clips);

std::uint8_t normalize_coord(double v, const Normalizer& n);

/// Image of 24 rows x clip-length columns. Detections are used as given; filter them first.
/// Throws std::invalid_argument if both bands are disabled.
EncodedImage encode_clip_image(const Clip& clip, const Normalizer& n, bool with_objects, bool with_skeleton);

/// Bilinear resize on a corner-aligned grid; channels are interpolated independently.
EncodedImage resize_bilinear(const EncodedImage& img, std::size_t out_h, std::size_t out_w);

/// 8-bit RGB PNG, row 0 at the top.
void write_png(const EncodedImage& img, const std::filesystem::path& path);

/// Sidecar text: output size, the normalizer to 9 significant digits and the row labels.
std::string image_manifest(const EncodedImage& img, const Normalizer& n);

/// Normalizer text file: `c_min=<v>` and `c_max=<v>` lines, shortest round-trip decimals.
std::string serialize_normalizer(const Normalizer& n);
Normalizer parse_normalizer(std::string_view text);

} // namespace skelfuse

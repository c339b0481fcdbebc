#pragma once

/// \file core.hpp
/// \brief Shared domain vocabulary: joints, objects, frames, clips and encoded outputs.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skelfuse {

/// Base class of every error raised by the library. The CLI maps it to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number (0 when not line-oriented).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Unknown name in a lookup table (class map, object class, view).
class LookupError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid data (empty clips, non-monotonic frames, degenerate ranges).
class ValidationError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Joints and objects

constexpr std::size_t kNumJoints = 17;
constexpr std::size_t kNumObjectClasses = 7;
constexpr std::size_t kNumChannels = kNumJoints + kNumObjectClasses;

/// COCO keypoint order.
enum class JointClass : std::uint8_t {
    Nose, LeftEye, RightEye, LeftEar, RightEar,
    LeftShoulder, RightShoulder, LeftElbow, RightElbow,
    LeftWrist, RightWrist, LeftHip, RightHip,
    LeftKnee, RightKnee, LeftAnkle, RightAnkle,
};

enum class ObjectClass : std::uint8_t {
    TableTop, Leg, Shelf, SidePanel, FrontPanel, BottomPanel, RearPanel,
};

inline constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "nose", "left-eye", "right-eye", "left-ear", "right-ear",
    "left-shoulder", "right-shoulder", "left-elbow", "right-elbow",
    "left-wrist", "right-wrist", "left-hip", "right-hip",
    "left-knee", "right-knee", "left-ankle", "right-ankle",
};

inline constexpr std::array<std::string_view, kNumObjectClasses> kObjectNames = {
    "table top", "leg", "shelf", "side panel", "front panel", "bottom panel", "rear panel",
};

constexpr std::size_t index_of(JointClass j) noexcept { return static_cast<std::size_t>(j); }
constexpr std::size_t index_of(ObjectClass c) noexcept { return static_cast<std::size_t>(c); }

std::string_view joint_name(JointClass j);
std::string_view object_name(ObjectClass c);
JointClass joint_from_index(std::size_t index);
ObjectClass object_from_index(std::size_t index);
JointClass joint_from_name(std::string_view name);
ObjectClass object_from_name(std::string_view name);

/// Row / channel labels shared by both encoders: joints first, then object classes.
std::vector<std::string> channel_manifest();

// ---------------------------------------------------------------------------
// Skeletons

struct Keypoint2D {
    double x = 0.0;
    double y = 0.0;
    double score = 0.0; ///< 0 means "not detected"; x and y are then ignored.

    bool detected() const noexcept { return score > 0.0; }
    friend bool operator==(const Keypoint2D&, const Keypoint2D&) = default;
};

using Person = std::array<Keypoint2D, kNumJoints>;

/// Mean keypoint score of a person.
double mean_score(const Person& person) noexcept;

struct SkeletonFrame {
    std::int64_t frame_index = 0;
    std::vector<Person> persons;

    /// Index of the person with the highest mean keypoint score (first on ties).
    std::optional<std::size_t> reference_person() const noexcept;

    friend bool operator==(const SkeletonFrame&, const SkeletonFrame&) = default;
};

// ---------------------------------------------------------------------------
// Objects

struct Pixel {
    std::int32_t x = 0;
    std::int32_t y = 0;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Binary pixel mask stored as a sorted, duplicate-free pixel set (row-major: y, then x).
class Mask {
public:
    Mask() = default;
    explicit Mask(std::vector<Pixel> pixels);

    const std::vector<Pixel>& pixels() const noexcept { return pixels_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::vector<Pixel> pixels_;
};

/// Center of mass of a mask: arithmetic mean of member pixel coordinates.
/// Throws ValidationError on an empty mask.
Point2 mask_centroid(const Mask& mask);

/// A detected object. Immutable; the centroid is computed once at construction.
class ObjectInstance {
public:
    ObjectInstance(ObjectClass cls, double score, Mask mask);

    ObjectClass object_class() const noexcept { return cls_; }
    double score() const noexcept { return score_; }
    const Mask& mask() const noexcept { return mask_; }
    Point2 centroid() const noexcept { return centroid_; }

    friend bool operator==(const ObjectInstance& a, const ObjectInstance& b) {
        return a.cls_ == b.cls_ && a.score_ == b.score_ && a.mask_ == b.mask_;
    }

private:
    ObjectClass cls_;
    double score_;
    Mask mask_;
    Point2 centroid_;
};

using DetectionSet = std::vector<ObjectInstance>;

// ---------------------------------------------------------------------------
// Clips and labels

enum class View : std::uint8_t { Top, Front, Side };

std::string_view view_name(View v);
View view_from_name(std::string_view name);

struct ActionLabel {
    int class_id = 0;
    std::string class_name;
    int verb_id = 0;
    friend bool operator==(const ActionLabel&, const ActionLabel&) = default;
};

struct ClipFrame {
    SkeletonFrame skeleton;
    DetectionSet detections;
    friend bool operator==(const ClipFrame&, const ClipFrame&) = default;
};

struct Clip {
    std::vector<ClipFrame> frames;
    ActionLabel label;
    View view = View::Top;
    std::string source_id;

    std::size_t length() const noexcept { return frames.size(); }
    friend bool operator==(const Clip&, const Clip&) = default;
};

/// Throws ValidationError if the clip is empty, frame indices are not strictly
/// increasing, or any keypoint / detection score lies outside [0,1] or is non-finite.
void validate(const Clip& clip);

// ---------------------------------------------------------------------------
// Encoded outputs

/// Column image: one row per joint/object class, one column per frame, RGB bytes.
struct EncodedImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels; ///< rows * cols * 3, row-major, interleaved RGB

    EncodedImage() = default;
    EncodedImage(std::size_t r, std::size_t c) : rows(r), cols(c), pixels(r * c * 3, 0) {}

    std::uint8_t& at(std::size_t r, std::size_t c, std::size_t ch) { return pixels[(r * cols + c) * 3 + ch]; }
    std::uint8_t at(std::size_t r, std::size_t c, std::size_t ch) const { return pixels[(r * cols + c) * 3 + ch]; }

    friend bool operator==(const EncodedImage&, const EncodedImage&) = default;
};

/// Channels x time x height x width, C row-major with channels outermost.
struct HeatmapVolume {
    std::uint32_t channels = 0;
    std::uint32_t frames = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::vector<float> values;

    HeatmapVolume() = default;
    HeatmapVolume(std::uint32_t c, std::uint32_t t, std::uint32_t h, std::uint32_t w)
        : channels(c), frames(t), height(h), width(w), values(std::size_t{c} * t * h * w, 0.0f) {}

    std::size_t offset(std::size_t c, std::size_t t, std::size_t y, std::size_t x) const noexcept {
        return ((c * frames + t) * height + y) * width + x;
    }
    float& at(std::size_t c, std::size_t t, std::size_t y, std::size_t x) { return values[offset(c, t, y, x)]; }
    float at(std::size_t c, std::size_t t, std::size_t y, std::size_t x) const { return values[offset(c, t, y, x)]; }

    friend bool operator==(const HeatmapVolume&, const HeatmapVolume&) = default;
};

/// Scalar coordinate range pooled over both axes of all training joints.
class Normalizer {
public:
    /// Throws ValidationError unless both are finite and c_max > c_min.
    Normalizer(double c_min, double c_max);

    double c_min() const noexcept { return c_min_; }
    double c_max() const noexcept { return c_max_; }

    friend bool operator==(const Normalizer&, const Normalizer&) = default;

private:
    double c_min_;
    double c_max_;
};

} // namespace skelfuse

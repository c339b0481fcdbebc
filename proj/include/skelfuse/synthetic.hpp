#pragma once

/// \file synthetic.hpp
/// \brief Deterministic synthetic assembly clips with controllable skeleton/object separability.
///
/// A clip is drawn from three independent random streams derived from its seed: one for
/// the skeleton (clip length, pose, motion, noise), one for the target object and one for
/// distractor detections. Two templates that only differ in their object therefore yield
/// identical skeleton streams for the same seed.

#include "skelfuse/core.hpp"
#include "skelfuse/taxonomy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skelfuse {

enum class SkeletonMotion { Idle, ReachLift, Twist, Push };
enum class ObjectMotion { Carry, Orbit, Slide, Flip };

std::string_view motion_name(SkeletonMotion m);
std::string_view motion_name(ObjectMotion m);
SkeletonMotion skeleton_motion_from_name(std::string_view name);
ObjectMotion object_motion_from_name(std::string_view name);

struct ActionTemplate {
    std::string class_name;
    std::string verb;
    std::optional<ObjectClass> object_class;
    SkeletonMotion skeleton_motion = SkeletonMotion::ReachLift;
    ObjectMotion object_motion = ObjectMotion::Carry;
    double noise_std = 2.0;        ///< keypoint jitter in pixels
    double distractor_rate = 0.0;  ///< expected false positives per frame
};

/// Target object scores: 1.0 for ground-truth objects, Uniform(0.85, 1.0) for "detected".
enum class ScoreModel { GroundTruth, Detected };

struct GeneratorSettings {
    std::size_t frames_min = 24;
    std::size_t frames_max = 40;
    double image_width = 640.0;
    double image_height = 480.0;
    double missing_joint_rate = 0.02;
    ScoreModel score_model = ScoreModel::GroundTruth;
    View view = View::Top;
};

/// Label ids come from `class_map` (class id = row, verb id = verb of the row).
Clip generate_clip(const ActionTemplate& tmpl, std::uint64_t seed, const GeneratorSettings& settings,
                   const VerbMap& class_map, std::string source_id = {});

/// Class map with one row per template, in template order.
VerbMap class_map_of(const std::vector<ActionTemplate>& templates);

/// Template line `<class>|<verb>|<object class or ->|<skeleton motion>|<object motion>`,
/// optionally followed by `|noise=<px>|distractors=<rate>`.
ActionTemplate parse_template(std::string_view text);
std::string format_template(const ActionTemplate& t);

} // namespace skelfuse

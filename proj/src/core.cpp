#include "skelfuse/core.hpp"

#include <algorithm>
#include <cmath>

namespace skelfuse {

std::string_view joint_name(JointClass j) {
    return kJointNames.at(index_of(j));
}

std::string_view object_name(ObjectClass c) {
    return kObjectNames.at(index_of(c));
}

JointClass joint_from_index(std::size_t index) {
    if (index >= kNumJoints) {
        throw LookupError("joint index out of range: " + std::to_string(index));
    }
    return static_cast<JointClass>(index);
}

ObjectClass object_from_index(std::size_t index) {
    if (index >= kNumObjectClasses) {
        throw LookupError("object class index out of range: " + std::to_string(index));
    }
    return static_cast<ObjectClass>(index);
}

JointClass joint_from_name(std::string_view name) {
    const auto it = std::find(kJointNames.begin(), kJointNames.end(), name);
    if (it == kJointNames.end()) {
        throw LookupError("unknown joint: '" + std::string(name) + "'");
    }
    return static_cast<JointClass>(it - kJointNames.begin());
}

ObjectClass object_from_name(std::string_view name) {
    const auto it = std::find(kObjectNames.begin(), kObjectNames.end(), name);
    if (it == kObjectNames.end()) {
        throw LookupError("unknown object class: '" + std::string(name) + "'");
    }
    return static_cast<ObjectClass>(it - kObjectNames.begin());
}

std::vector<std::string> channel_manifest() {
    std::vector<std::string> out;
    out.reserve(kNumChannels);
    for (auto n : kJointNames) out.emplace_back(n);
    for (auto n : kObjectNames) out.emplace_back(n);
    return out;
}

double mean_score(const Person& person) noexcept {
    double sum = 0.0;
    for (const auto& kp : person) sum += kp.score;
    return sum / static_cast<double>(kNumJoints);
}

std::optional<std::size_t> SkeletonFrame::reference_person() const noexcept {
    if (persons.empty()) return std::nullopt;
    std::size_t best = 0;
    double best_score = mean_score(persons[0]);
    for (std::size_t i = 1; i < persons.size(); ++i) {
        const double s = mean_score(persons[i]);
        if (s > best_score) {
            best = i;
            best_score = s;
        }
    }
    return best;
}

Mask::Mask(std::vector<Pixel> pixels) : pixels_(std::move(pixels)) {
    std::sort(pixels_.begin(), pixels_.end(), [](const Pixel& a, const Pixel& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    pixels_.erase(std::unique(pixels_.begin(), pixels_.end()), pixels_.end());
}

Point2 mask_centroid(const Mask& mask) {
    if (mask.empty()) {
        throw ValidationError("centroid of an empty mask");
    }
    // Integer sums are exact for any realistic mask size.
    std::int64_t sx = 0;
    std::int64_t sy = 0;
    for (const auto& p : mask.pixels()) {
        sx += p.x;
        sy += p.y;
    }
    const auto n = static_cast<double>(mask.size());
    return {static_cast<double>(sx) / n, static_cast<double>(sy) / n};
}

ObjectInstance::ObjectInstance(ObjectClass cls, double score, Mask mask)
    : cls_(cls), score_(score), mask_(std::move(mask)) {
    if (!(score_ >= 0.0 && score_ <= 1.0)) {
        throw ValidationError("object score outside [0,1]");
    }
    centroid_ = mask_centroid(mask_);
}

std::string_view view_name(View v) {
    switch (v) {
    case View::Top: return "top";
    case View::Front: return "front";
    case View::Side: return "side";
    }
    return "top";
}

View view_from_name(std::string_view name) {
    if (name == "top") return View::Top;
    if (name == "front") return View::Front;
    if (name == "side") return View::Side;
    throw LookupError("unknown view: '" + std::string(name) + "'");
}

void validate(const Clip& clip) {
    if (clip.frames.empty()) {
        throw ValidationError("clip '" + clip.source_id + "' has no frames");
    }
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
        const auto& f = clip.frames[i];
        if (f.skeleton.frame_index < 0) {
            throw ValidationError("negative frame index in clip '" + clip.source_id + "'");
        }
        if (i > 0 && f.skeleton.frame_index <= clip.frames[i - 1].skeleton.frame_index) {
            throw ValidationError("frame indices not strictly increasing at frame " +
                                  std::to_string(f.skeleton.frame_index) + " in clip '" + clip.source_id + "'");
        }
        for (const auto& person : f.skeleton.persons) {
            for (const auto& kp : person) {
                if (!std::isfinite(kp.x) || !std::isfinite(kp.y) || !(kp.score >= 0.0 && kp.score <= 1.0)) {
                    throw ValidationError("invalid keypoint at frame " + std::to_string(f.skeleton.frame_index) +
                                          " in clip '" + clip.source_id + "'");
                }
            }
        }
    }
}

Normalizer::Normalizer(double c_min, double c_max) : c_min_(c_min), c_max_(c_max) {
    if (!std::isfinite(c_min) || !std::isfinite(c_max) || !(c_max > c_min)) {
        throw ValidationError("degenerate normalizer range [" + std::to_string(c_min) + ", " +
                              std::to_string(c_max) + "]");
    }
}

} // namespace skelfuse

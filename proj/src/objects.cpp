#include "skelfuse/objects.hpp"

#include <cmath>

namespace skelfuse {

DetectionSet filter_by_score(const DetectionSet& detections, double tau) {
    DetectionSet out;
    for (const auto& d : detections) {
        if (d.score() > tau) out.push_back(d);
    }
    return out;
}

Clip filter_clip(Clip clip, double tau) {
    for (auto& f : clip.frames) f.detections = filter_by_score(f.detections, tau);
    return clip;
}

std::optional<double> hand_distance(Point2 c, const Person& person) {
    const auto& lw = person[index_of(JointClass::LeftWrist)];
    const auto& rw = person[index_of(JointClass::RightWrist)];
    const auto dist = [&](const Keypoint2D& k) { return std::hypot(c.x - k.x, c.y - k.y); };
    if (lw.detected() && rw.detected()) return dist(lw) + dist(rw);
    if (lw.detected()) return dist(lw);
    if (rw.detected()) return dist(rw);
    return std::nullopt;
}

std::array<ObjectPoint, kNumObjectClasses> select_most_relevant(const DetectionSet& detections,
                                                               const SkeletonFrame& skeleton) {
    const Person* person = nullptr;
    if (const auto ref = skeleton.reference_person()) person = &skeleton.persons[*ref];

    struct Best {
        const ObjectInstance* inst = nullptr;
        std::optional<double> distance;
    };
    std::array<Best, kNumObjectClasses> best{};

    for (const auto& d : detections) {
        auto& b = best[index_of(d.object_class())];
        const auto dist = person ? hand_distance(d.centroid(), *person) : std::nullopt;
        if (!b.inst) {
            b = {&d, dist};
            continue;
        }
        // Earlier detections win remaining ties, so only strictly better candidates replace.
        bool better = false;
        if (dist) {
            better = *dist < *b.distance || (*dist == *b.distance && d.score() > b.inst->score());
        } else {
            better = d.score() > b.inst->score();
        }
        if (better) b = {&d, dist};
    }

    std::array<ObjectPoint, kNumObjectClasses> out{};
    for (std::size_t c = 0; c < kNumObjectClasses; ++c) {
        out[c].object_class = object_from_index(c);
        if (const auto* inst = best[c].inst) {
            out[c].x = inst->centroid().x;
            out[c].y = inst->centroid().y;
            out[c].score = inst->score();
            out[c].present = true;
        }
    }
    return out;
}

std::vector<ObjectPoint> object_points_all(const DetectionSet& detections) {
    std::vector<ObjectPoint> out;
    out.reserve(detections.size());
    for (const auto& d : detections) {
        out.push_back({d.object_class(), d.centroid().x, d.centroid().y, d.score(), true});
    }
    return out;
}

} // namespace skelfuse

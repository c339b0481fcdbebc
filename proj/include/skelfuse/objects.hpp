#pragma once

/// \file objects.hpp
/// \brief Detections to per-frame object points: score filtering and most-relevant selection.

#include "skelfuse/core.hpp"

#include <array>
#include <vector>

namespace skelfuse {

/// An object reduced to a point. Absent points are exactly (0, 0, 0).
struct ObjectPoint {
    ObjectClass object_class = ObjectClass::TableTop;
    double x = 0.0;
    double y = 0.0;
    double score = 0.0;
    bool present = false;

    friend bool operator==(const ObjectPoint&, const ObjectPoint&) = default;
};

/// Keeps instances with score strictly greater than tau, in order.
DetectionSet filter_by_score(const DetectionSet& detections, double tau);

/// Same filter applied to every frame of a clip.
Clip filter_clip(Clip clip, double tau);

/// Distance of an object centroid to the hands of a person: the sum of the Euclidean
/// distances to both wrists, or the distance to the single detected wrist. Returns
/// nullopt when neither wrist is detected.
std::optional<double> hand_distance(Point2 centroid, const Person& person);

/// One point per object class, in class order. Per class, the candidate closest to the
/// hands of the reference person wins; ties go to the higher score, then to the earlier
/// detection. Without a usable wrist the highest-scoring candidate is taken.
std::array<ObjectPoint, kNumObjectClasses> select_most_relevant(const DetectionSet& detections,
                                                               const SkeletonFrame& skeleton);

/// One point per instance, scores preserved.
std::vector<ObjectPoint> object_points_all(const DetectionSet& detections);

} // namespace skelfuse

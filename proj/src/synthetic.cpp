#include "skelfuse/synthetic.hpp"

#include "skelfuse/rng.hpp"
#include "skelfuse/text.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace skelfuse {

namespace {

constexpr std::uint64_t kSkeletonStream = 1;
constexpr std::uint64_t kObjectStream = 2;
constexpr std::uint64_t kDistractorStream = 3;

/// Standing person, image coordinates relative to the hip center, about 180 px tall.
constexpr std::array<Point2, kNumJoints> kRestPose = {{
    {0, -90}, {-4, -94}, {4, -94}, {-9, -91}, {9, -91},
    {-22, -65}, {22, -65}, {-28, -35}, {28, -35},
    {-30, -8}, {30, -8}, {-14, 0}, {14, 0},
    {-15, 45}, {15, 45}, {-16, 90}, {16, 90},
}};

constexpr auto kLeftElbow = index_of(JointClass::LeftElbow);
constexpr auto kRightElbow = index_of(JointClass::RightElbow);
constexpr auto kLeftWrist = index_of(JointClass::LeftWrist);
constexpr auto kRightWrist = index_of(JointClass::RightWrist);

struct SkeletonParams {
    double cx, cy, scale, amplitude, drift_x, drift_y;
};

/// Noise-free pose at phase p in [0, 1].
std::array<Point2, kNumJoints> clean_pose(SkeletonMotion motion, const SkeletonParams& sp, double p) {
    std::array<Point2, kNumJoints> pose = kRestPose;
    const double a = sp.amplitude;
    const double bump = std::sin(std::numbers::pi * p);
    const double turn = 2.0 * std::numbers::pi * p;
    switch (motion) {
    case SkeletonMotion::Idle:
        for (auto& q : pose) q.x += 5.0 * a * std::sin(turn);
        break;
    case SkeletonMotion::ReachLift:
        pose[kRightWrist].x += 25.0 * a * bump;
        pose[kRightWrist].y += 90.0 * a * bump;
        pose[kRightElbow].x += 12.0 * a * bump;
        pose[kRightElbow].y += 45.0 * a * bump;
        for (std::size_t j = 0; j <= index_of(JointClass::RightShoulder); ++j) pose[j].y += 15.0 * a * bump;
        break;
    case SkeletonMotion::Twist:
        pose[kLeftWrist].x += 25.0 * a * std::cos(turn);
        pose[kLeftWrist].y += 25.0 * a * std::sin(turn);
        pose[kRightWrist].x -= 25.0 * a * std::cos(turn);
        pose[kRightWrist].y -= 25.0 * a * std::sin(turn);
        pose[kLeftElbow].x += 10.0 * a * std::cos(turn);
        pose[kRightElbow].x -= 10.0 * a * std::cos(turn);
        break;
    case SkeletonMotion::Push:
        pose[kLeftWrist].x -= 50.0 * a * bump;
        pose[kRightWrist].x += 50.0 * a * bump;
        pose[kLeftWrist].y -= 20.0 * a * bump;
        pose[kRightWrist].y -= 20.0 * a * bump;
        pose[kLeftElbow].x -= 20.0 * a * bump;
        pose[kRightElbow].x += 20.0 * a * bump;
        break;
    }
    for (auto& q : pose) {
        q.x = sp.cx + sp.drift_x * p + sp.scale * q.x;
        q.y = sp.cy + sp.drift_y * p + sp.scale * q.y;
    }
    return pose;
}

struct ObjectParams {
    Point2 rest;
    Point2 anchor;
    double grasp;
    std::int32_t rx, ry;
};

Point2 lerp(Point2 a, Point2 b, double t) {
    return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

Point2 object_position(ObjectMotion motion, const ObjectParams& op, const std::array<Point2, kNumJoints>& pose,
                       double p) {
    const Point2 lw = pose[kLeftWrist];
    const Point2 rw = pose[kRightWrist];
    const Point2 hands = lerp(lw, rw, 0.5);
    const double turn = 2.0 * std::numbers::pi * p;
    switch (motion) {
    case ObjectMotion::Carry:
        if (p < op.grasp) return lerp(op.rest, rw, p / op.grasp);
        return {rw.x, rw.y + 8.0};
    case ObjectMotion::Orbit:
        return {hands.x + 15.0 * std::cos(2.0 * turn), hands.y + 15.0 * std::sin(2.0 * turn)};
    case ObjectMotion::Slide:
        return lerp(op.rest, op.anchor, p);
    case ObjectMotion::Flip:
        return {hands.x, hands.y + 30.0 * std::sin(turn)};
    }
    return hands;
}

Mask ellipse_mask(Point2 center, std::int32_t rx, std::int32_t ry) {
    const auto cx = static_cast<std::int32_t>(std::lround(center.x));
    const auto cy = static_cast<std::int32_t>(std::lround(center.y));
    std::vector<Pixel> px;
    for (std::int32_t dy = -ry; dy <= ry; ++dy) {
        for (std::int32_t dx = -rx; dx <= rx; ++dx) {
            // Integer form of (dx/rx)^2 + (dy/ry)^2 <= 1; symmetric, so the centroid is (cx, cy).
            if (std::int64_t{dx} * dx * ry * ry + std::int64_t{dy} * dy * rx * rx <= std::int64_t{rx} * rx * ry * ry) {
                px.push_back({cx + dx, cy + dy});
            }
        }
    }
    return Mask(std::move(px));
}

} // namespace

std::string_view motion_name(SkeletonMotion m) {
    switch (m) {
    case SkeletonMotion::Idle: return "idle";
    case SkeletonMotion::ReachLift: return "reach_lift";
    case SkeletonMotion::Twist: return "twist";
    case SkeletonMotion::Push: return "push";
    }
    return "idle";
}

std::string_view motion_name(ObjectMotion m) {
    switch (m) {
    case ObjectMotion::Carry: return "carry";
    case ObjectMotion::Orbit: return "orbit";
    case ObjectMotion::Slide: return "slide";
    case ObjectMotion::Flip: return "flip";
    }
    return "carry";
}

SkeletonMotion skeleton_motion_from_name(std::string_view name) {
    for (auto m : {SkeletonMotion::Idle, SkeletonMotion::ReachLift, SkeletonMotion::Twist, SkeletonMotion::Push}) {
        if (motion_name(m) == name) return m;
    }
    throw LookupError("unknown skeleton motion: '" + std::string(name) + "'");
}

ObjectMotion object_motion_from_name(std::string_view name) {
    for (auto m : {ObjectMotion::Carry, ObjectMotion::Orbit, ObjectMotion::Slide, ObjectMotion::Flip}) {
        if (motion_name(m) == name) return m;
    }
    throw LookupError("unknown object motion: '" + std::string(name) + "'");
}

Clip generate_clip(const ActionTemplate& tmpl, std::uint64_t seed, const GeneratorSettings& settings,
                   const VerbMap& class_map, std::string source_id) {
    if (settings.frames_min == 0 || settings.frames_max < settings.frames_min) {
        throw std::invalid_argument("generate_clip: invalid frame range");
    }
    Rng skel(derive_seed(seed, kSkeletonStream));
    Rng obj(derive_seed(seed, kObjectStream));
    Rng noise(derive_seed(seed, kDistractorStream));

    const auto length = static_cast<std::size_t>(
        skel.range(static_cast<std::int64_t>(settings.frames_min), static_cast<std::int64_t>(settings.frames_max)));
    SkeletonParams sp{};
    sp.cx = skel.uniform(0.4, 0.6) * settings.image_width;
    sp.cy = skel.uniform(0.45, 0.55) * settings.image_height;
    sp.scale = skel.uniform(0.9, 1.1);
    sp.amplitude = skel.uniform(0.8, 1.2);
    sp.drift_x = skel.uniform(-10.0, 10.0);
    sp.drift_y = skel.uniform(-5.0, 5.0);

    ObjectParams op{};
    op.rest = {sp.cx + obj.uniform(-80.0, 80.0), sp.cy + obj.uniform(70.0, 100.0)};
    op.anchor = {sp.cx + obj.uniform(-60.0, 60.0), sp.cy + obj.uniform(-50.0, -30.0)};
    op.grasp = obj.uniform(0.3, 0.5);
    op.rx = static_cast<std::int32_t>(obj.range(3, 6));
    op.ry = static_cast<std::int32_t>(obj.range(3, 6));

    Clip clip;
    clip.source_id = source_id.empty() ? tmpl.class_name + "-" + std::to_string(seed) : std::move(source_id);
    clip.view = settings.view;
    clip.label = make_label(tmpl.class_name, class_map);
    clip.frames.reserve(length);

    for (std::size_t t = 0; t < length; ++t) {
        const double p = length > 1 ? static_cast<double>(t) / static_cast<double>(length - 1) : 0.0;
        const auto pose = clean_pose(tmpl.skeleton_motion, sp, p);

        Person person{};
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            const double nx = skel.normal(0.0, tmpl.noise_std);
            const double ny = skel.normal(0.0, tmpl.noise_std);
            const double score = skel.uniform(0.6, 1.0);
            const bool missing = skel.bernoulli(settings.missing_joint_rate);
            if (!missing) person[j] = {pose[j].x + nx, pose[j].y + ny, score};
        }

        ClipFrame frame;
        frame.skeleton.frame_index = static_cast<std::int64_t>(t);
        frame.skeleton.persons.push_back(person);

        const double target_score = obj.uniform(0.85, 1.0);
        if (tmpl.object_class) {
            const double s = settings.score_model == ScoreModel::GroundTruth ? 1.0 : target_score;
            frame.detections.emplace_back(*tmpl.object_class, s,
                                          ellipse_mask(object_position(tmpl.object_motion, op, pose, p), op.rx, op.ry));
        }
        const auto n_distractors = noise.poisson(tmpl.distractor_rate);
        for (std::uint32_t k = 0; k < n_distractors; ++k) {
            const auto cls = object_from_index(noise.below(kNumObjectClasses));
            const Point2 at{noise.uniform(0.0, settings.image_width), noise.uniform(0.0, settings.image_height)};
            const double s = noise.uniform(0.1, 0.6);
            const auto rx = static_cast<std::int32_t>(noise.range(3, 6));
            const auto ry = static_cast<std::int32_t>(noise.range(3, 6));
            frame.detections.emplace_back(cls, s, ellipse_mask(at, rx, ry));
        }
        clip.frames.push_back(std::move(frame));
    }
    return clip;
}

VerbMap class_map_of(const std::vector<ActionTemplate>& templates) {
    VerbMap map;
    for (const auto& t : templates) map.add(t.class_name, t.verb);
    return map;
}

ActionTemplate parse_template(std::string_view text) {
    const auto f = split(text, '|');
    if (f.size() < 5) {
        throw ParseError(0, "template needs <class>|<verb>|<object>|<skeleton motion>|<object motion>");
    }
    ActionTemplate t;
    t.class_name = std::string(trim(f[0]));
    t.verb = std::string(trim(f[1]));
    verb_id_of(t.verb);
    if (const auto o = trim(f[2]); o != "-") t.object_class = object_from_name(o);
    t.skeleton_motion = skeleton_motion_from_name(trim(f[3]));
    t.object_motion = object_motion_from_name(trim(f[4]));
    for (std::size_t i = 5; i < f.size(); ++i) {
        const auto kv = trim(f[i]);
        const auto eq = kv.find('=');
        double v = 0.0;
        if (eq == std::string_view::npos || !parse_double(kv.substr(eq + 1), v) || v < 0.0) {
            throw ParseError(0, "bad template option '" + std::string(kv) + "'");
        }
        const auto key = kv.substr(0, eq);
        if (key == "noise") {
            t.noise_std = v;
        } else if (key == "distractors") {
            t.distractor_rate = v;
        } else {
            throw ParseError(0, "unknown template option '" + std::string(key) + "'");
        }
    }
    return t;
}

std::string format_template(const ActionTemplate& t) {
    std::ostringstream os;
    os << t.class_name << '|' << t.verb << '|' << (t.object_class ? object_name(*t.object_class) : "-") << '|'
       << motion_name(t.skeleton_motion) << '|' << motion_name(t.object_motion) << "|noise="
       << format_double(t.noise_std) << "|distractors=" << format_double(t.distractor_rate);
    return os.str();
}

} // namespace skelfuse

#include "skelfuse/io.hpp"

#include "skelfuse/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace fs = std::filesystem;

namespace skelfuse {

namespace {

double require_double(std::string_view s, std::size_t line, const char* what) {
    double v = 0.0;
    if (!parse_double(s, v)) {
        throw ParseError(line, std::string("bad ") + what + ": '" + std::string(s) + "'");
    }
    return v;
}

std::int64_t require_int(std::string_view s, std::size_t line, const char* what) {
    std::int64_t v = 0;
    if (!parse_int(s, v)) {
        throw ParseError(line, std::string("bad ") + what + ": '" + std::string(s) + "'");
    }
    return v;
}

double require_score(std::string_view s, std::size_t line) {
    const double v = require_double(s, line, "score");
    if (v < 0.0 || v > 1.0) {
        throw ParseError(line, "score outside [0,1]: '" + std::string(s) + "'");
    }
    return v;
}

/// Splits `<frame_index>|<rest>` and checks monotonicity.
std::pair<std::int64_t, std::string_view> split_record(std::string_view line, std::size_t line_no,
                                                       std::optional<std::int64_t>& last) {
    const auto bar = line.find('|');
    if (bar == std::string_view::npos) {
        throw ParseError(line_no, "missing '|' separator");
    }
    const auto index = require_int(line.substr(0, bar), line_no, "frame index");
    if (index < 0) {
        throw ParseError(line_no, "negative frame index");
    }
    if (last && index <= *last) {
        throw ParseError(line_no, "non-monotonic frame index " + std::to_string(index) + " after " +
                                      std::to_string(*last));
    }
    last = index;
    return {index, line.substr(bar + 1)};
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (view.empty()) continue;
        fn(view, line_no);
    }
}

Person parse_person(std::string_view text, std::size_t line_no) {
    const auto triples = split(text, ',');
    if (triples.size() != kNumJoints) {
        throw ParseError(line_no, "person has " + std::to_string(triples.size()) + " keypoints, expected 17");
    }
    Person p;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        const auto parts = split(triples[j], ':');
        if (parts.size() != 3) {
            throw ParseError(line_no, "keypoint " + std::to_string(j) + " is not an x:y:s triple");
        }
        p[j] = {require_double(parts[0], line_no, "x"), require_double(parts[1], line_no, "y"),
                require_score(parts[2], line_no)};
    }
    return p;
}

ObjectInstance parse_detection(std::string_view text, std::size_t line_no) {
    // class=<name>,score=<s>,rle=<body>; the rle body has no commas.
    const auto fields = split(text, ',');
    if (fields.size() != 3 || !fields[0].starts_with("class=") || !fields[1].starts_with("score=") ||
        !fields[2].starts_with("rle=")) {
        throw ParseError(line_no, "detection must be class=<name>,score=<s>,rle=<...>");
    }
    ObjectClass cls{};
    try {
        cls = object_from_name(fields[0].substr(6));
    } catch (const LookupError& e) {
        throw ParseError(line_no, e.what());
    }
    const double score = require_score(fields[1].substr(6), line_no);
    Mask mask;
    try {
        mask = decode_rle(fields[2].substr(4));
    } catch (const ParseError& e) {
        throw ParseError(line_no, e.what());
    }
    if (mask.empty()) {
        throw ParseError(line_no, "empty object mask");
    }
    return ObjectInstance(cls, score, std::move(mask));
}

void write_person(std::ostream& out, const Person& p) {
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        if (j) out << ',';
        out << format_double(p[j].x) << ':' << format_double(p[j].y) << ':' << format_double(p[j].score);
    }
}

std::vector<std::string_view> csv_fields(std::string_view line, std::size_t expected, std::size_t line_no) {
    auto fields = split(line, ',');
    if (fields.size() != expected) {
        throw ParseError(line_no, "expected " + std::to_string(expected) + " comma-separated fields, got " +
                                      std::to_string(fields.size()));
    }
    for (auto& f : fields) f = trim(f);
    return fields;
}

} // namespace

std::vector<SkeletonFrame> parse_skeleton_stream(std::istream& in) {
    std::vector<SkeletonFrame> frames;
    std::optional<std::int64_t> last;
    for_each_line(in, [&](std::string_view line, std::size_t line_no) {
        const auto [index, rest] = split_record(line, line_no, last);
        SkeletonFrame frame;
        frame.frame_index = index;
        if (!rest.empty()) {
            for (auto person : split(rest, ';')) frame.persons.push_back(parse_person(person, line_no));
        }
        frames.push_back(std::move(frame));
    });
    return frames;
}

void serialize_skeleton_stream(std::ostream& out, const std::vector<SkeletonFrame>& frames) {
    for (const auto& f : frames) {
        out << f.frame_index << '|';
        for (std::size_t i = 0; i < f.persons.size(); ++i) {
            if (i) out << ';';
            write_person(out, f.persons[i]);
        }
        out << '\n';
    }
}

DetectionStream parse_detection_stream(std::istream& in) {
    DetectionStream out;
    std::optional<std::int64_t> last;
    for_each_line(in, [&](std::string_view line, std::size_t line_no) {
        const auto [index, rest] = split_record(line, line_no, last);
        DetectionSet set;
        if (!rest.empty()) {
            for (auto det : split(rest, ';')) set.push_back(parse_detection(det, line_no));
        }
        out.emplace(index, std::move(set));
    });
    return out;
}

void serialize_detection_stream(std::ostream& out, const DetectionStream& detections) {
    for (const auto& [index, set] : detections) {
        out << index << '|';
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (i) out << ';';
            out << "class=" << object_name(set[i].object_class()) << ",score=" << format_double(set[i].score())
                << ",rle=" << encode_rle(set[i].mask());
        }
        out << '\n';
    }
}

std::string encode_rle(const Mask& mask) {
    if (mask.empty()) return "0:0:0:";
    const auto& px = mask.pixels(); // sorted by (y, x)
    std::int32_t x0 = px.front().x;
    for (const auto& p : px) x0 = std::min(x0, p.x);
    const std::int32_t y0 = px.front().y;
    const std::int32_t nrows = px.back().y - y0 + 1;

    std::ostringstream os;
    os << x0 << ':' << y0 << ':' << nrows << ':';
    std::size_t i = 0;
    for (std::int32_t row = 0; row < nrows; ++row) {
        if (row) os << '/';
        const std::int32_t y = y0 + row;
        bool any = false;
        while (i < px.size() && px[i].y == y) {
            const std::int32_t start = px[i].x;
            std::int32_t len = 1;
            while (i + 1 < px.size() && px[i + 1].y == y && px[i + 1].x == start + len) {
                ++i;
                ++len;
            }
            ++i;
            if (any) os << '+';
            os << (start - x0) << '-' << len;
            any = true;
        }
        if (!any) os << "0-0";
    }
    return os.str();
}

Mask decode_rle(std::string_view rle) {
    const auto head = split(rle, ':');
    if (head.size() != 4) {
        throw ParseError(0, "rle must be <x0>:<y0>:<nrows>:<rows>");
    }
    const auto x0 = require_int(head[0], 0, "rle x0");
    const auto y0 = require_int(head[1], 0, "rle y0");
    const auto nrows = require_int(head[2], 0, "rle row count");
    if (nrows < 0) throw ParseError(0, "negative rle row count");
    std::vector<Pixel> pixels;
    if (nrows == 0) {
        if (!head[3].empty()) throw ParseError(0, "rle rows given for zero row count");
        return Mask(std::move(pixels));
    }
    const auto rows = split(head[3], '/');
    if (static_cast<std::int64_t>(rows.size()) != nrows) {
        throw ParseError(0, "rle declares " + std::to_string(nrows) + " rows but lists " +
                                std::to_string(rows.size()));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (auto run : split(rows[r], '+')) {
            const auto dash = run.find('-');
            if (dash == std::string_view::npos) throw ParseError(0, "rle run must be start-length");
            const auto start = require_int(run.substr(0, dash), 0, "rle run start");
            const auto len = require_int(run.substr(dash + 1), 0, "rle run length");
            if (start < 0 || len < 0) throw ParseError(0, "negative rle run");
            for (std::int64_t k = 0; k < len; ++k) {
                pixels.push_back({static_cast<std::int32_t>(x0 + start + k),
                                  static_cast<std::int32_t>(y0 + static_cast<std::int64_t>(r))});
            }
        }
    }
    return Mask(std::move(pixels));
}

std::string_view split_name(Split s) {
    return s == Split::Train ? "train" : "test";
}

Split split_from_name(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "test") return Split::Test;
    throw LookupError("unknown split: '" + std::string(name) + "'");
}

std::vector<ManifestEntry> DatasetManifest::select(Split split) const {
    std::vector<ManifestEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
                 [split](const ManifestEntry& e) { return e.split == split; });
    return out;
}

DatasetManifest parse_manifest(std::istream& in, const fs::path& base_dir) {
    DatasetManifest manifest;
    std::set<std::tuple<std::string, View, Split>> seen;
    for_each_line(in, [&](std::string_view line, std::size_t line_no) {
        const auto f = csv_fields(line, 6, line_no);
        ManifestEntry e;
        e.source_id = std::string(f[0]);
        try {
            e.view = view_from_name(f[1]);
            e.split = split_from_name(f[5]);
        } catch (const LookupError& err) {
            throw ParseError(line_no, err.what());
        }
        e.label_name = std::string(f[2]);
        e.skeleton_path = fs::path(std::string(f[3]));
        e.detection_path = fs::path(std::string(f[4]));
        if (e.skeleton_path.is_relative()) e.skeleton_path = base_dir / e.skeleton_path;
        if (e.detection_path.is_relative()) e.detection_path = base_dir / e.detection_path;
        if (!seen.emplace(e.source_id, e.view, e.split).second) {
            throw ParseError(line_no, "duplicate source id '" + e.source_id + "' for view " +
                                          std::string(view_name(e.view)) + ", split " +
                                          std::string(split_name(e.split)));
        }
        manifest.entries.push_back(std::move(e));
    });
    return manifest;
}

void serialize_manifest(std::ostream& out, const DatasetManifest& manifest) {
    for (const auto& e : manifest.entries) {
        out << e.source_id << ',' << view_name(e.view) << ',' << e.label_name << ','
            << e.skeleton_path.generic_string() << ',' << e.detection_path.generic_string() << ','
            << split_name(e.split) << '\n';
    }
}

DatasetManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest " + path.string());
    auto manifest = parse_manifest(in, path.parent_path());
    for (const auto& e : manifest.entries) {
        for (const auto& p : {e.skeleton_path, e.detection_path}) {
            if (!fs::exists(p)) {
                throw ValidationError("manifest entry '" + e.source_id + "' references missing file " + p.string());
            }
        }
    }
    return manifest;
}

VerbMap parse_class_map(std::istream& in) {
    VerbMap map;
    for_each_line(in, [&](std::string_view line, std::size_t line_no) {
        const auto f = csv_fields(line, 2, line_no);
        try {
            map.add(std::string(f[0]), std::string(f[1]));
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
    });
    return map;
}

void serialize_class_map(std::ostream& out, const VerbMap& map) {
    for (const auto& [cls, verb] : map.rows()) out << cls << ',' << verb << '\n';
}

VerbMap load_class_map(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open class map " + path.string());
    return parse_class_map(in);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Clip load_clip(const ManifestEntry& entry, const VerbMap& class_map) {
    Clip clip;
    clip.source_id = entry.source_id;
    clip.view = entry.view;
    clip.label = make_label(entry.label_name, class_map);

    std::vector<SkeletonFrame> skeletons;
    DetectionStream detections;
    {
        std::ifstream in(entry.skeleton_path);
        if (!in) throw Error("cannot open " + entry.skeleton_path.string());
        try {
            skeletons = parse_skeleton_stream(in);
        } catch (const ParseError& e) {
            throw ParseError(e.line(), entry.skeleton_path.string() + ": " + e.what());
        }
    }
    {
        std::ifstream in(entry.detection_path);
        if (!in) throw Error("cannot open " + entry.detection_path.string());
        try {
            detections = parse_detection_stream(in);
        } catch (const ParseError& e) {
            throw ParseError(e.line(), entry.detection_path.string() + ": " + e.what());
        }
    }
    for (auto& s : skeletons) {
        auto it = detections.find(s.frame_index);
        if (it == detections.end()) {
            throw ValidationError("clip '" + entry.source_id + "': detection file has no record for frame " +
                                  std::to_string(s.frame_index));
        }
        clip.frames.push_back({std::move(s), std::move(it->second)});
        detections.erase(it);
    }
    if (!detections.empty()) {
        throw ValidationError("clip '" + entry.source_id + "': detection record for frame " +
                              std::to_string(detections.begin()->first) + " has no skeleton frame");
    }
    validate(clip);
    return clip;
}

std::vector<SkeletonFrame> skeleton_frames(const Clip& clip) {
    std::vector<SkeletonFrame> out;
    out.reserve(clip.frames.size());
    for (const auto& f : clip.frames) out.push_back(f.skeleton);
    return out;
}

DetectionStream detection_records(const Clip& clip) {
    DetectionStream out;
    for (const auto& f : clip.frames) out.emplace(f.skeleton.frame_index, f.detections);
    return out;
}

void write_clip_files(const Clip& clip, const fs::path& skeleton_path, const fs::path& detection_path) {
    {
        std::ofstream out(skeleton_path, std::ios::binary);
        if (!out) throw Error("cannot write " + skeleton_path.string());
        serialize_skeleton_stream(out, skeleton_frames(clip));
    }
    {
        std::ofstream out(detection_path, std::ios::binary);
        if (!out) throw Error("cannot write " + detection_path.string());
        serialize_detection_stream(out, detection_records(clip));
    }
}

} // namespace skelfuse

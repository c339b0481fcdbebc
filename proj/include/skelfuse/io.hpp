#pragma once

/// \file io.hpp
/// \brief Line-oriented interchange formats for skeletons, detections, manifests and class maps.
///
/// Skeleton line:   `<frame_index>|<person>{;<person>}`, a person being 17 comma-separated
///                  `x:y:s` triples in joint order. A frame without persons is `<frame_index>|`.
/// Detection line:  `<frame_index>|<det>{;<det>}` with
///                  `<det> = class=<name>,score=<s>,rle=<x0>:<y0>:<nrows>:<rows>`.
///                  `<rows>` holds exactly `nrows` groups separated by '/'; each group is one or
///                  more `start-length` runs joined by '+', `start` relative to x0. An empty row
///                  is written `0-0`.
/// Manifest:        header-less CSV `source_id,view,label_name,skeleton_path,detection_path,split`.
/// Class map:       header-less CSV `class_name,verb_name`.
///
/// Numbers use '.' as radix and never an exponent; doubles are written in their shortest
/// round-tripping form so parse(serialize(x)) == x holds exactly.

#include "skelfuse/core.hpp"
#include "skelfuse/taxonomy.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace skelfuse {

/// Frames in file order; frame indices must be strictly increasing.
std::vector<SkeletonFrame> parse_skeleton_stream(std::istream& in);
void serialize_skeleton_stream(std::ostream& out, const std::vector<SkeletonFrame>& frames);

using DetectionStream = std::map<std::int64_t, DetectionSet>;

DetectionStream parse_detection_stream(std::istream& in);
void serialize_detection_stream(std::ostream& out, const DetectionStream& detections);

/// Run-length body of a mask, `<x0>:<y0>:<nrows>:<rows>`.
std::string encode_rle(const Mask& mask);
Mask decode_rle(std::string_view rle);

enum class Split { Train, Test };

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);

struct ManifestEntry {
    std::string source_id;
    View view = View::Top;
    std::string label_name;
    std::filesystem::path skeleton_path;
    std::filesystem::path detection_path;
    Split split = Split::Train;
    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    std::vector<ManifestEntry> select(Split split) const;
};

/// Relative paths are resolved against `base_dir`. Duplicate source ids within one
/// (view, split) are rejected.
DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
void serialize_manifest(std::ostream& out, const DatasetManifest& manifest);

/// Reads a manifest file and checks that every referenced file exists.
DatasetManifest load_manifest(const std::filesystem::path& path);

VerbMap parse_class_map(std::istream& in);
void serialize_class_map(std::ostream& out, const VerbMap& map);
VerbMap load_class_map(const std::filesystem::path& path);

/// Builds a validated clip from its two files. Every skeleton frame needs a detection
/// record (possibly empty) and vice versa; the label must be present in the class map.
Clip load_clip(const ManifestEntry& entry, const VerbMap& class_map);

/// Writes the skeleton and detection files of a clip.
void write_clip_files(const Clip& clip, const std::filesystem::path& skeleton_path,
                      const std::filesystem::path& detection_path);

/// Skeleton frames / detection records of a clip, as written by write_clip_files.
std::vector<SkeletonFrame> skeleton_frames(const Clip& clip);
DetectionStream detection_records(const Clip& clip);

std::string read_file(const std::filesystem::path& path);

} // namespace skelfuse

#pragma once

/// \file taxonomy.hpp
/// \brief Verb-only relabelling of action classes and classification metrics.

#include "skelfuse/core.hpp"

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace skelfuse {

/// The twelve verbs of the verb-only taxonomy. Sorted, so the position is the verb id.
inline constexpr std::array<std::string_view, 12> kVerbs = {
    "align", "attach", "flip", "insert", "lay down", "pick up",
    "position", "push", "rotate", "slide", "spin", "tighten",
};

/// Verb id of a verb name; LookupError if it is not one of kVerbs.
int verb_id_of(std::string_view verb);

/// Action class name -> verb name.
class VerbMap {
public:
    VerbMap() = default;

    /// Adds a row. Throws LookupError for verbs outside kVerbs and ValidationError
    /// when the class is already mapped to a different verb.
    void add(std::string class_name, std::string verb_name);

    bool contains(std::string_view class_name) const;
    std::size_t size() const noexcept { return rows_.size(); }

    /// Rows in insertion order.
    const std::vector<std::pair<std::string, std::string>>& rows() const noexcept { return rows_; }

    /// Class ids are row positions in insertion order.
    int class_id_of(std::string_view class_name) const;
    const std::string& verb_name_of(std::string_view class_name) const;

    /// Distinct verbs present in the map, sorted.
    std::vector<std::string> verbs() const;

private:
    std::vector<std::pair<std::string, std::string>> rows_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

/// Unique verb id for a class name; LookupError naming the class if unmapped.
int verb_of(std::string_view class_name, const VerbMap& map);

/// The shipped best-effort map of the 33 assembly action classes onto the 12 verbs.
const VerbMap& default_verb_map();

/// Builds a full label (class id, name, verb id) for a class name of the map.
ActionLabel make_label(std::string_view class_name, const VerbMap& map);

/// Replaces the clip label by its verb: class_name becomes the verb name and
/// class_id the verb id.
Clip remap_clip_to_verbs(Clip clip, const VerbMap& map);

// ---------------------------------------------------------------------------
// Metrics

double top1_accuracy(const std::vector<int>& preds, const std::vector<int>& labels);

/// Mean over classes present in `labels` of per-class recall.
double mean_class_accuracy(const std::vector<int>& preds, const std::vector<int>& labels);

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

/// cell (i, j) counts samples with label i predicted as j.
ConfusionMatrix confusion_matrix(const std::vector<int>& preds, const std::vector<int>& labels, std::size_t k);

struct Metrics {
    double mean_class_accuracy = 0.0;
    double top1 = 0.0;
    ConfusionMatrix confusion;
};

/// Machine-readable `metric,value` lines.
std::string format_metrics(const Metrics& m);

} // namespace skelfuse

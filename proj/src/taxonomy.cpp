#include "skelfuse/taxonomy.hpp"

#include "skelfuse/text.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace skelfuse {

int verb_id_of(std::string_view verb) {
    const auto it = std::find(kVerbs.begin(), kVerbs.end(), verb);
    if (it == kVerbs.end()) {
        throw LookupError("unknown verb: '" + std::string(verb) + "'");
    }
    return static_cast<int>(it - kVerbs.begin());
}

void VerbMap::add(std::string class_name, std::string verb_name) {
    verb_id_of(verb_name);
    if (const auto it = index_.find(class_name); it != index_.end()) {
        if (rows_[it->second].second != verb_name) {
            throw ValidationError("class '" + class_name + "' mapped to two verbs");
        }
        return;
    }
    index_.emplace(class_name, rows_.size());
    rows_.emplace_back(std::move(class_name), std::move(verb_name));
}

bool VerbMap::contains(std::string_view class_name) const {
    return index_.find(class_name) != index_.end();
}

int VerbMap::class_id_of(std::string_view class_name) const {
    const auto it = index_.find(class_name);
    if (it == index_.end()) {
        throw LookupError("class not in class map: '" + std::string(class_name) + "'");
    }
    return static_cast<int>(it->second);
}

const std::string& VerbMap::verb_name_of(std::string_view class_name) const {
    return rows_[static_cast<std::size_t>(class_id_of(class_name))].second;
}

std::vector<std::string> VerbMap::verbs() const {
    std::set<std::string> s;
    for (const auto& [cls, verb] : rows_) s.insert(verb);
    return {s.begin(), s.end()};
}

int verb_of(std::string_view class_name, const VerbMap& map) {
    return verb_id_of(map.verb_name_of(class_name));
}

const VerbMap& default_verb_map() {
    static const VerbMap map = [] {
        // Verb = longest verb prefix of the class name.
        static constexpr std::string_view classes[] = {
            "align leg screw with table thread",
            "align side panel holes with front panel dowels",
            "attach drawer back panel",
            "attach drawer side panel",
            "attach back panel",
            "attach side panel",
            "attach shelf to table",
            "flip shelf",
            "flip table",
            "flip table top",
            "insert drawer pin",
            "lay down back panel",
            "lay down bottom panel",
            "lay down front panel",
            "lay down leg",
            "lay down shelf",
            "lay down side panel",
            "lay down table top",
            "pick up back panel",
            "pick up bottom panel",
            "pick up front panel",
            "pick up leg",
            "pick up pin",
            "pick up shelf",
            "pick up side panel",
            "pick up table top",
            "position the drawer right side up",
            "push table",
            "push table top",
            "rotate table",
            "slide bottom of drawer",
            "spin leg",
            "tighten leg",
        };
        VerbMap m;
        for (auto cls : classes) {
            std::string_view best;
            for (auto verb : kVerbs) {
                if (cls.starts_with(verb) && verb.size() > best.size()) best = verb;
            }
            m.add(std::string(cls), std::string(best));
        }
        return m;
    }();
    return map;
}

ActionLabel make_label(std::string_view class_name, const VerbMap& map) {
    return {map.class_id_of(class_name), std::string(class_name), verb_of(class_name, map)};
}

Clip remap_clip_to_verbs(Clip clip, const VerbMap& map) {
    const int verb = verb_of(clip.label.class_name, map);
    clip.label = {verb, std::string(kVerbs[static_cast<std::size_t>(verb)]), verb};
    return clip;
}

namespace {

void check_lengths(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.size() != labels.size()) {
        throw ValidationError("prediction/label length mismatch: " + std::to_string(preds.size()) + " vs " +
                              std::to_string(labels.size()));
    }
    if (labels.empty()) {
        throw ValidationError("metrics need at least one sample");
    }
}

} // namespace

double top1_accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
    check_lengths(preds, labels);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double mean_class_accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
    check_lengths(preds, labels);
    std::map<int, std::pair<std::size_t, std::size_t>> per_class; // hits, support
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& [hits, support] = per_class[labels[i]];
        ++support;
        hits += preds[i] == labels[i];
    }
    // Equal supports: the mean of recalls is exactly hits / total, a single rounding.
    const auto support = per_class.begin()->second.second;
    if (std::all_of(per_class.begin(), per_class.end(), [&](const auto& kv) { return kv.second.second == support; })) {
        std::size_t hits = 0;
        for (const auto& [cls, hs] : per_class) hits += hs.first;
        return static_cast<double>(hits) / static_cast<double>(labels.size());
    }
    double sum = 0.0;
    for (const auto& [cls, hs] : per_class) {
        sum += static_cast<double>(hs.first) / static_cast<double>(hs.second);
    }
    return sum / static_cast<double>(per_class.size());
}

ConfusionMatrix confusion_matrix(const std::vector<int>& preds, const std::vector<int>& labels, std::size_t k) {
    if (preds.size() != labels.size()) {
        throw ValidationError("prediction/label length mismatch");
    }
    ConfusionMatrix m(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] < 0 || labels[i] < 0 || static_cast<std::size_t>(preds[i]) >= k ||
            static_cast<std::size_t>(labels[i]) >= k) {
            throw ValidationError("class id out of range for k=" + std::to_string(k));
        }
        ++m[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(preds[i])];
    }
    return m;
}

std::string format_metrics(const Metrics& m) {
    std::ostringstream os;
    os << "mAcc," << format_fixed(m.mean_class_accuracy, 6) << "\n";
    os << "top1," << format_fixed(m.top1, 6) << "\n";
    for (std::size_t i = 0; i < m.confusion.size(); ++i) {
        for (std::size_t j = 0; j < m.confusion[i].size(); ++j) {
            os << "confusion_" << i << "_" << j << "," << m.confusion[i][j] << "\n";
        }
    }
    return os.str();
}

} // namespace skelfuse

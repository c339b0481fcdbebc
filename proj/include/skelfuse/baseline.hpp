#pragma once

/// \file baseline.hpp
/// \brief Desk-scale classifiers over time-pooled encodings.

#include "skelfuse/core.hpp"
#include "skelfuse/taxonomy.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace skelfuse {

using FeatureVector = std::vector<float>;

/// Mean over columns (frames) of each row and channel: rows * 3 values.
FeatureVector pooled_features(const EncodedImage& img);

/// Mean over time of every (channel, y, x) voxel: channels * height * width values.
FeatureVector pooled_features(const HeatmapVolume& vol);

enum class ClassifierKind { NearestCentroid, OneNearestNeighbor };
enum class InputKind { Image, Heatmap };

std::string_view classifier_name(ClassifierKind k);
ClassifierKind classifier_from_name(std::string_view name);
std::string_view input_name(InputKind k);
InputKind input_from_name(std::string_view name);

struct BaselineModel {
    ClassifierKind kind = ClassifierKind::NearestCentroid;
    InputKind input = InputKind::Heatmap;
    std::size_t num_classes = 0;
    std::size_t dims = 0;
    /// Nearest centroid: one centroid per class, indexed by class id.
    /// 1-NN: every training sample, with its label in `reference_labels`.
    std::vector<FeatureVector> references;
    std::vector<int> reference_labels;
    /// Free-form key/value pairs persisted with the model (encoder settings, class names).
    std::map<std::string, std::string> metadata;

    /// Predicted class: nearest reference under Euclidean distance, ties to the lower class id.
    /// Throws ValidationError on a dimension mismatch.
    int predict(const FeatureVector& x) const;
};

/// Labels must lie in [0, num_classes). Throws ValidationError when a class has no sample
/// or the feature dimensions disagree.
BaselineModel train_baseline(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                             ClassifierKind kind, std::size_t num_classes, InputKind input = InputKind::Heatmap);

Metrics evaluate(const BaselineModel& model, const std::vector<FeatureVector>& features,
                 const std::vector<int>& labels);

void save_model(std::ostream& out, const BaselineModel& model);
BaselineModel load_model(std::istream& in);

} // namespace skelfuse

#pragma once

/// \file experiment.hpp
/// \brief Generate -> encode -> train -> evaluate runs over input conditions.
///
/// Config files are `key=value` lines; blank lines and lines starting with '#' are ignored.
///
///   seed=<u64>                    base seed (default 1)
///   train_per_class=<n>           training clips per template (default 100)
///   test_per_class=<n>            test clips per template (default 50)
///   frames_min=<n> frames_max=<n> clip length range (default 24..40)
///   score_model=ground_truth|detected
///   distractor_rate=<r>           overrides every template's distractor rate
///   missing_joint_rate=<p>        per-keypoint drop probability (default 0.02)
///   tau=<t>                       detection score threshold, strict (default 0.1)
///   t_target=<n> height=<n> width=<n> sigma=<s>   heatmap settings (48, 64, 64, 0.6)
///   classifier=nearest_centroid|one_nn
///   labels=action|verb            verb collapses every template onto its verb
///   conditions=<list>             of skeleton-only, objects-only, combined
///   encoders=<list>               of image, heatmap
///   object_modes=<list>           of most_relevant, all
///   jobs=<n>                      worker threads for generation/encoding (default 1)
///   template=<template line>      repeated; see parse_template
///
/// Lists are comma-separated.

#include "skelfuse/baseline.hpp"
#include "skelfuse/heatmap_encoder.hpp"
#include "skelfuse/synthetic.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace skelfuse {

enum class Condition { SkeletonOnly, ObjectsOnly, Combined };

std::string_view condition_name(Condition c);
Condition condition_from_name(std::string_view name);
std::string_view object_mode_name(ObjectMode m);
ObjectMode object_mode_from_name(std::string_view name);

enum class LabelSpace { Action, Verb };

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t train_per_class = 100;
    std::size_t test_per_class = 50;
    GeneratorSettings generator;
    std::optional<double> distractor_rate;
    double tau = 0.1;
    std::size_t t_target = 48;
    std::size_t height = 64;
    std::size_t width = 64;
    double sigma = 0.6;
    ClassifierKind classifier = ClassifierKind::NearestCentroid;
    LabelSpace labels = LabelSpace::Action;
    std::vector<Condition> conditions = {Condition::SkeletonOnly, Condition::ObjectsOnly, Condition::Combined};
    std::vector<InputKind> encoders = {InputKind::Image, InputKind::Heatmap};
    std::vector<ObjectMode> object_modes = {ObjectMode::MostRelevant, ObjectMode::All};
    std::size_t jobs = 1;
    std::vector<ActionTemplate> templates;
};

ExperimentConfig parse_experiment_config(std::string_view text);
std::string format_experiment_config(const ExperimentConfig& config);

struct ExperimentRow {
    Condition condition = Condition::Combined;
    InputKind encoder = InputKind::Heatmap;
    std::optional<ObjectMode> object_mode; ///< empty for skeleton-only rows
    Metrics metrics;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;

    const ExperimentRow* find(Condition c, InputKind e, std::optional<ObjectMode> m = std::nullopt) const;
};

/// The templates with the config's distractor override applied.
std::vector<ActionTemplate> effective_templates(const ExperimentConfig& config);

/// Seed of clip `index` of a split. Every template uses the same seed sequence, so
/// templates sharing a skeleton motion get identical skeleton streams.
std::uint64_t clip_seed(std::uint64_t seed, bool test, std::size_t index);

/// Rows: for every condition x encoder x object mode. Skeleton-only rows ignore the object
/// mode and are emitted once per encoder; the image encoder holds one object per class, so
/// it only runs with most_relevant.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// CSV with header `condition,encoder,object_mode,mAcc,top1`, six decimals.
std::string format_report(const ExperimentReport& report);

} // namespace skelfuse

#include "skelfuse/experiment.hpp"

#include "skelfuse/image_encoder.hpp"
#include "skelfuse/objects.hpp"
#include "skelfuse/parallel.hpp"
#include "skelfuse/rng.hpp"
#include "skelfuse/text.hpp"

#include <algorithm>
#include <sstream>

namespace skelfuse {

std::string_view condition_name(Condition c) {
    switch (c) {
    case Condition::SkeletonOnly: return "skeleton-only";
    case Condition::ObjectsOnly: return "objects-only";
    case Condition::Combined: return "combined";
    }
    return "combined";
}

Condition condition_from_name(std::string_view name) {
    for (auto c : {Condition::SkeletonOnly, Condition::ObjectsOnly, Condition::Combined}) {
        if (condition_name(c) == name) return c;
    }
    throw LookupError("unknown condition: '" + std::string(name) + "'");
}

std::string_view object_mode_name(ObjectMode m) {
    return m == ObjectMode::MostRelevant ? "most_relevant" : "all";
}

ObjectMode object_mode_from_name(std::string_view name) {
    if (name == "most_relevant" || name == "most-relevant") return ObjectMode::MostRelevant;
    if (name == "all") return ObjectMode::All;
    throw LookupError("unknown object mode: '" + std::string(name) + "'");
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view value, Parse parse) {
    std::vector<T> out;
    for (auto item : split(value, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse(item));
    }
    return out;
}

template <typename T, typename Name>
std::string join(const std::vector<T>& items, Name name) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += name(items[i]);
    }
    return out;
}

} // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
    ExperimentConfig cfg;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        const auto count = [&] {
            std::int64_t v = 0;
            if (!parse_int(value, v) || v < 0) throw ParseError(line_no, "bad count for " + std::string(key));
            return static_cast<std::size_t>(v);
        };
        const auto real = [&] {
            double v = 0.0;
            if (!parse_double(value, v)) throw ParseError(line_no, "bad number for " + std::string(key));
            return v;
        };
        try {
            if (key == "seed") {
                std::int64_t v = 0;
                if (!parse_int(value, v)) throw ParseError(line_no, "bad seed");
                cfg.seed = static_cast<std::uint64_t>(v);
            } else if (key == "train_per_class") {
                cfg.train_per_class = count();
            } else if (key == "test_per_class") {
                cfg.test_per_class = count();
            } else if (key == "frames_min") {
                cfg.generator.frames_min = count();
            } else if (key == "frames_max") {
                cfg.generator.frames_max = count();
            } else if (key == "missing_joint_rate") {
                cfg.generator.missing_joint_rate = real();
            } else if (key == "score_model") {
                if (value == "ground_truth") {
                    cfg.generator.score_model = ScoreModel::GroundTruth;
                } else if (value == "detected") {
                    cfg.generator.score_model = ScoreModel::Detected;
                } else {
                    throw ParseError(line_no, "score_model must be ground_truth or detected");
                }
            } else if (key == "view") {
                cfg.generator.view = view_from_name(value);
            } else if (key == "distractor_rate") {
                cfg.distractor_rate = real();
            } else if (key == "tau") {
                cfg.tau = real();
            } else if (key == "t_target") {
                cfg.t_target = count();
            } else if (key == "height") {
                cfg.height = count();
            } else if (key == "width") {
                cfg.width = count();
            } else if (key == "sigma") {
                cfg.sigma = real();
            } else if (key == "classifier") {
                cfg.classifier = classifier_from_name(value);
            } else if (key == "labels") {
                if (value == "action") {
                    cfg.labels = LabelSpace::Action;
                } else if (value == "verb") {
                    cfg.labels = LabelSpace::Verb;
                } else {
                    throw ParseError(line_no, "labels must be action or verb");
                }
            } else if (key == "conditions") {
                cfg.conditions = parse_list<Condition>(value, condition_from_name);
            } else if (key == "encoders") {
                cfg.encoders = parse_list<InputKind>(value, input_from_name);
            } else if (key == "object_modes") {
                cfg.object_modes = parse_list<ObjectMode>(value, object_mode_from_name);
            } else if (key == "jobs") {
                cfg.jobs = std::max<std::size_t>(1, count());
            } else if (key == "template") {
                cfg.templates.push_back(parse_template(value));
            } else {
                throw ParseError(line_no, "unknown config key '" + std::string(key) + "'");
            }
        } catch (const ParseError& e) {
            if (e.line()) throw;
            throw ParseError(line_no, e.what());
        } catch (const LookupError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (cfg.templates.empty()) throw ParseError(0, "config defines no template");
    if (cfg.conditions.empty() || cfg.encoders.empty() || cfg.object_modes.empty()) {
        throw ParseError(0, "conditions, encoders and object_modes must be non-empty");
    }
    return cfg;
}

std::string format_experiment_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "seed=" << c.seed << "\ntrain_per_class=" << c.train_per_class << "\ntest_per_class=" << c.test_per_class
       << "\nframes_min=" << c.generator.frames_min << "\nframes_max=" << c.generator.frames_max
       << "\nmissing_joint_rate=" << format_double(c.generator.missing_joint_rate) << "\nscore_model="
       << (c.generator.score_model == ScoreModel::GroundTruth ? "ground_truth" : "detected")
       << "\nview=" << view_name(c.generator.view) << "\n";
    if (c.distractor_rate) os << "distractor_rate=" << format_double(*c.distractor_rate) << "\n";
    os << "tau=" << format_double(c.tau) << "\nt_target=" << c.t_target << "\nheight=" << c.height
       << "\nwidth=" << c.width << "\nsigma=" << format_double(c.sigma)
       << "\nclassifier=" << classifier_name(c.classifier)
       << "\nlabels=" << (c.labels == LabelSpace::Action ? "action" : "verb")
       << "\nconditions=" << join(c.conditions, condition_name) << "\nencoders=" << join(c.encoders, input_name)
       << "\nobject_modes=" << join(c.object_modes, object_mode_name) << "\njobs=" << c.jobs << "\n";
    for (const auto& t : c.templates) os << "template=" << format_template(t) << "\n";
    return os.str();
}

const ExperimentRow* ExperimentReport::find(Condition c, InputKind e, std::optional<ObjectMode> m) const {
    for (const auto& r : rows) {
        if (r.condition == c && r.encoder == e && r.object_mode == m) return &r;
    }
    return nullptr;
}

std::vector<ActionTemplate> effective_templates(const ExperimentConfig& config) {
    auto templates = config.templates;
    if (config.distractor_rate) {
        for (auto& t : templates) t.distractor_rate = *config.distractor_rate;
    }
    return templates;
}

std::uint64_t clip_seed(std::uint64_t seed, bool test, std::size_t index) {
    return derive_seed(seed, test ? 1u : 0u, index);
}

namespace {

struct Sample {
    Clip clip;
    int label = 0;
};

FeatureVector encode_features(const Clip& clip, InputKind encoder, Condition cond, ObjectMode mode,
                              const ExperimentConfig& cfg, const std::optional<Normalizer>& norm) {
    const bool with_skeleton = cond != Condition::ObjectsOnly;
    const bool with_objects = cond != Condition::SkeletonOnly;
    if (encoder == InputKind::Image) {
        return pooled_features(encode_clip_image(clip, *norm, with_objects, with_skeleton));
    }
    HeatmapOptions opt;
    opt.t_target = cfg.t_target;
    opt.height = cfg.height;
    opt.width = cfg.width;
    opt.sigma = cfg.sigma;
    opt.with_objects = with_objects;
    opt.with_skeleton = with_skeleton;
    opt.object_mode = mode;
    return pooled_features(encode_clip_heatmaps(clip, opt));
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const auto templates = effective_templates(cfg);
    if (templates.empty()) throw ValidationError("experiment has no templates");
    const VerbMap class_map = class_map_of(templates);

    // Dense label per template.
    std::vector<int> template_label(templates.size());
    std::size_t num_classes = templates.size();
    if (cfg.labels == LabelSpace::Verb) {
        std::vector<int> verb_ids;
        for (const auto& t : templates) verb_ids.push_back(verb_id_of(t.verb));
        auto distinct = verb_ids;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t i = 0; i < templates.size(); ++i) {
            template_label[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), verb_ids[i]) -
                                                 distinct.begin());
        }
        num_classes = distinct.size();
    } else {
        for (std::size_t i = 0; i < templates.size(); ++i) template_label[i] = static_cast<int>(i);
    }

    const auto make_split = [&](bool test) {
        const std::size_t per_class = test ? cfg.test_per_class : cfg.train_per_class;
        std::vector<Sample> samples(templates.size() * per_class);
        parallel_for(samples.size(), cfg.jobs, [&](std::size_t i) {
            const std::size_t c = i / per_class;
            const std::size_t k = i % per_class;
            const auto seed = clip_seed(cfg.seed, test, k);
            auto clip = generate_clip(templates[c], seed, cfg.generator, class_map,
                                      std::string(test ? "test-" : "train-") + std::to_string(c) + "-" +
                                          std::to_string(k));
            if (cfg.labels == LabelSpace::Verb) clip = remap_clip_to_verbs(std::move(clip), class_map);
            samples[i] = {filter_clip(std::move(clip), cfg.tau), template_label[c]};
        });
        return samples;
    };
    const auto train = make_split(false);
    const auto test = make_split(true);

    std::optional<Normalizer> norm;
    if (std::find(cfg.encoders.begin(), cfg.encoders.end(), InputKind::Image) != cfg.encoders.end()) {
        std::vector<Clip> clips;
        clips.reserve(train.size());
        for (const auto& s : train) clips.push_back(s.clip);
        norm = fit_normalizer(clips);
    }

    const auto features_of = [&](const std::vector<Sample>& samples, InputKind enc, Condition cond, ObjectMode mode) {
        std::vector<FeatureVector> out(samples.size());
        parallel_for(samples.size(), cfg.jobs,
                     [&](std::size_t i) { out[i] = encode_features(samples[i].clip, enc, cond, mode, cfg, norm); });
        return out;
    };
    std::vector<int> train_labels, test_labels;
    for (const auto& s : train) train_labels.push_back(s.label);
    for (const auto& s : test) test_labels.push_back(s.label);

    ExperimentReport report;
    for (const auto cond : cfg.conditions) {
        for (const auto enc : cfg.encoders) {
            for (const auto mode : cfg.object_modes) {
                if (enc == InputKind::Image && mode == ObjectMode::All) continue;
                std::optional<ObjectMode> row_mode = mode;
                if (cond == Condition::SkeletonOnly) {
                    if (report.find(cond, enc)) continue;
                    row_mode.reset();
                }
                const auto model =
                    train_baseline(features_of(train, enc, cond, mode), train_labels, cfg.classifier, num_classes, enc);
                report.rows.push_back({cond, enc, row_mode, evaluate(model, features_of(test, enc, cond, mode), test_labels)});
            }
        }
    }
    return report;
}

std::string format_report(const ExperimentReport& report) {
    std::ostringstream os;
    os << "condition,encoder,object_mode,mAcc,top1\n";
    for (const auto& r : report.rows) {
        os << condition_name(r.condition) << ',' << input_name(r.encoder) << ','
           << (r.object_mode ? object_mode_name(*r.object_mode) : "none") << ','
           << format_fixed(r.metrics.mean_class_accuracy, 6) << ',' << format_fixed(r.metrics.top1, 6) << '\n';
    }
    return os.str();
}

} // namespace skelfuse

#include "cli.hpp"

#include "skelfuse/baseline.hpp"
#include "skelfuse/experiment.hpp"
#include "skelfuse/heatmap_encoder.hpp"
#include "skelfuse/image_encoder.hpp"
#include "skelfuse/io.hpp"
#include "skelfuse/objects.hpp"
#include "skelfuse/parallel.hpp"
#include "skelfuse/text.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace skelfuse::cli {

namespace {

struct ClipSource {
    std::string manifest;
    std::string class_map;
    std::string split = "all";
    std::size_t jobs = 1;
};

void add_source_options(CLI::App* cmd, ClipSource& src, const std::string& default_split) {
    src.split = default_split;
    cmd->add_option("--manifest", src.manifest, "Dataset manifest (CSV)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--class-map", src.class_map,
                    "Class map (CSV class_name,verb); defaults to the built-in 33-class map")
        ->check(CLI::ExistingFile);
    cmd->add_option("--split", src.split, "Which entries to use")
        ->check(CLI::IsMember({"train", "test", "all"}))
        ->capture_default_str();
    cmd->add_option("--jobs", src.jobs, "Parallel clip workers")->check(CLI::PositiveNumber)->capture_default_str();
}

VerbMap class_map_for(const ClipSource& src) {
    return src.class_map.empty() ? default_verb_map() : load_class_map(src.class_map);
}

std::vector<Clip> load_clips(const ClipSource& src) {
    const auto manifest = load_manifest(src.manifest);
    const auto map = class_map_for(src);
    std::vector<ManifestEntry> entries =
        src.split == "all" ? manifest.entries : manifest.select(split_from_name(src.split));
    std::vector<Clip> clips(entries.size());
    parallel_for(entries.size(), src.jobs, [&](std::size_t i) { clips[i] = load_clip(entries[i], map); });
    return clips;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text(path, text);
    }
}

void check_unique_ids(const std::vector<Clip>& clips) {
    std::set<std::string> ids;
    for (const auto& c : clips) {
        if (!ids.insert(c.source_id).second) {
            throw ValidationError("source id '" + c.source_id + "' appears twice; output files would collide");
        }
    }
}

struct EncoderFlags {
    std::string objects = "most-relevant";
    bool no_skeleton = false;
    double tau = 0.1;
    std::size_t t_target = 48;
    std::size_t height = 64;
    std::size_t width = 64;
    double sigma = 0.6;
};

void add_object_flags(CLI::App* cmd, EncoderFlags& f, std::vector<std::string> modes) {
    cmd->add_option("--objects", f.objects, "Object rows/channels")
        ->check(CLI::IsMember(std::move(modes)))
        ->capture_default_str();
    cmd->add_flag("--no-skeleton", f.no_skeleton, "Zero the skeleton band");
    cmd->add_option("--tau", f.tau, "Keep detections with score > tau")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
}

void add_heatmap_flags(CLI::App* cmd, EncoderFlags& f) {
    cmd->add_option("--t", f.t_target, "Sampled frames per clip")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--height", f.height, "Heatmap height")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--width", f.width, "Heatmap width")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--sigma", f.sigma, "Gaussian sigma in grid pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

HeatmapOptions heatmap_options(const EncoderFlags& f) {
    HeatmapOptions o;
    o.t_target = f.t_target;
    o.height = f.height;
    o.width = f.width;
    o.sigma = f.sigma;
    o.with_skeleton = !f.no_skeleton;
    o.with_objects = f.objects != "none";
    o.object_mode = f.objects == "all" ? ObjectMode::All : ObjectMode::MostRelevant;
    return o;
}

void check_bands(const EncoderFlags& f) {
    if (f.no_skeleton && f.objects == "none") {
        throw CLI::ValidationError("--no-skeleton with --objects none leaves nothing to encode");
    }
}

/// Parses "HxW" or "raw".
std::optional<std::pair<std::size_t, std::size_t>> parse_size(const std::string& s) {
    if (s == "raw") return std::nullopt;
    const auto x = s.find('x');
    std::int64_t h = 0, w = 0;
    if (x == std::string::npos || !parse_int(std::string_view(s).substr(0, x), h) ||
        !parse_int(std::string_view(s).substr(x + 1), w) || h <= 0 || w <= 0) {
        throw CLI::ValidationError("--size must be HxW or raw");
    }
    return std::pair{static_cast<std::size_t>(h), static_cast<std::size_t>(w)};
}

std::string relative_to(const fs::path& p, const fs::path& base) {
    const auto rel = fs::weakly_canonical(p).lexically_relative(fs::weakly_canonical(base));
    return rel.empty() ? p.generic_string() : rel.generic_string();
}

FeatureVector clip_features(const Clip& clip, InputKind input, const EncoderFlags& f,
                            const std::optional<Normalizer>& norm) {
    if (input == InputKind::Image) {
        return pooled_features(encode_clip_image(clip, *norm, f.objects != "none", !f.no_skeleton));
    }
    return pooled_features(encode_clip_heatmaps(clip, heatmap_options(f)));
}

std::string percent(double v) {
    return format_fixed(100.0 * v, 1);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Skeleton + object encodings for action recognition", "skelfuse"};
    app.require_subcommand(1);
    app.fallthrough(false);

    // fit-normalizer
    ClipSource fit_src;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit-normalizer", "Fit the coordinate range on training clips");
    add_source_options(fit, fit_src, "train");
    fit->add_option("--out", fit_out, "Normalizer file")->required();

    // encode-image
    ClipSource img_src;
    EncoderFlags img_flags;
    std::string img_norm, img_out, img_size = "224x224";
    auto* enc_img = app.add_subcommand("encode-image", "Write one column-image PNG and manifest per clip");
    add_source_options(enc_img, img_src, "all");
    add_object_flags(enc_img, img_flags, {"none", "most-relevant"});
    enc_img->add_option("--normalizer", img_norm, "Normalizer file")->required()->check(CLI::ExistingFile);
    enc_img->add_option("--out", img_out, "Output directory")->required();
    enc_img->add_option("--size", img_size, "Output size HxW, or raw for 24 x frames")->capture_default_str();

    // encode-heatmap
    ClipSource hm_src;
    EncoderFlags hm_flags;
    std::string hm_out;
    auto* enc_hm = app.add_subcommand("encode-heatmap", "Write one HMV1 heatmap volume and manifest per clip");
    add_source_options(enc_hm, hm_src, "all");
    add_object_flags(enc_hm, hm_flags, {"none", "most-relevant", "all"});
    add_heatmap_flags(enc_hm, hm_flags);
    enc_hm->add_option("--out", hm_out, "Output directory")->required();

    // select-objects
    ClipSource sel_src;
    double sel_tau = 0.1;
    std::string sel_out;
    auto* sel = app.add_subcommand("select-objects", "List the most relevant object per class and frame");
    add_source_options(sel, sel_src, "all");
    sel->add_option("--tau", sel_tau, "Keep detections with score > tau")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sel->add_option("--out", sel_out, "Output CSV (default: standard output)");

    // remap-verbs
    ClipSource remap_src;
    std::string remap_out, remap_map_out;
    auto* remap = app.add_subcommand("remap-verbs", "Relabel a manifest with verb-only classes");
    remap->add_option("--manifest", remap_src.manifest, "Dataset manifest (CSV)")
        ->required()
        ->check(CLI::ExistingFile);
    remap->add_option("--class-map", remap_src.class_map, "Class map; defaults to the built-in map")
        ->check(CLI::ExistingFile);
    remap->add_option("--out", remap_out, "Relabelled manifest")->required();
    remap->add_option("--out-class-map", remap_map_out, "Identity verb class map for the relabelled manifest");

    // synth
    std::string synth_cfg, synth_out;
    std::optional<std::uint64_t> synth_seed;
    std::size_t synth_jobs = 1;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from an experiment config");
    synth->add_option("--config", synth_cfg, "Experiment config")->required()->check(CLI::ExistingFile);
    synth->add_option("--seed", synth_seed, "Override the config seed");
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--jobs", synth_jobs, "Parallel clip workers")->check(CLI::PositiveNumber)->capture_default_str();

    // train
    ClipSource train_src;
    EncoderFlags train_flags;
    std::string train_encoder = "heatmap", train_classifier = "nearest-centroid", train_norm, train_out;
    auto* train = app.add_subcommand("train", "Train a baseline classifier on the training split");
    add_source_options(train, train_src, "train");
    add_object_flags(train, train_flags, {"none", "most-relevant", "all"});
    add_heatmap_flags(train, train_flags);
    train->add_option("--encoder", train_encoder, "Input encoding")
        ->check(CLI::IsMember({"image", "heatmap"}))
        ->capture_default_str();
    train->add_option("--classifier", train_classifier, "Baseline classifier")
        ->check(CLI::IsMember({"nearest-centroid", "one-nn"}))
        ->capture_default_str();
    train->add_option("--normalizer", train_norm, "Normalizer for the image encoder (default: fit on the clips)")
        ->check(CLI::ExistingFile);
    train->add_option("--out", train_out, "Model file")->required();

    // evaluate
    ClipSource eval_src;
    std::string eval_model, eval_out;
    auto* eval = app.add_subcommand("evaluate", "Evaluate a trained model");
    add_source_options(eval, eval_src, "test");
    eval->add_option("--model", eval_model, "Model file")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", eval_out, "metric,value CSV (default: standard output)");

    // experiment
    std::string exp_cfg, exp_out;
    std::optional<std::uint64_t> exp_seed;
    std::optional<std::size_t> exp_jobs;
    auto* exp = app.add_subcommand("experiment", "Run the skeleton/object condition table on synthetic data");
    exp->add_option("--config", exp_cfg, "Experiment config")->required()->check(CLI::ExistingFile);
    exp->add_option("--seed", exp_seed, "Override the config seed");
    exp->add_option("--jobs", exp_jobs, "Override the config worker count")->check(CLI::PositiveNumber);
    exp->add_option("--out", exp_out, "Report CSV (default: standard output)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        check_bands(img_flags);
        check_bands(hm_flags);
        check_bands(train_flags);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (fit->parsed()) {
            const auto clips = load_clips(fit_src);
            write_text(fit_out, serialize_normalizer(fit_normalizer(clips)));
        } else if (enc_img->parsed()) {
            const auto norm = parse_normalizer(read_file(img_norm));
            const auto size = parse_size(img_size);
            const auto clips = load_clips(img_src);
            check_unique_ids(clips);
            fs::create_directories(img_out);
            parallel_for(clips.size(), img_src.jobs, [&](std::size_t i) {
                const auto clip = filter_clip(clips[i], img_flags.tau);
                auto img = encode_clip_image(clip, norm, img_flags.objects != "none", !img_flags.no_skeleton);
                if (size) img = resize_bilinear(img, size->first, size->second);
                const fs::path base = fs::path(img_out) / clip.source_id;
                write_png(img, base.string() + ".png");
                write_text(base.string() + ".txt", image_manifest(img, norm));
            });
        } else if (enc_hm->parsed()) {
            const auto clips = load_clips(hm_src);
            check_unique_ids(clips);
            fs::create_directories(hm_out);
            const auto opt = heatmap_options(hm_flags);
            parallel_for(clips.size(), hm_src.jobs, [&](std::size_t i) {
                const auto clip = filter_clip(clips[i], hm_flags.tau);
                const auto vol = encode_clip_heatmaps(clip, opt);
                const fs::path base = fs::path(hm_out) / clip.source_id;
                write_volume_file(vol, base.string() + ".hmv");
                write_text(base.string() + ".txt", volume_manifest(vol));
            });
        } else if (sel->parsed()) {
            const auto clips = load_clips(sel_src);
            std::ostringstream os;
            os << "source_id,frame_index,class,x,y,score,present\n";
            for (const auto& clip : clips) {
                for (const auto& f : clip.frames) {
                    for (const auto& p : select_most_relevant(filter_by_score(f.detections, sel_tau), f.skeleton)) {
                        os << clip.source_id << ',' << f.skeleton.frame_index << ',' << object_name(p.object_class)
                           << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
                           << format_double(p.score) << ',' << (p.present ? 1 : 0) << '\n';
                    }
                }
            }
            emit(sel_out, os.str(), out);
        } else if (remap->parsed()) {
            auto manifest = load_manifest(remap_src.manifest);
            const auto map = class_map_for(remap_src);
            const fs::path out_dir = fs::absolute(remap_out).parent_path();
            VerbMap verbs;
            for (auto& e : manifest.entries) {
                e.label_name = std::string(kVerbs[static_cast<std::size_t>(verb_of(e.label_name, map))]);
                e.skeleton_path = relative_to(e.skeleton_path, out_dir);
                e.detection_path = relative_to(e.detection_path, out_dir);
            }
            for (const auto& v : map.verbs()) verbs.add(v, v);
            std::ostringstream os;
            serialize_manifest(os, manifest);
            write_text(remap_out, os.str());
            if (!remap_map_out.empty()) {
                std::ostringstream ms;
                serialize_class_map(ms, verbs);
                write_text(remap_map_out, ms.str());
            }
        } else if (synth->parsed()) {
            auto cfg = parse_experiment_config(read_file(synth_cfg));
            if (synth_seed) cfg.seed = *synth_seed;
            const auto templates = effective_templates(cfg);
            const auto class_map = class_map_of(templates);
            const fs::path root(synth_out);
            fs::create_directories(root / "clips");

            struct Job {
                std::size_t cls, index;
                bool test;
            };
            std::vector<Job> jobs;
            for (bool test : {false, true}) {
                const auto n = test ? cfg.test_per_class : cfg.train_per_class;
                for (std::size_t c = 0; c < templates.size(); ++c) {
                    for (std::size_t k = 0; k < n; ++k) jobs.push_back({c, k, test});
                }
            }
            DatasetManifest manifest;
            manifest.entries.resize(jobs.size());
            parallel_for(jobs.size(), synth_jobs, [&](std::size_t i) {
                const auto& j = jobs[i];
                const std::string id =
                    std::string(j.test ? "test" : "train") + "_c" + std::to_string(j.cls) + "_" + std::to_string(j.index);
                const auto clip = generate_clip(templates[j.cls], clip_seed(cfg.seed, j.test, j.index),
                                                cfg.generator, class_map, id);
                const fs::path skel = fs::path("clips") / (id + ".skel");
                const fs::path det = fs::path("clips") / (id + ".det");
                write_clip_files(clip, root / skel, root / det);
                manifest.entries[i] = {id, cfg.generator.view, templates[j.cls].class_name, skel, det,
                                       j.test ? Split::Test : Split::Train};
            });
            std::ostringstream ms, cs;
            serialize_manifest(ms, manifest);
            serialize_class_map(cs, class_map);
            write_text(root / "manifest.csv", ms.str());
            write_text(root / "class_map.csv", cs.str());
        } else if (train->parsed()) {
            const auto clips = load_clips(train_src);
            if (clips.empty()) throw ValidationError("no clips to train on");
            const auto input = input_from_name(train_encoder);
            std::vector<Clip> filtered;
            for (const auto& c : clips) filtered.push_back(filter_clip(c, train_flags.tau));
            std::optional<Normalizer> norm;
            if (input == InputKind::Image) {
                norm = train_norm.empty() ? fit_normalizer(filtered) : parse_normalizer(read_file(train_norm));
            }
            std::map<int, std::string> names;
            for (const auto& c : filtered) names.emplace(c.label.class_id, c.label.class_name);
            std::map<int, int> dense;
            for (const auto& [id, name] : names) dense.emplace(id, static_cast<int>(dense.size()));

            std::vector<FeatureVector> features(filtered.size());
            std::vector<int> labels(filtered.size());
            parallel_for(filtered.size(), train_src.jobs, [&](std::size_t i) {
                features[i] = clip_features(filtered[i], input, train_flags, norm);
                labels[i] = dense.at(filtered[i].label.class_id);
            });
            auto model = train_baseline(features, labels, classifier_from_name(train_classifier), dense.size(), input);
            model.metadata["objects"] = train_flags.objects;
            model.metadata["skeleton"] = train_flags.no_skeleton ? "0" : "1";
            model.metadata["tau"] = format_double(train_flags.tau);
            model.metadata["t_target"] = std::to_string(train_flags.t_target);
            model.metadata["height"] = std::to_string(train_flags.height);
            model.metadata["width"] = std::to_string(train_flags.width);
            model.metadata["sigma"] = format_double(train_flags.sigma);
            if (norm) {
                model.metadata["c_min"] = format_double(norm->c_min());
                model.metadata["c_max"] = format_double(norm->c_max());
            }
            for (const auto& [id, name] : names) model.metadata["class." + std::to_string(dense.at(id))] = name;
            std::ostringstream os;
            save_model(os, model);
            write_text(train_out, os.str());
        } else if (eval->parsed()) {
            std::istringstream ms(read_file(eval_model));
            const auto model = load_model(ms);
            const auto meta = [&](const std::string& key) {
                const auto it = model.metadata.find(key);
                if (it == model.metadata.end()) throw ValidationError("model lacks '" + key + "'");
                return it->second;
            };
            const auto number = [&](const std::string& key) {
                double v = 0.0;
                if (!parse_double(meta(key), v)) throw ValidationError("model has a bad '" + key + "'");
                return v;
            };
            EncoderFlags flags;
            flags.objects = meta("objects");
            flags.no_skeleton = meta("skeleton") == "0";
            flags.tau = number("tau");
            flags.t_target = static_cast<std::size_t>(number("t_target"));
            flags.height = static_cast<std::size_t>(number("height"));
            flags.width = static_cast<std::size_t>(number("width"));
            flags.sigma = number("sigma");
            std::optional<Normalizer> norm;
            if (model.input == InputKind::Image) norm = Normalizer(number("c_min"), number("c_max"));
            std::map<std::string, int> dense;
            for (std::size_t c = 0; c < model.num_classes; ++c) dense.emplace(meta("class." + std::to_string(c)), c);

            const auto clips = load_clips(eval_src);
            if (clips.empty()) throw ValidationError("no clips to evaluate");
            std::vector<FeatureVector> features(clips.size());
            std::vector<int> labels(clips.size());
            parallel_for(clips.size(), eval_src.jobs, [&](std::size_t i) {
                const auto it = dense.find(clips[i].label.class_name);
                if (it == dense.end()) {
                    throw ValidationError("clip '" + clips[i].source_id + "' has class '" +
                                          clips[i].label.class_name + "' unknown to the model");
                }
                labels[i] = it->second;
                features[i] = clip_features(filter_clip(clips[i], flags.tau), model.input, flags, norm);
            });
            const auto metrics = evaluate(model, features, labels);
            emit(eval_out, format_metrics(metrics), out);
            err << "mAcc " << percent(metrics.mean_class_accuracy) << "%  top1 " << percent(metrics.top1) << "%\n";
        } else if (exp->parsed()) {
            auto cfg = parse_experiment_config(read_file(exp_cfg));
            if (exp_seed) cfg.seed = *exp_seed;
            if (exp_jobs) cfg.jobs = *exp_jobs;
            const auto report = run_experiment(cfg);
            emit(exp_out, format_report(report), out);
            for (const auto& r : report.rows) {
                err << condition_name(r.condition) << " / " << input_name(r.encoder) << " / "
                    << (r.object_mode ? object_mode_name(*r.object_mode) : "none") << ": mAcc "
                    << percent(r.metrics.mean_class_accuracy) << "%, top1 " << percent(r.metrics.top1) << "%\n";
            }
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace skelfuse::cli

#include "cli.hpp"
#include "skelfuse/baseline.hpp"
#include "skelfuse/experiment.hpp"
#include "skelfuse/heatmap_encoder.hpp"
#include "skelfuse/image_encoder.hpp"
#include "skelfuse/io.hpp"
#include "skelfuse/objects.hpp"
#include "skelfuse/synthetic.hpp"
#include "skelfuse/taxonomy.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace skelfuse;

namespace {

py::array_t<std::uint8_t> image_array(const EncodedImage& img) {
    py::array_t<std::uint8_t> out({img.rows, img.cols, std::size_t{3}});
    std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
    return out;
}

py::array_t<float> volume_array(const HeatmapVolume& v) {
    py::array_t<float> out({std::size_t{v.channels}, std::size_t{v.frames}, std::size_t{v.height}, std::size_t{v.width}});
    std::copy(v.values.begin(), v.values.end(), out.mutable_data());
    return out;
}

HeatmapVolume volume_from(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 4) throw py::value_error("volume must be 4-dimensional (channels, frames, height, width)");
    HeatmapVolume v(static_cast<std::uint32_t>(a.shape(0)), static_cast<std::uint32_t>(a.shape(1)),
                    static_cast<std::uint32_t>(a.shape(2)), static_cast<std::uint32_t>(a.shape(3)));
    std::copy(a.data(), a.data() + a.size(), v.values.begin());
    return v;
}

Mask mask_from(const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("pixels must have shape (n, 2) holding (x, y)");
    std::vector<Pixel> px(static_cast<std::size_t>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.shape(0); ++i) px[static_cast<std::size_t>(i)] = {a.at(i, 0), a.at(i, 1)};
    return Mask(std::move(px));
}

py::array_t<std::int32_t> mask_array(const Mask& m) {
    py::array_t<std::int32_t> out({m.size(), std::size_t{2}});
    auto r = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.size(); ++i) {
        r(i, 0) = m.pixels()[i].x;
        r(i, 1) = m.pixels()[i].y;
    }
    return out;
}

/// (persons, 17, 3) array of x, y, score.
py::array_t<double> persons_array(const SkeletonFrame& f) {
    py::array_t<double> out({f.persons.size(), kNumJoints, std::size_t{3}});
    auto r = out.mutable_unchecked<3>();
    for (std::size_t p = 0; p < f.persons.size(); ++p) {
        for (std::size_t j = 0; j < kNumJoints; ++j) {
            r(p, j, 0) = f.persons[p][j].x;
            r(p, j, 1) = f.persons[p][j].y;
            r(p, j, 2) = f.persons[p][j].score;
        }
    }
    return out;
}

std::vector<Person> persons_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 3 || a.shape(1) != static_cast<py::ssize_t>(kNumJoints) || a.shape(2) != 3) {
        throw py::value_error("persons must have shape (n, 17, 3) holding (x, y, score)");
    }
    std::vector<Person> out(static_cast<std::size_t>(a.shape(0)));
    for (py::ssize_t p = 0; p < a.shape(0); ++p) {
        for (py::ssize_t j = 0; j < 17; ++j) {
            out[p][j] = {a.at(p, j, 0), a.at(p, j, 1), a.at(p, j, 2)};
        }
    }
    return out;
}

py::dict point_dict(const ObjectPoint& p) {
    py::dict d;
    d["object_class"] = std::string(object_name(p.object_class));
    d["x"] = p.x;
    d["y"] = p.y;
    d["score"] = p.score;
    d["present"] = p.present;
    return d;
}

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["mAcc"] = m.mean_class_accuracy;
    d["top1"] = m.top1;
    d["confusion"] = m.confusion;
    return d;
}

std::vector<float> to_features(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Skeleton and object encodings for action recognition";

    // Translators are tried newest first, so the base class goes in first.
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<LookupError>(m, "LookupError", base);
    py::register_exception<ValidationError>(m, "ValidationError", base);

    m.attr("JOINT_NAMES") = channel_manifest();
    m.def("channel_manifest", &channel_manifest);
    m.attr("VERBS") = std::vector<std::string>(kVerbs.begin(), kVerbs.end());

    py::class_<Normalizer>(m, "Normalizer")
        .def(py::init<double, double>(), py::arg("c_min"), py::arg("c_max"))
        .def_property_readonly("c_min", &Normalizer::c_min)
        .def_property_readonly("c_max", &Normalizer::c_max)
        .def("__repr__", [](const Normalizer& n) {
            return "Normalizer(" + std::to_string(n.c_min()) + ", " + std::to_string(n.c_max()) + ")";
        });

    py::class_<ObjectInstance>(m, "ObjectInstance")
        .def(py::init([](const std::string& cls, double score, const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& pixels) {
                 return ObjectInstance(object_from_name(cls), score, mask_from(pixels));
             }),
             py::arg("object_class"), py::arg("score"), py::arg("pixels"))
        .def_property_readonly("object_class", [](const ObjectInstance& o) { return std::string(object_name(o.object_class())); })
        .def_property_readonly("score", &ObjectInstance::score)
        .def_property_readonly("centroid", [](const ObjectInstance& o) { return py::make_tuple(o.centroid().x, o.centroid().y); })
        .def_property_readonly("pixels", [](const ObjectInstance& o) { return mask_array(o.mask()); });

    py::class_<Clip>(m, "Clip")
        .def_property_readonly("source_id", [](const Clip& c) { return c.source_id; })
        .def_property_readonly("class_name", [](const Clip& c) { return c.label.class_name; })
        .def_property_readonly("class_id", [](const Clip& c) { return c.label.class_id; })
        .def_property_readonly("verb_id", [](const Clip& c) { return c.label.verb_id; })
        .def_property_readonly("view", [](const Clip& c) { return std::string(view_name(c.view)); })
        .def("__len__", &Clip::length)
        .def("frame_indices", [](const Clip& c) {
            std::vector<std::int64_t> out;
            for (const auto& f : c.frames) out.push_back(f.skeleton.frame_index);
            return out;
        })
        .def("persons", [](const Clip& c, std::size_t i) { return persons_array(c.frames.at(i).skeleton); },
             py::arg("frame"), "Keypoints of one frame as a (persons, 17, 3) array of x, y, score.")
        .def("detections", [](const Clip& c, std::size_t i) { return c.frames.at(i).detections; }, py::arg("frame"))
        .def("__eq__", [](const Clip& a, const Clip& b) { return a == b; });

    m.def(
        "make_clip",
        [](const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& persons,
           std::vector<DetectionSet> detections, const std::string& class_name, const std::string& view,
           const std::string& source_id) {
            if (!detections.empty() && detections.size() != persons.size()) {
                throw py::value_error("need one detection list per frame");
            }
            Clip c;
            c.source_id = source_id;
            c.view = view_from_name(view);
            c.label = make_label(class_name, default_verb_map());
            for (std::size_t i = 0; i < persons.size(); ++i) {
                ClipFrame f;
                f.skeleton.frame_index = static_cast<std::int64_t>(i);
                f.skeleton.persons = persons_from(persons[i]);
                if (!detections.empty()) f.detections = std::move(detections[i]);
                c.frames.push_back(std::move(f));
            }
            validate(c);
            return c;
        },
        py::arg("persons"), py::arg("detections") = std::vector<DetectionSet>{}, py::arg("class_name") = "pick up leg",
        py::arg("view") = "top", py::arg("source_id") = "clip",
        "Builds a clip from per-frame (persons, 17, 3) arrays; the label comes from the built-in class map.");

    // Ingestion
    m.def(
        "load_manifest",
        [](const std::filesystem::path& path) {
            std::vector<py::dict> out;
            for (const auto& e : load_manifest(path).entries) {
                py::dict d;
                d["source_id"] = e.source_id;
                d["view"] = std::string(view_name(e.view));
                d["label_name"] = e.label_name;
                d["skeleton_path"] = e.skeleton_path;
                d["detection_path"] = e.detection_path;
                d["split"] = std::string(split_name(e.split));
                out.push_back(std::move(d));
            }
            return out;
        },
        py::arg("path"));
    m.def(
        "load_clips",
        [](const std::filesystem::path& manifest, std::optional<std::filesystem::path> class_map,
           std::optional<std::string> split) {
            const auto map = class_map ? load_class_map(*class_map) : default_verb_map();
            const auto man = load_manifest(manifest);
            const auto entries = split ? man.select(split_from_name(*split)) : man.entries;
            std::vector<Clip> clips;
            for (const auto& e : entries) clips.push_back(load_clip(e, map));
            return clips;
        },
        py::arg("manifest"), py::arg("class_map") = py::none(), py::arg("split") = py::none());
    m.def("write_clip_files", &write_clip_files, py::arg("clip"), py::arg("skeleton_path"), py::arg("detection_path"));
    m.def("decode_rle", [](const std::string& rle) { return mask_array(decode_rle(rle)); }, py::arg("rle"));
    m.def(
        "encode_rle",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& pixels) {
            return encode_rle(mask_from(pixels));
        },
        py::arg("pixels"));

    // Objects
    m.def(
        "mask_centroid",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& pixels) {
            const auto c = mask_centroid(mask_from(pixels));
            return py::make_tuple(c.x, c.y);
        },
        py::arg("pixels"));
    m.def("filter_by_score", &filter_by_score, py::arg("detections"), py::arg("tau") = 0.1);
    m.def(
        "select_most_relevant",
        [](const DetectionSet& d, const py::array_t<double, py::array::c_style | py::array::forcecast>& persons) {
            SkeletonFrame f;
            f.persons = persons_from(persons);
            std::vector<py::dict> out;
            for (const auto& p : select_most_relevant(d, f)) out.push_back(point_dict(p));
            return out;
        },
        py::arg("detections"), py::arg("persons"));

    // Image encoder
    m.def("fit_normalizer", [](const std::vector<Clip>& clips) { return fit_normalizer(clips); }, py::arg("clips"));
    m.def("normalize_coord", &normalize_coord, py::arg("v"), py::arg("normalizer"));
    m.def(
        "encode_clip_image",
        [](const Clip& clip, const Normalizer& n, bool with_objects, bool with_skeleton, double tau) {
            return image_array(encode_clip_image(filter_clip(clip, tau), n, with_objects, with_skeleton));
        },
        py::arg("clip"), py::arg("normalizer"), py::arg("with_objects") = true, py::arg("with_skeleton") = true,
        py::arg("tau") = 0.1, "(24, frames, 3) uint8 column image.");
    m.def(
        "resize_bilinear",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a, std::size_t h, std::size_t w) {
            if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("image must have shape (rows, cols, 3)");
            EncodedImage img(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
            std::copy(a.data(), a.data() + a.size(), img.pixels.begin());
            return image_array(resize_bilinear(img, h, w));
        },
        py::arg("image"), py::arg("height"), py::arg("width"));

    // Heatmap encoder
    m.def(
        "gaussian_heatmap",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points, std::size_t h, std::size_t w,
           double sigma) {
            if (points.ndim() != 2 || points.shape(1) != 3) throw py::value_error("points must have shape (n, 3)");
            std::vector<ScoredPoint> pts;
            for (py::ssize_t i = 0; i < points.shape(0); ++i) pts.push_back({points.at(i, 0), points.at(i, 1), points.at(i, 2)});
            const auto hm = gaussian_heatmap(pts, h, w, sigma);
            py::array_t<double> out({h, w});
            std::copy(hm.values.begin(), hm.values.end(), out.mutable_data());
            return out;
        },
        py::arg("points"), py::arg("height"), py::arg("width"), py::arg("sigma") = 0.6);
    m.def("temporal_sample_indices", &temporal_sample_indices, py::arg("n"), py::arg("t_target"));
    m.def(
        "clip_crop_box",
        [](const Clip& c) {
            const auto b = clip_crop_box(c);
            return py::make_tuple(b.x0, b.y0, b.x1, b.y1);
        },
        py::arg("clip"));
    m.def(
        "encode_clip_heatmaps",
        [](const Clip& clip, std::size_t t_target, std::size_t height, std::size_t width, double sigma,
           bool with_objects, bool with_skeleton, const std::string& object_mode, double tau) {
            HeatmapOptions o;
            o.t_target = t_target;
            o.height = height;
            o.width = width;
            o.sigma = sigma;
            o.with_objects = with_objects;
            o.with_skeleton = with_skeleton;
            o.object_mode = object_mode_from_name(object_mode);
            return volume_array(encode_clip_heatmaps(filter_clip(clip, tau), o));
        },
        py::arg("clip"), py::arg("t_target") = 48, py::arg("height") = 64, py::arg("width") = 64,
        py::arg("sigma") = 0.6, py::arg("with_objects") = true, py::arg("with_skeleton") = true,
        py::arg("object_mode") = "most_relevant", py::arg("tau") = 0.1, "(24, T, H, W) float32 volume.");
    m.def(
        "write_volume",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& a, const std::filesystem::path& path) {
            write_volume_file(volume_from(a), path);
        },
        py::arg("volume"), py::arg("path"));
    m.def("read_volume", [](const std::filesystem::path& path) { return volume_array(read_volume_file(path)); },
          py::arg("path"));

    // Taxonomy and metrics
    m.def("verb_of", [](const std::string& name) { return verb_of(name, default_verb_map()); }, py::arg("class_name"));
    m.def("default_class_map", [] { return default_verb_map().rows(); });
    m.def("top1_accuracy", &top1_accuracy, py::arg("preds"), py::arg("labels"));
    m.def("mean_class_accuracy", &mean_class_accuracy, py::arg("preds"), py::arg("labels"));
    m.def("confusion_matrix", &confusion_matrix, py::arg("preds"), py::arg("labels"), py::arg("k"));

    // Synthetic data and baselines
    m.def(
        "generate_clip",
        [](const std::string& template_line, std::uint64_t seed, bool detected_scores) {
            const auto t = parse_template(template_line);
            GeneratorSettings s;
            s.score_model = detected_scores ? ScoreModel::Detected : ScoreModel::GroundTruth;
            return generate_clip(t, seed, s, class_map_of({t}));
        },
        py::arg("template"), py::arg("seed"), py::arg("detected_scores") = false,
        "Template line `<class>|<verb>|<object or ->|<skeleton motion>|<object motion>[|noise=..|distractors=..]`.");
    m.def(
        "pooled_image_features",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
            if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("image must have shape (rows, cols, 3)");
            EncodedImage img(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
            std::copy(a.data(), a.data() + a.size(), img.pixels.begin());
            const auto f = pooled_features(img);
            return py::array_t<float>(f.size(), f.data());
        },
        py::arg("image"));
    m.def(
        "pooled_volume_features",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
            const auto f = pooled_features(volume_from(a));
            return py::array_t<float>(f.size(), f.data());
        },
        py::arg("volume"));

    py::class_<BaselineModel>(m, "BaselineModel")
        .def_property_readonly("num_classes", [](const BaselineModel& b) { return b.num_classes; })
        .def_property_readonly("dims", [](const BaselineModel& b) { return b.dims; })
        .def_property_readonly("kind", [](const BaselineModel& b) { return std::string(classifier_name(b.kind)); })
        .def("predict", [](const BaselineModel& b, const py::array_t<float, py::array::c_style | py::array::forcecast>& x) {
            return b.predict(to_features(x));
        })
        .def("evaluate", [](const BaselineModel& b, const std::vector<py::array_t<float, py::array::c_style | py::array::forcecast>>& xs,
                            const std::vector<int>& labels) {
            std::vector<FeatureVector> f;
            for (const auto& x : xs) f.push_back(to_features(x));
            return metrics_dict(evaluate(b, f, labels));
        }, py::arg("features"), py::arg("labels"));
    m.def(
        "train_baseline",
        [](const std::vector<py::array_t<float, py::array::c_style | py::array::forcecast>>& xs, const std::vector<int>& labels,
           const std::string& kind, std::size_t num_classes) {
            std::vector<FeatureVector> f;
            for (const auto& x : xs) f.push_back(to_features(x));
            return train_baseline(f, labels, classifier_from_name(kind), num_classes);
        },
        py::arg("features"), py::arg("labels"), py::arg("kind") = "nearest_centroid", py::arg("num_classes"));

    m.def(
        "run_experiment",
        [](const std::string& config_text) {
            ExperimentReport report;
            {
                py::gil_scoped_release release;
                report = run_experiment(parse_experiment_config(config_text));
            }
            std::vector<py::dict> rows;
            for (const auto& r : report.rows) {
                auto d = metrics_dict(r.metrics);
                d["condition"] = std::string(condition_name(r.condition));
                d["encoder"] = std::string(input_name(r.encoder));
                d["object_mode"] = r.object_mode ? std::string(object_mode_name(*r.object_mode)) : std::string("none");
                rows.push_back(std::move(d));
            }
            return rows;
        },
        py::arg("config_text"), "Runs an experiment from config text; one dict per report row.");

    m.def(
        "cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "skelfuse");
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a `skelfuse` subcommand in-process; returns (exit code, stdout, stderr).");
}

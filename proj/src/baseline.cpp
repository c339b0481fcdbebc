#include "skelfuse/baseline.hpp"

#include "skelfuse/text.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace skelfuse {

FeatureVector pooled_features(const EncodedImage& img) {
    FeatureVector out(img.rows * 3, 0.0f);
    if (img.cols == 0) return out;
    for (std::size_t r = 0; r < img.rows; ++r) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
            double sum = 0.0;
            for (std::size_t c = 0; c < img.cols; ++c) sum += img.at(r, c, ch);
            out[r * 3 + ch] = static_cast<float>(sum / static_cast<double>(img.cols));
        }
    }
    return out;
}

FeatureVector pooled_features(const HeatmapVolume& vol) {
    const std::size_t plane = std::size_t{vol.height} * vol.width;
    FeatureVector out(std::size_t{vol.channels} * plane, 0.0f);
    if (vol.frames == 0) return out;
    std::vector<double> acc(plane);
    for (std::size_t c = 0; c < vol.channels; ++c) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t t = 0; t < vol.frames; ++t) {
            const float* src = &vol.values[vol.offset(c, t, 0, 0)];
            for (std::size_t i = 0; i < plane; ++i) acc[i] += src[i];
        }
        for (std::size_t i = 0; i < plane; ++i) {
            out[c * plane + i] = static_cast<float>(acc[i] / static_cast<double>(vol.frames));
        }
    }
    return out;
}

std::string_view classifier_name(ClassifierKind k) {
    return k == ClassifierKind::NearestCentroid ? "nearest_centroid" : "one_nn";
}

ClassifierKind classifier_from_name(std::string_view name) {
    if (name == "nearest_centroid" || name == "nearest-centroid") return ClassifierKind::NearestCentroid;
    if (name == "one_nn" || name == "one-nn") return ClassifierKind::OneNearestNeighbor;
    throw LookupError("unknown classifier: '" + std::string(name) + "'");
}

std::string_view input_name(InputKind k) {
    return k == InputKind::Image ? "image" : "heatmap";
}

InputKind input_from_name(std::string_view name) {
    if (name == "image") return InputKind::Image;
    if (name == "heatmap") return InputKind::Heatmap;
    throw LookupError("unknown encoder: '" + std::string(name) + "'");
}

namespace {

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return sum;
}

} // namespace

int BaselineModel::predict(const FeatureVector& x) const {
    if (x.size() != dims) {
        throw ValidationError("feature dimension mismatch: model expects " + std::to_string(dims) + ", got " +
                              std::to_string(x.size()));
    }
    int best_label = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < references.size(); ++i) {
        const double d = squared_distance(references[i], x);
        const int label = reference_labels[i];
        if (d < best || (d == best && label < best_label)) {
            best = d;
            best_label = label;
        }
    }
    return best_label;
}

BaselineModel train_baseline(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                             ClassifierKind kind, std::size_t num_classes, InputKind input) {
    if (features.size() != labels.size()) {
        throw ValidationError("feature/label count mismatch");
    }
    if (features.empty() || num_classes == 0) {
        throw ValidationError("cannot train on an empty set");
    }
    BaselineModel m;
    m.kind = kind;
    m.input = input;
    m.num_classes = num_classes;
    m.dims = features.front().size();

    std::vector<std::size_t> counts(num_classes, 0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != m.dims) throw ValidationError("inconsistent feature dimensions");
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
            throw ValidationError("label " + std::to_string(labels[i]) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
        }
        ++counts[static_cast<std::size_t>(labels[i])];
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (counts[c] == 0) throw ValidationError("class " + std::to_string(c) + " has no training sample");
    }

    if (kind == ClassifierKind::OneNearestNeighbor) {
        m.references = features;
        m.reference_labels = labels;
        return m;
    }
    std::vector<std::vector<double>> sums(num_classes, std::vector<double>(m.dims, 0.0));
    for (std::size_t i = 0; i < features.size(); ++i) {
        auto& s = sums[static_cast<std::size_t>(labels[i])];
        for (std::size_t d = 0; d < m.dims; ++d) s[d] += features[i][d];
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        FeatureVector centroid(m.dims);
        for (std::size_t d = 0; d < m.dims; ++d) {
            centroid[d] = static_cast<float>(sums[c][d] / static_cast<double>(counts[c]));
        }
        m.references.push_back(std::move(centroid));
        m.reference_labels.push_back(static_cast<int>(c));
    }
    return m;
}

Metrics evaluate(const BaselineModel& model, const std::vector<FeatureVector>& features,
                 const std::vector<int>& labels) {
    std::vector<int> preds;
    preds.reserve(features.size());
    for (const auto& f : features) preds.push_back(model.predict(f));
    Metrics m;
    m.mean_class_accuracy = mean_class_accuracy(preds, labels);
    m.top1 = top1_accuracy(preds, labels);
    m.confusion = confusion_matrix(preds, labels, model.num_classes);
    return m;
}

void save_model(std::ostream& out, const BaselineModel& m) {
    out << "skelfuse-model,1\n";
    out << "kind," << classifier_name(m.kind) << "\n";
    out << "input," << input_name(m.input) << "\n";
    out << "num_classes," << m.num_classes << "\n";
    out << "dims," << m.dims << "\n";
    for (const auto& [k, v] : m.metadata) out << "meta," << k << "," << v << "\n";
    std::array<char, 64> buf{};
    for (std::size_t i = 0; i < m.references.size(); ++i) {
        out << "ref," << m.reference_labels[i];
        for (float f : m.references[i]) {
            const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), f);
            out << ',';
            out.write(buf.data(), end - buf.data());
        }
        out << "\n";
    }
}

BaselineModel load_model(std::istream& in) {
    BaselineModel m;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    const auto as_size = [&](std::string_view s) {
        std::int64_t v = 0;
        if (!parse_int(s, v) || v < 0) throw ParseError(line_no, "bad count");
        return static_cast<std::size_t>(v);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(line_no, "expected key,value");
        const std::string_view key(line.data(), comma);
        const std::string_view rest = std::string_view(line).substr(comma + 1);
        if (key == "skelfuse-model") {
            if (rest != "1") throw ParseError(line_no, "unsupported model version");
            header = true;
        } else if (key == "kind") {
            m.kind = classifier_from_name(rest);
        } else if (key == "input") {
            m.input = input_from_name(rest);
        } else if (key == "num_classes") {
            m.num_classes = as_size(rest);
        } else if (key == "dims") {
            m.dims = as_size(rest);
        } else if (key == "meta") {
            const auto c = rest.find(',');
            if (c == std::string_view::npos) throw ParseError(line_no, "meta needs key,value");
            m.metadata.emplace(std::string(rest.substr(0, c)), std::string(rest.substr(c + 1)));
        } else if (key == "ref") {
            const auto fields = split(rest, ',');
            std::int64_t label = 0;
            if (!parse_int(fields[0], label)) throw ParseError(line_no, "bad reference label");
            FeatureVector v;
            v.reserve(fields.size() - 1);
            for (std::size_t i = 1; i < fields.size(); ++i) {
                float f = 0.0f;
                const auto s = fields[i];
                const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), f);
                if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line_no, "bad feature value");
                v.push_back(f);
            }
            if (v.size() != m.dims) throw ParseError(line_no, "reference has wrong dimension");
            m.reference_labels.push_back(static_cast<int>(label));
            m.references.push_back(std::move(v));
        } else {
            throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
        }
    }
    if (!header) throw ParseError(0, "missing skelfuse-model header");
    if (m.references.empty()) throw ParseError(0, "model has no references");
    return m;
}

} // namespace skelfuse

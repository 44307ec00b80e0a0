#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "entframe/classifier.hpp"
#include "entframe/corpus.hpp"
#include "entframe/extraction.hpp"
#include "entframe/taxonomy.hpp"

// End-to-end classification pipelines over extracted contexts.
//
// Flat: one multilabel model over all 22 fine-grained roles; the main role is
// read off the top-scoring fine role. Two-stage: a 3-way main-role model
// routes each example to a per-main fine-role model, which guarantees the
// fine predictions stay consistent with the predicted main role.

namespace entframe {

struct Prediction {
    std::optional<MainRole> main;
    std::set<FineRole> fine;

    bool operator==(const Prediction&) const = default;
};

struct TrainOptions {
    TrainConfig config;
    // Route training examples to fine models by the main model's prediction
    // instead of the gold main role.
    bool fine_on_predicted_main = false;
    std::size_t llm_parallelism = 1;
};

struct FlatModel {
    LinearModel model; // labels = the 22 fine roles in canonical order
    ExtractionStrategy strategy = ExtractionStrategy::Sentence;
    bool prefixed = true;
};

struct TwoStageModel {
    LinearModel main_model; // labels = the 3 main roles in canonical order
    std::map<MainRole, LinearModel> fine_models;
    ExtractionStrategy strategy = ExtractionStrategy::Sentence;
    bool prefixed = true;
};

using Model = std::variant<FlatModel, TwoStageModel>;

// ---------------------------------------------------------------------------
// Feature and gold-label assembly

inline std::vector<FeatureVector> featurize_examples(const std::vector<ContextExample>& examples,
                                                     const TrainConfig& config) {
    std::vector<FeatureVector> xs;
    xs.reserve(examples.size());
    for (const ContextExample& ex : examples) xs.push_back(featurize(ex.text, config));
    return xs;
}

inline std::vector<FeatureVector> build_features(const Dataset& dataset,
                                                 ExtractionStrategy strategy, bool prefixed,
                                                 const TrainConfig& config,
                                                 LlmClient* client = nullptr,
                                                 std::size_t parallelism = 1) {
    return featurize_examples(build_examples(dataset, strategy, prefixed, client, parallelism),
                              config);
}

// Gold fine-role index sets (indices into kFineRoles). Training targets must
// exist: an annotation with no fine roles cannot supervise the model.
inline std::vector<std::set<std::size_t>> gold_fine_sets(const Dataset& dataset) {
    std::vector<std::set<std::size_t>> ys;
    ys.reserve(dataset.annotations.size());
    for (std::size_t i = 0; i < dataset.annotations.size(); ++i) {
        const EntityAnnotation& ann = dataset.annotations[i];
        if (ann.fine_roles.empty())
            throw Error(ErrorKind::MissingGold,
                        "annotation " + std::to_string(i) + " (doc " + ann.doc_id +
                            ", mention '" + ann.mention + "') has no fine-grained roles");
        std::set<std::size_t> on;
        for (FineRole r : ann.fine_roles) on.insert(static_cast<std::size_t>(r));
        ys.push_back(std::move(on));
    }
    return ys;
}

inline std::vector<std::size_t> gold_main_indices(const Dataset& dataset) {
    std::vector<std::size_t> ys;
    ys.reserve(dataset.annotations.size());
    for (std::size_t i = 0; i < dataset.annotations.size(); ++i) {
        const EntityAnnotation& ann = dataset.annotations[i];
        if (!ann.main_role)
            throw Error(ErrorKind::MissingGold,
                        "annotation " + std::to_string(i) + " (doc " + ann.doc_id +
                            ", mention '" + ann.mention + "') has no main role");
        ys.push_back(static_cast<std::size_t>(*ann.main_role));
    }
    return ys;
}

inline std::vector<std::string> fine_label_names() {
    std::vector<std::string> names;
    names.reserve(kFineRoles.size());
    for (FineRole r : kFineRoles) names.emplace_back(to_string(r));
    return names;
}

inline std::vector<std::string> main_label_names() {
    std::vector<std::string> names;
    names.reserve(kMainRoles.size());
    for (MainRole r : kMainRoles) names.emplace_back(to_string(r));
    return names;
}

// ---------------------------------------------------------------------------
// Training

// Flat 22-label model from precomputed features (must align with
// dataset.annotations).
inline FlatModel train_flat_on(const std::vector<FeatureVector>& xs, const Dataset& dataset,
                               ExtractionStrategy strategy, bool prefixed,
                               const TrainOptions& options) {
    if (xs.size() != dataset.annotations.size())
        throw Error(ErrorKind::DimensionMismatch,
                    "feature count " + std::to_string(xs.size()) + " != annotation count " +
                        std::to_string(dataset.annotations.size()));
    FlatModel flat;
    flat.model = train(xs, gold_fine_sets(dataset), fine_label_names(), options.config);
    flat.strategy = strategy;
    flat.prefixed = prefixed;
    return flat;
}

inline FlatModel train_flat(const Dataset& dataset, ExtractionStrategy strategy, bool prefixed,
                            const TrainOptions& options, LlmClient* client = nullptr) {
    return train_flat_on(
        build_features(dataset, strategy, prefixed, options.config, client,
                       options.llm_parallelism),
        dataset, strategy, prefixed, options);
}

// Main-role router plus one fine-role model per main role. Fine models are
// trained on the subset of examples whose (gold or predicted) main role
// matches; every main role must receive at least one example.
inline TwoStageModel train_two_stage_on(const std::vector<FeatureVector>& xs,
                                        const Dataset& dataset, ExtractionStrategy strategy,
                                        bool prefixed, const TrainOptions& options) {
    if (xs.size() != dataset.annotations.size())
        throw Error(ErrorKind::DimensionMismatch,
                    "feature count " + std::to_string(xs.size()) + " != annotation count " +
                        std::to_string(dataset.annotations.size()));
    std::vector<std::size_t> main_gold = gold_main_indices(dataset);

    std::vector<std::set<std::size_t>> main_ys;
    main_ys.reserve(main_gold.size());
    for (std::size_t g : main_gold) main_ys.push_back({g});

    TwoStageModel two;
    two.strategy = strategy;
    two.prefixed = prefixed;
    two.main_model = train(xs, main_ys, main_label_names(), options.config);

    // Which main role each example trains the fine stage under.
    std::vector<std::size_t> routing = main_gold;
    if (options.fine_on_predicted_main) {
        for (std::size_t i = 0; i < xs.size(); ++i)
            routing[i] = argmax_label(predict_scores(two.main_model, xs[i]));
    }

    std::vector<std::set<std::size_t>> fine_gold = gold_fine_sets(dataset);
    for (MainRole main : kMainRoles) {
        const std::vector<FineRole>& fines = fine_roles_of(main);
        std::vector<std::string> labels;
        labels.reserve(fines.size());
        for (FineRole r : fines) labels.emplace_back(to_string(r));

        std::vector<FeatureVector> sub_xs;
        std::vector<std::set<std::size_t>> sub_ys;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (routing[i] != static_cast<std::size_t>(main)) continue;
            sub_xs.push_back(xs[i]);
            std::set<std::size_t> on;
            for (std::size_t fine_idx : fine_gold[i]) {
                FineRole r = kFineRoles[fine_idx];
                // Under predicted-main routing an example can carry fine
                // roles outside this main; those cannot be represented here.
                for (std::size_t local = 0; local < fines.size(); ++local)
                    if (fines[local] == r) on.insert(local);
            }
            sub_ys.push_back(std::move(on));
        }
        if (sub_xs.empty())
            throw Error(ErrorKind::EmptyMainSubset,
                        "no training examples routed to main role '" +
                            std::string(to_string(main)) + "'");
        two.fine_models[main] = train(sub_xs, sub_ys, labels, options.config);
    }
    return two;
}

inline TwoStageModel train_two_stage(const Dataset& dataset, ExtractionStrategy strategy,
                                     bool prefixed, const TrainOptions& options,
                                     LlmClient* client = nullptr) {
    return train_two_stage_on(
        build_features(dataset, strategy, prefixed, options.config, client,
                       options.llm_parallelism),
        dataset, strategy, prefixed, options);
}

// ---------------------------------------------------------------------------
// Prediction

// Flat: thresholded fine roles (argmax fallback keeps it non-empty); the main
// role is the one the single top-scoring fine role belongs to.
inline Prediction predict_features(const FlatModel& flat, const FeatureVector& x) {
    std::vector<double> scores = predict_scores(flat.model, x);
    Prediction pred;
    for (std::size_t idx : select_labels(scores, flat.model.config.threshold))
        pred.fine.insert(kFineRoles[idx]);
    pred.main = main_of(kFineRoles[argmax_label(scores)]);
    return pred;
}

// Two-stage: argmax main role, then that main's fine model. The fine label
// space is restricted to the predicted main's roles by construction.
inline Prediction predict_features(const TwoStageModel& two, const FeatureVector& x) {
    std::vector<double> main_scores = predict_scores(two.main_model, x);
    MainRole main = kMainRoles[argmax_label(main_scores)];
    const LinearModel& fine_model = two.fine_models.at(main);
    std::vector<double> fine_scores = predict_scores(fine_model, x);
    Prediction pred;
    pred.main = main;
    const std::vector<FineRole>& fines = fine_roles_of(main);
    for (std::size_t local : select_labels(fine_scores, fine_model.config.threshold))
        pred.fine.insert(fines[local]);
    return pred;
}

inline Prediction predict_features(const Model& model, const FeatureVector& x) {
    if (const auto* flat = std::get_if<FlatModel>(&model)) return predict_features(*flat, x);
    return predict_features(std::get<TwoStageModel>(model), x);
}

inline const TrainConfig& model_config(const Model& model) {
    if (const auto* flat = std::get_if<FlatModel>(&model)) return flat->model.config;
    return std::get<TwoStageModel>(model).main_model.config;
}

inline ExtractionStrategy model_strategy(const Model& model) {
    if (const auto* flat = std::get_if<FlatModel>(&model)) return flat->strategy;
    return std::get<TwoStageModel>(model).strategy;
}

inline bool model_prefixed(const Model& model) {
    if (const auto* flat = std::get_if<FlatModel>(&model)) return flat->prefixed;
    return std::get<TwoStageModel>(model).prefixed;
}

// Predictions for every annotation in the dataset, in annotation order,
// using the model's own strategy/prefix setting.
inline std::vector<Prediction> predict_all(const Model& model, const Dataset& dataset,
                                           LlmClient* client = nullptr,
                                           std::size_t parallelism = 1) {
    std::vector<FeatureVector> xs = build_features(dataset, model_strategy(model),
                                                   model_prefixed(model), model_config(model),
                                                   client, parallelism);
    std::vector<Prediction> preds;
    preds.reserve(xs.size());
    for (const FeatureVector& x : xs) preds.push_back(predict_features(model, x));
    return preds;
}

// ---------------------------------------------------------------------------
// Binary model files: magic "EFMD", format version, mode, strategy, prefix
// flag, training config, then sparse per-label weights. Little-endian.

namespace detail {

inline void put_u8(std::ostream& out, std::uint8_t v) {
    out.put(static_cast<char>(v));
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

inline void put_string(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint8_t get_u8(std::istream& in) {
    int c = in.get();
    if (c == EOF) throw Error(ErrorKind::MalformedRow, "model file truncated");
    return static_cast<std::uint8_t>(c);
}

inline std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(get_u8(in)) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(std::istream& in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(get_u8(in)) << (8 * i);
    return v;
}

inline double get_f64(std::istream& in) {
    std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

inline std::string get_string(std::istream& in) {
    std::uint64_t len = get_u64(in);
    if (len > (std::uint64_t(1) << 32))
        throw Error(ErrorKind::MalformedRow, "model file string length implausible");
    std::string s(static_cast<std::size_t>(len), '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::uint64_t>(in.gcount()) != len)
        throw Error(ErrorKind::MalformedRow, "model file truncated");
    return s;
}

inline void write_linear_model(std::ostream& out, const LinearModel& m) {
    put_u64(out, m.labels.size());
    for (const std::string& label : m.labels) put_string(out, label);
    put_u64(out, m.dim);
    for (const std::vector<double>& row : m.weights) {
        std::uint64_t nnz = 0;
        for (double w : row)
            if (w != 0.0) ++nnz;
        put_u64(out, nnz);
        for (std::size_t idx = 0; idx < row.size(); ++idx)
            if (row[idx] != 0.0) {
                put_u32(out, static_cast<std::uint32_t>(idx));
                put_f64(out, row[idx]);
            }
    }
    for (double b : m.bias) put_f64(out, b);
}

inline LinearModel read_linear_model(std::istream& in, const TrainConfig& config) {
    LinearModel m;
    m.config = config;
    std::uint64_t n_labels = get_u64(in);
    for (std::uint64_t i = 0; i < n_labels; ++i) m.labels.push_back(get_string(in));
    m.dim = static_cast<std::size_t>(get_u64(in));
    m.weights.assign(m.labels.size(), std::vector<double>(m.dim, 0.0));
    for (std::uint64_t l = 0; l < n_labels; ++l) {
        std::uint64_t nnz = get_u64(in);
        for (std::uint64_t k = 0; k < nnz; ++k) {
            std::uint32_t idx = get_u32(in);
            double v = get_f64(in);
            if (idx >= m.dim)
                throw Error(ErrorKind::MalformedRow, "model file weight index out of range");
            m.weights[l][idx] = v;
        }
    }
    m.bias.assign(static_cast<std::size_t>(n_labels), 0.0);
    for (std::uint64_t l = 0; l < n_labels; ++l) m.bias[l] = get_f64(in);
    return m;
}

inline void write_config(std::ostream& out, const TrainConfig& c) {
    put_u64(out, c.ngram_min);
    put_u64(out, c.ngram_max);
    put_u64(out, c.hash_dim);
    put_u64(out, c.epochs);
    put_f64(out, c.learning_rate);
    put_f64(out, c.l2);
    put_u64(out, c.seed);
    put_f64(out, c.threshold);
}

inline TrainConfig read_config(std::istream& in) {
    TrainConfig c;
    c.ngram_min = static_cast<std::size_t>(get_u64(in));
    c.ngram_max = static_cast<std::size_t>(get_u64(in));
    c.hash_dim = static_cast<std::size_t>(get_u64(in));
    c.epochs = static_cast<std::size_t>(get_u64(in));
    c.learning_rate = get_f64(in);
    c.l2 = get_f64(in);
    c.seed = get_u64(in);
    c.threshold = get_f64(in);
    return c;
}

} // namespace detail

inline constexpr char kModelMagic[4] = {'E', 'F', 'M', 'D'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

inline void save_model(const std::filesystem::path& path, const Model& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write model file " + path.string());
    out.write(kModelMagic, 4);
    detail::put_u32(out, kModelFormatVersion);
    bool is_flat = std::holds_alternative<FlatModel>(model);
    detail::put_u8(out, is_flat ? 0 : 1);
    detail::put_u8(out, static_cast<std::uint8_t>(model_strategy(model)));
    detail::put_u8(out, model_prefixed(model) ? 1 : 0);
    detail::write_config(out, model_config(model));
    if (is_flat) {
        detail::write_linear_model(out, std::get<FlatModel>(model).model);
    } else {
        const TwoStageModel& two = std::get<TwoStageModel>(model);
        detail::write_linear_model(out, two.main_model);
        detail::put_u64(out, two.fine_models.size());
        for (const auto& [main, fine_model] : two.fine_models) {
            detail::put_u8(out, static_cast<std::uint8_t>(main));
            detail::write_linear_model(out, fine_model);
        }
    }
    if (!out) throw Error(ErrorKind::IoError, "failed writing model file " + path.string());
}

inline Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open model file " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kModelMagic, 4) != 0)
        throw Error(ErrorKind::MalformedRow, "not a model file: " + path.string());
    std::uint32_t version = detail::get_u32(in);
    if (version != kModelFormatVersion)
        throw Error(ErrorKind::MalformedRow,
                    "unsupported model format version " + std::to_string(version));
    std::uint8_t mode = detail::get_u8(in);
    auto strategy = static_cast<ExtractionStrategy>(detail::get_u8(in));
    bool prefixed = detail::get_u8(in) != 0;
    TrainConfig config = detail::read_config(in);
    if (mode == 0) {
        FlatModel flat;
        flat.model = detail::read_linear_model(in, config);
        flat.strategy = strategy;
        flat.prefixed = prefixed;
        return flat;
    }
    if (mode != 1)
        throw Error(ErrorKind::MalformedRow, "unknown model mode " + std::to_string(mode));
    TwoStageModel two;
    two.main_model = detail::read_linear_model(in, config);
    two.strategy = strategy;
    two.prefixed = prefixed;
    std::uint64_t n_fine = detail::get_u64(in);
    for (std::uint64_t i = 0; i < n_fine; ++i) {
        auto main = static_cast<MainRole>(detail::get_u8(in));
        two.fine_models[main] = detail::read_linear_model(in, config);
    }
    return two;
}

} // namespace entframe

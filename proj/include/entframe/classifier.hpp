#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "entframe/error.hpp"
#include "entframe/rng.hpp"
#include "entframe/utf8.hpp"

// Lightweight multilingual text classifier: hashed character n-gram features
// feeding independent (one-vs-rest) logistic regressions trained with plain
// SGD. No tokenizer, no external model files — robust across scripts because
// features are code-point n-grams, not words.

namespace entframe {

struct TrainConfig {
    std::size_t ngram_min = 2;
    std::size_t ngram_max = 5;
    std::size_t hash_dim = std::size_t(1) << 18;
    std::size_t epochs = 20;
    double learning_rate = 0.1;
    double l2 = 1e-5;
    std::uint64_t seed = 42;
    double threshold = 0.5;

    void validate() const {
        if (ngram_min == 0 || ngram_min > ngram_max)
            throw Error(ErrorKind::ValidationError,
                        "need 1 <= ngram_min <= ngram_max, got " + std::to_string(ngram_min) +
                            ".." + std::to_string(ngram_max));
        if (hash_dim == 0 || (hash_dim & (hash_dim - 1)) != 0)
            throw Error(ErrorKind::ValidationError,
                        "hash_dim must be a power of two, got " + std::to_string(hash_dim));
        if (epochs == 0)
            throw Error(ErrorKind::ValidationError, "epochs must be at least 1");
        if (!(learning_rate > 0.0))
            throw Error(ErrorKind::ValidationError, "learning_rate must be positive");
        if (l2 < 0.0)
            throw Error(ErrorKind::ValidationError, "l2 must be non-negative");
        if (!(threshold > 0.0) || !(threshold < 1.0))
            throw Error(ErrorKind::ValidationError, "threshold must lie strictly in (0, 1)");
    }

    bool operator==(const TrainConfig&) const = default;
};

// Sparse feature vector with strictly increasing indices.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool empty() const { return entries.empty(); }

    double dot(const std::vector<double>& dense) const {
        double sum = 0.0;
        for (const auto& [idx, value] : entries) sum += dense[idx] * value;
        return sum;
    }

    double norm() const {
        double sq = 0.0;
        for (const auto& [idx, value] : entries) sq += value * value;
        return std::sqrt(sq);
    }

    bool operator==(const FeatureVector&) const = default;
};

namespace detail {

inline void ascii_lowercase_inplace(std::string& s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
}

} // namespace detail

// Hashed character n-gram features. Case-folds ASCII letters, decodes to
// code points, hashes every n-gram (ngram_min..ngram_max, over the code
// points' UTF-8 bytes) into hash_dim buckets, counts occurrences, and
// L2-normalizes. Texts shorter than ngram_min code points hash as one whole
// gram, so only truly empty text yields an empty vector.
inline FeatureVector featurize(const std::string& text, const TrainConfig& config) {
    config.validate();
    std::string folded = text;
    detail::ascii_lowercase_inplace(folded);

    // Byte offset of each code point start, plus the end sentinel.
    std::vector<std::size_t> starts;
    std::size_t byte = 0;
    while (byte < folded.size()) {
        starts.push_back(byte);
        utf8_decode_at(folded, byte);
    }
    starts.push_back(folded.size());
    const std::size_t n_cp = starts.size() - 1;

    FeatureVector fv;
    if (n_cp == 0) return fv;

    std::map<std::uint32_t, double> counts;
    const std::uint64_t mask = static_cast<std::uint64_t>(config.hash_dim) - 1;
    auto bump = [&](std::size_t from_byte, std::size_t to_byte) {
        std::uint64_t h =
            fnv1a64(std::string_view(folded).substr(from_byte, to_byte - from_byte));
        counts[static_cast<std::uint32_t>(h & mask)] += 1.0;
    };

    if (n_cp < config.ngram_min) {
        bump(0, folded.size());
    } else {
        for (std::size_t n = config.ngram_min; n <= config.ngram_max && n <= n_cp; ++n)
            for (std::size_t i = 0; i + n <= n_cp; ++i) bump(starts[i], starts[i + n]);
    }

    fv.entries.assign(counts.begin(), counts.end());
    double norm = fv.norm();
    if (norm > 0.0)
        for (auto& [idx, value] : fv.entries) value /= norm;
    return fv;
}

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// Numerically stable binary cross-entropy of logit z against y in {0,1}:
// softplus(z) - z*y, computed without overflowing exp.
inline double logistic_loss(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

// d(logistic_loss)/dz — the coefficient every weight update scales by.
inline double logistic_grad_coeff(double z, double y) { return sigmoid(z) - y; }

struct LinearModel {
    std::vector<std::string> labels;
    std::size_t dim = 0;
    std::vector<std::vector<double>> weights; // one dense row per label
    std::vector<double> bias;                 // one per label
    TrainConfig config;

    std::size_t label_index(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        throw Error(ErrorKind::UnknownLabel, "label '" + label + "' not in model");
    }
};

// One-vs-rest logistic regression via SGD. `ys[i]` holds the indices into
// `labels` that are on for example i. Examples are visited in a seed-stable
// shuffled order each epoch; per-update L2 decay touches only the weights the
// example activates, so sparse data trains in sparse time.
inline LinearModel train(const std::vector<FeatureVector>& xs,
                         const std::vector<std::set<std::size_t>>& ys,
                         std::vector<std::string> labels, const TrainConfig& config) {
    config.validate();
    if (xs.empty())
        throw Error(ErrorKind::EmptyTrainingSet, "no training examples");
    if (xs.size() != ys.size())
        throw Error(ErrorKind::DimensionMismatch,
                    "feature/label count mismatch: " + std::to_string(xs.size()) + " vs " +
                        std::to_string(ys.size()));
    if (labels.empty())
        throw Error(ErrorKind::ValidationError, "label set must be non-empty");
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t label : ys[i])
            if (label >= labels.size())
                throw Error(ErrorKind::UnknownLabel,
                            "example " + std::to_string(i) + " references label index " +
                                std::to_string(label) + " but only " +
                                std::to_string(labels.size()) + " labels exist");
    for (const FeatureVector& x : xs)
        for (const auto& [idx, value] : x.entries)
            if (idx >= config.hash_dim)
                throw Error(ErrorKind::DimensionMismatch,
                            "feature index " + std::to_string(idx) + " exceeds hash_dim " +
                                std::to_string(config.hash_dim));

    LinearModel model;
    model.labels = std::move(labels);
    model.dim = config.hash_dim;
    model.config = config;
    model.weights.assign(model.labels.size(), std::vector<double>(model.dim, 0.0));
    model.bias.assign(model.labels.size(), 0.0);

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(config.seed, "train-order");

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        deterministic_shuffle(order, rng);
        for (std::size_t i : order) {
            const FeatureVector& x = xs[i];
            const std::set<std::size_t>& on = ys[i];
            for (std::size_t l = 0; l < model.labels.size(); ++l) {
                double z = x.dot(model.weights[l]) + model.bias[l];
                double y = on.count(l) ? 1.0 : 0.0;
                double g = logistic_grad_coeff(z, y);
                std::vector<double>& w = model.weights[l];
                for (const auto& [idx, value] : x.entries)
                    w[idx] -= config.learning_rate * (g * value + config.l2 * w[idx]);
                model.bias[l] -= config.learning_rate * g;
            }
        }
    }
    return model;
}

// Per-label probabilities, aligned with model.labels.
inline std::vector<double> predict_scores(const LinearModel& model, const FeatureVector& x) {
    for (const auto& [idx, value] : x.entries)
        if (idx >= model.dim)
            throw Error(ErrorKind::DimensionMismatch,
                        "feature index " + std::to_string(idx) + " exceeds model dim " +
                            std::to_string(model.dim));
    std::vector<double> scores(model.labels.size());
    for (std::size_t l = 0; l < model.labels.size(); ++l)
        scores[l] = sigmoid(x.dot(model.weights[l]) + model.bias[l]);
    return scores;
}

inline std::map<std::string, double> predict_score_map(const LinearModel& model,
                                                       const FeatureVector& x) {
    std::vector<double> scores = predict_scores(model, x);
    std::map<std::string, double> out;
    for (std::size_t l = 0; l < model.labels.size(); ++l) out[model.labels[l]] = scores[l];
    return out;
}

// All labels scoring >= threshold; if none clears it, the single best label.
// Ties go to the earlier label, so selection is deterministic. Never empty.
inline std::vector<std::size_t> select_labels(const std::vector<double>& scores,
                                              double threshold) {
    if (scores.empty())
        throw Error(ErrorKind::ValidationError, "cannot select labels from empty scores");
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] >= threshold) picked.push_back(i);
    if (picked.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < scores.size(); ++i)
            if (scores[i] > scores[best]) best = i;
        picked.push_back(best);
    }
    return picked;
}

inline std::size_t argmax_label(const std::vector<double>& scores) {
    if (scores.empty())
        throw Error(ErrorKind::ValidationError, "cannot take argmax of empty scores");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

} // namespace entframe

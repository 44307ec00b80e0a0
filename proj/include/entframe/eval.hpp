#pragma once

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entframe/corpus.hpp"
#include "entframe/pipeline.hpp"

// Evaluation: micro-averaged F1 over fine-grained role sets (the headline
// metric), exact-match ratio, and main-role accuracy, reported per language
// and pooled. Plus the two study drivers: a strategy/prefix/mode comparison
// grid and an in-language-vs-merged-training comparison.

namespace entframe {

struct Counts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    bool operator==(const Counts&) const = default;
};

struct MicroScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    Counts counts;
};

// Pools true/false positives over all instances' fine-role sets, then takes
// precision/recall/F1 once over the pooled counts. Degenerate denominators
// score 0 rather than NaN.
inline MicroScores micro_f1(const std::vector<std::set<FineRole>>& gold,
                            const std::vector<std::set<FineRole>>& pred) {
    if (gold.size() != pred.size())
        throw Error(ErrorKind::MisalignedPredictions,
                    "gold has " + std::to_string(gold.size()) + " instances, predictions have " +
                        std::to_string(pred.size()));
    MicroScores scores;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        for (FineRole r : pred[i])
            gold[i].count(r) ? ++scores.counts.tp : ++scores.counts.fp;
        for (FineRole r : gold[i])
            if (!pred[i].count(r)) ++scores.counts.fn;
    }
    const auto& c = scores.counts;
    scores.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                                     : 0.0;
    scores.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                                  : 0.0;
    scores.f1 = (scores.precision + scores.recall) > 0.0
                    ? 2.0 * scores.precision * scores.recall / (scores.precision + scores.recall)
                    : 0.0;
    return scores;
}

// Fraction of instances whose predicted fine-role set equals gold exactly.
inline double exact_match_ratio(const std::vector<std::set<FineRole>>& gold,
                                const std::vector<std::set<FineRole>>& pred) {
    if (gold.size() != pred.size())
        throw Error(ErrorKind::MisalignedPredictions,
                    "gold has " + std::to_string(gold.size()) + " instances, predictions have " +
                        std::to_string(pred.size()));
    if (gold.empty()) {
        std::cerr << "warning: exact match ratio over zero instances is 0 by convention\n";
        return 0.0;
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (gold[i] == pred[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

// Fraction of instances whose predicted main role equals gold; a missing
// prediction (or missing gold) counts as wrong.
inline double main_accuracy(const std::vector<std::optional<MainRole>>& gold,
                            const std::vector<std::optional<MainRole>>& pred) {
    if (gold.size() != pred.size())
        throw Error(ErrorKind::MisalignedPredictions,
                    "gold has " + std::to_string(gold.size()) + " instances, predictions have " +
                        std::to_string(pred.size()));
    if (gold.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (gold[i] && pred[i] && *gold[i] == *pred[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

struct LanguageReport {
    MicroScores micro;
    double exact_match = 0.0;
    double main_acc = 0.0;
    std::size_t n = 0;
};

struct MetricsReport {
    LanguageReport overall; // pooled over every instance ("All")
    std::map<std::string, LanguageReport> per_language;
};

namespace detail {

inline LanguageReport report_over(const std::vector<std::set<FineRole>>& gold_fine,
                                  const std::vector<std::set<FineRole>>& pred_fine,
                                  const std::vector<std::optional<MainRole>>& gold_main,
                                  const std::vector<std::optional<MainRole>>& pred_main) {
    LanguageReport report;
    report.micro = micro_f1(gold_fine, pred_fine);
    report.exact_match = exact_match_ratio(gold_fine, pred_fine);
    report.main_acc = main_accuracy(gold_main, pred_main);
    report.n = gold_fine.size();
    return report;
}

} // namespace detail

// Scores predictions against the dataset's gold annotations, overall and per
// language (languages with no annotations simply don't appear).
inline MetricsReport evaluate(const Dataset& dataset, const std::vector<Prediction>& preds) {
    if (preds.size() != dataset.annotations.size())
        throw Error(ErrorKind::MisalignedPredictions,
                    "dataset has " + std::to_string(dataset.annotations.size()) +
                        " annotations but " + std::to_string(preds.size()) +
                        " predictions were supplied");
    std::map<std::string, std::vector<std::size_t>> by_language;
    std::vector<std::set<FineRole>> gold_fine;
    std::vector<std::optional<MainRole>> gold_main;
    std::vector<std::set<FineRole>> pred_fine;
    std::vector<std::optional<MainRole>> pred_main;
    for (std::size_t i = 0; i < dataset.annotations.size(); ++i) {
        const EntityAnnotation& ann = dataset.annotations[i];
        by_language[dataset.document_of(ann).language].push_back(i);
        gold_fine.push_back(ann.fine_roles);
        gold_main.push_back(ann.main_role);
        pred_fine.push_back(preds[i].fine);
        pred_main.push_back(preds[i].main);
    }

    MetricsReport report;
    report.overall = detail::report_over(gold_fine, pred_fine, gold_main, pred_main);
    for (const auto& [language, indices] : by_language) {
        std::vector<std::set<FineRole>> gf, pf;
        std::vector<std::optional<MainRole>> gm, pm;
        for (std::size_t i : indices) {
            gf.push_back(gold_fine[i]);
            pf.push_back(pred_fine[i]);
            gm.push_back(gold_main[i]);
            pm.push_back(pred_main[i]);
        }
        report.per_language[language] = detail::report_over(gf, pf, gm, pm);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Strategy comparison grid

enum class TrainMode { Flat, Main2Fine };

inline std::string_view to_string(TrainMode m) {
    return m == TrainMode::Flat ? "flat" : "main2fine";
}

inline std::optional<TrainMode> try_parse_train_mode(std::string_view name) {
    if (name == "flat") return TrainMode::Flat;
    if (name == "main2fine") return TrainMode::Main2Fine;
    return std::nullopt;
}

struct CompareSpec {
    std::vector<ExtractionStrategy> strategies;
    std::vector<bool> prefixed_variants = {true};
    std::vector<TrainMode> modes = {TrainMode::Flat};
};

struct ComparisonRow {
    std::string method; // e.g. "ent2ent", "ent2ent_noprefix", "ent2ent_main2fine"
    std::map<std::string, double> f1_by_language; // includes pooled "All"
    std::optional<std::string> error;             // set when this cell failed
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
};

inline std::string method_name(ExtractionStrategy strategy, bool prefixed, TrainMode mode) {
    std::string name(to_string(strategy));
    if (!prefixed) name += "_noprefix";
    if (mode == TrainMode::Main2Fine) name += "_main2fine";
    return name;
}

// Trains and scores one model per (strategy, prefix, mode) combination.
// Features are extracted once per (strategy, prefix) and shared across modes.
// A failing combination records its error and leaves its row blank instead of
// aborting the rest of the grid. Fully deterministic: combinations run
// sequentially in the order given.
inline ComparisonTable compare_strategies(const Dataset& train_set, const Dataset& dev_set,
                                          const CompareSpec& spec, const TrainOptions& options,
                                          LlmClient* client = nullptr) {
    ComparisonTable table;
    using FeatureKey = std::pair<int, bool>;
    std::map<FeatureKey, std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>>> cache;

    for (ExtractionStrategy strategy : spec.strategies) {
        for (bool prefixed : spec.prefixed_variants) {
            for (TrainMode mode : spec.modes) {
                ComparisonRow row;
                row.method = method_name(strategy, prefixed, mode);
                try {
                    FeatureKey key{static_cast<int>(strategy), prefixed};
                    auto it = cache.find(key);
                    if (it == cache.end()) {
                        std::vector<FeatureVector> train_xs =
                            build_features(train_set, strategy, prefixed, options.config, client,
                                           options.llm_parallelism);
                        std::vector<FeatureVector> dev_xs =
                            build_features(dev_set, strategy, prefixed, options.config, client,
                                           options.llm_parallelism);
                        it = cache.emplace(key, std::make_pair(std::move(train_xs),
                                                               std::move(dev_xs)))
                                 .first;
                    }
                    const auto& [train_xs, dev_xs] = it->second;

                    Model model;
                    if (mode == TrainMode::Flat)
                        model = train_flat_on(train_xs, train_set, strategy, prefixed, options);
                    else
                        model =
                            train_two_stage_on(train_xs, train_set, strategy, prefixed, options);

                    std::vector<Prediction> preds;
                    preds.reserve(dev_xs.size());
                    for (const FeatureVector& x : dev_xs)
                        preds.push_back(predict_features(model, x));

                    MetricsReport report = evaluate(dev_set, preds);
                    row.f1_by_language["All"] = report.overall.micro.f1;
                    for (const auto& [language, lang_report] : report.per_language)
                        row.f1_by_language[language] = lang_report.micro.f1;
                } catch (const Error& e) {
                    row.error = e.what();
                    row.f1_by_language.clear();
                }
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

// Fixed-width CSV of the grid: always the five task language columns plus the
// pooled "All" column; untested languages stay blank. Scores are percentages
// with two decimals, so files from identical runs are byte-identical.
inline std::string comparison_csv(const ComparisonTable& table) {
    static const char* kColumns[] = {"BG", "EN", "HI", "PT", "RU", "All"};
    std::string csv = "model,method,BG,EN,HI,PT,RU,All\n";
    for (const ComparisonRow& row : table.rows) {
        csv += "linear," + row.method;
        for (const char* column : kColumns) {
            csv += ',';
            auto it = row.f1_by_language.find(column);
            if (it != row.f1_by_language.end()) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2f", 100.0 * it->second);
                csv += buf;
            }
        }
        csv += '\n';
    }
    return csv;
}

// ---------------------------------------------------------------------------
// In-language vs merged multilingual training

struct InLanguageRow {
    std::string language;
    std::optional<double> all_f1;     // trained on every language
    std::optional<double> in_lang_f1; // trained on this language only
    std::size_t train_samples = 0;    // in-language training annotations
    std::size_t dev_samples = 0;
};

// For each dev language: score a model trained on the merged multilingual
// training set against one trained on that language alone, both evaluated on
// that language's dev annotations. Rows come back sorted by in-language
// training size, smallest first, so low-resource languages lead.
inline std::vector<InLanguageRow> in_language_vs_all(const Dataset& train_set,
                                                     const Dataset& dev_set,
                                                     ExtractionStrategy strategy, bool prefixed,
                                                     TrainMode mode, const TrainOptions& options,
                                                     LlmClient* client = nullptr) {
    std::map<std::string, std::size_t> train_counts = annotation_counts_by_language(train_set);
    std::map<std::string, std::size_t> dev_counts = annotation_counts_by_language(dev_set);
    const bool single_language_train = train_counts.size() <= 1;
    if (single_language_train)
        std::cerr << "warning: training corpus has a single language; merged-training scores "
                     "would equal in-language scores and are omitted\n";

    auto train_model = [&](const Dataset& subset) -> Model {
        if (mode == TrainMode::Flat)
            return train_flat(subset, strategy, prefixed, options, client);
        return train_two_stage(subset, strategy, prefixed, options, client);
    };

    std::optional<Model> merged_model;
    if (!single_language_train) merged_model = train_model(train_set);

    std::vector<InLanguageRow> rows;
    for (const auto& [language, n_dev] : dev_counts) {
        InLanguageRow row;
        row.language = language;
        row.dev_samples = n_dev;
        auto it = train_counts.find(language);
        row.train_samples = it == train_counts.end() ? 0 : it->second;

        Dataset dev_lang = filter_languages(dev_set, {language});
        if (merged_model) {
            std::vector<Prediction> preds =
                predict_all(*merged_model, dev_lang, client, options.llm_parallelism);
            row.all_f1 = evaluate(dev_lang, preds).overall.micro.f1;
        }
        if (row.train_samples > 0) {
            Dataset train_lang = filter_languages(train_set, {language});
            Model lang_model = train_model(train_lang);
            std::vector<Prediction> preds =
                predict_all(lang_model, dev_lang, client, options.llm_parallelism);
            row.in_lang_f1 = evaluate(dev_lang, preds).overall.micro.f1;
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const InLanguageRow& a, const InLanguageRow& b) {
        if (a.train_samples != b.train_samples) return a.train_samples < b.train_samples;
        return a.language < b.language;
    });
    return rows;
}

inline std::string in_language_csv(const std::vector<InLanguageRow>& rows) {
    std::string csv = "language,all,in_lang,samples\n";
    for (const InLanguageRow& row : rows) {
        csv += row.language;
        for (const std::optional<double>& value : {row.all_f1, row.in_lang_f1}) {
            csv += ',';
            if (value) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *value);
                csv += buf;
            }
        }
        csv += ',' + std::to_string(row.train_samples) + '\n';
    }
    return csv;
}

} // namespace entframe

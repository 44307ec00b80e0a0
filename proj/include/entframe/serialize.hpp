#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "entframe/corpus.hpp"
#include "entframe/eval.hpp"
#include "entframe/extraction.hpp"
#include "entframe/pipeline.hpp"
#include "entframe/prompting.hpp"

// JSON / JSON Lines readers and writers for every artifact the pipeline
// passes between runs: context examples, predictions, prompts, responses,
// metric reports, and manifests. Key order is fixed (insertion order) so
// identical runs write identical bytes.

namespace entframe {

using ojson = nlohmann::ordered_json;

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    return in;
}

inline ojson parse_jsonl_line(const std::string& line, const std::filesystem::path& path,
                              std::size_t row) {
    try {
        return ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedJson,
                    path.string() + " line " + std::to_string(row) + ": " + e.what());
    }
}

} // namespace detail

// --------------------------------------------------------------------------
// Context examples

inline void write_examples_jsonl(const std::filesystem::path& path, const Dataset& dataset,
                                 const std::vector<ContextExample>& examples) {
    std::ofstream out = detail::open_out(path);
    for (const ContextExample& ex : examples) {
        const EntityAnnotation& ann = dataset.annotations.at(ex.annotation_index);
        ojson row;
        row["doc_id"] = ann.doc_id;
        row["mention"] = ann.mention;
        row["start"] = ann.start;
        row["end"] = ann.end;
        row["strategy"] = std::string(to_string(ex.strategy));
        row["prefixed"] = ex.prefixed;
        row["text"] = ex.text;
        row["gold_main"] =
            ann.main_role ? ojson(std::string(to_string(*ann.main_role))) : ojson(nullptr);
        ojson fine = ojson::array();
        for (FineRole r : ann.fine_roles) fine.push_back(std::string(to_string(r)));
        row["gold_fine"] = fine;
        out << row.dump() << '\n';
    }
}

// --------------------------------------------------------------------------
// Predictions

struct PredictionRow {
    std::string doc_id;
    std::string mention;
    std::size_t start = 0;
    Prediction prediction;
};

inline void write_predictions_jsonl(const std::filesystem::path& path, const Dataset& dataset,
                                    const std::vector<Prediction>& preds) {
    if (preds.size() != dataset.annotations.size())
        throw Error(ErrorKind::MisalignedPredictions,
                    "dataset has " + std::to_string(dataset.annotations.size()) +
                        " annotations but " + std::to_string(preds.size()) + " predictions");
    std::ofstream out = detail::open_out(path);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const EntityAnnotation& ann = dataset.annotations[i];
        ojson row;
        row["doc_id"] = ann.doc_id;
        row["mention"] = ann.mention;
        row["start"] = ann.start;
        row["main"] = preds[i].main ? ojson(std::string(to_string(*preds[i].main)))
                                    : ojson(nullptr);
        ojson fine = ojson::array();
        for (FineRole r : preds[i].fine) fine.push_back(std::string(to_string(r)));
        row["fine"] = fine;
        out << row.dump() << '\n';
    }
}

inline std::vector<PredictionRow> read_predictions_jsonl(const std::filesystem::path& path) {
    std::ifstream in = detail::open_in(path);
    std::vector<PredictionRow> rows;
    std::string line;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        ojson parsed = detail::parse_jsonl_line(line, path, row_no);
        PredictionRow row;
        try {
            row.doc_id = parsed.at("doc_id").get<std::string>();
            row.mention = parsed.at("mention").get<std::string>();
            row.start = parsed.at("start").get<std::size_t>();
            if (!parsed.at("main").is_null()) {
                std::string main_str = parsed.at("main").get<std::string>();
                auto main = try_parse_main_role(main_str);
                if (!main)
                    throw Error(ErrorKind::UnknownRole, path.string() + " line " +
                                    std::to_string(row_no) + ": unknown main role '" +
                                    main_str + "'");
                row.prediction.main = *main;
            }
            for (const auto& item : parsed.at("fine")) {
                std::string fine_str = item.get<std::string>();
                auto fine = try_parse_fine_role(fine_str);
                if (!fine)
                    throw Error(ErrorKind::UnknownRole, path.string() + " line " +
                                    std::to_string(row_no) + ": unknown fine role '" +
                                    fine_str + "'");
                row.prediction.fine.insert(*fine);
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::MalformedRow,
                        path.string() + " line " + std::to_string(row_no) + ": " + e.what());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Alignment check + extraction of the predictions, in dataset order.
inline std::vector<Prediction> align_predictions(const Dataset& dataset,
                                                 const std::vector<PredictionRow>& rows) {
    if (rows.size() != dataset.annotations.size())
        throw Error(ErrorKind::MisalignedPredictions,
                    "dataset has " + std::to_string(dataset.annotations.size()) +
                        " annotations but the prediction file has " + std::to_string(rows.size()));
    std::vector<Prediction> preds;
    preds.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const EntityAnnotation& ann = dataset.annotations[i];
        const PredictionRow& row = rows[i];
        if (row.doc_id != ann.doc_id || row.mention != ann.mention || row.start != ann.start)
            throw Error(ErrorKind::MisalignedPredictions,
                        "row " + std::to_string(i + 1) + " is (" + row.doc_id + ", '" +
                            row.mention + "', " + std::to_string(row.start) +
                            ") but the dataset expects (" + ann.doc_id + ", '" + ann.mention +
                            "', " + std::to_string(ann.start) + ")");
        preds.push_back(row.prediction);
    }
    return preds;
}

// --------------------------------------------------------------------------
// Prompts and responses

struct PromptRecord {
    std::string doc_id;
    std::string language;
    std::string prompt;
    std::vector<std::string> queried_entities;
};

inline void write_prompts_jsonl(const std::filesystem::path& path,
                                const std::vector<PromptRecord>& prompts) {
    std::ofstream out = detail::open_out(path);
    for (const PromptRecord& p : prompts) {
        ojson row;
        row["doc_id"] = p.doc_id;
        row["language"] = p.language;
        row["prompt"] = p.prompt;
        row["queried_entities"] = p.queried_entities;
        out << row.dump() << '\n';
    }
}

struct ResponseRecord {
    std::string doc_id;
    std::string response;
};

inline void write_responses_jsonl(const std::filesystem::path& path,
                                  const std::vector<ResponseRecord>& responses) {
    std::ofstream out = detail::open_out(path);
    for (const ResponseRecord& r : responses) {
        ojson row;
        row["doc_id"] = r.doc_id;
        row["response"] = r.response;
        out << row.dump() << '\n';
    }
}

inline std::vector<ResponseRecord> read_responses_jsonl(const std::filesystem::path& path) {
    std::ifstream in = detail::open_in(path);
    std::vector<ResponseRecord> rows;
    std::string line;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        ojson parsed = detail::parse_jsonl_line(line, path, row_no);
        ResponseRecord record;
        try {
            record.doc_id = parsed.at("doc_id").get<std::string>();
            record.response = parsed.at("response").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::MalformedRow,
                        path.string() + " line " + std::to_string(row_no) + ": " + e.what());
        }
        rows.push_back(std::move(record));
    }
    return rows;
}

// --------------------------------------------------------------------------
// Metric reports

inline ojson language_report_json(const LanguageReport& report) {
    ojson j;
    j["precision"] = report.micro.precision;
    j["recall"] = report.micro.recall;
    j["f1"] = report.micro.f1;
    j["tp"] = report.micro.counts.tp;
    j["fp"] = report.micro.counts.fp;
    j["fn"] = report.micro.counts.fn;
    j["exact_match"] = report.exact_match;
    j["main_accuracy"] = report.main_acc;
    j["n"] = report.n;
    return j;
}

inline ojson metrics_report_json(const MetricsReport& report) {
    ojson j;
    j["schema_version"] = 1;
    j["overall"] = language_report_json(report.overall);
    ojson per_language = ojson::object();
    for (const auto& [language, lang_report] : report.per_language)
        per_language[language] = language_report_json(lang_report);
    j["per_language"] = per_language;
    return j;
}

inline ojson comparison_table_json(const ComparisonTable& table) {
    ojson rows = ojson::array();
    for (const ComparisonRow& row : table.rows) {
        ojson r;
        r["model"] = "linear";
        r["method"] = row.method;
        ojson f1 = ojson::object();
        for (const auto& [language, value] : row.f1_by_language) f1[language] = value;
        r["f1_by_language"] = f1;
        if (row.error) r["error"] = *row.error;
        rows.push_back(std::move(r));
    }
    ojson j;
    j["schema_version"] = 1;
    j["rows"] = rows;
    return j;
}

inline ojson in_language_table_json(const std::vector<InLanguageRow>& rows) {
    ojson out_rows = ojson::array();
    for (const InLanguageRow& row : rows) {
        ojson r;
        r["language"] = row.language;
        r["all"] = row.all_f1 ? ojson(*row.all_f1) : ojson(nullptr);
        r["in_lang"] = row.in_lang_f1 ? ojson(*row.in_lang_f1) : ojson(nullptr);
        r["train_samples"] = row.train_samples;
        r["dev_samples"] = row.dev_samples;
        out_rows.push_back(std::move(r));
    }
    ojson j;
    j["schema_version"] = 1;
    j["rows"] = out_rows;
    return j;
}

// --------------------------------------------------------------------------
// Corpus manifests (document / annotation counts per language)

inline ojson corpus_manifest_json(const Dataset& dataset) {
    std::map<std::string, std::size_t> doc_counts;
    for (const auto& [doc_id, doc] : dataset.documents) ++doc_counts[doc.language];
    ojson docs = ojson::object();
    for (const auto& [language, n] : doc_counts) docs[language] = n;
    ojson anns = ojson::object();
    for (const auto& [language, n] : annotation_counts_by_language(dataset)) anns[language] = n;
    ojson j;
    j["documents"] = docs;
    j["annotations"] = anns;
    return j;
}

// Compares a loaded dataset against a manifest of expected per-language
// document and annotation counts; throws ValidationError on any mismatch.
inline void check_corpus_manifest(const Dataset& dataset, const std::filesystem::path& path) {
    std::ifstream in = detail::open_in(path);
    ojson expected;
    try {
        in >> expected;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedJson, path.string() + ": " + e.what());
    }
    ojson actual = corpus_manifest_json(dataset);
    for (const char* section : {"documents", "annotations"}) {
        if (!expected.contains(section)) continue;
        for (const auto& [language, count] : expected[section].items()) {
            std::size_t want = count.get<std::size_t>();
            std::size_t got = actual[section].contains(language)
                                  ? actual[section][language].get<std::size_t>()
                                  : 0;
            if (want != got)
                throw Error(ErrorKind::ValidationError,
                            std::string("manifest mismatch: ") + section + "[" + language +
                                "] expected " + std::to_string(want) + ", loaded " +
                                std::to_string(got));
        }
        for (const auto& [language, count] : actual[section].items()) {
            if (!expected[section].contains(language))
                throw Error(ErrorKind::ValidationError,
                            std::string("manifest mismatch: ") + section + "[" + language +
                                "] loaded " + std::to_string(count.get<std::size_t>()) +
                                " but the manifest lists none");
        }
    }
}

// --------------------------------------------------------------------------
// Taxonomy export

inline ojson taxonomy_json() {
    ojson mains = ojson::array();
    for (MainRole main : kMainRoles) {
        ojson m;
        m["name"] = std::string(to_string(main));
        ojson fines = ojson::array();
        for (FineRole fine : fine_roles_of(main)) fines.push_back(std::string(to_string(fine)));
        m["fine_roles"] = fines;
        mains.push_back(std::move(m));
    }
    ojson j;
    j["main_roles"] = mains;
    j["fine_role_count"] = kFineRoles.size();
    return j;
}

inline void write_json(const std::filesystem::path& path, const ojson& j) {
    std::ofstream out = detail::open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace entframe

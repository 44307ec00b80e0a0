#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "entframe/corpus.hpp"
#include "entframe/error.hpp"
#include "entframe/llm_client.hpp"

// Context extraction: turning (document, entity mention) into the text
// segment a classifier or prompt will actually see. Five strategies, from
// narrowest to widest, plus an entity-bounded window and an LLM-chosen
// selection. Each extracted segment can be prefixed with the mention so the
// downstream consumer knows which entity the segment is about.

namespace entframe {

enum class ExtractionStrategy {
    Sentence,     // the sentence containing the mention
    Paragraph,    // the paragraph containing the mention
    FullText,     // the whole document
    Ent2Ent,      // mention's sentence up to (not including) the next entity's sentence
    LlmExtracted, // spans chosen by an LLM
};

inline constexpr std::array<ExtractionStrategy, 5> kExtractionStrategies = {
    ExtractionStrategy::Sentence,    ExtractionStrategy::Paragraph,
    ExtractionStrategy::FullText,    ExtractionStrategy::Ent2Ent,
    ExtractionStrategy::LlmExtracted};

inline std::string_view to_string(ExtractionStrategy s) {
    switch (s) {
        case ExtractionStrategy::Sentence: return "sentence";
        case ExtractionStrategy::Paragraph: return "paragraph";
        case ExtractionStrategy::FullText: return "fulltext";
        case ExtractionStrategy::Ent2Ent: return "ent2ent";
        case ExtractionStrategy::LlmExtracted: return "gpt-extracted";
    }
    return "unknown";
}

inline std::optional<ExtractionStrategy> try_parse_strategy(std::string_view name) {
    for (ExtractionStrategy s : kExtractionStrategies)
        if (name == to_string(s)) return s;
    if (name == "llm") return ExtractionStrategy::LlmExtracted;
    return std::nullopt;
}

inline ExtractionStrategy parse_strategy(std::string_view name) {
    if (auto s = try_parse_strategy(name)) return *s;
    throw Error(ErrorKind::ValidationError, "unknown extraction strategy '" + std::string(name) +
                                                "' (expected sentence|paragraph|fulltext|ent2ent|"
                                                "gpt-extracted|llm)");
}

// A context segment ready for featurization or prompting.
struct ContextExample {
    std::size_t annotation_index = 0; // position in Dataset::annotations
    ExtractionStrategy strategy = ExtractionStrategy::Sentence;
    bool prefixed = false;
    std::string text;
    std::vector<std::size_t> source_sentences; // global sentence indices the text came from

    bool operator==(const ContextExample&) const = default;
};

// "Regarding <mention> :\n<segment>" — the segment is unchanged, byte for byte.
inline std::string apply_prefix(const std::string& mention, const std::string& segment) {
    if (mention.empty())
        throw Error(ErrorKind::EmptyMention, "cannot build a mention prefix from an empty mention");
    std::string out;
    out.reserve(10 + mention.size() + 3 + segment.size());
    out += "Regarding ";
    out += mention;
    out += " :\n";
    out += segment;
    return out;
}

// Per-document table of (sentence index of annotation start, mention),
// precomputed so entity-bounded windows don't rescan the annotation list.
using DocAnnotationIndex =
    std::map<std::string, std::vector<std::pair<std::size_t, const EntityAnnotation*>>>;

inline DocAnnotationIndex build_annotation_index(const Dataset& dataset) {
    DocAnnotationIndex index;
    for (const EntityAnnotation& ann : dataset.annotations) {
        const Document& doc = dataset.document_of(ann);
        MentionLocation loc = locate(doc, ann.start);
        index[ann.doc_id].emplace_back(loc.sentence_index, &ann);
    }
    for (auto& [doc_id, rows] : index)
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    return index;
}

// Inclusive sentence range for the entity-bounded window: starts at the
// mention's sentence and extends until just before the first later sentence
// where a *different* entity is annotated; that terminating sentence is left
// out. With no later entity the window runs to the end of the document.
inline std::pair<std::size_t, std::size_t> ent2ent_window(const Document& doc,
                                                          const DocAnnotationIndex& index,
                                                          const EntityAnnotation& annotation) {
    MentionLocation loc = locate(doc, annotation.start);
    std::size_t first = loc.sentence_index;
    std::size_t last = doc.sentences.empty() ? first : doc.sentences.size() - 1;
    auto it = index.find(annotation.doc_id);
    if (it != index.end()) {
        for (const auto& [sentence_idx, other] : it->second) {
            if (sentence_idx <= first) continue;
            if (other->mention == annotation.mention) continue;
            last = sentence_idx - 1;
            break;
        }
    }
    return {first, last};
}

inline std::pair<std::size_t, std::size_t> ent2ent_window(const Dataset& dataset,
                                                          const EntityAnnotation& annotation) {
    return ent2ent_window(dataset.document_of(annotation), build_annotation_index(dataset),
                          annotation);
}

namespace detail {

inline std::vector<std::size_t> sentences_in_paragraph(const Document& doc,
                                                       const ParagraphSpan& para) {
    std::vector<std::size_t> out;
    for (const SentenceSpan& s : doc.sentences)
        if (s.start >= para.start && s.end <= para.end) out.push_back(s.index);
    return out;
}

inline std::string join_sentences(const Document& doc, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t i = first; i <= last && i < doc.sentences.size(); ++i) {
        if (!out.empty()) out += ' ';
        out += doc.sentence_text(i);
    }
    return out;
}

} // namespace detail

// The raw (unprefixed) context segment for one annotation.
inline ContextExample extract_context(const Dataset& dataset, std::size_t annotation_index,
                                      ExtractionStrategy strategy, LlmClient* client = nullptr,
                                      const DocAnnotationIndex* index = nullptr) {
    if (annotation_index >= dataset.annotations.size())
        throw Error(ErrorKind::OutOfBounds,
                    "annotation index " + std::to_string(annotation_index) + " out of range");
    const EntityAnnotation& ann = dataset.annotations[annotation_index];
    const Document& doc = dataset.document_of(ann);

    ContextExample ex;
    ex.annotation_index = annotation_index;
    ex.strategy = strategy;
    ex.prefixed = false;

    switch (strategy) {
        case ExtractionStrategy::Sentence: {
            MentionLocation loc = locate(doc, ann.start);
            ex.text = doc.sentence_text(loc.sentence_index);
            ex.source_sentences = {loc.sentence_index};
            break;
        }
        case ExtractionStrategy::Paragraph: {
            MentionLocation loc = locate(doc, ann.start);
            ex.text = doc.paragraph_text(loc.paragraph_index);
            ex.source_sentences =
                detail::sentences_in_paragraph(doc, doc.paragraphs[loc.paragraph_index]);
            break;
        }
        case ExtractionStrategy::FullText: {
            ex.text = doc.text;
            ex.source_sentences.resize(doc.sentences.size());
            for (std::size_t i = 0; i < doc.sentences.size(); ++i) ex.source_sentences[i] = i;
            break;
        }
        case ExtractionStrategy::Ent2Ent: {
            std::pair<std::size_t, std::size_t> window;
            if (index) window = ent2ent_window(doc, *index, ann);
            else window = ent2ent_window(dataset, ann);
            ex.text = detail::join_sentences(doc, window.first, window.second);
            for (std::size_t i = window.first;
                 i <= window.second && i < doc.sentences.size(); ++i)
                ex.source_sentences.push_back(i);
            break;
        }
        case ExtractionStrategy::LlmExtracted: {
            if (!client)
                throw Error(ErrorKind::MissingLlmClient,
                            "strategy gpt-extracted needs an LLM client");
            std::vector<std::string> spans = client->extract_spans(doc.text, ann.mention);
            if (spans.empty()) {
                // Nothing extracted: fall back to the mention's sentence.
                MentionLocation loc = locate(doc, ann.start);
                ex.text = doc.sentence_text(loc.sentence_index);
                ex.source_sentences = {loc.sentence_index};
            } else {
                std::string joined;
                for (const std::string& span : spans) {
                    if (!joined.empty()) joined += ' ';
                    joined += span;
                }
                ex.text = joined;
            }
            break;
        }
    }
    return ex;
}

inline ContextExample make_context_example(const Dataset& dataset, std::size_t annotation_index,
                                           ExtractionStrategy strategy, bool prefixed,
                                           LlmClient* client = nullptr,
                                           const DocAnnotationIndex* index = nullptr) {
    ContextExample ex = extract_context(dataset, annotation_index, strategy, client, index);
    if (prefixed) {
        ex.text = apply_prefix(dataset.annotations[annotation_index].mention, ex.text);
        ex.prefixed = true;
    }
    return ex;
}

// Context examples for every annotation, in annotation order. Per-annotation
// failures are collected and reported together rather than aborting at the
// first one. LlmExtracted extraction may run on several threads when
// `parallelism` > 1 (the client must tolerate concurrent calls); results are
// stored by annotation index so the output order never depends on timing.
inline std::vector<ContextExample> build_examples(const Dataset& dataset,
                                                  ExtractionStrategy strategy, bool prefixed,
                                                  LlmClient* client = nullptr,
                                                  std::size_t parallelism = 1) {
    const std::size_t n = dataset.annotations.size();
    std::vector<ContextExample> examples(n);
    std::vector<std::pair<std::size_t, std::string>> failures;
    DocAnnotationIndex index;
    if (strategy == ExtractionStrategy::Ent2Ent) index = build_annotation_index(dataset);
    const DocAnnotationIndex* index_ptr =
        strategy == ExtractionStrategy::Ent2Ent ? &index : nullptr;

    auto run_one = [&](std::size_t i) -> std::optional<std::pair<std::size_t, std::string>> {
        try {
            examples[i] = make_context_example(dataset, i, strategy, prefixed, client, index_ptr);
            return std::nullopt;
        } catch (const Error& e) {
            return std::make_pair(i, std::string(e.what()));
        }
    };

    if (strategy == ExtractionStrategy::LlmExtracted && parallelism > 1 && n > 1) {
        std::atomic<std::size_t> next{0};
        std::mutex failures_mutex;
        auto worker = [&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                if (auto failure = run_one(i)) {
                    std::lock_guard<std::mutex> lock(failures_mutex);
                    failures.push_back(std::move(*failure));
                }
            }
        };
        std::vector<std::thread> threads;
        std::size_t n_threads = std::min(parallelism, n);
        threads.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        std::sort(failures.begin(), failures.end());
    } else {
        for (std::size_t i = 0; i < n; ++i)
            if (auto failure = run_one(i)) failures.push_back(std::move(*failure));
    }

    if (!failures.empty()) {
        std::string msg = "extraction failed for " + std::to_string(failures.size()) +
                          " annotation(s):";
        for (const auto& [i, what] : failures) {
            msg += "\n  [" + std::to_string(i) + "] " + what;
        }
        throw Error(ErrorKind::ExtractionFailed, msg);
    }
    return examples;
}

} // namespace entframe

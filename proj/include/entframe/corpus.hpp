#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "entframe/error.hpp"
#include "entframe/segment.hpp"
#include "entframe/taxonomy.hpp"
#include "entframe/utf8.hpp"

// Documents, entity annotations and dataset assembly.
//
// On disk a corpus is a directory of `<doc_id>.txt` article files plus a TSV
// of annotations with header `doc_id	mention	start	end	main_role	fine_roles`.
// Offsets are 0-based scalar-value counts into the CRLF-normalized article
// text, end-exclusive; `fine_roles` is comma-separated. A multi-language
// corpus root holds one such pair per language: `<root>/<LANG>/articles/` and
// `<root>/<LANG>/annotations.tsv`.

namespace entframe {

struct Document {
    std::string doc_id;
    std::string language;
    std::string text; // UTF-8, line endings normalized to \n
    std::vector<ParagraphSpan> paragraphs;
    std::vector<SentenceSpan> sentences;

    bool operator==(const Document&) const = default;

    std::string sentence_text(std::size_t i) const {
        return cp_slice(text, sentences.at(i).start, sentences.at(i).end);
    }
    std::string paragraph_text(std::size_t i) const {
        return cp_slice(text, paragraphs.at(i).start, paragraphs.at(i).end);
    }
};

struct EntityAnnotation {
    std::string doc_id;
    std::string mention;
    std::size_t start = 0; // scalar-value offset, inclusive
    std::size_t end = 0;   // scalar-value offset, exclusive
    std::optional<MainRole> main_role;
    std::set<FineRole> fine_roles; // empty when unlabeled

    bool operator==(const EntityAnnotation&) const = default;
};

struct Dataset {
    std::map<std::string, Document> documents;
    std::vector<EntityAnnotation> annotations; // load order, stable
    std::string split_name;
    std::optional<std::set<std::string>> language_filter;

    bool operator==(const Dataset&) const = default;

    const Document& document_of(const EntityAnnotation& ann) const {
        auto it = documents.find(ann.doc_id);
        if (it == documents.end())
            throw Error(ErrorKind::MissingDocument, "document \"" + ann.doc_id + "\" not loaded");
        return it->second;
    }
};

struct MentionLocation {
    std::size_t sentence_index = 0;
    std::size_t paragraph_index = 0;
};

inline constexpr std::string_view kAnnotationsHeader =
    "doc_id\tmention\tstart\tend\tmain_role\tfine_roles";

inline std::string normalize_newlines(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n') continue;
        out.push_back(raw[i]);
    }
    return out;
}

// Builds a Document: normalize line endings, check UTF-8, segment.
inline Document make_document(std::string doc_id, std::string language, std::string_view raw_text) {
    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.language = std::move(language);
    doc.text = normalize_newlines(raw_text);
    if (!utf8_valid(doc.text))
        throw Error(ErrorKind::ValidationError,
                    "document \"" + doc.doc_id + "\" is not valid UTF-8");
    Segmentation seg = segment(doc.text, doc.language);
    doc.paragraphs = std::move(seg.paragraphs);
    doc.sentences = std::move(seg.sentences);
    return doc;
}

// Index of the sentence and paragraph containing the given start offset.
inline MentionLocation locate(const Document& doc, std::size_t offset) {
    const std::size_t text_len = cp_length(doc.text);
    if (offset >= text_len)
        throw Error(ErrorKind::OutOfBounds,
                    "offset " + std::to_string(offset) + " past end of \"" + doc.doc_id +
                        "\" (length " + std::to_string(text_len) + ")");
    auto find_in = [](const std::vector<Span>& spans, std::size_t offset) -> std::size_t {
        // First span ending after `offset`; validated annotations start inside
        // a span, so this is the containing span (or, if the offset sits in a
        // whitespace gap, the span the mention's content belongs to).
        auto it = std::upper_bound(spans.begin(), spans.end(), offset,
                                   [](std::size_t off, const Span& s) { return off < s.end; });
        if (it == spans.end())
            return spans.empty() ? 0 : spans.size() - 1;
        return static_cast<std::size_t>(it - spans.begin());
    };
    MentionLocation loc;
    loc.sentence_index = find_in(doc.sentences, offset);
    loc.paragraph_index = find_in(doc.paragraphs, offset);
    return loc;
}

inline MentionLocation locate(const EntityAnnotation& ann, const Document& doc) {
    return locate(doc, ann.start);
}

// Checks the slice equality and role-consistency invariants of one annotation.
inline void validate_annotation(const EntityAnnotation& ann, const Document& doc,
                                std::string_view where = "") {
    const std::string ctx = where.empty() ? "" : " (" + std::string(where) + ")";
    const std::size_t text_len = cp_length(doc.text);
    if (ann.start >= ann.end || ann.end > text_len)
        throw Error(ErrorKind::OffsetMismatch,
                    "offsets [" + std::to_string(ann.start) + ", " + std::to_string(ann.end) +
                        ") out of range for \"" + ann.doc_id + "\" of length " +
                        std::to_string(text_len) + ctx);
    const std::string slice = cp_slice(doc.text, ann.start, ann.end);
    if (slice != ann.mention)
        throw Error(ErrorKind::OffsetMismatch,
                    "mention \"" + ann.mention + "\" does not match text slice \"" + slice +
                        "\" at [" + std::to_string(ann.start) + ", " + std::to_string(ann.end) +
                        ") in \"" + ann.doc_id + "\"" + ctx);
    if (!ann.fine_roles.empty()) {
        if (!ann.main_role)
            throw Error(ErrorKind::MalformedRow,
                        "fine roles given without a main role in \"" + ann.doc_id + "\"" + ctx);
        for (FineRole f : ann.fine_roles) {
            if (main_of(f) != *ann.main_role)
                throw Error(ErrorKind::ValidationError,
                            "fine role \"" + std::string(to_string(f)) +
                                "\" does not belong to main role \"" +
                                std::string(to_string(*ann.main_role)) + "\" in \"" +
                                ann.doc_id + "\"" + ctx);
        }
    }
}

namespace detail {

inline std::vector<std::string> split_tsv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            fields.emplace_back(line.substr(pos));
            break;
        }
        fields.emplace_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
    return fields;
}

inline std::size_t parse_offset(std::string_view field, std::size_t row) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw Error(ErrorKind::MalformedRow,
                    "row " + std::to_string(row) + ": \"" + std::string(field) +
                        "\" is not a non-negative integer offset");
    return value;
}

inline std::string read_file_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace detail

// Parses one TSV data row (1-based `row` for diagnostics).
inline EntityAnnotation parse_annotation_row(std::string_view line, std::size_t row) {
    auto fields = detail::split_tsv_line(line);
    if (fields.size() != 6)
        throw Error(ErrorKind::MalformedRow, "row " + std::to_string(row) + ": expected 6 "
                        "tab-separated fields, got " + std::to_string(fields.size()));
    EntityAnnotation ann;
    ann.doc_id = fields[0];
    ann.mention = fields[1];
    ann.start = detail::parse_offset(fields[2], row);
    ann.end = detail::parse_offset(fields[3], row);
    if (ann.doc_id.empty() || ann.mention.empty())
        throw Error(ErrorKind::MalformedRow,
                    "row " + std::to_string(row) + ": empty doc_id or mention");
    const std::string main_field = trim(fields[4]);
    if (!main_field.empty()) {
        auto m = try_parse_main_role(main_field);
        if (!m)
            throw Error(ErrorKind::UnknownRole, "row " + std::to_string(row) + ": \"" +
                            main_field + "\" is not a main role");
        ann.main_role = *m;
    }
    const std::string fine_field = fields[5];
    std::size_t pos = 0;
    while (pos <= fine_field.size() && !fine_field.empty()) {
        std::size_t comma = fine_field.find(',', pos);
        std::string token = trim(fine_field.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!token.empty()) {
            auto f = try_parse_fine_role(token);
            if (!f)
                throw Error(ErrorKind::UnknownRole, "row " + std::to_string(row) + ": \"" +
                                token + "\" is not a fine-grained role");
            ann.fine_roles.insert(*f);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return ann;
}

// Loads one language's articles directory plus annotations TSV.
inline Dataset load_corpus(const std::filesystem::path& articles_dir,
                           const std::filesystem::path& annotations_path,
                           const std::string& language, std::string split_name = "") {
    namespace fs = std::filesystem;
    Dataset ds;
    ds.split_name = split_name.empty()
                        ? annotations_path.parent_path().filename().string()
                        : std::move(split_name);
    ds.language_filter = std::set<std::string>{language};

    if (!fs::is_directory(articles_dir))
        throw Error(ErrorKind::IoError, "articles directory " + articles_dir.string() +
                        " does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(articles_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::string doc_id = path.stem().string();
        ds.documents.emplace(doc_id,
                             make_document(doc_id, language, detail::read_file_or_throw(path)));
    }

    const std::string tsv = normalize_newlines(detail::read_file_or_throw(annotations_path));
    std::istringstream lines(tsv);
    std::string line;
    if (!std::getline(lines, line) || line != kAnnotationsHeader)
        throw Error(ErrorKind::MalformedRow,
                    "annotations file " + annotations_path.string() +
                        " is missing the header \"" + std::string(kAnnotationsHeader) + "\"");
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++row;
        EntityAnnotation ann = parse_annotation_row(line, row);
        auto doc_it = ds.documents.find(ann.doc_id);
        if (doc_it == ds.documents.end())
            throw Error(ErrorKind::MissingDocument,
                        "row " + std::to_string(row) + ": no article file for doc_id \"" +
                            ann.doc_id + "\"");
        validate_annotation(ann, doc_it->second, "row " + std::to_string(row));
        ds.annotations.push_back(std::move(ann));
    }
    return ds;
}

inline std::string annotation_to_tsv(const EntityAnnotation& ann) {
    std::string fine;
    for (FineRole f : ann.fine_roles) {
        if (!fine.empty()) fine += ',';
        fine += to_string(f);
    }
    std::string main(ann.main_role ? to_string(*ann.main_role) : std::string_view{});
    return ann.doc_id + '\t' + ann.mention + '\t' + std::to_string(ann.start) + '\t' +
           std::to_string(ann.end) + '\t' + main + '\t' + fine;
}

// Writes a single-language dataset back to the on-disk layout.
inline void save_corpus(const Dataset& ds, const std::filesystem::path& articles_dir,
                        const std::filesystem::path& annotations_path) {
    namespace fs = std::filesystem;
    fs::create_directories(articles_dir);
    fs::create_directories(annotations_path.parent_path());
    for (const auto& [doc_id, doc] : ds.documents) {
        std::ofstream out(articles_dir / (doc_id + ".txt"), std::ios::binary);
        if (!out) throw Error(ErrorKind::IoError, "cannot write article " + doc_id);
        out << doc.text;
    }
    std::ofstream out(annotations_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + annotations_path.string());
    out << kAnnotationsHeader << '\n';
    for (const auto& ann : ds.annotations) out << annotation_to_tsv(ann) << '\n';
}

inline Dataset merge_datasets(const std::vector<Dataset>& parts, std::string split_name = "") {
    Dataset merged;
    merged.split_name = std::move(split_name);
    std::set<std::string> langs;
    for (const Dataset& part : parts) {
        if (merged.split_name.empty()) merged.split_name = part.split_name;
        for (const auto& [doc_id, doc] : part.documents) {
            auto [it, inserted] = merged.documents.emplace(doc_id, doc);
            if (!inserted && !(it->second == doc))
                throw Error(ErrorKind::ValidationError,
                            "conflicting documents share doc_id \"" + doc_id + "\"");
            langs.insert(doc.language);
        }
        merged.annotations.insert(merged.annotations.end(), part.annotations.begin(),
                                  part.annotations.end());
    }
    merged.language_filter = std::move(langs);
    return merged;
}

inline Dataset filter_languages(const Dataset& ds, const std::set<std::string>& langs) {
    Dataset out;
    out.split_name = ds.split_name;
    out.language_filter = langs;
    for (const auto& [doc_id, doc] : ds.documents)
        if (langs.count(doc.language)) out.documents.emplace(doc_id, doc);
    for (const auto& ann : ds.annotations)
        if (out.documents.count(ann.doc_id)) out.annotations.push_back(ann);
    return out;
}

// Languages present in a corpus root directory (subdirectories that hold an
// articles/ dir and an annotations.tsv).
inline std::vector<std::string> corpus_root_languages(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root))
        throw Error(ErrorKind::IoError, "corpus root " + root.string() + " does not exist");
    std::vector<std::string> langs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        if (fs::is_directory(entry.path() / "articles") &&
            fs::is_regular_file(entry.path() / "annotations.tsv"))
            langs.push_back(entry.path().filename().string());
    }
    std::sort(langs.begin(), langs.end());
    if (langs.empty())
        throw Error(ErrorKind::IoError,
                    "no <LANG>/articles + <LANG>/annotations.tsv pairs under " + root.string());
    return langs;
}

// Loads a corpus root, merged across the selected languages.
inline Dataset load_corpus_root(const std::filesystem::path& root,
                                const std::optional<std::set<std::string>>& languages = {}) {
    std::vector<Dataset> parts;
    for (const std::string& lang : corpus_root_languages(root)) {
        if (languages && !languages->count(lang)) continue;
        parts.push_back(load_corpus(root / lang / "articles", root / lang / "annotations.tsv",
                                    lang, root.filename().string()));
    }
    if (parts.empty())
        throw Error(ErrorKind::ValidationError,
                    "language filter matches nothing under " + root.string());
    return merge_datasets(parts, root.filename().string());
}

inline void save_corpus_root(const Dataset& ds, const std::filesystem::path& root) {
    std::map<std::string, Dataset> by_lang;
    for (const auto& [doc_id, doc] : ds.documents) {
        Dataset& part = by_lang[doc.language];
        part.split_name = ds.split_name;
        part.documents.emplace(doc_id, doc);
    }
    for (const auto& ann : ds.annotations) {
        const Document& doc = ds.document_of(ann);
        by_lang[doc.language].annotations.push_back(ann);
    }
    for (const auto& [lang, part] : by_lang)
        save_corpus(part, root / lang / "articles", root / lang / "annotations.tsv");
}

inline std::map<std::string, std::size_t> annotation_counts_by_language(const Dataset& ds) {
    std::map<std::string, std::size_t> counts;
    for (const auto& ann : ds.annotations) ++counts[ds.document_of(ann).language];
    return counts;
}

} // namespace entframe

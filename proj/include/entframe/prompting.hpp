#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "entframe/corpus.hpp"
#include "entframe/error.hpp"
#include "entframe/pipeline.hpp"
#include "entframe/taxonomy.hpp"

// Prompt construction and LLM response handling. Documents are shown to the
// model with every queried mention wrapped in <entity>…</entity> tags; the
// model answers with a JSON array of [entity, primary role, [fine roles…]].
// Parsing is strict about shape but lenient about role spelling (case and
// surrounding whitespace), because that is the boundary where generated text
// comes back in.

namespace entframe {

struct TaggedDocument {
    std::string doc_id;
    std::string tagged_text;
    std::vector<std::string> query_entities; // first-occurrence order, deduplicated

    bool operator==(const TaggedDocument&) const = default;
};

// Wraps every annotated mention in the document in <entity> tags. Tags are
// inserted right-to-left so earlier insertions never shift later offsets.
inline TaggedDocument tag_entities(const Document& doc,
                                   std::vector<EntityAnnotation> annotations) {
    for (const EntityAnnotation& ann : annotations) {
        if (ann.doc_id != doc.doc_id)
            throw Error(ErrorKind::ValidationError, "annotation for doc '" + ann.doc_id +
                                                        "' used with document '" + doc.doc_id +
                                                        "'");
        validate_annotation(ann, doc);
    }
    std::sort(annotations.begin(), annotations.end(),
              [](const EntityAnnotation& a, const EntityAnnotation& b) {
                  if (a.start != b.start) return a.start < b.start;
                  return a.end < b.end;
              });
    for (std::size_t i = 1; i < annotations.size(); ++i)
        if (annotations[i].start < annotations[i - 1].end)
            throw Error(ErrorKind::OverlappingAnnotations,
                        "mentions '" + annotations[i - 1].mention + "' and '" +
                            annotations[i].mention + "' overlap in document " + doc.doc_id);

    TaggedDocument tagged;
    tagged.doc_id = doc.doc_id;
    tagged.tagged_text = doc.text;
    for (auto it = annotations.rbegin(); it != annotations.rend(); ++it) {
        std::size_t start_byte = cp_to_byte(doc.text, it->start);
        std::size_t end_byte = cp_to_byte(doc.text, it->end);
        tagged.tagged_text.insert(end_byte, "</entity>");
        tagged.tagged_text.insert(start_byte, "<entity>");
    }
    for (const EntityAnnotation& ann : annotations)
        if (std::find(tagged.query_entities.begin(), tagged.query_entities.end(), ann.mention) ==
            tagged.query_entities.end())
            tagged.query_entities.push_back(ann.mention);
    return tagged;
}

inline std::string strip_tags(std::string tagged_text) {
    for (const char* tag : {"<entity>", "</entity>"}) {
        std::size_t at = 0;
        while ((at = tagged_text.find(tag, at)) != std::string::npos)
            tagged_text.erase(at, std::string(tag).size());
    }
    return tagged_text;
}

// ---------------------------------------------------------------------------
// Prompt rendering

struct PromptTemplate {
    std::string instructions;
    std::string definitions;
    std::string output_format;
};

// The role taxonomy as a prompt section; each line keeps a trailing space.
inline std::string taxonomy_block() {
    std::string block = "### Taxonomy: \n";
    for (MainRole main : kMainRoles) {
        block += "**";
        block += to_string(main);
        block += "** \n";
        for (FineRole fine : fine_roles_of(main)) {
            block += "- ";
            block += to_string(fine);
            block += " \n";
        }
    }
    return block;
}

inline PromptTemplate default_prompt_template() {
    PromptTemplate t;
    t.instructions =
        "You are given a document that includes various entities along with descriptions of "
        "events and actions. Your task is to analyze the text and determine the roles each "
        "entity plays according to the taxonomy provided below. ";
    t.definitions =
        "### Definitions\n"
        "- **Protagonist**: A central character or force in a positive role.\n"
        "- **Antagonist**: A character or force in opposition to the protagonist.\n"
        "- **Innocent**: Entities that are marginalized or victimized without any active role "
        "in the conflict.";
    t.output_format =
        "### Output Format\n"
        "```json\n"
        "[[\"entity1\", \"primary role\", [\"secondary role 1\", \"secondary role 2\"]],\n"
        "[\"entity2\", \"primary role\", [\"secondary role 1\", ..]]\n"
        "..]```\n";
    return t;
}

inline std::string json_quote(const std::string& s) { return nlohmann::json(s).dump(); }

// Full classification prompt: instructions, taxonomy, role definitions, the
// tagged document with its query entities, and the required output format.
inline std::string render_prompt(const TaggedDocument& tagged, const std::string& language,
                                 const PromptTemplate& t = default_prompt_template()) {
    if (tagged.query_entities.empty())
        throw Error(ErrorKind::ValidationError,
                    "document " + tagged.doc_id + " has no query entities to prompt about");
    std::string prompt;
    prompt += "### Annotation Instructions:\n";
    prompt += t.instructions;
    prompt += "\n\n";
    prompt += taxonomy_block();
    prompt += "\n";
    prompt += t.definitions;
    prompt += "\n\n";
    prompt += "### New Input:\n";
    prompt += "<<variable input start>>\n";
    prompt += "**LANG: " + language + "**\n";
    prompt += "**Document:**\n";
    prompt += tagged.tagged_text;
    prompt += "\n\n**Query entities:**\n";
    for (const std::string& mention : tagged.query_entities)
        prompt += "<entity>" + mention + "</entity>\n";
    prompt += "\n### Now for this new document, extract the roles for the following entities:\n";
    prompt += "[";
    for (std::size_t i = 0; i < tagged.query_entities.size(); ++i) {
        if (i) prompt += ", ";
        prompt += json_quote(tagged.query_entities[i]);
    }
    prompt += "]\n";
    prompt += "<<variable input end>>\n";
    prompt += t.output_format;
    return prompt;
}

// ---------------------------------------------------------------------------
// Response parsing

struct ResponseRow {
    std::string entity;
    MainRole main = MainRole::Protagonist;
    std::vector<FineRole> fine;

    bool operator==(const ResponseRow&) const = default;
};

namespace detail {

// Drops one leading ``` or ```json fence line and one trailing ``` fence.
inline std::string strip_code_fences(const std::string& raw) {
    std::string s = trim(raw);
    if (s.rfind("```", 0) == 0) {
        std::size_t eol = s.find('\n');
        s = eol == std::string::npos ? std::string() : s.substr(eol + 1);
    }
    s = trim(s);
    if (s.size() >= 3 && s.compare(s.size() - 3, 3, "```") == 0) s = trim(s.substr(0, s.size() - 3));
    return s;
}

} // namespace detail

// Parses "[[entity, primary, [secondary…]], …]". Shape errors name the row;
// role spellings are matched after trimming and ASCII case-folding.
inline std::vector<ResponseRow> parse_response(const std::string& raw) {
    std::string body = detail::strip_code_fences(raw);
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedJson, std::string("response is not valid JSON: ") +
                                                  e.what());
    }
    if (!parsed.is_array())
        throw Error(ErrorKind::BadShape, "response must be a JSON array of rows");

    std::vector<ResponseRow> rows;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        const nlohmann::json& row = parsed[i];
        if (!row.is_array() || row.size() != 3 || !row[0].is_string() || !row[1].is_string() ||
            !row[2].is_array())
            throw Error(ErrorKind::BadShape,
                        "row " + std::to_string(i) +
                            " must be [entity, primary role, [secondary roles...]]");
        ResponseRow out;
        out.entity = row[0].get<std::string>();
        std::string main_str = row[1].get<std::string>();
        std::optional<MainRole> main = lenient_parse_main_role(main_str);
        if (!main)
            throw Error(ErrorKind::UnknownRole,
                        "row " + std::to_string(i) + ": unknown main role '" + main_str + "'");
        out.main = *main;
        for (const nlohmann::json& item : row[2]) {
            if (!item.is_string())
                throw Error(ErrorKind::BadShape, "row " + std::to_string(i) +
                                                     ": secondary roles must be strings");
            std::string fine_str = item.get<std::string>();
            std::optional<FineRole> fine = lenient_parse_fine_role(fine_str);
            if (!fine)
                throw Error(ErrorKind::UnknownRole, "row " + std::to_string(i) +
                                                        ": unknown fine-grained role '" +
                                                        fine_str + "'");
            out.fine.push_back(*fine);
        }
        rows.push_back(std::move(out));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Response validation against the queried entities

enum class VerdictStatus {
    Ok,
    MissingEntity,    // queried but absent from the response
    DuplicateEntity,  // answered more than once; first row kept
    RoleInconsistent, // some fine role does not belong to the stated main role
    EmptySecondary,   // main role present but no fine roles
};

inline std::string_view to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Ok: return "ok";
        case VerdictStatus::MissingEntity: return "missing-entity";
        case VerdictStatus::DuplicateEntity: return "duplicate-entity";
        case VerdictStatus::RoleInconsistent: return "role-inconsistent";
        case VerdictStatus::EmptySecondary: return "empty-secondary";
    }
    return "unknown";
}

struct EntityVerdict {
    std::string mention;
    VerdictStatus status = VerdictStatus::Ok;
    std::optional<ResponseRow> row; // the row the verdict judged, when one exists
};

struct ResponseValidation {
    std::vector<EntityVerdict> verdicts;     // one per queried mention, query order
    std::vector<std::string> extra_entities; // answered but never queried
};

inline ResponseValidation validate_response(const std::vector<ResponseRow>& rows,
                                            const std::vector<std::string>& queried) {
    ResponseValidation out;
    for (const std::string& mention : queried) {
        EntityVerdict verdict;
        verdict.mention = mention;
        std::vector<const ResponseRow*> matches;
        for (const ResponseRow& row : rows)
            if (row.entity == mention) matches.push_back(&row);
        if (matches.empty()) {
            verdict.status = VerdictStatus::MissingEntity;
        } else {
            verdict.row = *matches.front();
            bool consistent = true;
            const std::vector<FineRole>& allowed = fine_roles_of(verdict.row->main);
            for (FineRole fine : verdict.row->fine)
                if (std::find(allowed.begin(), allowed.end(), fine) == allowed.end())
                    consistent = false;
            if (matches.size() > 1) verdict.status = VerdictStatus::DuplicateEntity;
            else if (!consistent) verdict.status = VerdictStatus::RoleInconsistent;
            else if (verdict.row->fine.empty()) verdict.status = VerdictStatus::EmptySecondary;
            else verdict.status = VerdictStatus::Ok;
        }
        out.verdicts.push_back(std::move(verdict));
    }
    for (const ResponseRow& row : rows) {
        if (std::find(queried.begin(), queried.end(), row.entity) != queried.end()) continue;
        if (std::find(out.extra_entities.begin(), out.extra_entities.end(), row.entity) ==
            out.extra_entities.end())
            out.extra_entities.push_back(row.entity);
    }
    return out;
}

// Predictions aligned with the queried mentions. Missing entities predict
// nothing; fine roles that contradict the stated main role are dropped.
inline std::vector<Prediction> predictions_from_verdicts(const ResponseValidation& validation) {
    std::vector<Prediction> preds;
    preds.reserve(validation.verdicts.size());
    for (const EntityVerdict& verdict : validation.verdicts) {
        Prediction pred;
        if (verdict.row) {
            pred.main = verdict.row->main;
            const std::vector<FineRole>& allowed = fine_roles_of(verdict.row->main);
            for (FineRole fine : verdict.row->fine)
                if (std::find(allowed.begin(), allowed.end(), fine) != allowed.end())
                    pred.fine.insert(fine);
        }
        preds.push_back(std::move(pred));
    }
    return preds;
}

} // namespace entframe

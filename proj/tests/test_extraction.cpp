#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "entframe/extraction.hpp"
#include "ent2ent_cases.hpp"
#include "helpers.hpp"

using namespace entframe;
using testutil::WindowCase;
using testutil::WindowExpectation;

namespace {

// Headline (s0/p0); body paragraph s1-s3 (p1); closing paragraph s4 (p2).
Dataset two_entity_dataset() {
    Dataset ds;
    ds.split_name = "unit";
    const std::string text =
        "Headline about Alice.\n\n"
        "Alice spoke first. The hall listened. Bob rose to reply.\n\n"
        "Final remarks were brief.";
    ds.documents.emplace("d", make_document("d", "EN", text));
    const Document& doc = ds.documents.at("d");

    EntityAnnotation alice;
    alice.doc_id = "d";
    alice.mention = "Alice";
    alice.start = testutil::cp_offset_of_occurrence(text, "Alice", 1);
    alice.end = alice.start + 5;
    alice.main_role = MainRole::Protagonist;
    alice.fine_roles = {FineRole::Guardian};
    validate_annotation(alice, doc);

    EntityAnnotation bob;
    bob.doc_id = "d";
    bob.mention = "Bob";
    bob.start = testutil::cp_offset_of_occurrence(text, "Bob", 0);
    bob.end = bob.start + 3;
    bob.main_role = MainRole::Antagonist;
    bob.fine_roles = {FineRole::Tyrant};
    validate_annotation(bob, doc);

    ds.annotations.push_back(std::move(alice));
    ds.annotations.push_back(std::move(bob));
    return ds;
}

} // namespace

TEST_CASE("mention prefix is byte-exact", "[extraction]") {
    CHECK(apply_prefix("Alice", "She led.") == "Regarding Alice :\nShe led.");
    CHECK(apply_prefix("Foreign Office", "It stalled.") ==
          "Regarding Foreign Office :\nIt stalled.");
    CHECK(apply_prefix("Мария Петрова", "Она выступила.") ==
          "Regarding Мария Петрова :\nОна выступила.");
    // The segment must pass through untouched, including leading whitespace.
    CHECK(apply_prefix("X", "  padded\n") == "Regarding X :\n  padded\n");
    try {
        apply_prefix("", "text");
        FAIL("expected EmptyMention");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyMention);
    }
}

TEST_CASE("strategy names round-trip and accept the llm alias", "[extraction]") {
    CHECK(to_string(ExtractionStrategy::Sentence) == "sentence");
    CHECK(to_string(ExtractionStrategy::Paragraph) == "paragraph");
    CHECK(to_string(ExtractionStrategy::FullText) == "fulltext");
    CHECK(to_string(ExtractionStrategy::Ent2Ent) == "ent2ent");
    CHECK(to_string(ExtractionStrategy::LlmExtracted) == "gpt-extracted");
    for (ExtractionStrategy s : kExtractionStrategies)
        CHECK(parse_strategy(std::string(to_string(s))) == s);
    CHECK(parse_strategy("llm") == ExtractionStrategy::LlmExtracted);
    CHECK_FALSE(try_parse_strategy("Sentence").has_value()); // names are case-sensitive
    try {
        parse_strategy("window");
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ValidationError);
    }
}

TEST_CASE("entity-bounded windows match the hand-checked table", "[extraction]") {
    for (const WindowCase& wc : testutil::window_cases()) {
        Dataset ds = testutil::dataset_for(wc);
        const Document& doc = ds.documents.at(wc.name);
        DocAnnotationIndex index = build_annotation_index(ds);
        for (std::size_t i = 0; i < wc.expectations.size(); ++i) {
            const WindowExpectation& exp = wc.expectations[i];
            INFO(wc.name << " / " << exp.mention << " occurrence " << exp.occurrence);
            auto [first, last] = ent2ent_window(doc, index, ds.annotations[i]);
            CHECK(first == exp.first);
            CHECK(last == exp.last);
        }
    }
}

TEST_CASE("each strategy extracts its own segment", "[extraction]") {
    Dataset ds = two_entity_dataset();

    ContextExample sent = extract_context(ds, 0, ExtractionStrategy::Sentence);
    CHECK(sent.text == "Alice spoke first.");
    CHECK(sent.source_sentences == std::vector<std::size_t>{1});

    ContextExample para = extract_context(ds, 0, ExtractionStrategy::Paragraph);
    CHECK(para.text == "Alice spoke first. The hall listened. Bob rose to reply.");
    CHECK(para.source_sentences == std::vector<std::size_t>{1, 2, 3});

    ContextExample full = extract_context(ds, 0, ExtractionStrategy::FullText);
    CHECK(full.text == ds.documents.at("d").text);
    CHECK(full.source_sentences == std::vector<std::size_t>{0, 1, 2, 3, 4});

    ContextExample window = extract_context(ds, 0, ExtractionStrategy::Ent2Ent);
    CHECK(window.text == "Alice spoke first. The hall listened.");
    CHECK(window.source_sentences == std::vector<std::size_t>{1, 2});

    // Bob has no later entity, so his window runs to the end of the document
    // and joins across the paragraph break with a space.
    ContextExample tail = extract_context(ds, 1, ExtractionStrategy::Ent2Ent);
    CHECK(tail.text == "Bob rose to reply. Final remarks were brief.");
    CHECK(tail.source_sentences == std::vector<std::size_t>{3, 4});

    ContextExample prefixed =
        make_context_example(ds, 0, ExtractionStrategy::Ent2Ent, /*prefixed=*/true);
    CHECK(prefixed.text == "Regarding Alice :\nAlice spoke first. The hall listened.");
    CHECK(prefixed.prefixed);
    CHECK(prefixed.source_sentences == window.source_sentences);

    try {
        extract_context(ds, 99, ExtractionStrategy::Sentence);
        FAIL("expected OutOfBounds");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfBounds);
    }
}

TEST_CASE("llm-backed extraction needs a client and falls back when empty", "[extraction]") {
    Dataset ds = two_entity_dataset();
    try {
        extract_context(ds, 0, ExtractionStrategy::LlmExtracted);
        FAIL("expected MissingLlmClient");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingLlmClient);
    }

    StubLlmClient stub;
    ContextExample ex = extract_context(ds, 1, ExtractionStrategy::LlmExtracted, &stub);
    // The stub returns the mention's sentence plus the one after it.
    CHECK(ex.text == "Bob rose to reply. Final remarks were brief.");

    // A client that extracts nothing falls back to the mention's sentence.
    struct EmptyClient : LlmClient {
        std::string complete(const std::string&) override { return ""; }
        std::vector<std::string> extract_spans(const std::string&,
                                               const std::string&) override {
            return {};
        }
    } empty;
    ContextExample fallback = extract_context(ds, 0, ExtractionStrategy::LlmExtracted, &empty);
    CHECK(fallback.text == "Alice spoke first.");
    CHECK(fallback.source_sentences == std::vector<std::size_t>{1});
}

TEST_CASE("build_examples keeps annotation order and is deterministic", "[extraction]") {
    Dataset ds = two_entity_dataset();
    std::vector<ContextExample> a = build_examples(ds, ExtractionStrategy::Ent2Ent, true);
    std::vector<ContextExample> b = build_examples(ds, ExtractionStrategy::Ent2Ent, true);
    REQUIRE(a.size() == ds.annotations.size());
    CHECK(a == b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].annotation_index == i);
        CHECK(a[i].prefixed);
    }
}

TEST_CASE("build_examples reports every failing annotation at once", "[extraction]") {
    Dataset ds = two_entity_dataset();
    // Two annotations with empty mentions fail at prefixing; the good one in
    // between must not mask them.
    ds.annotations.push_back(ds.annotations[0]);
    ds.annotations[0].mention.clear();
    ds.annotations[2].mention.clear();
    try {
        build_examples(ds, ExtractionStrategy::Sentence, /*prefixed=*/true);
        FAIL("expected ExtractionFailed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ExtractionFailed);
        std::string what = e.what();
        CHECK(what.find("2 annotation(s)") != std::string::npos);
        CHECK(what.find("[0]") != std::string::npos);
        CHECK(what.find("[2]") != std::string::npos);
    }
}

TEST_CASE("parallel llm extraction matches sequential", "[extraction]") {
    Dataset ds = two_entity_dataset();
    for (int i = 0; i < 3; ++i) {
        Dataset extra = two_entity_dataset();
        for (auto& [id, doc] : extra.documents) {
            Document copy = doc;
            std::string new_id = "d" + std::to_string(i);
            copy.doc_id = new_id;
            ds.documents.emplace(new_id, std::move(copy));
        }
        for (auto ann : extra.annotations) {
            ann.doc_id = "d" + std::to_string(i);
            ds.annotations.push_back(std::move(ann));
        }
    }
    StubLlmClient stub;
    auto seq = build_examples(ds, ExtractionStrategy::LlmExtracted, true, &stub, 1);
    auto par = build_examples(ds, ExtractionStrategy::LlmExtracted, true, &stub, 4);
    CHECK(seq == par);
}

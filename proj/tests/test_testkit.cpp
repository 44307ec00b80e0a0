#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "entframe/extraction.hpp"
#include "entframe/testkit.hpp"
#include "helpers.hpp"

using namespace entframe;
namespace fs = std::filesystem;

namespace {

SyntheticSpec small_spec() {
    SyntheticSpec spec;
    spec.languages = {"EN", "RU"};
    spec.docs = 18;
    spec.seed = 7;
    return spec;
}

std::map<std::string, std::string> file_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            out[fs::relative(entry.path(), root).generic_string()] =
                testutil::read_file(entry.path());
    return out;
}

// All annotations of both splits, paired with their documents.
std::vector<std::pair<const EntityAnnotation*, const Document*>> all_annotations(
    const SyntheticCorpus& corpus) {
    std::vector<std::pair<const EntityAnnotation*, const Document*>> out;
    for (const Dataset* split : {&corpus.train, &corpus.dev})
        for (const EntityAnnotation& ann : split->annotations)
            out.emplace_back(&ann, &split->document_of(ann));
    return out;
}

void expect_spec_invalid(SyntheticSpec spec, const std::string& fragment) {
    try {
        spec.validate();
        FAIL("expected SpecInvalid mentioning \"" << fragment << "\"");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SpecInvalid);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(fragment));
    }
}

} // namespace

TEST_CASE("generation is deterministic, down to the written bytes", "[testkit]") {
    SyntheticCorpus first = generate_synthetic(small_spec());
    SyntheticCorpus second = generate_synthetic(small_spec());

    REQUIRE(first.train.annotations.size() == second.train.annotations.size());
    REQUIRE(first.dev.annotations.size() == second.dev.annotations.size());
    for (std::size_t i = 0; i < first.train.annotations.size(); ++i)
        CHECK(first.train.annotations[i] == second.train.annotations[i]);
    for (const auto& [doc_id, doc] : first.train.documents)
        CHECK(doc.text == second.train.documents.at(doc_id).text);
    REQUIRE(first.placements.size() == second.placements.size());
    for (std::size_t i = 0; i < first.placements.size(); ++i) {
        CHECK(first.placements[i].cue == second.placements[i].cue);
        CHECK(first.placements[i].cp_offset == second.placements[i].cp_offset);
    }

    testutil::TempDir dir_a, dir_b;
    write_synthetic(dir_a.path(), first);
    write_synthetic(dir_b.path(), second);
    std::map<std::string, std::string> tree_a = file_tree(dir_a.path());
    std::map<std::string, std::string> tree_b = file_tree(dir_b.path());
    REQUIRE(tree_a.size() == tree_b.size());
    CHECK(tree_a == tree_b);
    // The tree holds both corpus roots plus the placement log and manifest.
    CHECK(tree_a.count("train/EN/annotations.tsv") == 1);
    CHECK(tree_a.count("dev/RU/annotations.tsv") == 1);
    CHECK(tree_a.count("placement-log.json") == 1);
    CHECK(tree_a.count("manifest.json") == 1);

    // A different seed actually changes the corpus.
    SyntheticSpec reseeded = small_spec();
    reseeded.seed = 8;
    SyntheticCorpus third = generate_synthetic(reseeded);
    CHECK(third.train.documents.begin()->second.text !=
          first.train.documents.begin()->second.text);
}

TEST_CASE("spec validation rejects malformed shapes", "[testkit]") {
    auto with = [](auto&& mutate) {
        SyntheticSpec spec;
        mutate(spec);
        return spec;
    };
    expect_spec_invalid(with([](auto& s) { s.docs = 0; }), "docs");
    expect_spec_invalid(with([](auto& s) { s.languages.clear(); }), "non-empty");
    expect_spec_invalid(with([](auto& s) { s.languages = {"EN", "EN"}; }), "duplicate");
    expect_spec_invalid(with([](auto& s) { s.entities_per_doc_min = 0; }), "entities_per_doc");
    expect_spec_invalid(with([](auto& s) {
                            s.entities_per_doc_min = 3;
                            s.entities_per_doc_max = 2;
                        }),
                        "entities_per_doc");
    expect_spec_invalid(with([](auto& s) { s.cue_strength = 1.5; }), "cue_strength");
    expect_spec_invalid(with([](auto& s) { s.dev_fraction = -0.1; }), "dev_fraction");
    expect_spec_invalid(with([](auto& s) { s.names_per_role = 0; }), "names_per_role");
    expect_spec_invalid(with([](auto& s) {
                            s.names_per_role = 1;
                            s.entities_per_doc_max = 23;
                        }),
                        "supply");
    expect_spec_invalid(with([](auto& s) { s.language_weights = {{"XX", 1.0}}; }), "XX");
    expect_spec_invalid(with([](auto& s) { s.language_weights = {{"EN", 0.0}}; }), "positive");

    CHECK_NOTHROW(SyntheticSpec{}.validate());
}

TEST_CASE("generated corpora honor the corpus invariants", "[testkit]") {
    SyntheticSpec spec; // all five languages, default knobs
    spec.docs = 25;
    SyntheticCorpus corpus = generate_synthetic(spec);

    std::set<std::string> train_docs, dev_docs;
    for (const auto& [id, doc] : corpus.train.documents) train_docs.insert(id);
    for (const auto& [id, doc] : corpus.dev.documents) dev_docs.insert(id);
    CHECK(train_docs.size() + dev_docs.size() == 25);
    for (const std::string& id : dev_docs) CHECK(train_docs.count(id) == 0);

    std::size_t total_annotations = 0;
    for (auto [ann, doc] : all_annotations(corpus)) {
        ++total_annotations;
        CHECK_NOTHROW(validate_annotation(*ann, *doc));
        REQUIRE_FALSE(ann->fine_roles.empty());
        CHECK(ann->fine_roles.size() <= 2);
        REQUIRE(ann->main_role.has_value());
        for (FineRole fine : ann->fine_roles) CHECK(main_of(fine) == *ann->main_role);
    }
    CHECK(total_annotations >= 2 * 25);
    CHECK(total_annotations <= 4 * 25);

    // Every requested language shows up in the merged corpus.
    std::map<std::string, std::size_t> train_counts =
        annotation_counts_by_language(corpus.train);
    for (const std::string& lang : spec.languages) CHECK(train_counts.at(lang) >= 2);
}

TEST_CASE("the placement log and manifest describe the emitted files", "[testkit]") {
    testutil::TempDir dir;
    SyntheticCorpus corpus = generate_synthetic(small_spec());
    write_synthetic(dir.path(), corpus);

    Dataset train = load_corpus_root(dir / "train");
    Dataset dev = load_corpus_root(dir / "dev");
    auto find_doc = [&](const std::string& doc_id) -> const Document& {
        auto it = train.documents.find(doc_id);
        if (it != train.documents.end()) return it->second;
        return dev.documents.at(doc_id);
    };

    nlohmann::json log = nlohmann::json::parse(testutil::read_file(dir / "placement-log.json"));
    REQUIRE(log.is_array());
    REQUIRE(log.size() == corpus.placements.size());
    REQUIRE(log.size() > 0);
    for (const nlohmann::json& entry : log) {
        const Document& doc = find_doc(entry.at("doc_id").get<std::string>());
        const std::string cue = entry.at("cue").get<std::string>();
        const std::size_t offset = entry.at("cp_offset").get<std::size_t>();
        // The logged cue really sits at the logged code-point offset...
        CHECK(cp_slice(doc.text, offset, offset + cp_length(cue)) == cue);
        // ...inside the logged sentence, with a role from the taxonomy.
        CHECK(locate(doc, offset).sentence_index ==
              entry.at("sentence_index").get<std::size_t>());
        CHECK(try_parse_fine_role(entry.at("role").get<std::string>()).has_value());
    }

    nlohmann::json manifest = nlohmann::json::parse(testutil::read_file(dir / "manifest.json"));
    for (const auto& [split_name, dataset] :
         {std::pair<const char*, const Dataset*>{"train", &train}, {"dev", &dev}}) {
        const nlohmann::json& counts = manifest.at(split_name).at("annotation_counts");
        std::map<std::string, std::size_t> actual = annotation_counts_by_language(*dataset);
        REQUIRE(counts.size() == actual.size());
        for (const auto& [lang, n] : actual) CHECK(counts.at(lang).get<std::size_t>() == n);
    }
    for (const std::string& lang : {std::string("EN"), std::string("RU")}) {
        const nlohmann::json& cues = manifest.at("cues").at(lang);
        CHECK(cues.size() == kFineRoles.size());
        for (FineRole role : kFineRoles)
            CHECK(cues.at(std::string(to_string(role))).is_string());
    }
}

TEST_CASE("in-window cues stay inside the mention's sentence pair", "[testkit]") {
    SyntheticSpec spec = small_spec();
    spec.docs = 30;
    SyntheticCorpus corpus = generate_synthetic(spec);

    // Index placements by (doc_id, mention); names are unique per document.
    std::map<std::pair<std::string, std::string>, std::vector<const CuePlacement*>> by_entity;
    for (const CuePlacement& p : corpus.placements)
        if (!p.mention.empty()) by_entity[{p.doc_id, p.mention}].push_back(&p);

    std::size_t strays_seen = 0;
    for (auto [ann, doc] : all_annotations(corpus)) {
        MentionLocation anchor = locate(*ann, *doc);
        std::set<FineRole> windowed_roles;
        bool cue_in_anchor_sentence = false;
        for (const CuePlacement* p : by_entity.at({ann->doc_id, ann->mention})) {
            if (p->in_window) {
                windowed_roles.insert(p->role);
                CHECK(p->sentence_index >= anchor.sentence_index);
                CHECK(p->sentence_index <= anchor.sentence_index + 1);
                cue_in_anchor_sentence |= p->sentence_index == anchor.sentence_index;
            } else {
                // Strayed secondary cues land before the entity blocks, out of
                // reach of sentence, successor and paragraph windows alike.
                ++strays_seen;
                MentionLocation stray = locate(*doc, p->cp_offset);
                CHECK(stray.sentence_index < anchor.sentence_index);
                CHECK(stray.paragraph_index < anchor.paragraph_index);
            }
        }
        // The in-window cues spell out exactly the annotated fine roles, and
        // the primary one shares the mention's sentence.
        CHECK(windowed_roles == ann->fine_roles);
        CHECK(cue_in_anchor_sentence);
    }
    CHECK(strays_seen > 0); // 30 docs at default knobs always shed a few
}

TEST_CASE("cue strength pins secondary roles in or out of the window", "[testkit]") {
    SyntheticSpec spec;
    spec.languages = {"EN"};
    spec.docs = 12;
    spec.second_role_fraction = 1.0;
    spec.shared_pair_fraction = 0.0;

    spec.cue_strength = 1.0; // every secondary cue lands in the window
    SyntheticCorpus pinned = generate_synthetic(spec);
    std::size_t pinned_annotations = 0;
    for (auto [ann, doc] : all_annotations(pinned)) {
        ++pinned_annotations;
        CHECK(ann->fine_roles.size() == 2);
    }
    CHECK(pinned_annotations >= 2 * 12);
    for (const CuePlacement& p : pinned.placements)
        if (!p.mention.empty()) CHECK(p.in_window);

    spec.cue_strength = 0.0; // every secondary cue strays outside
    SyntheticCorpus strayed = generate_synthetic(spec);
    std::size_t stray_placements = 0;
    std::size_t strayed_annotations = 0;
    for (auto [ann, doc] : all_annotations(strayed)) {
        ++strayed_annotations;
        CHECK(ann->fine_roles.size() == 1);
    }
    for (const CuePlacement& p : strayed.placements)
        if (!p.mention.empty() && !p.in_window) ++stray_placements;
    CHECK(stray_placements == strayed_annotations); // one stray per entity
}

TEST_CASE("shared-sentence pairs are separable only by the mention prefix", "[testkit]") {
    SyntheticSpec spec;
    spec.languages = {"EN", "HI"};
    spec.docs = 10;
    spec.shared_pair_fraction = 1.0;
    spec.entities_per_doc_min = 2;
    spec.entities_per_doc_max = 2;
    SyntheticCorpus corpus = generate_synthetic(spec);

    for (const Dataset* split : {&corpus.train, &corpus.dev}) {
        std::vector<ContextExample> bare = build_examples(*split, ExtractionStrategy::Ent2Ent,
                                                          /*prefixed=*/false);
        std::vector<ContextExample> prefixed =
            build_examples(*split, ExtractionStrategy::Ent2Ent, /*prefixed=*/true);
        std::map<std::string, std::vector<std::size_t>> by_doc;
        for (std::size_t i = 0; i < split->annotations.size(); ++i)
            by_doc[split->annotations[i].doc_id].push_back(i);
        for (const auto& [doc_id, indices] : by_doc) {
            REQUIRE(indices.size() == 2);
            const EntityAnnotation& a = split->annotations[indices[0]];
            const EntityAnnotation& b = split->annotations[indices[1]];
            const Document& doc = split->document_of(a);
            CHECK(locate(a, doc).sentence_index == locate(b, doc).sentence_index);
            CHECK(*a.main_role != *b.main_role);
            // Same window bytes; only the prefix separates the pair.
            CHECK(bare[indices[0]].text == bare[indices[1]].text);
            CHECK(prefixed[indices[0]].text != prefixed[indices[1]].text);
            CHECK(prefixed[indices[0]].text == apply_prefix(a.mention, bare[indices[0]].text));
        }
    }
}

TEST_CASE("the stock corpus recipes keep their published shape", "[testkit]") {
    SyntheticSpec trend = canonical_trend_spec();
    CHECK(trend.docs == 235);
    CHECK(trend.languages == std::vector<std::string>{"BG", "EN", "HI", "PT", "RU"});
    CHECK(trend.seed == 42);
    CHECK(canonical_trend_spec(7).seed == 7);

    SyntheticSpec bilingual = bilingual_transfer_spec();
    CHECK(bilingual.languages == std::vector<std::string>{"EN", "RU"});
    CHECK(bilingual.shared_cues);
    SyntheticCorpus corpus = generate_synthetic(bilingual);
    CHECK(corpus.cues_by_language.at("EN") == corpus.cues_by_language.at("RU"));

    // The 10:1 weights shape the document counts exactly.
    std::map<std::string, std::size_t> docs;
    for (const Dataset* split : {&corpus.train, &corpus.dev})
        for (const auto& [id, doc] : split->documents) ++docs[doc.language];
    CHECK(docs.at("EN") == 200);
    CHECK(docs.at("RU") == 20);
    std::map<std::string, std::size_t> dev_docs;
    for (const auto& [id, doc] : corpus.dev.documents) ++dev_docs[doc.language];
    CHECK(dev_docs.at("EN") == 60);
    CHECK(dev_docs.at("RU") == 6);
}

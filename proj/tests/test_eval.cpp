#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "entframe/eval.hpp"
#include "entframe/rng.hpp"
#include "toy_corpus.hpp"

using namespace entframe;

namespace {

using FineSet = std::set<FineRole>;

// Independent scorer: per-instance set intersections, then the textbook
// pooled formulas. Deliberately a different formulation than the library's
// per-element membership loop.
struct OracleScores {
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

OracleScores oracle_micro(const std::vector<FineSet>& gold, const std::vector<FineSet>& pred) {
    OracleScores o;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        std::vector<FineRole> both;
        std::set_intersection(gold[i].begin(), gold[i].end(), pred[i].begin(), pred[i].end(),
                              std::back_inserter(both));
        o.tp += both.size();
        o.fp += pred[i].size() - both.size();
        o.fn += gold[i].size() - both.size();
    }
    if (o.tp + o.fp) o.precision = double(o.tp) / double(o.tp + o.fp);
    if (o.tp + o.fn) o.recall = double(o.tp) / double(o.tp + o.fn);
    if (o.precision + o.recall > 0.0)
        o.f1 = 2.0 * o.precision * o.recall / (o.precision + o.recall);
    return o;
}

FineSet random_fine_set(Rng& rng, std::size_t max_size) {
    FineSet out;
    std::size_t n = rng_below(rng, max_size + 1);
    for (std::size_t k = 0; k < n; ++k)
        out.insert(kFineRoles[rng_below(rng, kFineRoles.size())]);
    return out;
}

} // namespace

TEST_CASE("micro-F1 matches the worked examples", "[eval]") {
    // Instance 1: one hit, one spurious role -> tp 1, fp 1.
    // Instance 2: one hit, one missed role   -> tp 1, fn 1.
    std::vector<FineSet> gold = {{FineRole::Guardian}, {FineRole::Victim, FineRole::Exploited}};
    std::vector<FineSet> pred = {{FineRole::Guardian, FineRole::Rebel}, {FineRole::Victim}};
    MicroScores s = micro_f1(gold, pred);
    CHECK(s.counts == Counts{2, 1, 1});
    CHECK(s.precision == Catch::Approx(2.0 / 3.0));
    CHECK(s.recall == Catch::Approx(2.0 / 3.0));
    CHECK(s.f1 == Catch::Approx(2.0 / 3.0));

    // A third, fully correct 3-role instance lifts the pool to tp 5, fp 1,
    // fn 1: precision and recall both 5/6, so F1 is 5/6 as well.
    gold.push_back({FineRole::Tyrant, FineRole::Corrupt, FineRole::Deceiver});
    pred.push_back({FineRole::Tyrant, FineRole::Corrupt, FineRole::Deceiver});
    s = micro_f1(gold, pred);
    CHECK(s.counts == Counts{5, 1, 1});
    CHECK(s.precision == Catch::Approx(5.0 / 6.0));
    CHECK(s.recall == Catch::Approx(5.0 / 6.0));
    CHECK(s.f1 == Catch::Approx(5.0 / 6.0));

    CHECK(exact_match_ratio(gold, pred) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("micro-F1 agrees with a brute-force oracle on 1000 instances", "[eval]") {
    Rng rng = make_rng(4242, "eval-oracle");
    std::vector<FineSet> gold, pred;
    for (int i = 0; i < 1000; ++i) {
        gold.push_back(random_fine_set(rng, 3));
        pred.push_back(random_fine_set(rng, 3));
    }
    MicroScores s = micro_f1(gold, pred);
    OracleScores o = oracle_micro(gold, pred);
    CHECK(s.counts.tp == o.tp);
    CHECK(s.counts.fp == o.fp);
    CHECK(s.counts.fn == o.fn);
    CHECK(s.precision == Catch::Approx(o.precision).margin(1e-12));
    CHECK(s.recall == Catch::Approx(o.recall).margin(1e-12));
    CHECK(s.f1 == Catch::Approx(o.f1).margin(1e-12));

    std::size_t exact = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (gold[i] == pred[i]) ++exact;
    CHECK(exact_match_ratio(gold, pred) ==
          Catch::Approx(double(exact) / double(gold.size())).margin(1e-12));
}

TEST_CASE("micro-F1 obeys its structural properties", "[eval]") {
    Rng rng = make_rng(777, "eval-props");
    std::vector<FineSet> gold, pred;
    for (int i = 0; i < 200; ++i) {
        gold.push_back(random_fine_set(rng, 3));
        pred.push_back(random_fine_set(rng, 3));
    }
    MicroScores s = micro_f1(gold, pred);

    // F1 lies between precision and recall.
    CHECK(s.f1 >= std::min(s.precision, s.recall) - 1e-12);
    CHECK(s.f1 <= std::max(s.precision, s.recall) + 1e-12);

    // Instance order doesn't matter.
    std::vector<std::size_t> order(gold.size());
    std::iota(order.begin(), order.end(), 0);
    deterministic_shuffle(order, rng);
    std::vector<FineSet> gold_shuffled, pred_shuffled;
    for (std::size_t i : order) {
        gold_shuffled.push_back(gold[i]);
        pred_shuffled.push_back(pred[i]);
    }
    MicroScores shuffled = micro_f1(gold_shuffled, pred_shuffled);
    CHECK(shuffled.counts == s.counts);
    CHECK(shuffled.f1 == s.f1);
    CHECK(exact_match_ratio(gold_shuffled, pred_shuffled) ==
          Catch::Approx(exact_match_ratio(gold, pred)));

    // Duplicating every instance changes counts but not the ratios.
    std::vector<FineSet> gold2 = gold, pred2 = pred;
    gold2.insert(gold2.end(), gold.begin(), gold.end());
    pred2.insert(pred2.end(), pred.begin(), pred.end());
    MicroScores doubled = micro_f1(gold2, pred2);
    CHECK(doubled.counts.tp == 2 * s.counts.tp);
    CHECK(doubled.precision == Catch::Approx(s.precision));
    CHECK(doubled.recall == Catch::Approx(s.recall));
    CHECK(doubled.f1 == Catch::Approx(s.f1));

    // Perfect predictions score 1 across the board.
    MicroScores perfect = micro_f1(gold, gold);
    if (perfect.counts.tp > 0) {
        CHECK(perfect.precision == 1.0);
        CHECK(perfect.recall == 1.0);
        CHECK(perfect.f1 == 1.0);
    }
    CHECK(exact_match_ratio(gold, gold) == 1.0);
}

TEST_CASE("degenerate inputs score zero instead of NaN", "[eval]") {
    std::vector<FineSet> gold = {{FineRole::Guardian}, {FineRole::Victim}};
    std::vector<FineSet> empty_preds = {{}, {}};
    MicroScores s = micro_f1(gold, empty_preds);
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);

    CHECK(micro_f1({}, {}).f1 == 0.0);
    CHECK(exact_match_ratio({}, {}) == 0.0);
    CHECK(main_accuracy({}, {}) == 0.0);

    // A missing main prediction counts as wrong, never as a crash.
    std::vector<std::optional<MainRole>> gm = {MainRole::Protagonist, MainRole::Innocent};
    std::vector<std::optional<MainRole>> pm = {std::nullopt, MainRole::Innocent};
    CHECK(main_accuracy(gm, pm) == Catch::Approx(0.5));
}

TEST_CASE("misaligned inputs are rejected", "[eval]") {
    std::vector<FineSet> one = {{FineRole::Guardian}};
    std::vector<FineSet> two = {{FineRole::Guardian}, {FineRole::Victim}};
    auto expect_misaligned = [](auto&& fn) {
        try {
            fn();
            FAIL("expected MisalignedPredictions");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MisalignedPredictions);
        }
    };
    expect_misaligned([&] { micro_f1(one, two); });
    expect_misaligned([&] { exact_match_ratio(two, one); });
    expect_misaligned([&] {
        main_accuracy({MainRole::Protagonist}, {MainRole::Protagonist, MainRole::Innocent});
    });
    expect_misaligned([&] { evaluate(testutil::toy_dataset(), {}); });
}

TEST_CASE("evaluate groups by language and pools the rest", "[eval]") {
    Dataset ds = testutil::held_out_dataset();             // 3 EN annotations
    Dataset ru = testutil::toy_dataset_ru(1, "ru");        // 3 RU annotations
    ds = merge_datasets({ds, ru}, "dev");

    // Annotation order: the 3 EN rows, then the 3 RU rows.
    std::vector<Prediction> preds(6);
    preds[0] = {MainRole::Protagonist, {FineRole::Guardian}};          // exact
    preds[1] = {MainRole::Antagonist, {FineRole::Tyrant, FineRole::Deceiver}}; // 1 fp
    preds[2] = {MainRole::Antagonist, {FineRole::Instigator}};         // all wrong
    preds[3] = {MainRole::Protagonist, {FineRole::Guardian}};          // exact
    preds[4] = {MainRole::Antagonist, {FineRole::Tyrant}};             // exact
    preds[5] = {MainRole::Innocent, {FineRole::Victim}};               // exact

    MetricsReport report = evaluate(ds, preds);
    REQUIRE(report.per_language.size() == 2);
    REQUIRE(report.per_language.count("EN") == 1);
    REQUIRE(report.per_language.count("RU") == 1);

    const LanguageReport& en = report.per_language.at("EN");
    CHECK(en.n == 3);
    // EN: tp 2 (Guardian, Tyrant), fp 2 (Deceiver, Instigator), fn 1 (Victim).
    CHECK(en.micro.counts == Counts{2, 2, 1});
    CHECK(en.exact_match == Catch::Approx(1.0 / 3.0));
    CHECK(en.main_acc == Catch::Approx(2.0 / 3.0));

    const LanguageReport& ru_report = report.per_language.at("RU");
    CHECK(ru_report.n == 3);
    CHECK(ru_report.micro.f1 == 1.0);
    CHECK(ru_report.main_acc == 1.0);

    CHECK(report.overall.n == 6);
    CHECK(report.overall.micro.counts == Counts{5, 2, 1});
    CHECK(report.overall.main_acc == Catch::Approx(5.0 / 6.0));
}

TEST_CASE("the comparison grid degrades per cell, not wholesale", "[eval]") {
    Dataset train = testutil::toy_dataset();
    Dataset dev = testutil::held_out_dataset();
    TrainOptions options;
    options.config.hash_dim = std::size_t(1) << 12;

    CompareSpec spec;
    spec.strategies = {ExtractionStrategy::Sentence, ExtractionStrategy::LlmExtracted,
                       ExtractionStrategy::FullText};
    spec.modes = {TrainMode::Flat, TrainMode::Main2Fine};

    // No LLM client supplied: the llm cells must fail alone.
    ComparisonTable table = compare_strategies(train, dev, spec, options, nullptr);
    REQUIRE(table.rows.size() == 6);
    CHECK(table.rows[0].method == "sentence");
    CHECK(table.rows[1].method == "sentence_main2fine");
    CHECK(table.rows[2].method == "gpt-extracted");
    CHECK(table.rows[3].method == "gpt-extracted_main2fine");
    CHECK(table.rows[4].method == "fulltext");
    CHECK(table.rows[5].method == "fulltext_main2fine");
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{4}, std::size_t{5}}) {
        INFO("row " << i);
        CHECK_FALSE(table.rows[i].error.has_value());
        CHECK(table.rows[i].f1_by_language.count("All") == 1);
        CHECK(table.rows[i].f1_by_language.count("EN") == 1);
        CHECK(table.rows[i].f1_by_language.at("All") > 0.9); // separable toy
    }
    for (std::size_t i : {std::size_t{2}, std::size_t{3}}) {
        CHECK(table.rows[i].error.has_value());
        CHECK(table.rows[i].f1_by_language.empty());
    }
}

TEST_CASE("method names encode strategy, prefix, and mode", "[eval]") {
    CHECK(method_name(ExtractionStrategy::Ent2Ent, true, TrainMode::Flat) == "ent2ent");
    CHECK(method_name(ExtractionStrategy::Ent2Ent, false, TrainMode::Flat) ==
          "ent2ent_noprefix");
    CHECK(method_name(ExtractionStrategy::Sentence, true, TrainMode::Main2Fine) ==
          "sentence_main2fine");
    CHECK(method_name(ExtractionStrategy::Paragraph, false, TrainMode::Main2Fine) ==
          "paragraph_noprefix_main2fine");
    CHECK(try_parse_train_mode("flat") == TrainMode::Flat);
    CHECK(try_parse_train_mode("main2fine") == TrainMode::Main2Fine);
    CHECK_FALSE(try_parse_train_mode("two-stage").has_value());
}

TEST_CASE("the comparison CSV has a fixed header and percent cells", "[eval]") {
    ComparisonTable table;
    ComparisonRow row;
    row.method = "ent2ent";
    row.f1_by_language = {{"All", 0.654321}, {"EN", 0.5}, {"RU", 1.0}};
    table.rows.push_back(row);
    ComparisonRow failed;
    failed.method = "gpt-extracted";
    failed.error = "no client";
    table.rows.push_back(failed);

    CHECK(comparison_csv(table) ==
          "model,method,BG,EN,HI,PT,RU,All\n"
          "linear,ent2ent,,50.00,,,100.00,65.43\n"
          "linear,gpt-extracted,,,,,,\n");
}

TEST_CASE("in-language vs merged training orders rows by resource size", "[eval]") {
    Dataset train = merge_datasets({testutil::toy_dataset(), testutil::toy_dataset_ru(1, "rtr")},
                                   "train"); // EN 12, RU 3
    Dataset dev = merge_datasets({testutil::held_out_dataset(), testutil::toy_dataset_ru(2, "rdv")},
                                 "dev"); // EN 3, RU 6
    TrainOptions options;
    options.config.hash_dim = std::size_t(1) << 12;

    std::vector<InLanguageRow> rows = in_language_vs_all(
        train, dev, ExtractionStrategy::Sentence, true, TrainMode::Flat, options);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].language == "RU"); // smaller training pool leads
    CHECK(rows[0].train_samples == 3);
    CHECK(rows[0].dev_samples == 6);
    REQUIRE(rows[0].all_f1.has_value());
    REQUIRE(rows[0].in_lang_f1.has_value());
    CHECK(rows[1].language == "EN");
    CHECK(rows[1].train_samples == 12);

    std::string csv = in_language_csv(rows);
    CHECK(csv.rfind("language,all,in_lang,samples\nRU,", 0) == 0);

    // Single-language training: merged scores are omitted, not faked.
    std::vector<InLanguageRow> solo = in_language_vs_all(
        testutil::toy_dataset(), dev, ExtractionStrategy::Sentence, true, TrainMode::Flat,
        options);
    REQUIRE(solo.size() == 2);
    CHECK(solo[0].language == "RU");
    CHECK(solo[0].train_samples == 0);
    CHECK_FALSE(solo[0].all_f1.has_value());
    CHECK_FALSE(solo[0].in_lang_f1.has_value());
    REQUIRE(solo[1].in_lang_f1.has_value());
    std::string solo_csv = in_language_csv(solo);
    CHECK(solo_csv.find("RU,,,0\n") != std::string::npos);
}

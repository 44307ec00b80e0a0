#pragma once

// Tiny hand-built corpora with one unmistakable cue phrase per class, for
// tests that need a learnable but instant training set.

#include <string>

#include "entframe/corpus.hpp"

namespace testutil {

inline constexpr const char* kGuardCue = "shielded the families bravely from harm";
inline constexpr const char* kTyrantCue = "crushed the courts ruthlessly for power";
inline constexpr const char* kVictimCue = "suffered the raids helplessly without aid";

inline void add_toy_example(entframe::Dataset& ds, const std::string& doc_id,
                            const std::string& language, const std::string& name,
                            const std::string& cue, entframe::MainRole main,
                            entframe::FineRole fine) {
    using namespace entframe;
    std::string text = name + " " + cue + ".";
    ds.documents.emplace(doc_id, make_document(doc_id, language, text));
    EntityAnnotation ann;
    ann.doc_id = doc_id;
    ann.mention = name;
    ann.start = 0;
    ann.end = cp_length(name);
    ann.main_role = main;
    ann.fine_roles = {fine};
    validate_annotation(ann, ds.documents.at(doc_id));
    ds.annotations.push_back(std::move(ann));
}

// 12 English docs, 4 per main role, separable by cue phrase.
inline entframe::Dataset toy_dataset() {
    using namespace entframe;
    Dataset ds;
    ds.split_name = "toy";
    int i = 0;
    for (const char* name : {"Anora", "Borel", "Cadem", "Doran"})
        add_toy_example(ds, "p" + std::to_string(i++), "EN", name, kGuardCue,
                        MainRole::Protagonist, FineRole::Guardian);
    for (const char* name : {"Egris", "Farn", "Gorah", "Hesk"})
        add_toy_example(ds, "a" + std::to_string(i++), "EN", name, kTyrantCue,
                        MainRole::Antagonist, FineRole::Tyrant);
    for (const char* name : {"Ilia", "Joren", "Kesta", "Lorn"})
        add_toy_example(ds, "i" + std::to_string(i++), "EN", name, kVictimCue,
                        MainRole::Innocent, FineRole::Victim);
    return ds;
}

// Unseen names over the same cues: generalization probe.
inline entframe::Dataset held_out_dataset() {
    using namespace entframe;
    Dataset ds;
    ds.split_name = "heldout";
    add_toy_example(ds, "h0", "EN", "Mirra", kGuardCue, MainRole::Protagonist,
                    FineRole::Guardian);
    add_toy_example(ds, "h1", "EN", "Norvel", kTyrantCue, MainRole::Antagonist,
                    FineRole::Tyrant);
    add_toy_example(ds, "h2", "EN", "Ostia", kVictimCue, MainRole::Innocent, FineRole::Victim);
    return ds;
}

// Russian twin of the toy corpus (own cues, own names), `docs` per main role.
inline entframe::Dataset toy_dataset_ru(std::size_t docs, const std::string& id_prefix) {
    using namespace entframe;
    static const char* kGuardRu = "защищала семьи отважно от беды";
    static const char* kTyrantRu = "давила суды безжалостно ради власти";
    static const char* kVictimRu = "терпела облавы беспомощно без помощи";
    static const char* names_p[] = {"Анора", "Борел", "Кадем", "Доран"};
    static const char* names_a[] = {"Эгрис", "Фарн", "Горах", "Хеск"};
    static const char* names_i[] = {"Илия", "Йорен", "Кеста", "Лорн"};
    Dataset ds;
    ds.split_name = id_prefix;
    for (std::size_t k = 0; k < docs && k < 4; ++k) {
        add_toy_example(ds, id_prefix + "_p" + std::to_string(k), "RU", names_p[k], kGuardRu,
                        MainRole::Protagonist, FineRole::Guardian);
        add_toy_example(ds, id_prefix + "_a" + std::to_string(k), "RU", names_a[k], kTyrantRu,
                        MainRole::Antagonist, FineRole::Tyrant);
        add_toy_example(ds, id_prefix + "_i" + std::to_string(k), "RU", names_i[k], kVictimRu,
                        MainRole::Innocent, FineRole::Victim);
    }
    return ds;
}

} // namespace testutil

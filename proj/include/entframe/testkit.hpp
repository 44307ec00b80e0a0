#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "entframe/corpus.hpp"
#include "entframe/error.hpp"
#include "entframe/extraction.hpp"
#include "entframe/rng.hpp"
#include "entframe/taxonomy.hpp"

// Deterministic synthetic corpus generator. Documents are pseudo-word news
// stories in which every annotated entity's roles are betrayed by planted cue
// tokens: one cue always sits in the mention's sentence, optional second-role
// cues land in the immediately following sentence with probability
// cue_strength (otherwise they stray into a pre-story noise region outside
// every entity window). Other entities' cues and distractor cues litter the
// rest of the document, so whole-document inputs ingest cross-entity noise
// while entity-bounded windows stay clean. Shared-sentence entity pairs get
// byte-identical windows that only the mention prefix can tell apart, and
// entity names are drawn from per-role pools so the prefix carries signal.

namespace entframe {

struct SyntheticSpec {
    std::vector<std::string> languages = {"BG", "EN", "HI", "PT", "RU"};
    std::size_t entities_per_doc_min = 2;
    std::size_t entities_per_doc_max = 4;
    std::size_t docs = 235;
    // Probability a secondary-role cue lands inside the entity's window
    // (mention sentence or the sentence after) instead of straying outside.
    double cue_strength = 0.75;
    double distractor_docs_fraction = 0.5;
    std::uint64_t seed = 42;

    // Shape knobs beyond the basic contract.
    std::map<std::string, double> language_weights; // empty = uniform doc counts
    double shared_pair_fraction = 0.45; // docs whose first two entities share a sentence
    bool shared_cues = false;           // one cross-language cue/name vocabulary
    std::size_t names_per_role = 2;
    double name_reliability = 0.95; // probability a name comes from its role's pool
    double dev_fraction = 0.3;      // of each language's documents
    double second_role_fraction = 0.35;

    void validate() const {
        if (languages.empty())
            throw Error(ErrorKind::SpecInvalid, "languages must be non-empty");
        std::set<std::string> seen;
        for (const std::string& lang : languages)
            if (!seen.insert(lang).second)
                throw Error(ErrorKind::SpecInvalid, "duplicate language '" + lang + "'");
        if (docs == 0) throw Error(ErrorKind::SpecInvalid, "docs must be >= 1");
        if (entities_per_doc_min == 0 || entities_per_doc_min > entities_per_doc_max)
            throw Error(ErrorKind::SpecInvalid, "need 1 <= entities_per_doc_min <= max");
        for (auto [name, value] : {std::pair<const char*, double>{"cue_strength", cue_strength},
                                   {"distractor_docs_fraction", distractor_docs_fraction},
                                   {"shared_pair_fraction", shared_pair_fraction},
                                   {"name_reliability", name_reliability},
                                   {"dev_fraction", dev_fraction},
                                   {"second_role_fraction", second_role_fraction}})
            if (value < 0.0 || value > 1.0)
                throw Error(ErrorKind::SpecInvalid,
                            std::string(name) + " must lie in [0, 1]");
        if (names_per_role == 0)
            throw Error(ErrorKind::SpecInvalid, "names_per_role must be >= 1");
        if (entities_per_doc_max > kFineRoles.size() * names_per_role)
            throw Error(ErrorKind::SpecInvalid,
                        "entities_per_doc_max exceeds the distinct-name supply "
                        "(22 * names_per_role)");
        for (const auto& [lang, weight] : language_weights) {
            if (!seen.count(lang))
                throw Error(ErrorKind::SpecInvalid,
                            "weight given for unknown language '" + lang + "'");
            if (!(weight > 0.0))
                throw Error(ErrorKind::SpecInvalid, "language weights must be positive");
        }
    }
};

// One planted cue occurrence. mention is empty for unattributed noise cues;
// in_window says whether the cue sits in its entity's mention/following
// sentence (the part an entity-bounded window is guaranteed to see).
struct CuePlacement {
    std::string doc_id;
    std::string cue;
    FineRole role = FineRole::Guardian;
    std::size_t sentence_index = 0;
    std::size_t cp_offset = 0;
    std::string mention;
    bool in_window = false;
};

struct SyntheticCorpus {
    Dataset train;
    Dataset dev;
    std::vector<CuePlacement> placements;
    // language -> fine role -> cue token (the full planted vocabulary)
    std::map<std::string, std::map<FineRole, std::string>> cues_by_language;
};

namespace synth {

enum class Script { Latin, Cyrillic, Devanagari };

inline Script script_of(const std::string& language) {
    if (language == "BG" || language == "RU") return Script::Cyrillic;
    if (language == "HI") return Script::Devanagari;
    return Script::Latin;
}

// Strictly consonant+vowel syllables, so pseudo-words can only match each
// other at syllable boundaries: cue and name words are 4 syllables (kept
// distinct from each other by construction) while fillers are 2-3, so a cue
// token can never appear anywhere but where it was planted.
inline const std::vector<std::string>& syllables(Script script) {
    static const std::vector<std::string> latin = {
        "ba", "ce", "di", "fo", "gu", "ha", "ji", "ko", "lu", "me",
        "na", "po", "qui", "ra", "se", "ti", "vo", "wa", "xi", "zo"};
    static const std::vector<std::string> cyrillic = {
        "ба", "ве", "ди", "фо", "гу", "жа", "зи", "ко", "лу", "ме",
        "на", "по", "ру", "се", "ти", "во", "ша", "ща", "чу", "зо"};
    static const std::vector<std::string> devanagari = {
        "बा", "चे", "दि", "फो", "गु", "हा", "जि", "को", "लु", "मे",
        "ना", "पो", "रा", "से", "ति", "वो", "शा", "या", "खी", "ज़ो"};
    switch (script) {
        case Script::Cyrillic: return cyrillic;
        case Script::Devanagari: return devanagari;
        default: return latin;
    }
}

inline std::string terminator(Script script) {
    return script == Script::Devanagari ? "।" : ".";
}

inline std::string make_word(Rng& rng, Script script, std::size_t n_syllables) {
    const std::vector<std::string>& bank = syllables(script);
    std::string word;
    for (std::size_t i = 0; i < n_syllables; ++i)
        word += bank[static_cast<std::size_t>(rng_below(rng, bank.size()))];
    return word;
}

inline std::string capitalize(const std::string& word, Script script) {
    if (word.empty()) return word;
    if (script == Script::Latin) {
        std::string out = word;
        if (out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
        return out;
    }
    if (script == Script::Cyrillic) {
        std::size_t pos = 0;
        char32_t cp = utf8_decode_at(word, pos);
        if (cp >= 0x430 && cp <= 0x44F) {
            std::string out;
            utf8_append(out, cp - 0x20);
            out += word.substr(pos);
            return out;
        }
    }
    return word; // Devanagari has no case
}

inline std::string make_cue(Rng& rng, Script script) { return make_word(rng, script, 4); }

// Names share the cue length so the mention carries comparable n-gram mass;
// vocabularies keep them disjoint from cues (compared case-insensitively,
// since featurization folds ASCII case).
inline std::string make_name_stem(Rng& rng, Script script) { return make_word(rng, script, 4); }

inline std::string make_filler(Rng& rng, Script script) {
    return make_word(rng, script, 2 + rng_below(rng, 2));
}

// Cue (role -> token), name (role -> pool) and filler vocabularies for one
// language, drawn from dedicated streams so document randomness never
// perturbs them. Fillers come from a small fixed lexicon rather than being
// minted per document: that makes them high-frequency, role-free features a
// classifier can learn to discount even from a handful of examples.
struct Vocabulary {
    std::map<FineRole, std::string> cues;
    std::map<FineRole, std::vector<std::string>> names;
    std::vector<std::string> fillers;
};

inline Vocabulary make_vocabulary(std::uint64_t seed, const std::string& stream_tag,
                                  Script script, std::size_t names_per_role) {
    Vocabulary vocab;
    // One dedup set over uncapitalized stems keeps every cue and name token
    // pairwise distinct even after case folding.
    std::set<std::string> used;
    Rng cue_rng = make_rng(seed, "cues-" + stream_tag);
    for (FineRole role : kFineRoles) {
        std::string cue = make_cue(cue_rng, script);
        while (!used.insert(cue).second) cue = make_cue(cue_rng, script);
        vocab.cues[role] = cue;
    }
    Rng name_rng = make_rng(seed, "names-" + stream_tag);
    for (FineRole role : kFineRoles) {
        std::vector<std::string> pool;
        for (std::size_t i = 0; i < names_per_role; ++i) {
            std::string stem = make_name_stem(name_rng, script);
            while (!used.insert(stem).second) stem = make_name_stem(name_rng, script);
            pool.push_back(capitalize(stem, script));
        }
        vocab.names[role] = pool;
    }
    Rng filler_rng = make_rng(seed, "fillers-" + stream_tag);
    for (std::size_t i = 0; i < 40; ++i) {
        std::string filler = make_filler(filler_rng, script);
        while (!used.insert(filler).second) filler = make_filler(filler_rng, script);
        vocab.fillers.push_back(filler);
    }
    return vocab;
}

inline const std::string& pick_filler(Rng& rng, const Vocabulary& vocab) {
    return vocab.fillers[static_cast<std::size_t>(rng_below(rng, vocab.fillers.size()))];
}

struct TextBuilder {
    std::string text;
    std::size_t cp = 0;

    std::pair<std::size_t, std::size_t> append(const std::string& token) {
        std::size_t start = cp;
        text += token;
        cp += cp_length(token);
        return {start, cp};
    }
};

struct PlannedEntity {
    std::string name;
    FineRole primary = FineRole::Guardian;
    std::optional<FineRole> secondary;
    bool secondary_in_window = false;
    std::size_t ann_start = 0;
    std::size_t ann_end = 0;
};

struct RawPlacement { // cp offsets; sentence indices resolved after segmentation
    std::string cue;
    FineRole role = FineRole::Guardian;
    std::size_t cp_offset = 0;
    std::string mention;
    bool in_window = false;
};

} // namespace synth

// Deterministic corpus generation. Same spec, same bytes, always.
inline SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    using namespace synth;

    // Documents per language, proportional to weights (uniform when absent),
    // with every language getting at least one document.
    std::vector<double> weights;
    double total_weight = 0.0;
    for (const std::string& lang : spec.languages) {
        auto it = spec.language_weights.find(lang);
        double w = it == spec.language_weights.end()
                       ? (spec.language_weights.empty() ? 1.0 : 0.0)
                       : it->second;
        if (w <= 0.0) w = spec.language_weights.empty() ? 1.0 : 1e-9;
        weights.push_back(w);
        total_weight += w;
    }
    std::vector<std::size_t> docs_per_language(spec.languages.size(), 0);
    std::vector<std::pair<double, std::size_t>> fractions;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double raw = static_cast<double>(spec.docs) * weights[i] / total_weight;
        docs_per_language[i] = static_cast<std::size_t>(raw);
        fractions.emplace_back(raw - static_cast<double>(docs_per_language[i]), i);
        assigned += docs_per_language[i];
    }
    std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; assigned < spec.docs; ++k, ++assigned)
        ++docs_per_language[fractions[k % fractions.size()].second];
    for (std::size_t i = 0; i < docs_per_language.size(); ++i) {
        while (docs_per_language[i] == 0) {
            auto richest = std::max_element(docs_per_language.begin(), docs_per_language.end());
            if (*richest <= 1) break;
            --*richest;
            ++docs_per_language[i];
        }
    }

    // Vocabularies: one per language, or one shared (Latin) vocabulary that
    // every language embeds, so cue evidence transfers across languages.
    std::map<std::string, Vocabulary> vocab_by_language;
    if (spec.shared_cues) {
        Vocabulary shared =
            make_vocabulary(spec.seed, "shared", Script::Latin, spec.names_per_role);
        for (const std::string& lang : spec.languages) vocab_by_language[lang] = shared;
    } else {
        for (const std::string& lang : spec.languages)
            vocab_by_language[lang] =
                make_vocabulary(spec.seed, lang, script_of(lang), spec.names_per_role);
    }

    SyntheticCorpus corpus;
    corpus.train.split_name = "train";
    corpus.dev.split_name = "dev";
    for (const std::string& lang : spec.languages)
        corpus.cues_by_language[lang] = vocab_by_language[lang].cues;

    for (std::size_t lang_idx = 0; lang_idx < spec.languages.size(); ++lang_idx) {
        const std::string& lang = spec.languages[lang_idx];
        const Script script = script_of(lang);
        const Vocabulary& vocab = vocab_by_language[lang];
        const std::string term = terminator(script);
        const std::size_t n_docs = docs_per_language[lang_idx];
        Rng rng = make_rng(spec.seed, "docs-" + lang);

        // Which documents of this language go to dev (split by document).
        std::vector<std::size_t> order(n_docs);
        for (std::size_t i = 0; i < n_docs; ++i) order[i] = i;
        Rng split_rng = make_rng(spec.seed, "split-" + lang);
        deterministic_shuffle(order, split_rng);
        std::size_t n_dev = static_cast<std::size_t>(
            std::llround(spec.dev_fraction * static_cast<double>(n_docs)));
        if (n_docs >= 2) {
            if (n_dev == 0) n_dev = 1;
            if (n_dev >= n_docs) n_dev = n_docs - 1;
        } else {
            n_dev = 0;
        }
        std::set<std::size_t> dev_docs(order.begin(), order.begin() + n_dev);

        for (std::size_t d = 0; d < n_docs; ++d) {
            char id_buf[32];
            std::snprintf(id_buf, sizeof id_buf, "%s_%04zu", lang.c_str(), d);
            const std::string doc_id = id_buf;

            const std::size_t n_entities =
                spec.entities_per_doc_min +
                rng_below(rng, spec.entities_per_doc_max - spec.entities_per_doc_min + 1);
            const bool shared_pair =
                n_entities >= 2 && rng_unit(rng) < spec.shared_pair_fraction;
            const bool distractor = rng_unit(rng) < spec.distractor_docs_fraction;

            // Plan the entities first; strays must be known before emission.
            std::vector<PlannedEntity> entities;
            std::set<std::string> used_names;
            for (std::size_t k = 0; k < n_entities; ++k) {
                PlannedEntity ent;
                ent.primary = kFineRoles[rng_below(rng, kFineRoles.size())];
                if (shared_pair && k == 1)
                    while (main_of(ent.primary) == main_of(entities[0].primary))
                        ent.primary = kFineRoles[rng_below(rng, kFineRoles.size())];
                const bool in_shared_pair = shared_pair && k < 2;
                if (!in_shared_pair && rng_unit(rng) < spec.second_role_fraction) {
                    const std::vector<FineRole>& family = fine_roles_of(main_of(ent.primary));
                    if (family.size() > 1) {
                        FineRole second = family[rng_below(rng, family.size())];
                        while (second == ent.primary)
                            second = family[rng_below(rng, family.size())];
                        ent.secondary = second;
                        ent.secondary_in_window = rng_unit(rng) < spec.cue_strength;
                    }
                }
                // Name: usually from the primary role's pool, so the mention
                // itself hints at the role. On a within-document collision,
                // try the rest of the chosen pool before spilling into other
                // pools, so the role signal survives collisions.
                FineRole name_role = ent.primary;
                if (rng_unit(rng) >= spec.name_reliability)
                    name_role = kFineRoles[rng_below(rng, kFineRoles.size())];
                std::vector<std::size_t> pool_order(spec.names_per_role);
                for (std::size_t i = 0; i < pool_order.size(); ++i) pool_order[i] = i;
                deterministic_shuffle(pool_order, rng);
                std::string name;
                for (std::size_t i : pool_order) {
                    const std::string& candidate = vocab.names.at(name_role)[i];
                    if (!used_names.count(candidate)) {
                        name = candidate;
                        break;
                    }
                }
                while (name.empty()) {
                    FineRole other = kFineRoles[rng_below(rng, kFineRoles.size())];
                    const std::string& candidate =
                        vocab.names.at(other)[rng_below(rng, spec.names_per_role)];
                    if (!used_names.count(candidate)) name = candidate;
                }
                used_names.insert(name);
                ent.name = name;
                entities.push_back(std::move(ent));
            }

            TextBuilder builder;
            std::vector<RawPlacement> raw_placements;
            bool first_paragraph = true;
            auto paragraph_break = [&] {
                if (!first_paragraph) builder.append("\n\n");
                first_paragraph = false;
            };
            auto plant_cue = [&](FineRole role, const std::string& mention, bool in_window) {
                RawPlacement placement;
                placement.cue = vocab.cues.at(role);
                placement.role = role;
                placement.mention = mention;
                placement.in_window = in_window;
                placement.cp_offset = builder.append(placement.cue).first;
                raw_placements.push_back(std::move(placement));
            };

            // Headline: fillers only, no terminator.
            paragraph_break();
            builder.append(capitalize(pick_filler(rng, vocab), script));
            for (std::size_t w = 0, n = 2 + rng_below(rng, 3); w < n; ++w) {
                builder.append(" ");
                builder.append(pick_filler(rng, vocab));
            }

            // Pre-story noise: distractor cue sentences and strayed
            // secondary cues. Entity windows never reach back here.
            if (distractor) {
                for (std::size_t p = 0, np = 1 + rng_below(rng, 2); p < np; ++p) {
                    paragraph_break();
                    for (std::size_t s = 0, ns = 2 + rng_below(rng, 2); s < ns; ++s) {
                        if (s) builder.append(" ");
                        builder.append(pick_filler(rng, vocab));
                        if (rng_unit(rng) < 0.6) {
                            builder.append(" ");
                            plant_cue(kFineRoles[rng_below(rng, kFineRoles.size())], "", false);
                        }
                        builder.append(" ");
                        builder.append(pick_filler(rng, vocab));
                        builder.append(term);
                    }
                }
            }
            {
                std::vector<std::size_t> strayed;
                for (std::size_t k = 0; k < entities.size(); ++k)
                    if (entities[k].secondary && !entities[k].secondary_in_window)
                        strayed.push_back(k);
                if (!strayed.empty()) {
                    paragraph_break();
                    for (std::size_t si = 0; si < strayed.size(); ++si) {
                        const PlannedEntity& ent = entities[strayed[si]];
                        if (si) builder.append(" ");
                        builder.append(pick_filler(rng, vocab));
                        builder.append(" ");
                        plant_cue(*ent.secondary, ent.name, false);
                        builder.append(" ");
                        builder.append(pick_filler(rng, vocab));
                        builder.append(term);
                    }
                }
            }

            // Entity blocks.
            std::size_t k = 0;
            while (k < entities.size()) {
                paragraph_break();
                if (shared_pair && k == 0) {
                    // One lean sentence holding both entities and both cues:
                    // their entity-bounded windows are byte-identical, so only
                    // the mention prefix can tell them apart, and the sparse
                    // sentence keeps the prefix a large share of the features.
                    PlannedEntity& a = entities[0];
                    PlannedEntity& b = entities[1];
                    std::tie(a.ann_start, a.ann_end) = builder.append(a.name);
                    builder.append(" ");
                    plant_cue(a.primary, a.name, true);
                    builder.append(" ");
                    std::tie(b.ann_start, b.ann_end) = builder.append(b.name);
                    builder.append(" ");
                    plant_cue(b.primary, b.name, true);
                    builder.append(term);
                    // A short filler follow-up keeps the shared window
                    // non-trivial.
                    builder.append(" ");
                    builder.append(pick_filler(rng, vocab));
                    builder.append(term);
                    k += 2;
                    continue;
                }
                PlannedEntity& ent = entities[k];
                // Anchor sentence: mention plus its primary cue.
                std::tie(ent.ann_start, ent.ann_end) = builder.append(ent.name);
                builder.append(" ");
                plant_cue(ent.primary, ent.name, true);
                for (std::size_t w = 0, n = 1 + rng_below(rng, 2); w < n; ++w) {
                    builder.append(" ");
                    builder.append(pick_filler(rng, vocab));
                }
                builder.append(term);
                // Following sentence: the secondary cue when it stayed in
                // the window, filler otherwise.
                builder.append(" ");
                builder.append(pick_filler(rng, vocab));
                if (ent.secondary && ent.secondary_in_window) {
                    builder.append(" ");
                    plant_cue(*ent.secondary, ent.name, true);
                }
                builder.append(" ");
                builder.append(pick_filler(rng, vocab));
                builder.append(term);
                // Optional trailing noise sentences (still inside the
                // window, but role-free).
                for (std::size_t s = 0, ns = rng_below(rng, 3); s < ns; ++s) {
                    builder.append(" ");
                    for (std::size_t w = 0, n = 2 + rng_below(rng, 3); w < n; ++w) {
                        if (w) builder.append(" ");
                        builder.append(pick_filler(rng, vocab));
                    }
                    builder.append(term);
                }
                ++k;
            }

            Document doc = make_document(doc_id, lang, builder.text);
            Dataset& target = dev_docs.count(d) ? corpus.dev : corpus.train;
            target.documents.emplace(doc_id, doc);

            for (const PlannedEntity& ent : entities) {
                EntityAnnotation ann;
                ann.doc_id = doc_id;
                ann.mention = ent.name;
                ann.start = ent.ann_start;
                ann.end = ent.ann_end;
                ann.main_role = main_of(ent.primary);
                ann.fine_roles.insert(ent.primary);
                if (ent.secondary && ent.secondary_in_window)
                    ann.fine_roles.insert(*ent.secondary);
                validate_annotation(ann, doc);
                target.annotations.push_back(std::move(ann));
            }
            for (const RawPlacement& raw : raw_placements) {
                CuePlacement placement;
                placement.doc_id = doc_id;
                placement.cue = raw.cue;
                placement.role = raw.role;
                placement.cp_offset = raw.cp_offset;
                placement.mention = raw.mention;
                placement.in_window = raw.in_window;
                placement.sentence_index = locate(doc, raw.cp_offset).sentence_index;
                corpus.placements.push_back(std::move(placement));
            }
        }
    }
    return corpus;
}

// Canonical multilingual corpus for the strategy/prefix trend checks:
// roughly 500 train and 200 dev annotations over the five task languages.
inline SyntheticSpec canonical_trend_spec(std::uint64_t seed = 42) {
    SyntheticSpec spec;
    spec.seed = seed;
    return spec;
}

// Bilingual 10:1 corpus with one shared cue/name vocabulary, for the
// merged-vs-in-language training comparison on the low-resource language.
inline SyntheticSpec bilingual_transfer_spec(std::uint64_t seed = 42) {
    SyntheticSpec spec;
    spec.languages = {"EN", "RU"};
    spec.language_weights = {{"EN", 10.0}, {"RU", 1.0}};
    spec.docs = 220;
    spec.shared_cues = true;
    spec.shared_pair_fraction = 0.25;
    spec.seed = seed;
    return spec;
}

// Writes train/ and dev/ corpus roots plus placement-log.json and
// manifest.json under `root`.
inline void write_synthetic(const std::filesystem::path& root, const SyntheticCorpus& corpus) {
    save_corpus_root(corpus.train, root / "train");
    save_corpus_root(corpus.dev, root / "dev");

    nlohmann::json log = nlohmann::json::array();
    for (const CuePlacement& p : corpus.placements)
        log.push_back({{"doc_id", p.doc_id},
                       {"cue", p.cue},
                       {"role", std::string(to_string(p.role))},
                       {"sentence_index", p.sentence_index},
                       {"cp_offset", p.cp_offset},
                       {"mention", p.mention},
                       {"in_window", p.in_window}});
    std::ofstream log_out(root / "placement-log.json");
    if (!log_out)
        throw Error(ErrorKind::IoError, "cannot write " + (root / "placement-log.json").string());
    log_out << log.dump(2) << '\n';

    nlohmann::json manifest;
    for (const auto& [split, dataset] :
         {std::pair<const char*, const Dataset*>{"train", &corpus.train},
          {"dev", &corpus.dev}}) {
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& [lang, n] : annotation_counts_by_language(*dataset)) counts[lang] = n;
        manifest[split] = {{"annotation_counts", counts}};
    }
    nlohmann::json cues = nlohmann::json::object();
    for (const auto& [lang, by_role] : corpus.cues_by_language) {
        nlohmann::json role_map = nlohmann::json::object();
        for (const auto& [role, cue] : by_role) role_map[std::string(to_string(role))] = cue;
        cues[lang] = role_map;
    }
    manifest["cues"] = cues;
    std::ofstream manifest_out(root / "manifest.json");
    if (!manifest_out)
        throw Error(ErrorKind::IoError, "cannot write " + (root / "manifest.json").string());
    manifest_out << manifest.dump(2) << '\n';
}

} // namespace entframe

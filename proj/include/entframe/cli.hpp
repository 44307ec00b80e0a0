#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entframe/corpus.hpp"
#include "entframe/error.hpp"
#include "entframe/eval.hpp"
#include "entframe/extraction.hpp"
#include "entframe/llm_client.hpp"
#include "entframe/llm_http.hpp"
#include "entframe/pipeline.hpp"
#include "entframe/prompting.hpp"
#include "entframe/serialize.hpp"
#include "entframe/testkit.hpp"

// Command-line driver. Subcommands: load-check, extract, train, predict,
// evaluate, compare, in-lang-vs-all, prompt-build, parse-llm, synth-gen,
// export-taxonomy. Exit codes: 0 success, 1 validation error, 2 I/O error.
// Every run writes a run-manifest.json with the fully resolved configuration
// (next to the output file, or into the output directory).

namespace entframe::cli {

namespace detail {

inline std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        std::string token =
            trim(csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!token.empty()) out.push_back(token);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline std::optional<std::set<std::string>> parse_language_filter(const std::string& csv) {
    if (trim(csv).empty()) return std::nullopt;
    std::vector<std::string> tokens = split_csv(csv);
    return std::set<std::string>(tokens.begin(), tokens.end());
}

// Treat --out values with a file-like extension as files, else directories.
inline bool looks_like_file(const std::filesystem::path& out) {
    std::string ext = out.extension().string();
    return !ext.empty() && ext != ".";
}

inline std::filesystem::path manifest_dir_for(const std::filesystem::path& out) {
    std::filesystem::path dir = looks_like_file(out) ? out.parent_path() : out;
    if (dir.empty()) dir = ".";
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_run_manifest(const std::filesystem::path& out, const std::string& command,
                               ojson options) {
    ojson manifest;
    manifest["tool"] = "entframe";
    manifest["command"] = command;
    manifest["options"] = std::move(options);
    write_json(manifest_dir_for(out) / "run-manifest.json", manifest);
}

// ---- shared flag bundles --------------------------------------------------

struct CorpusFlags {
    std::string root;
    std::string languages_csv;

    void attach(CLI::App* sub, const std::string& flag = "--in",
                const std::string& what = "corpus root (<LANG>/articles + annotations.tsv)") {
        sub->add_option(flag, root, what)->required();
        if (!sub->get_option_no_throw("--languages"))
            sub->add_option("--languages", languages_csv,
                            "comma-separated language filter (default: all)");
    }

    Dataset load() const { return load_corpus_root(root, parse_language_filter(languages_csv)); }

    void manifest_into(ojson& options, const std::string& key = "in") const {
        options[key] = root;
        options["languages"] = languages_csv.empty() ? "all" : languages_csv;
    }
};

struct ConfigFlags {
    std::uint64_t seed = 42;
    std::size_t epochs = 20;
    double learning_rate = 0.1;
    double l2 = 1e-5;
    std::size_t ngram_min = 2;
    std::size_t ngram_max = 5;
    std::size_t hash_bits = 18;
    double threshold = 0.5;
    bool fine_on_predicted = false;
    std::size_t parallelism = 1;

    void attach(CLI::App* sub) {
        sub->add_option("--seed", seed, "RNG seed")->capture_default_str();
        sub->add_option("--epochs", epochs, "SGD epochs")->capture_default_str();
        sub->add_option("--lr", learning_rate, "SGD learning rate")->capture_default_str();
        sub->add_option("--l2", l2, "L2 regularization strength")->capture_default_str();
        sub->add_option("--ngram-min", ngram_min, "smallest character n-gram")
            ->capture_default_str();
        sub->add_option("--ngram-max", ngram_max, "largest character n-gram")
            ->capture_default_str();
        sub->add_option("--hash-bits", hash_bits, "feature space = 2^bits")
            ->capture_default_str();
        sub->add_option("--threshold", threshold, "per-label decision threshold")
            ->capture_default_str();
        sub->add_flag("--fine-on-predicted", fine_on_predicted,
                      "route fine-model training by predicted (not gold) main role");
        sub->add_option("--parallelism", parallelism, "worker threads for LLM calls")
            ->capture_default_str();
    }

    TrainOptions options() const {
        TrainOptions opts;
        opts.config.seed = seed;
        opts.config.epochs = epochs;
        opts.config.learning_rate = learning_rate;
        opts.config.l2 = l2;
        opts.config.ngram_min = ngram_min;
        opts.config.ngram_max = ngram_max;
        if (hash_bits == 0 || hash_bits > 30)
            throw Error(ErrorKind::ValidationError, "--hash-bits must lie in [1, 30]");
        opts.config.hash_dim = std::size_t(1) << hash_bits;
        opts.config.threshold = threshold;
        opts.config.validate();
        opts.fine_on_predicted_main = fine_on_predicted;
        opts.llm_parallelism = parallelism;
        return opts;
    }

    void manifest_into(ojson& options) const {
        options["seed"] = seed;
        options["epochs"] = epochs;
        options["lr"] = learning_rate;
        options["l2"] = l2;
        options["ngram_min"] = ngram_min;
        options["ngram_max"] = ngram_max;
        options["hash_bits"] = hash_bits;
        options["threshold"] = threshold;
        options["fine_on_predicted"] = fine_on_predicted;
        options["parallelism"] = parallelism;
    }
};

struct ClientHolder {
    std::unique_ptr<LlmClient> base;
    std::unique_ptr<RecordingLlmClient> recorder;

    LlmClient* get() const {
        if (recorder) return recorder.get();
        return base.get();
    }
};

struct LlmFlags {
    std::string client_spec = "stub";
    std::string record_path;

    void attach(CLI::App* sub) {
        sub->add_option("--llm", client_spec,
                        "LLM client: stub | replay:<transcript.jsonl> | http | none")
            ->capture_default_str();
        sub->add_option("--record", record_path,
                        "record every LLM exchange to this transcript file");
    }

    ClientHolder make() const {
        ClientHolder holder;
        if (client_spec == "none" || client_spec.empty()) return holder;
        if (client_spec == "stub") {
            holder.base = std::make_unique<StubLlmClient>();
        } else if (client_spec.rfind("replay:", 0) == 0) {
            holder.base = std::make_unique<ReplayLlmClient>(client_spec.substr(7));
        } else if (client_spec == "http") {
            holder.base = std::make_unique<HttpLlmClient>(http_config_from_env());
        } else {
            throw Error(ErrorKind::ValidationError,
                        "--llm must be stub, replay:<path>, http, or none (got '" + client_spec +
                            "')");
        }
        if (!record_path.empty())
            holder.recorder = std::make_unique<RecordingLlmClient>(*holder.base, record_path);
        return holder;
    }

    void manifest_into(ojson& options) const {
        options["llm"] = client_spec;
        options["record"] = record_path;
    }
};

inline ExtractionStrategy strategy_from_flag(const std::string& name) {
    return parse_strategy(trim(name));
}

inline TrainMode mode_from_flag(const std::string& name) {
    auto mode = try_parse_train_mode(trim(name));
    if (!mode)
        throw Error(ErrorKind::ValidationError,
                    "--mode must be flat or main2fine (got '" + name + "')");
    return *mode;
}

inline std::string format_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
    return buf;
}

inline std::string metrics_csv(const MetricsReport& report) {
    std::string csv = "language,precision,recall,f1,exact_match,main_accuracy,n\n";
    auto add_row = [&csv](const std::string& language, const LanguageReport& r) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%.4f,%.4f,%.4f,%zu\n", language.c_str(),
                      r.micro.precision, r.micro.recall, r.micro.f1, r.exact_match, r.main_acc,
                      r.n);
        csv += buf;
    };
    for (const auto& [language, lang_report] : report.per_language)
        add_row(language, lang_report);
    add_row("All", report.overall);
    return csv;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << content;
}

// Prompt-building shared by prompt-build and parse-llm: one tagged document
// and prompt per document that has annotations, in doc_id order.
struct DocPrompt {
    std::string doc_id;
    TaggedDocument tagged;
    std::string prompt;
    std::vector<std::size_t> annotation_indices;
};

inline std::vector<DocPrompt> build_doc_prompts(const Dataset& dataset) {
    std::map<std::string, std::vector<std::size_t>> by_doc;
    for (std::size_t i = 0; i < dataset.annotations.size(); ++i)
        by_doc[dataset.annotations[i].doc_id].push_back(i);
    std::vector<DocPrompt> prompts;
    for (const auto& [doc_id, indices] : by_doc) {
        const Document& doc = dataset.documents.at(doc_id);
        std::vector<EntityAnnotation> annotations;
        annotations.reserve(indices.size());
        for (std::size_t i : indices) annotations.push_back(dataset.annotations[i]);
        DocPrompt dp;
        dp.doc_id = doc_id;
        dp.tagged = tag_entities(doc, annotations);
        dp.prompt = render_prompt(dp.tagged, doc.language);
        dp.annotation_indices = indices;
        prompts.push_back(std::move(dp));
    }
    return prompts;
}

} // namespace detail

// Runs one CLI invocation. `args` excludes the program name and is in natural
// order. Returns the process exit code.
inline int dispatch(std::vector<std::string> args) {
    using namespace detail;
    namespace fs = std::filesystem;

    CLI::App app{"entity-role context optimization toolkit"};
    app.name("entframe");
    app.require_subcommand(1);

    int exit_code = 0;

    // ---- load-check -------------------------------------------------------
    auto* load_check = app.add_subcommand("load-check", "load and validate a corpus root");
    auto lc_corpus = std::make_shared<CorpusFlags>();
    auto lc_manifest = std::make_shared<std::string>();
    auto lc_out = std::make_shared<std::string>();
    lc_corpus->attach(load_check);
    load_check->add_option("--manifest", *lc_manifest,
                           "expected per-language counts to verify against");
    load_check->add_option("--out", *lc_out, "output directory")->required();
    load_check->callback([lc_corpus, lc_manifest, lc_out] {
        Dataset dataset = lc_corpus->load();
        if (!lc_manifest->empty()) check_corpus_manifest(dataset, *lc_manifest);
        fs::create_directories(*lc_out);
        write_json(fs::path(*lc_out) / "counts.json", corpus_manifest_json(dataset));
        ojson options;
        lc_corpus->manifest_into(options);
        options["manifest"] = *lc_manifest;
        options["out"] = *lc_out;
        write_run_manifest(*lc_out, "load-check", options);
        std::cout << "loaded " << dataset.documents.size() << " documents, "
                  << dataset.annotations.size() << " annotations\n";
        for (const auto& [language, n] : annotation_counts_by_language(dataset))
            std::cout << "  " << language << ": " << n << " annotations\n";
    });

    // ---- extract ----------------------------------------------------------
    auto* extract = app.add_subcommand("extract", "write context examples as JSONL");
    auto ex_corpus = std::make_shared<CorpusFlags>();
    auto ex_llm = std::make_shared<LlmFlags>();
    auto ex_strategy = std::make_shared<std::string>("ent2ent");
    auto ex_prefix = std::make_shared<bool>(true);
    auto ex_parallelism = std::make_shared<std::size_t>(1);
    auto ex_out = std::make_shared<std::string>();
    ex_corpus->attach(extract);
    ex_llm->attach(extract);
    extract->add_option("--strategy", *ex_strategy,
                        "sentence|paragraph|fulltext|ent2ent|gpt-extracted (alias: llm)")
        ->capture_default_str();
    extract->add_flag("--prefix,!--no-prefix", *ex_prefix, "prepend the mention prefix")
        ->capture_default_str();
    extract->add_option("--parallelism", *ex_parallelism, "worker threads for LLM extraction")
        ->capture_default_str();
    extract->add_option("--out", *ex_out, "output JSONL file")->required();
    extract->callback([ex_corpus, ex_llm, ex_strategy, ex_prefix, ex_parallelism, ex_out] {
        Dataset dataset = ex_corpus->load();
        ExtractionStrategy strategy = strategy_from_flag(*ex_strategy);
        ClientHolder client = ex_llm->make();
        std::vector<ContextExample> examples =
            build_examples(dataset, strategy, *ex_prefix, client.get(), *ex_parallelism);
        fs::path out_path(*ex_out);
        manifest_dir_for(out_path); // ensure parent exists
        write_examples_jsonl(out_path, dataset, examples);
        ojson options;
        ex_corpus->manifest_into(options);
        options["strategy"] = std::string(to_string(strategy));
        options["prefix"] = *ex_prefix;
        ex_llm->manifest_into(options);
        options["parallelism"] = *ex_parallelism;
        options["out"] = *ex_out;
        write_run_manifest(out_path, "extract", options);
        std::cout << "wrote " << examples.size() << " context examples to " << *ex_out << "\n";
    });

    // ---- train ------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train a role classifier");
    auto tr_corpus = std::make_shared<CorpusFlags>();
    auto tr_config = std::make_shared<ConfigFlags>();
    auto tr_llm = std::make_shared<LlmFlags>();
    auto tr_strategy = std::make_shared<std::string>("ent2ent");
    auto tr_prefix = std::make_shared<bool>(true);
    auto tr_mode = std::make_shared<std::string>("flat");
    auto tr_out = std::make_shared<std::string>();
    tr_corpus->attach(train_cmd, "--train", "training corpus root");
    tr_config->attach(train_cmd);
    tr_llm->attach(train_cmd);
    train_cmd->add_option("--strategy", *tr_strategy, "extraction strategy")
        ->capture_default_str();
    train_cmd->add_flag("--prefix,!--no-prefix", *tr_prefix, "prepend the mention prefix")
        ->capture_default_str();
    train_cmd->add_option("--mode", *tr_mode, "flat | main2fine")->capture_default_str();
    train_cmd->add_option("--out", *tr_out, "output directory (model.bin)")->required();
    train_cmd->callback([tr_corpus, tr_config, tr_llm, tr_strategy, tr_prefix, tr_mode, tr_out] {
        Dataset dataset = tr_corpus->load();
        ExtractionStrategy strategy = strategy_from_flag(*tr_strategy);
        TrainMode mode = mode_from_flag(*tr_mode);
        TrainOptions options = tr_config->options();
        ClientHolder client = tr_llm->make();
        Model model;
        if (mode == TrainMode::Flat)
            model = train_flat(dataset, strategy, *tr_prefix, options, client.get());
        else
            model = train_two_stage(dataset, strategy, *tr_prefix, options, client.get());
        fs::create_directories(*tr_out);
        save_model(fs::path(*tr_out) / "model.bin", model);
        ojson manifest_options;
        tr_corpus->manifest_into(manifest_options, "train");
        manifest_options["strategy"] = std::string(to_string(strategy));
        manifest_options["prefix"] = *tr_prefix;
        manifest_options["mode"] = std::string(to_string(mode));
        tr_config->manifest_into(manifest_options);
        tr_llm->manifest_into(manifest_options);
        manifest_options["out"] = *tr_out;
        write_run_manifest(*tr_out, "train", manifest_options);
        std::cout << "trained " << to_string(mode) << " model on " << dataset.annotations.size()
                  << " annotations -> " << (fs::path(*tr_out) / "model.bin").string() << "\n";
    });

    // ---- predict ----------------------------------------------------------
    auto* predict_cmd = app.add_subcommand("predict", "predict roles with a trained model");
    auto pr_corpus = std::make_shared<CorpusFlags>();
    auto pr_llm = std::make_shared<LlmFlags>();
    auto pr_model = std::make_shared<std::string>();
    auto pr_parallelism = std::make_shared<std::size_t>(1);
    auto pr_out = std::make_shared<std::string>();
    pr_corpus->attach(predict_cmd);
    pr_llm->attach(predict_cmd);
    predict_cmd->add_option("--model", *pr_model, "model.bin from `train`")->required();
    predict_cmd->add_option("--parallelism", *pr_parallelism, "worker threads for LLM calls")
        ->capture_default_str();
    predict_cmd->add_option("--out", *pr_out, "output predictions JSONL")->required();
    predict_cmd->callback([pr_corpus, pr_llm, pr_model, pr_parallelism, pr_out] {
        Dataset dataset = pr_corpus->load();
        Model model = load_model(*pr_model);
        ClientHolder client = pr_llm->make();
        std::vector<Prediction> preds =
            predict_all(model, dataset, client.get(), *pr_parallelism);
        fs::path out_path(*pr_out);
        manifest_dir_for(out_path);
        write_predictions_jsonl(out_path, dataset, preds);
        ojson options;
        pr_corpus->manifest_into(options);
        options["model"] = *pr_model;
        pr_llm->manifest_into(options);
        options["parallelism"] = *pr_parallelism;
        options["out"] = *pr_out;
        write_run_manifest(out_path, "predict", options);
        std::cout << "wrote " << preds.size() << " predictions to " << *pr_out << "\n";
    });

    // ---- evaluate ---------------------------------------------------------
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against gold");
    auto ev_corpus = std::make_shared<CorpusFlags>();
    auto ev_preds = std::make_shared<std::string>();
    auto ev_out = std::make_shared<std::string>();
    ev_corpus->attach(evaluate_cmd);
    evaluate_cmd->add_option("--preds", *ev_preds, "predictions JSONL from `predict`")
        ->required();
    evaluate_cmd->add_option("--out", *ev_out, "output directory")->required();
    evaluate_cmd->callback([ev_corpus, ev_preds, ev_out] {
        Dataset dataset = ev_corpus->load();
        std::vector<Prediction> preds =
            align_predictions(dataset, read_predictions_jsonl(*ev_preds));
        MetricsReport report = evaluate(dataset, preds);
        fs::create_directories(*ev_out);
        write_json(fs::path(*ev_out) / "report.json", metrics_report_json(report));
        write_text_file(fs::path(*ev_out) / "report.csv", metrics_csv(report));
        ojson options;
        ev_corpus->manifest_into(options);
        options["preds"] = *ev_preds;
        options["out"] = *ev_out;
        write_run_manifest(*ev_out, "evaluate", options);
        std::cout << "micro-F1 " << format_pct(report.overall.micro.f1) << ", exact match "
                  << format_pct(report.overall.exact_match) << ", main accuracy "
                  << format_pct(report.overall.main_acc) << " over " << report.overall.n
                  << " annotations\n";
    });

    // ---- compare ----------------------------------------------------------
    auto* compare_cmd =
        app.add_subcommand("compare", "train/score a grid of strategies, prefixes and modes");
    auto cp_train = std::make_shared<CorpusFlags>();
    auto cp_dev = std::make_shared<std::string>();
    auto cp_config = std::make_shared<ConfigFlags>();
    auto cp_llm = std::make_shared<LlmFlags>();
    auto cp_strategies = std::make_shared<std::string>("sentence,paragraph,fulltext,ent2ent");
    auto cp_prefixes = std::make_shared<std::string>("on");
    auto cp_modes = std::make_shared<std::string>("flat");
    auto cp_out = std::make_shared<std::string>();
    cp_train->attach(compare_cmd, "--train", "training corpus root");
    compare_cmd->add_option("--dev", *cp_dev, "evaluation corpus root")->required();
    cp_config->attach(compare_cmd);
    cp_llm->attach(compare_cmd);
    compare_cmd->add_option("--strategies", *cp_strategies, "comma-separated strategies")
        ->capture_default_str();
    compare_cmd->add_option("--prefix-variants", *cp_prefixes, "comma-separated: on,off")
        ->capture_default_str();
    compare_cmd->add_option("--modes", *cp_modes, "comma-separated: flat,main2fine")
        ->capture_default_str();
    compare_cmd->add_option("--out", *cp_out, "output directory")->required();
    compare_cmd->callback(
        [cp_train, cp_dev, cp_config, cp_llm, cp_strategies, cp_prefixes, cp_modes, cp_out] {
            Dataset train_set = cp_train->load();
            Dataset dev_set =
                load_corpus_root(*cp_dev, parse_language_filter(cp_train->languages_csv));
            CompareSpec spec;
            for (const std::string& name : split_csv(*cp_strategies))
                spec.strategies.push_back(strategy_from_flag(name));
            spec.prefixed_variants.clear();
            for (const std::string& token : split_csv(*cp_prefixes)) {
                if (token == "on") spec.prefixed_variants.push_back(true);
                else if (token == "off") spec.prefixed_variants.push_back(false);
                else
                    throw Error(ErrorKind::ValidationError,
                                "--prefix-variants entries must be on or off (got '" + token +
                                    "')");
            }
            spec.modes.clear();
            for (const std::string& name : split_csv(*cp_modes))
                spec.modes.push_back(mode_from_flag(name));
            if (spec.strategies.empty() || spec.prefixed_variants.empty() || spec.modes.empty())
                throw Error(ErrorKind::ValidationError,
                            "--strategies, --prefix-variants and --modes must be non-empty");
            TrainOptions options = cp_config->options();
            ClientHolder client = cp_llm->make();
            ComparisonTable table =
                compare_strategies(train_set, dev_set, spec, options, client.get());
            fs::create_directories(*cp_out);
            write_text_file(fs::path(*cp_out) / "comparison.csv", comparison_csv(table));
            write_json(fs::path(*cp_out) / "comparison.json", comparison_table_json(table));
            ojson manifest_options;
            cp_train->manifest_into(manifest_options, "train");
            manifest_options["dev"] = *cp_dev;
            manifest_options["strategies"] = *cp_strategies;
            manifest_options["prefix_variants"] = *cp_prefixes;
            manifest_options["modes"] = *cp_modes;
            cp_config->manifest_into(manifest_options);
            cp_llm->manifest_into(manifest_options);
            manifest_options["out"] = *cp_out;
            write_run_manifest(*cp_out, "compare", manifest_options);
            for (const ComparisonRow& row : table.rows) {
                std::cout << row.method << ": ";
                if (row.error) std::cout << "FAILED (" << *row.error << ")";
                else if (auto it = row.f1_by_language.find("All");
                         it != row.f1_by_language.end())
                    std::cout << "All micro-F1 " << format_pct(it->second);
                std::cout << "\n";
            }
        });

    // ---- in-lang-vs-all ---------------------------------------------------
    auto* inlang_cmd = app.add_subcommand(
        "in-lang-vs-all", "compare per-language training against merged training");
    auto il_train = std::make_shared<CorpusFlags>();
    auto il_dev = std::make_shared<std::string>();
    auto il_config = std::make_shared<ConfigFlags>();
    auto il_llm = std::make_shared<LlmFlags>();
    auto il_strategy = std::make_shared<std::string>("ent2ent");
    auto il_prefix = std::make_shared<bool>(true);
    auto il_mode = std::make_shared<std::string>("flat");
    auto il_out = std::make_shared<std::string>();
    il_train->attach(inlang_cmd, "--train", "training corpus root");
    inlang_cmd->add_option("--dev", *il_dev, "evaluation corpus root")->required();
    il_config->attach(inlang_cmd);
    il_llm->attach(inlang_cmd);
    inlang_cmd->add_option("--strategy", *il_strategy, "extraction strategy")
        ->capture_default_str();
    inlang_cmd->add_flag("--prefix,!--no-prefix", *il_prefix, "prepend the mention prefix")
        ->capture_default_str();
    inlang_cmd->add_option("--mode", *il_mode, "flat | main2fine")->capture_default_str();
    inlang_cmd->add_option("--out", *il_out, "output directory")->required();
    inlang_cmd->callback(
        [il_train, il_dev, il_config, il_llm, il_strategy, il_prefix, il_mode, il_out] {
            Dataset train_set = il_train->load();
            Dataset dev_set =
                load_corpus_root(*il_dev, parse_language_filter(il_train->languages_csv));
            TrainOptions options = il_config->options();
            ClientHolder client = il_llm->make();
            std::vector<InLanguageRow> rows = in_language_vs_all(
                train_set, dev_set, strategy_from_flag(*il_strategy), *il_prefix,
                mode_from_flag(*il_mode), options, client.get());
            fs::create_directories(*il_out);
            write_text_file(fs::path(*il_out) / "in_lang_vs_all.csv", in_language_csv(rows));
            write_json(fs::path(*il_out) / "in_lang_vs_all.json", in_language_table_json(rows));
            ojson manifest_options;
            il_train->manifest_into(manifest_options, "train");
            manifest_options["dev"] = *il_dev;
            manifest_options["strategy"] = *il_strategy;
            manifest_options["prefix"] = *il_prefix;
            manifest_options["mode"] = *il_mode;
            il_config->manifest_into(manifest_options);
            il_llm->manifest_into(manifest_options);
            manifest_options["out"] = *il_out;
            write_run_manifest(*il_out, "in-lang-vs-all", manifest_options);
            for (const InLanguageRow& row : rows) {
                std::cout << row.language << ": all "
                          << (row.all_f1 ? format_pct(*row.all_f1) : std::string("-"))
                          << ", in-lang "
                          << (row.in_lang_f1 ? format_pct(*row.in_lang_f1) : std::string("-"))
                          << " (" << row.train_samples << " train annotations)\n";
            }
        });

    // ---- prompt-build -----------------------------------------------------
    auto* prompt_cmd =
        app.add_subcommand("prompt-build", "render classification prompts per document");
    auto pb_corpus = std::make_shared<CorpusFlags>();
    auto pb_llm = std::make_shared<LlmFlags>();
    auto pb_complete = std::make_shared<bool>(false);
    auto pb_parallelism = std::make_shared<std::size_t>(1);
    auto pb_out = std::make_shared<std::string>();
    pb_corpus->attach(prompt_cmd);
    pb_llm->attach(prompt_cmd);
    prompt_cmd->add_flag("--complete", *pb_complete,
                         "also run the prompts through the --llm client");
    prompt_cmd->add_option("--parallelism", *pb_parallelism, "worker threads for LLM calls")
        ->capture_default_str();
    prompt_cmd->add_option("--out", *pb_out, "output directory")->required();
    prompt_cmd->callback([pb_corpus, pb_llm, pb_complete, pb_parallelism, pb_out] {
        Dataset dataset = pb_corpus->load();
        std::vector<DocPrompt> doc_prompts = build_doc_prompts(dataset);
        fs::create_directories(*pb_out);
        std::vector<PromptRecord> records;
        records.reserve(doc_prompts.size());
        for (const DocPrompt& dp : doc_prompts) {
            PromptRecord record;
            record.doc_id = dp.doc_id;
            record.language = dataset.documents.at(dp.doc_id).language;
            record.prompt = dp.prompt;
            record.queried_entities = dp.tagged.query_entities;
            records.push_back(std::move(record));
        }
        write_prompts_jsonl(fs::path(*pb_out) / "prompts.jsonl", records);
        if (*pb_complete) {
            ClientHolder client = pb_llm->make();
            if (!client.get())
                throw Error(ErrorKind::MissingLlmClient, "--complete needs an LLM client");
            std::vector<std::string> prompts;
            prompts.reserve(doc_prompts.size());
            for (const DocPrompt& dp : doc_prompts) prompts.push_back(dp.prompt);
            std::vector<std::string> replies =
                complete_many(*client.get(), prompts, *pb_parallelism);
            std::vector<ResponseRecord> responses;
            responses.reserve(replies.size());
            for (std::size_t i = 0; i < replies.size(); ++i)
                responses.push_back({doc_prompts[i].doc_id, replies[i]});
            write_responses_jsonl(fs::path(*pb_out) / "responses.jsonl", responses);
        }
        ojson options;
        pb_corpus->manifest_into(options);
        pb_llm->manifest_into(options);
        options["complete"] = *pb_complete;
        options["parallelism"] = *pb_parallelism;
        options["out"] = *pb_out;
        write_run_manifest(*pb_out, "prompt-build", options);
        std::cout << "wrote " << records.size() << " prompts to "
                  << (fs::path(*pb_out) / "prompts.jsonl").string() << "\n";
    });

    // ---- parse-llm --------------------------------------------------------
    auto* parse_cmd =
        app.add_subcommand("parse-llm", "parse LLM responses into aligned predictions");
    auto pl_corpus = std::make_shared<CorpusFlags>();
    auto pl_responses = std::make_shared<std::string>();
    auto pl_out = std::make_shared<std::string>();
    pl_corpus->attach(parse_cmd);
    parse_cmd->add_option("--responses", *pl_responses, "responses JSONL from prompt-build")
        ->required();
    parse_cmd->add_option("--out", *pl_out, "output directory")->required();
    parse_cmd->callback([pl_corpus, pl_responses, pl_out] {
        Dataset dataset = pl_corpus->load();
        std::map<std::string, std::string> responses;
        for (const ResponseRecord& record : read_responses_jsonl(*pl_responses))
            responses.emplace(record.doc_id, record.response);

        std::vector<Prediction> preds(dataset.annotations.size());
        ojson verdict_rows = ojson::array();
        for (const DocPrompt& dp : build_doc_prompts(dataset)) {
            auto response_it = responses.find(dp.doc_id);
            if (response_it == responses.end()) {
                std::cerr << "warning: no response for document " << dp.doc_id
                          << "; its entities get empty predictions\n";
                for (const std::string& mention : dp.tagged.query_entities) {
                    ojson row;
                    row["doc_id"] = dp.doc_id;
                    row["mention"] = mention;
                    row["status"] = "missing-response";
                    verdict_rows.push_back(std::move(row));
                }
                continue;
            }
            std::vector<ResponseRow> rows = parse_response(response_it->second);
            // Repair case-only mention mismatches so near-miss echoes of the
            // queried entity still count.
            for (ResponseRow& row : rows) {
                const std::vector<std::string>& queried = dp.tagged.query_entities;
                if (std::find(queried.begin(), queried.end(), row.entity) != queried.end())
                    continue;
                std::string folded = normalize_role_string(row.entity);
                const std::string* unique_match = nullptr;
                for (const std::string& mention : queried) {
                    if (normalize_role_string(mention) == folded) {
                        if (unique_match) {
                            unique_match = nullptr;
                            break;
                        }
                        unique_match = &mention;
                    }
                }
                if (unique_match) row.entity = *unique_match;
            }
            ResponseValidation validation = validate_response(rows, dp.tagged.query_entities);
            std::vector<Prediction> doc_preds = predictions_from_verdicts(validation);
            for (std::size_t q = 0; q < validation.verdicts.size(); ++q) {
                ojson row;
                row["doc_id"] = dp.doc_id;
                row["mention"] = validation.verdicts[q].mention;
                row["status"] = std::string(to_string(validation.verdicts[q].status));
                verdict_rows.push_back(std::move(row));
            }
            for (std::size_t i : dp.annotation_indices) {
                const std::string& mention = dataset.annotations[i].mention;
                for (std::size_t q = 0; q < dp.tagged.query_entities.size(); ++q)
                    if (dp.tagged.query_entities[q] == mention) {
                        preds[i] = doc_preds[q];
                        break;
                    }
            }
            for (const std::string& extra : validation.extra_entities) {
                ojson row;
                row["doc_id"] = dp.doc_id;
                row["mention"] = extra;
                row["status"] = "extra-entity";
                verdict_rows.push_back(std::move(row));
            }
        }
        fs::create_directories(*pl_out);
        write_predictions_jsonl(fs::path(*pl_out) / "predictions.jsonl", dataset, preds);
        ojson verdicts;
        verdicts["rows"] = verdict_rows;
        write_json(fs::path(*pl_out) / "verdicts.json", verdicts);
        ojson options;
        pl_corpus->manifest_into(options);
        options["responses"] = *pl_responses;
        options["out"] = *pl_out;
        write_run_manifest(*pl_out, "parse-llm", options);
        std::cout << "wrote " << preds.size() << " predictions to "
                  << (fs::path(*pl_out) / "predictions.jsonl").string() << "\n";
    });

    // ---- synth-gen --------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth-gen", "generate a synthetic cue corpus");
    auto sg_preset = std::make_shared<std::string>("canonical");
    auto sg_seed = std::make_shared<std::uint64_t>(42);
    auto sg_docs = std::make_shared<std::size_t>(0);
    auto sg_languages = std::make_shared<std::string>();
    auto sg_weights = std::make_shared<std::string>();
    auto sg_cue_strength = std::make_shared<double>(-1.0);
    auto sg_distractor = std::make_shared<double>(-1.0);
    auto sg_shared_pairs = std::make_shared<double>(-1.0);
    auto sg_shared_cues = std::make_shared<bool>(false);
    auto sg_dev_fraction = std::make_shared<double>(-1.0);
    auto sg_out = std::make_shared<std::string>();
    synth_cmd->add_option("--preset", *sg_preset, "canonical | bilingual")
        ->capture_default_str();
    synth_cmd->add_option("--seed", *sg_seed, "generation seed")->capture_default_str();
    synth_cmd->add_option("--docs", *sg_docs, "total documents (0 = preset default)");
    synth_cmd->add_option("--languages", *sg_languages, "comma-separated language codes");
    synth_cmd->add_option("--weights", *sg_weights,
                          "per-language document weights, e.g. EN=10,RU=1");
    synth_cmd->add_option("--cue-strength", *sg_cue_strength,
                          "fraction of secondary cues kept inside the entity window");
    synth_cmd->add_option("--distractor-fraction", *sg_distractor,
                          "fraction of documents carrying distractor paragraphs");
    synth_cmd->add_option("--shared-pair-fraction", *sg_shared_pairs,
                          "fraction of documents with a shared-sentence entity pair");
    synth_cmd->add_flag("--shared-cues", *sg_shared_cues,
                        "one cue/name vocabulary shared across languages");
    synth_cmd->add_option("--dev-fraction", *sg_dev_fraction, "documents held out as dev");
    synth_cmd->add_option("--out", *sg_out, "output directory")->required();
    synth_cmd->callback([sg_preset, sg_seed, sg_docs, sg_languages, sg_weights, sg_cue_strength,
                         sg_distractor, sg_shared_pairs, sg_shared_cues, sg_dev_fraction,
                         sg_out, synth_cmd] {
        SyntheticSpec spec;
        if (*sg_preset == "canonical") spec = canonical_trend_spec(*sg_seed);
        else if (*sg_preset == "bilingual") spec = bilingual_transfer_spec(*sg_seed);
        else
            throw Error(ErrorKind::ValidationError,
                        "--preset must be canonical or bilingual (got '" + *sg_preset + "')");
        if (*sg_docs > 0) spec.docs = *sg_docs;
        if (!sg_languages->empty()) {
            spec.languages = split_csv(*sg_languages);
            spec.language_weights.clear();
        }
        if (!sg_weights->empty()) {
            spec.language_weights.clear();
            for (const std::string& pair : split_csv(*sg_weights)) {
                std::size_t eq = pair.find('=');
                if (eq == std::string::npos)
                    throw Error(ErrorKind::ValidationError,
                                "--weights entries must look like LANG=NUMBER (got '" + pair +
                                    "')");
                spec.language_weights[trim(pair.substr(0, eq))] =
                    std::stod(pair.substr(eq + 1));
            }
        }
        if (*sg_cue_strength >= 0.0) spec.cue_strength = *sg_cue_strength;
        if (*sg_distractor >= 0.0) spec.distractor_docs_fraction = *sg_distractor;
        if (*sg_shared_pairs >= 0.0) spec.shared_pair_fraction = *sg_shared_pairs;
        if (synth_cmd->count("--shared-cues")) spec.shared_cues = *sg_shared_cues;
        if (*sg_dev_fraction >= 0.0) spec.dev_fraction = *sg_dev_fraction;

        SyntheticCorpus corpus = generate_synthetic(spec);
        fs::create_directories(*sg_out);
        write_synthetic(*sg_out, corpus);
        ojson options;
        options["preset"] = *sg_preset;
        options["seed"] = *sg_seed;
        options["docs"] = spec.docs;
        ojson langs = ojson::array();
        for (const std::string& lang : spec.languages) langs.push_back(lang);
        options["languages"] = langs;
        ojson weights = ojson::object();
        for (const auto& [lang, w] : spec.language_weights) weights[lang] = w;
        options["weights"] = weights;
        options["cue_strength"] = spec.cue_strength;
        options["distractor_fraction"] = spec.distractor_docs_fraction;
        options["shared_pair_fraction"] = spec.shared_pair_fraction;
        options["shared_cues"] = spec.shared_cues;
        options["dev_fraction"] = spec.dev_fraction;
        options["out"] = *sg_out;
        write_run_manifest(*sg_out, "synth-gen", options);
        std::cout << "generated " << corpus.train.annotations.size() << " train / "
                  << corpus.dev.annotations.size() << " dev annotations under " << *sg_out
                  << "\n";
    });

    // ---- export-taxonomy ----------------------------------------------------
    auto* tax_cmd = app.add_subcommand("export-taxonomy", "write the role taxonomy as JSON");
    auto tx_out = std::make_shared<std::string>();
    tax_cmd->add_option("--out", *tx_out, "output JSON file")->required();
    tax_cmd->callback([tx_out] {
        fs::path out_path(*tx_out);
        manifest_dir_for(out_path);
        write_json(out_path, taxonomy_json());
        ojson options;
        options["out"] = *tx_out;
        write_run_manifest(out_path, "export-taxonomy", options);
        std::cout << "wrote taxonomy to " << *tx_out << "\n";
    });

    // ---- parse + dispatch ---------------------------------------------------
    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::IoError ? 2 : 1;
    }
    return exit_code;
}

} // namespace entframe::cli

#include "csakit/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "csakit/attribution.hpp"
#include "csakit/cascade.hpp"
#include "csakit/emotions.hpp"
#include "csakit/errors.hpp"
#include "csakit/figures.hpp"
#include "csakit/hashing.hpp"
#include "csakit/ingestion.hpp"
#include "csakit/lexical.hpp"
#include "csakit/manifest.hpp"
#include "csakit/overlap.hpp"
#include "csakit/rng.hpp"
#include "csakit/split.hpp"
#include "csakit/synth.hpp"
#include "csakit/topics.hpp"

namespace csakit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
    std::ostream& out;
    std::ostream& err;
    RunManifest manifest;
    bool timestamps = false;
};

std::pair<std::string, fs::path> named_path(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        fs::path p(spec);
        std::string name = p.filename().string();
        if (name.empty()) name = p.parent_path().filename().string();
        return {name, p};
    }
    return {spec.substr(0, eq), fs::path(spec.substr(eq + 1))};
}

// Where the manifest for a run goes: inside a directory output, or next to a
// file output as <file>.manifest.json.
void finish(Context& ctx, const fs::path& out, bool out_is_dir) {
    if (ctx.timestamps) ctx.manifest.finished_at = utc_timestamp();
    if (out_is_dir) {
        ctx.manifest.write(out);
    } else {
        write_text_file(fs::path(out.string() + ".manifest.json"), dump_json(ctx.manifest.to_json(), 2) + "\n");
    }
}

void note_output(Context& ctx, const fs::path& p) { ctx.manifest.outputs.push_back(p.filename().string()); }

std::string resolve_salt(const std::string& flag, std::ostream& err) {
    std::string hex = flag;
    if (hex.empty()) {
        if (const char* env = std::getenv("CSAKIT_SALT")) hex = env;
    }
    if (hex.empty()) {
        err << "warning: no --salt or CSAKIT_SALT given; using a random salt, author hashes will not be reproducible\n";
        std::random_device rd;
        std::string salt;
        for (int i = 0; i < 32; ++i) salt += static_cast<char>(rd() & 0xFF);
        return salt;
    }
    return hex_decode(hex);
}

TokenizedCorpus load_tokens(const fs::path& dir, int ngram, Context& ctx, const std::string& role) {
    Corpus c = read_corpus(dir);
    ctx.manifest.add_input(role, dir);
    return tokenize(c, ngram);
}

void write_table(Context& ctx, const TermScoreTable& table, const fs::path& out) {
    write_text_file(out, table_to_csv(table));
    note_output(ctx, out);
}

struct InputDoc {
    std::string id;
    std::string text;
};

std::vector<InputDoc> read_input_docs(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<InputDoc> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            InputDoc d;
            d.id = j.value("id", "line-" + std::to_string(lineno));
            d.text = j.contains("text") ? j.at("text").get<std::string>() : post_from_json(j).canonical_text();
            docs.push_back(std::move(d));
        } catch (const json::exception& e) {
            throw InputError(path.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return docs;
}

json prediction_json(const std::string& id, const CascadePrediction& p) {
    json labels = json::array();
    for (auto l : p.conditions) labels.push_back(std::string(to_string(l)));
    json j = {{"id", id},
              {"background", std::string(to_string(p.background))},
              {"conditions", labels},
              {"p_with_csa", p.p_with_csa}};
    if (p.label_probabilities) {
        json probs = json::object();
        for (std::size_t i = 0; i < kAllConditions.size(); ++i) {
            probs[std::string(to_string(kAllConditions[i]))] = (*p.label_probabilities)[i];
        }
        j["label_probabilities"] = probs;
    } else {
        j["label_probabilities"] = nullptr;
    }
    return j;
}

std::string html_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

std::string csv_to_html(const std::string& csv, std::size_t max_rows) {
    std::istringstream in(csv);
    std::string line;
    std::string html = "<table>\n";
    std::size_t row = 0;
    while (std::getline(in, line) && row <= max_rows) {
        html += "<tr>";
        std::string cell;
        bool quoted = false;
        const char* tag = row == 0 ? "th" : "td";
        for (std::size_t i = 0; i <= line.size(); ++i) {
            const char c = i < line.size() ? line[i] : ',';
            if (c == '"') {
                quoted = !quoted;
            } else if (c == ',' && !quoted) {
                html += std::string("<") + tag + ">" + html_escape(cell) + "</" + tag + ">";
                cell.clear();
            } else {
                cell += c;
            }
        }
        html += "</tr>\n";
        ++row;
    }
    return html + "</table>\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contrastive analysis and cascade classification of mental-health posts", "csakit"};
    app.require_subcommand(1);
    Context ctx{out, err, {}, false};
    std::function<void()> action;

    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_flag("--timestamps", ctx.timestamps, "Record wall-clock times in the run manifest");
    };
    auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "Root seed")->capture_default_str(); };

    // ------------------------------------------------------------- ingest
    std::vector<std::string> archives;
    std::string lexicon_path, rules_path, salt_hex, out_path;
    bool negative = false;
    std::size_t audit_k = 0;
    {
        auto* sub = app.add_subcommand("ingest", "Clean archives and collect a labelled corpus");
        sub->add_option("--archive", archives, "Archive JSONL file (repeatable)")->required();
        sub->add_option("--lexicon", lexicon_path, "Keyword lexicon JSON");
        sub->add_option("--rules", rules_path, "Collection rules JSON");
        sub->add_option("--salt", salt_hex, "Author-hash salt as hex (else CSAKIT_SALT)");
        sub->add_flag("--negative", negative, "Build the without-CSA cohort from annotated records");
        sub->add_option("--audit,--audit-k", audit_k, "Posts to sample for manual audit");
        sub->add_option("--out", out_path, "Corpus directory")->required();
        add_seed(sub);
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const KeywordLexicon lex = lexicon_path.empty() ? default_lexicon() : load_lexicon(lexicon_path);
                if (auto problems = validate_lexicon(lex); !problems.empty()) throw ConfigError(problems.front());
                const std::string salt = resolve_salt(salt_hex, err);
                std::vector<ArchiveRecord> records;
                std::size_t skipped = 0;
                for (const auto& a : archives) {
                    auto r = read_archive(a);
                    skipped += r.skipped;
                    for (auto& rec : r.records) records.push_back(std::move(rec));
                    ctx.manifest.add_input("archive:" + fs::path(a).filename().string(), a);
                }
                json report;
                Corpus corpus;
                if (negative) {
                    CleanReport rep;
                    corpus = build_negative_corpus(records, lex, salt, &rep);
                    for (const auto& [sub_name, c] : rep.per_subreddit) report["per_subreddit"][sub_name] = {{"in", c.in}, {"out", c.out}};
                } else {
                    const auto rules = rules_path.empty() ? default_rules(lex) : load_rules(rules_path, lex);
                    CollectReport rep;
                    corpus = collect(records, rules, lex, salt, &rep);
                    for (const auto& [sub_name, c] : rep.clean.per_subreddit) report["per_subreddit"][sub_name] = {{"in", c.in}, {"out", c.out}};
                    report["collected_per_subreddit"] = rep.collected_per_subreddit;
                    report["ignored_subreddits"] = rep.ignored_subreddits;
                    report["condition_counts"] = rep.condition_counts;
                    report["duplicate_ids"] = rep.duplicate_ids;
                    report["dropped_deleted"] = rep.clean.dropped_deleted;
                    report["dropped_removed"] = rep.clean.dropped_removed;
                    ctx.manifest.config["rules"] = rules_to_json(rules);
                }
                report["malformed_lines"] = skipped;
                report["posts"] = corpus.posts.size();
                const auto violations = validate_corpus(corpus);
                report["violations"] = violations.size();
                write_corpus(corpus, out_path);
                write_text_file(fs::path(out_path) / "ingest_report.json", dump_json(report, 2) + "\n");
                ctx.manifest.outputs = {std::string(kPostsFile), std::string(kCorpusManifestFile), "ingest_report.json"};
                if (audit_k > 0) {
                    std::string lines;
                    for (const auto& p : audit_sample(corpus, audit_k, seed)) {
                        lines += dump_json(post_to_json(p, corpus.labels_of(p.id))) + "\n";
                    }
                    write_text_file(fs::path(out_path) / "audit_sample.jsonl", lines);
                    ctx.manifest.outputs.push_back("audit_sample.jsonl");
                    ctx.manifest.seeds["audit"] = derive_seed(seed, "audit");
                }
                ctx.manifest.config["lexicon"] = lexicon_to_json(lex);
                ctx.manifest.config["negative"] = negative;
                out << "ingested " << corpus.posts.size() << " posts into " << out_path << "\n";
                finish(ctx, out_path, true);
            };
        });
    }

    // -------------------------------------------------------------- synth
    std::string spec_path;
    int posts_per_cell = -1;
    {
        auto* sub = app.add_subcommand("synth", "Generate the synthetic two-cohort corpus");
        sub->add_option("--spec", spec_path, "Synth spec JSON");
        sub->add_option("--posts-per-cell", posts_per_cell, "Override posts per cell");
        sub->add_option("--out", out_path, "Output directory")->required();
        add_seed(sub);
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                SynthSpec spec = spec_path.empty() ? default_synth_spec(80, seed) : load_synth_spec(spec_path);
                if (!spec_path.empty()) ctx.manifest.add_input("spec", spec_path);
                if (posts_per_cell >= 0) spec.posts_per_cell = posts_per_cell;
                if (spec_path.empty() || app.get_subcommand("synth")->count("--seed") > 0) spec.seed = seed;
                const auto corpora = generate(spec);
                const fs::path dir(out_path);
                write_corpus(corpora.with_csa, dir / "with_csa");
                write_corpus(corpora.without_csa, dir / "without_csa");
                write_text_file(dir / "lexicon.json", dump_json(lexicon_to_json(lexicon_from_spec(spec)), 2) + "\n");
                write_text_file(dir / "spec.json", dump_json(spec.to_json(), 2) + "\n");
                ctx.manifest.config = spec.to_json();
                ctx.manifest.seeds["synth"] = spec.seed;
                ctx.manifest.outputs = {"with_csa", "without_csa", "lexicon.json", "spec.json"};
                out << "generated " << corpora.with_csa.posts.size() << " with-CSA and "
                    << corpora.without_csa.posts.size() << " without-CSA posts\n";
                finish(ctx, dir, true);
            };
        });
    }

    // ------------------------------------------------------------ overlap
    std::vector<std::string> corpus_specs;
    std::string plot_path;
    {
        auto* sub = app.add_subcommand("overlap", "Count authors shared between communities");
        sub->add_option("--corpus,--corpora", corpus_specs, "dir or name=dir (repeatable)")->required();
        sub->add_option("--out", out_path, "overlap.json")->required();
        sub->add_option("--plot", plot_path, "Chord diagram SVG");
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                std::map<std::string, Corpus> corpora;
                for (const auto& s : corpus_specs) {
                    auto [name, dir] = named_path(s);
                    corpora[name] = read_corpus(dir);
                    ctx.manifest.add_input("corpus:" + name, dir);
                }
                const auto m = overlap(corpora);
                write_text_file(out_path, dump_json(overlap_to_json(m), 2) + "\n");
                note_output(ctx, out_path);
                if (!plot_path.empty() && overlap_svg(m, plot_path, err)) note_output(ctx, plot_path);
                finish(ctx, out_path, false);
            };
        });
    }

    // -------------------------------------------------- shift and logodds
    std::string target_dir, contrast_dir, prior_dir;
    int ngram = 1;
    std::size_t top_k = 20;
    double alpha_scale = 1.0;
    std::size_t min_count = 2;
    {
        auto* sub = app.add_subcommand("shift", "Proportion shift between two corpora");
        sub->add_option("--target", target_dir)->required();
        sub->add_option("--contrast", contrast_dir)->required();
        sub->add_option("--ngram,--n", ngram)->capture_default_str();
        sub->add_option("--top-k", top_k, "Terms per side in the chart")->capture_default_str();
        sub->add_option("--out", out_path, "CSV")->required();
        sub->add_option("--plot", plot_path, "Two-sided chart SVG");
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const auto t = load_tokens(target_dir, ngram, ctx, "target");
                const auto c = load_tokens(contrast_dir, ngram, ctx, "contrast");
                const auto table = proportion_shift(t, c);
                ctx.manifest.config = {{"ngram", ngram}, {"top_k", top_k}};
                write_table(ctx, table, out_path);
                if (!plot_path.empty() &&
                    shift_chart_svg("Proportion shift", shift_sides(table, top_k), plot_path, err)) {
                    note_output(ctx, plot_path);
                }
                finish(ctx, out_path, false);
            };
        });
    }
    {
        auto* sub = app.add_subcommand("logodds", "Log-odds ratio with informative Dirichlet prior");
        sub->add_option("--target", target_dir)->required();
        sub->add_option("--contrast", contrast_dir)->required();
        sub->add_option("--prior", prior_dir, "Prior corpus (default: both corpora)");
        sub->add_option("--ngram,--n", ngram)->capture_default_str();
        sub->add_option("--alpha-scale", alpha_scale)->capture_default_str();
        sub->add_option("--min-count", min_count)->capture_default_str();
        sub->add_option("--top-k", top_k, "Terms per side in the chart")->capture_default_str();
        sub->add_option("--out", out_path, "CSV")->required();
        sub->add_option("--plot", plot_path, "Two-sided chart SVG");
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const auto t = load_tokens(target_dir, ngram, ctx, "target");
                const auto c = load_tokens(contrast_dir, ngram, ctx, "contrast");
                const auto prior = prior_dir.empty() ? merge_corpora(t, c) : load_tokens(prior_dir, ngram, ctx, "prior");
                LogOddsOptions opts;
                opts.alpha_scale = alpha_scale;
                opts.min_count = min_count;
                ctx.manifest.config = {
                    {"ngram", ngram}, {"alpha_scale", alpha_scale}, {"min_count", min_count}, {"top_k", top_k}};
                const auto table = log_odds(t, c, prior, opts);
                write_table(ctx, table, out_path);
                if (!plot_path.empty() &&
                    shift_chart_svg("Log-odds ratio", shift_sides(table, top_k), plot_path, err)) {
                    note_output(ctx, plot_path);
                }
                finish(ctx, out_path, false);
            };
        });
    }

    // -------------------------------------------------------------- tfidf
    std::string corpus_dir, aggregate = "max", wordcloud_path;
    {
        auto* sub = app.add_subcommand("tfidf", "Top TF-IDF n-grams of one corpus");
        sub->add_option("--corpus", corpus_dir)->required();
        sub->add_option("--ngram,--n", ngram)->capture_default_str();
        sub->add_option("--top-k", top_k)->capture_default_str();
        sub->add_option("--aggregate", aggregate)->check(CLI::IsMember({"max", "sum"}))->capture_default_str();
        sub->add_option("--out", out_path, "CSV")->required();
        sub->add_option("--wordcloud", wordcloud_path, "Word cloud SVG");
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const auto tc = load_tokens(corpus_dir, ngram, ctx, "corpus");
                const auto table =
                    tfidf_ngrams(tc, top_k, aggregate == "sum" ? TfidfAggregation::Sum : TfidfAggregation::Max);
                ctx.manifest.config = {{"ngram", ngram}, {"top_k", top_k}, {"aggregate", aggregate}};
                write_table(ctx, table, out_path);
                if (!wordcloud_path.empty() && wordcloud_svg("TF-IDF", table, top_k, wordcloud_path, err)) {
                    note_output(ctx, wordcloud_path);
                }
                finish(ctx, out_path, false);
            };
        });
    }

    // ------------------------------------------------------------- ctfidf
    std::vector<std::string> class_specs;
    {
        auto* sub = app.add_subcommand("ctfidf", "Class-based TF-IDF across corpora");
        sub->add_option("--class", class_specs, "name=dir (repeatable)")->required();
        sub->add_option("--ngram,--n", ngram)->capture_default_str();
        sub->add_option("--out", out_path, "Output directory, one CSV per class")->required();
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                std::map<std::string, TokenizedCorpus> classes;
                for (const auto& s : class_specs) {
                    auto [name, dir] = named_path(s);
                    classes[name] = load_tokens(dir, ngram, ctx, "class:" + name);
                }
                ctx.manifest.config = {{"ngram", ngram}};
                for (const auto& [name, table] : c_tfidf(classes)) {
                    write_table(ctx, table, fs::path(out_path) / (name + ".csv"));
                }
                finish(ctx, out_path, true);
            };
        });
    }

    // ------------------------------------------------------------- topics
    std::string k_spec = "2..40";
    std::size_t min_cluster = 5;
    {
        auto* sub = app.add_subcommand("topics", "Embed, cluster and pick the topic count by coherence");
        sub->add_option("--corpus", corpus_dir)->required();
        sub->add_option("--k-candidates", k_spec, "Range a..b or list a,b,c")->capture_default_str();
        sub->add_option("--min-cluster-size", min_cluster)->capture_default_str();
        sub->add_option("--out", out_path, "topics.json")->required();
        add_seed(sub);
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const Corpus c = read_corpus(corpus_dir);
                ctx.manifest.add_input("corpus", corpus_dir);
                TopicOptions opts;
                opts.seed = seed;
                opts.min_cluster_size = min_cluster;
                const HashEmbeddingBackend backend;
                const auto model = fit_topics(c, backend, parse_k_candidates(k_spec), opts);
                ctx.manifest.config = {{"k_candidates", k_spec},
                                       {"min_cluster_size", min_cluster},
                                       {"reduced_dim", opts.reduced_dim},
                                       {"embedding_backend", backend.name()}};
                ctx.manifest.seeds["topics"] = seed;
                write_text_file(out_path, dump_json(model.to_json(), 2) + "\n");
                note_output(ctx, out_path);
                out << "selected " << model.k << " topics (coherence " << format_double(model.coherence) << ")\n";
                finish(ctx, out_path, false);
            };
        });
    }

    // ----------------------------------------------------------- emotions
    {
        auto* sub = app.add_subcommand("emotions", "Label posts with one of seven emotions");
        sub->add_option("--corpus", corpus_specs, "dir or name=dir (repeatable)")->required();
        sub->add_option("--out", out_path, "CSV of post labels")->required();
        sub->add_option("--plot", plot_path, "Grouped bar chart SVG");
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const LexiconEmotionBackend backend;
                std::string csv = "corpus,post_id,emotion\n";
                json profiles = json::object();
                std::map<std::string, std::vector<double>> series;
                std::size_t failures = 0;
                for (const auto& s : corpus_specs) {
                    auto [name, dir] = named_path(s);
                    const Corpus c = read_corpus(dir);
                    ctx.manifest.add_input("corpus:" + name, dir);
                    const auto labeling = label_emotions(c, backend);
                    failures += labeling.failed.size();
                    for (const auto& p : c.posts) {
                        auto it = labeling.labels.find(p.id);
                        csv += name + "," + p.id + "," +
                               (it == labeling.labels.end() ? std::string("unlabeled") : std::string(to_string(it->second))) +
                               "\n";
                    }
                    const auto profile = emotion_profile(labeling.labels);
                    for (auto e : kAllEmotions) {
                        profiles[name][std::string(to_string(e))] = profile.at(e);
                        series[name].push_back(profile.at(e));
                    }
                    profiles[name]["failures"] = labeling.failed.size();
                }
                write_text_file(out_path, csv);
                note_output(ctx, out_path);
                const fs::path profile_path = fs::path(out_path).replace_extension(".profile.json");
                write_text_file(profile_path, dump_json(profiles, 2) + "\n");
                note_output(ctx, profile_path);
                std::vector<std::string> cats;
                for (auto e : kAllEmotions) cats.emplace_back(to_string(e));
                if (!plot_path.empty() && grouped_bar_svg("Emotions", cats, series, plot_path, err)) {
                    note_output(ctx, plot_path);
                }
                ctx.manifest.config = {{"emotion_backend", backend.name()}};
                if (failures > 0) err << "warning: " << failures << " posts could not be labelled\n";
                finish(ctx, out_path, false);
            };
        });
    }

    // -------------------------------------------------------------- split
    std::string with_dir, without_dir;
    bool stratified = false;
    {
        auto* sub = app.add_subcommand("split", "Seeded train/val/test split for both stages");
        sub->add_option("--with", with_dir, "With-CSA corpus directory")->required();
        sub->add_option("--without", without_dir, "Without-CSA corpus directory")->required();
        sub->add_flag("--stratified", stratified, "Stratify stage 1 by background");
        sub->add_option("--out", out_path, "Split directory")->required();
        add_seed(sub);
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const Corpus w = read_corpus(with_dir);
                const Corpus wo = read_corpus(without_dir);
                ctx.manifest.add_input("with_csa", with_dir);
                ctx.manifest.add_input("without_csa", without_dir);
                SplitSpec spec;
                spec.seed = seed;
                spec.stratified = stratified;
                const auto data = split(w, wo, spec);
                write_split(data, spec, out_path);
                ctx.manifest.config = {{"train_fraction", spec.train_fraction},
                                       {"val_fraction_of_train", spec.val_fraction_of_train},
                                       {"stratified", stratified}};
                ctx.manifest.seeds["split/stage1"] = derive_seed(seed, "split/stage1");
                ctx.manifest.seeds["split/stage2"] = derive_seed(seed, "split/stage2");
                ctx.manifest.outputs = {"split.json", "stage1", "stage2"};
                out << "stage 1: " << data.stage1.train.size() << "/" << data.stage1.val.size() << "/"
                    << data.stage1.test.size() << ", stage 2: " << data.stage2.train.size() << "/"
                    << data.stage2.val.size() << "/" << data.stage2.test.size() << "\n";
                finish(ctx, out_path, true);
            };
        });
    }

    // -------------------------------------------------------------- train
    std::string split_dir, backend_name = "general-encoder", config_path, model_dir;
    int stage = 1;
    {
        auto* sub = app.add_subcommand("train", "Train one cascade stage");
        sub->add_option("--split", split_dir, "Split directory")->required();
        sub->add_option("--stage", stage)->check(CLI::IsMember({1, 2}))->capture_default_str();
        sub->add_option("--backend", backend_name)->capture_default_str();
        sub->add_option("--config", config_path, "Training config (key = value)");
        sub->add_option("--out", model_dir, "Model directory")->required();
        add_seed(sub);
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const Backend backend = parse_backend(backend_name);
                TrainConfig cfg = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
                if (!config_path.empty()) ctx.manifest.add_input("config", config_path);
                if (config_path.empty() || app.get_subcommand("train")->count("--seed") > 0) cfg.seed = seed;
                const DataSplit data = read_split(split_dir);
                ctx.manifest.add_input("split", split_dir);
                const SplitSets& sets = stage == 1 ? data.stage1 : data.stage2;
                auto model = stage == 1 ? train_stage1(sets.train, sets.val, backend, cfg)
                                        : train_stage2(sets.train, sets.val, backend, cfg);
                json prov = {{"backend", std::string(to_string(backend))},
                             {"config", cfg.to_json()},
                             {"data_fingerprint", data_fingerprint(sets.train, sets.val)},
                             {"tool_version", std::string(kToolVersion)}};
                save_stage(model_dir, stage, *model, prov);
                ctx.manifest.config = prov;
                ctx.manifest.seeds["train"] = cfg.seed;
                ctx.manifest.outputs = {"stage" + std::to_string(stage) + ".json", "cascade.json"};
                out << "trained stage " << stage << " (" << to_string(backend) << ") into " << model_dir << "\n";
                finish(ctx, fs::path(model_dir) / ("train_stage" + std::to_string(stage)), false);
            };
        });
    }

    // ----------------------------------------------------------- evaluate
    {
        auto* sub = app.add_subcommand("evaluate", "Score trained stages on the held-out test sets");
        sub->add_option("--model", model_dir)->required();
        sub->add_option("--split", split_dir)->required();
        sub->add_option("--out", out_path, "metrics.json (default: <model>/metrics.json)");
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const CascadeModel model = load_cascade(model_dir);
                const DataSplit data = read_split(split_dir);
                ctx.manifest.add_input("model", model_dir);
                ctx.manifest.add_input("split", split_dir);
                json metrics = json::object();
                if (model.stage1) metrics["stage1"] = evaluate_stage1(*model.stage1, data.stage1.test).to_json();
                if (model.stage2) {
                    metrics["stage2"] = evaluate_stage2(*model.stage2, model.thresholds, data.stage2.test).to_json();
                }
                const fs::path target = out_path.empty() ? fs::path(model_dir) / "metrics.json" : fs::path(out_path);
                write_text_file(target, dump_json(metrics, 2) + "\n");
                note_output(ctx, target);
                if (metrics.contains("stage1")) {
                    out << "stage 1 accuracy " << format_double(metrics["stage1"]["accuracy"].get<double>())
                        << " macro-F1 " << format_double(metrics["stage1"]["macro_f1"].get<double>()) << "\n";
                }
                if (metrics.contains("stage2")) {
                    out << "stage 2 hamming " << format_double(metrics["stage2"]["hamming_score"].get<double>())
                        << "\n";
                }
                finish(ctx, target, false);
            };
        });
    }

    // ------------------------------------------------------------ predict
    std::string in_path;
    {
        auto* sub = app.add_subcommand("predict", "Route posts through the cascade");
        sub->add_option("--model", model_dir)->required();
        sub->add_option("--in", in_path, "JSONL of posts or {id, text}")->required();
        sub->add_option("--out", out_path, "Predictions JSONL")->required();
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const CascadeModel model = load_cascade(model_dir);
                ctx.manifest.add_input("model", model_dir);
                ctx.manifest.add_input("input", in_path);
                std::string lines;
                for (const auto& doc : read_input_docs(in_path)) {
                    lines += dump_json(prediction_json(doc.id, predict(model, doc.text))) + "\n";
                }
                write_text_file(out_path, lines);
                note_output(ctx, out_path);
                finish(ctx, out_path, false);
            };
        });
    }

    // ------------------------------------------------------------ explain
    int steps = 128;
    std::string rule_name = "midpoint";
    std::size_t limit = 0;
    {
        auto* sub = app.add_subcommand("explain", "Integrated-gradients token attributions");
        sub->add_option("--model", model_dir)->required();
        sub->add_option("--in", in_path, "JSONL of posts or {id, text}")->required();
        sub->add_option("--stage", stage)->check(CLI::IsMember({1, 2}))->capture_default_str();
        sub->add_option("--steps", steps)->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--rule", rule_name)->check(CLI::IsMember({"midpoint", "right"}))->capture_default_str();
        sub->add_option("--limit", limit, "Explain at most this many posts (0 = all)");
        sub->add_option("--out", out_path, "HTML report")->required();
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                const CascadeModel model = load_cascade(model_dir);
                ctx.manifest.add_input("model", model_dir);
                ctx.manifest.add_input("input", in_path);
                const auto& chosen = stage == 1 ? model.stage1 : model.stage2;
                if (!chosen) throw InputNotFound("model has no stage-" + std::to_string(stage) + " classifier");
                const RiemannRule rule = rule_name == "right" ? RiemannRule::Right : RiemannRule::Midpoint;
                const std::vector<double> tau(model.thresholds.begin(), model.thresholds.end());
                std::vector<AttributionResult> results;
                std::size_t done = 0;
                for (const auto& doc : read_input_docs(in_path)) {
                    if (limit > 0 && done++ >= limit) break;
                    for (auto& r : explain(*chosen, doc.text, steps, tau, rule)) {
                        r.document_id = doc.id;
                        results.push_back(std::move(r));
                    }
                }
                render_report(results, out_path);
                note_output(ctx, out_path);
                ctx.manifest.config = {{"stage", stage}, {"steps", steps}, {"rule", rule_name}};
                finish(ctx, out_path, false);
            };
        });
    }

    // ------------------------------------------------------------- report
    std::string run_dir;
    {
        auto* sub = app.add_subcommand("report", "Bundle a run directory into one HTML summary");
        sub->add_option("--run", run_dir, "Run directory")->required();
        sub->add_option("--out", out_path, "HTML file (default: <run>/report.html)");
        add_common(sub);
        sub->callback([&] {
            action = [&] {
                if (!fs::is_directory(run_dir)) throw InputNotFound("run directory " + run_dir + " does not exist");
                const fs::path target = out_path.empty() ? fs::path(run_dir) / "report.html" : fs::path(out_path);
                std::vector<fs::path> files;
                for (const auto& e : fs::recursive_directory_iterator(run_dir)) {
                    if (e.is_regular_file() && fs::absolute(e.path()) != fs::absolute(target)) files.push_back(e.path());
                }
                std::sort(files.begin(), files.end());
                std::string html =
                    "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Run summary</title>"
                    "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}"
                    "td,th{border:1px solid #ccc;padding:2px 6px}pre{background:#f6f6f6;padding:8px}</style>"
                    "</head><body>\n<h1>Run summary</h1>\n";
                for (const auto& f : files) {
                    const std::string rel = fs::relative(f, run_dir).generic_string();
                    const auto ext = f.extension().string();
                    if (ext == ".csv") {
                        html += "<h2>" + html_escape(rel) + "</h2>\n" + csv_to_html(read_text_file(f), 30);
                    } else if (ext == ".svg") {
                        html += "<h2>" + html_escape(rel) + "</h2>\n" + read_text_file(f);
                    } else if (ext == ".json" && f.filename() != "stage1.json" && f.filename() != "stage2.json" &&
                               fs::file_size(f) < 200000) {
                        html += "<h2>" + html_escape(rel) + "</h2>\n<pre>" + html_escape(read_text_file(f)) + "</pre>\n";
                    }
                }
                html += "</body></html>\n";
                write_text_file(target, html);
                note_output(ctx, target);
                finish(ctx, target, false);
            };
        });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: usage: " << msg << "\n";
        return 2;
    }

    try {
        for (auto* sub : app.get_subcommands()) {
            ctx.manifest.command = sub->get_name();
        }
        ctx.manifest.arguments = args;
        if (ctx.timestamps) ctx.manifest.started_at = utc_timestamp();
        if (action) action();
        return 0;
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << e.category() << ": " << msg << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: internal: " << msg << "\n";
        return 1;
    }
}

}  // namespace csakit

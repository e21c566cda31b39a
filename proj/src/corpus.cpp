#include "csakit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "csakit/errors.hpp"

namespace csakit {

using nlohmann::json;

std::string_view to_string(ConditionLabel label) {
    switch (label) {
        case ConditionLabel::Depression: return "depression";
        case ConditionLabel::Anxiety: return "anxiety";
        case ConditionLabel::Ptsd: return "ptsd";
    }
    return "?";
}

std::string_view to_string(BackgroundTag tag) {
    return tag == BackgroundTag::WithCsa ? "with_csa" : "without_csa";
}

std::string_view to_string(PostFlag flag) {
    switch (flag) {
        case PostFlag::Deleted: return "deleted";
        case PostFlag::Removed: return "removed";
        case PostFlag::Throwaway: return "throwaway";
    }
    return "?";
}

std::optional<ConditionLabel> parse_condition(std::string_view text) {
    for (auto label : kAllConditions) {
        if (to_string(label) == text) return label;
    }
    return std::nullopt;
}

std::optional<BackgroundTag> parse_background(std::string_view text) {
    if (text == "with_csa") return BackgroundTag::WithCsa;
    if (text == "without_csa") return BackgroundTag::WithoutCsa;
    return std::nullopt;
}

std::optional<PostFlag> parse_flag(std::string_view text) {
    for (auto flag : {PostFlag::Deleted, PostFlag::Removed, PostFlag::Throwaway}) {
        if (to_string(flag) == text) return flag;
    }
    return std::nullopt;
}

std::string label_code(const LabelSet& labels) {
    std::string code;
    if (labels.contains(ConditionLabel::Depression)) code += 'D';
    if (labels.contains(ConditionLabel::Anxiety)) code += 'A';
    if (labels.contains(ConditionLabel::Ptsd)) code += 'P';
    return code.empty() ? std::string("none") : code;
}

std::string Post::canonical_text() const { return title + "\n" + body; }

const LabelSet& Corpus::labels_of(const std::string& post_id) const {
    static const LabelSet kEmpty;
    auto it = labels.find(post_id);
    return it == labels.end() ? kEmpty : it->second;
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
    std::vector<Violation> out;
    std::set<std::string> seen;
    for (const auto& post : corpus.posts) {
        if (post.id.empty()) {
            out.push_back({post.id, "empty-id", "post id must be nonempty"});
        } else if (!seen.insert(post.id).second) {
            out.push_back({post.id, "duplicate-id", "post id appears more than once"});
        }
        if (post.flags.contains(PostFlag::Deleted) || post.flags.contains(PostFlag::Removed)) {
            out.push_back({post.id, "flag", "post is flagged deleted or removed"});
        }
        if (post.created_utc < 0) {
            out.push_back({post.id, "negative-timestamp", "created_utc must be >= 0"});
        }
    }
    for (const auto& [id, _] : corpus.labels) {
        if (!seen.contains(id)) {
            out.push_back({id, "orphan-label", "label entry has no matching post"});
        }
    }
    return out;
}

namespace {

bool is_lowercase(const std::string& s) {
    return std::none_of(s.begin(), s.end(),
                        [](unsigned char c) { return std::isupper(c) != 0; });
}

void check_phrases(const std::set<std::string>& phrases, const std::string& where,
                   std::vector<std::string>& problems) {
    for (const auto& phrase : phrases) {
        if (phrase.find_first_not_of(" \t\n") == std::string::npos) {
            problems.push_back(where + ": empty phrase");
        } else if (!is_lowercase(phrase)) {
            problems.push_back(where + ": phrase not lowercase: '" + phrase + "'");
        }
    }
}

std::set<std::string> string_set(const json& j) {
    std::set<std::string> out;
    for (const auto& item : j) out.insert(item.get<std::string>());
    return out;
}

}  // namespace

std::vector<std::string> validate_lexicon(const KeywordLexicon& lexicon) {
    std::vector<std::string> problems;
    std::map<std::string, ConditionLabel> owner;
    for (const auto& [label, phrases] : lexicon.entries) {
        check_phrases(phrases, std::string(to_string(label)), problems);
        for (const auto& phrase : phrases) {
            auto [it, inserted] = owner.emplace(phrase, label);
            if (!inserted && it->second != label) {
                problems.push_back("phrase '" + phrase + "' mapped to both " +
                                   std::string(to_string(it->second)) + " and " +
                                   std::string(to_string(label)));
            }
        }
    }
    check_phrases(lexicon.background_markers, "background_markers", problems);
    for (const auto& [group, phrases] : lexicon.auxiliary) {
        check_phrases(phrases, "auxiliary/" + group, problems);
    }
    return problems;
}

KeywordLexicon default_lexicon() {
    KeywordLexicon lex;
    lex.name = "csa-default-v1";
    lex.entries[ConditionLabel::Depression] = {"depression", "depressed", "hopelessness",
                                               "hopeless", "depressive", "despondent"};
    lex.entries[ConditionLabel::Anxiety] = {"anxiety", "panic attack", "panic disorder",
                                            "phobia"};
    // The misspelled variant is kept verbatim: it was one of the collection keywords.
    lex.entries[ConditionLabel::Ptsd] = {"ptsd",   "post-traumatic stress disorder",
                                         "posttraumatic stess disroder", "trauma",
                                         "traumatic", "traumatized"};
    lex.background_markers = {"childhood sexual abuse", "csa"};
    lex.auxiliary["schizophrenia"] = {"schizophrenia", "psychosis"};
    lex.auxiliary["eating_disorder"] = {"eating disorder", "anorexia", "bulimia"};
    lex.auxiliary["personality_disorder"] = {"bpd", "personality disorder", "ocpd"};
    return lex;
}

json lexicon_to_json(const KeywordLexicon& lexicon) {
    json j;
    j["name"] = lexicon.name;
    json conditions = json::object();
    for (const auto& [label, phrases] : lexicon.entries) {
        conditions[std::string(to_string(label))] = phrases;
    }
    j["conditions"] = conditions;
    j["background_markers"] = lexicon.background_markers;
    j["auxiliary"] = lexicon.auxiliary;
    return j;
}

KeywordLexicon lexicon_from_json(const json& j) {
    KeywordLexicon lex;
    try {
        lex.name = j.value("name", std::string("unnamed"));
        for (const auto& [key, phrases] : j.at("conditions").items()) {
            auto label = parse_condition(key);
            if (!label) throw ConfigError("unknown condition in lexicon: " + key);
            lex.entries[*label] = string_set(phrases);
        }
        if (j.contains("background_markers")) {
            lex.background_markers = string_set(j.at("background_markers"));
        }
        if (j.contains("auxiliary")) {
            for (const auto& [group, phrases] : j.at("auxiliary").items()) {
                lex.auxiliary[group] = string_set(phrases);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed lexicon: ") + e.what());
    }
    return lex;
}

KeywordLexicon load_lexicon(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("lexicon " + path.string() + " is not valid JSON: " + e.what());
    }
    return lexicon_from_json(j);
}

json post_to_json(const Post& post, const LabelSet& labels) {
    json j;
    j["id"] = post.id;
    j["author_hash"] = post.author_hash;
    j["subreddit"] = post.subreddit;
    j["title"] = post.title;
    j["body"] = post.body;
    j["created_utc"] = post.created_utc;
    json flags = json::array();
    for (auto f : post.flags) flags.push_back(std::string(to_string(f)));
    j["flags"] = flags;
    json labs = json::array();
    for (auto l : labels) labs.push_back(std::string(to_string(l)));
    j["labels"] = labs;
    return j;
}

Post post_from_json(const json& j, LabelSet* labels) {
    Post p;
    p.id = j.at("id").get<std::string>();
    p.author_hash = j.value("author_hash", std::string());
    p.subreddit = j.value("subreddit", std::string());
    p.title = j.value("title", std::string());
    p.body = j.value("body", std::string());
    p.created_utc = j.value("created_utc", std::int64_t{0});
    if (j.contains("flags")) {
        for (const auto& f : j.at("flags")) {
            auto flag = parse_flag(f.get<std::string>());
            if (!flag) throw InputError("unknown post flag: " + f.get<std::string>());
            p.flags.insert(*flag);
        }
    }
    if (labels != nullptr) {
        labels->clear();
        if (j.contains("labels")) {
            for (const auto& l : j.at("labels")) {
                auto label = parse_condition(l.get<std::string>());
                if (!label) throw InputError("unknown condition label: " + l.get<std::string>());
                labels->insert(*label);
            }
        }
    }
    return p;
}

std::string dump_json(const json& j, int indent) {
    return j.dump(indent, ' ', false, json::error_handler_t::replace);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw InputNotFound(path.string() + " does not exist");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string lines;
    for (const auto& post : corpus.posts) {
        lines += dump_json(post_to_json(post, corpus.labels_of(post.id)));
        lines += '\n';
    }
    write_text_file(dir / kPostsFile, lines);
    json manifest;
    manifest["background"] = std::string(to_string(corpus.background));
    manifest["post_count"] = corpus.posts.size();
    write_text_file(dir / kCorpusManifestFile, dump_json(manifest, 2) + "\n");
}

Corpus read_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw InputNotFound("corpus directory " + dir.string() + " does not exist");
    }
    Corpus corpus;
    json manifest;
    try {
        manifest = json::parse(read_text_file(dir / kCorpusManifestFile));
    } catch (const json::exception& e) {
        throw InputError("bad corpus manifest in " + dir.string() + ": " + e.what());
    }
    auto tag = parse_background(manifest.value("background", std::string()));
    if (!tag) throw InputError("corpus manifest in " + dir.string() + " lacks a valid background");
    corpus.background = *tag;

    std::istringstream lines(read_text_file(dir / kPostsFile));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            LabelSet labels;
            Post post = post_from_json(json::parse(line), &labels);
            if (!labels.empty()) corpus.labels[post.id] = labels;
            corpus.posts.push_back(std::move(post));
        } catch (const json::exception& e) {
            throw InputError(dir.string() + "/posts.jsonl line " + std::to_string(lineno) +
                             ": " + e.what());
        }
    }
    return corpus;
}

}  // namespace csakit

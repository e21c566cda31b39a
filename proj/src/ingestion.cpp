#include "csakit/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "csakit/errors.hpp"
#include "csakit/hashing.hpp"
#include "csakit/rng.hpp"
#include "csakit/text.hpp"

namespace csakit {

using nlohmann::json;

namespace {

std::string string_field(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) return {};
    if (it->is_string()) return it->get<std::string>();
    return it->dump();
}

std::int64_t time_field(const json& record) {
    auto it = record.find("created_utc");
    if (it == record.end() || it->is_null()) return 0;
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number()) return static_cast<std::int64_t>(it->get<double>());
    if (it->is_string()) {
        try {
            return std::stoll(it->get<std::string>());
        } catch (const std::exception&) {
            return 0;
        }
    }
    return 0;
}

bool has_id(const json& record) {
    auto it = record.find("id");
    return it != record.end() && ((it->is_string() && !it->get<std::string>().empty()) ||
                                  it->is_number());
}

// Replaces whole-word, case-insensitive occurrences of `name` with "[user]".
std::string scrub_name(const std::string& text, const std::string& name) {
    if (name.size() < 3) return text;
    const std::string lower_text = to_lower_ascii(text);
    const std::string lower_name = to_lower_ascii(name);
    auto is_word = [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) != 0 || c == '_' || c == '-' || u >= 0x80;
    };
    std::string out;
    std::size_t last = 0;
    std::size_t pos = lower_text.find(lower_name);
    while (pos != std::string::npos) {
        const std::size_t end = pos + lower_name.size();
        const bool left_ok = pos == 0 || !is_word(text[pos - 1]);
        const bool right_ok = end == text.size() || !is_word(text[end]);
        if (left_ok && right_ok) {
            out.append(text, last, pos - last);
            out += "[user]";
            last = end;
        }
        pos = lower_text.find(lower_name, pos + 1);
        if (pos != std::string::npos && pos < last) pos = lower_text.find(lower_name, last);
    }
    out.append(text, last, std::string::npos);
    return out;
}

std::string lower_subreddit(const std::string& s) { return to_lower_ascii(s); }

LabelSet record_labels(const json& record) {
    LabelSet labels;
    auto add = [&](const std::string& raw) {
        if (auto label = parse_condition(to_lower_ascii(raw))) labels.insert(*label);
    };
    if (auto it = record.find("labels"); it != record.end() && it->is_array()) {
        for (const auto& l : *it) {
            if (l.is_string()) add(l.get<std::string>());
        }
    } else if (auto it2 = record.find("label"); it2 != record.end() && it2->is_string()) {
        add(it2->get<std::string>());
    } else {
        add(string_field(record, "subreddit"));
    }
    return labels;
}

std::set<std::string> all_condition_phrases(const KeywordLexicon& lex) {
    std::set<std::string> out;
    for (const auto& [_, phrases] : lex.entries) out.insert(phrases.begin(), phrases.end());
    return out;
}

std::set<std::string> all_auxiliary_phrases(const KeywordLexicon& lex) {
    std::set<std::string> out;
    for (const auto& [_, phrases] : lex.auxiliary) out.insert(phrases.begin(), phrases.end());
    return out;
}

std::string_view trait_name(TraitMode mode) {
    switch (mode) {
        case TraitMode::PerKeyword: return "per-keyword";
        case TraitMode::Fixed: return "fixed";
        case TraitMode::MentalHealthGeneric: return "mental-health-generic";
    }
    return "?";
}

}  // namespace

std::size_t for_each_archive_record(const std::filesystem::path& path,
                                    const std::function<void(ArchiveRecord&&)>& sink) {
    if (!std::filesystem::exists(path)) throw InputNotFound("archive " + path.string() + " does not exist");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot read archive " + path.string());
    std::size_t skipped = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object() || !has_id(record)) {
            ++skipped;
            continue;
        }
        sink(std::move(record));
    }
    if (in.bad()) throw IngestError("read error in archive " + path.string());
    return skipped;
}

ArchiveReadResult read_archive(const std::filesystem::path& path) {
    ArchiveReadResult result;
    result.skipped = for_each_archive_record(
        path, [&](ArchiveRecord&& r) { result.records.push_back(std::move(r)); });
    return result;
}

std::vector<Post> clean(std::span<const ArchiveRecord> records, std::string_view salt,
                        CleanReport* report) {
    std::vector<Post> posts;
    posts.reserve(records.size());
    for (const auto& record : records) {
        const std::string subreddit = string_field(record, "subreddit");
        const std::string selftext = string_field(record, "selftext");
        if (report != nullptr) ++report->per_subreddit[subreddit].in;
        if (selftext == "[deleted]" || selftext == "[removed]") {
            if (report != nullptr) {
                ++(selftext == "[deleted]" ? report->dropped_deleted : report->dropped_removed);
            }
            continue;
        }
        const std::string author = string_field(record, "author");
        Post p;
        p.id = string_field(record, "id");
        p.author_hash = hash_author(salt, author);
        p.subreddit = subreddit;
        p.title = string_field(record, "title");
        p.body = selftext;
        p.created_utc = std::max<std::int64_t>(0, time_field(record));
        if (to_lower_ascii(author).find("throwaway") != std::string::npos) {
            p.flags.insert(PostFlag::Throwaway);
        }
        if (!author.empty() && author != "[deleted]") {
            p.title = scrub_name(p.title, author);
            p.body = scrub_name(p.body, author);
        }
        if (report != nullptr) ++report->per_subreddit[subreddit].out;
        posts.push_back(std::move(p));
    }
    return posts;
}

bool matches_any(std::string_view canonical_text, const std::set<std::string>& phrases) {
    const std::string normalized = normalize_whitespace_lower(canonical_text);
    return std::any_of(phrases.begin(), phrases.end(), [&](const std::string& phrase) {
        return contains_phrase(normalized, normalize_whitespace_lower(phrase));
    });
}

LabelSet match_keywords_text(std::string_view canonical_text, const KeywordLexicon& lexicon) {
    const std::string normalized = normalize_whitespace_lower(canonical_text);
    LabelSet out;
    for (const auto& [label, phrases] : lexicon.entries) {
        for (const auto& phrase : phrases) {
            if (contains_phrase(normalized, normalize_whitespace_lower(phrase))) {
                out.insert(label);
                break;
            }
        }
    }
    return out;
}

LabelSet match_keywords(const Post& post, const KeywordLexicon& lexicon) {
    return match_keywords_text(post.canonical_text(), lexicon);
}

bool has_background_marker(const Post& post, const KeywordLexicon& lexicon) {
    return matches_any(post.canonical_text(), lexicon.background_markers);
}

std::vector<CollectionRule> default_rules(const KeywordLexicon& lexicon) {
    const auto conditions = all_condition_phrases(lexicon);
    std::vector<CollectionRule> rules;
    rules.push_back({"adultsurvivors", conditions, false, TraitMode::MentalHealthGeneric, {}});
    auto fixed = [&](std::string sub, ConditionLabel label) {
        rules.push_back({std::move(sub), lexicon.background_markers, true, TraitMode::Fixed, label});
    };
    fixed("depression", ConditionLabel::Depression);
    fixed("Anxiety", ConditionLabel::Anxiety);
    fixed("ptsd", ConditionLabel::Ptsd);
    fixed("depression_help", ConditionLabel::Depression);
    rules.push_back({"mentalhealth", conditions, true, TraitMode::MentalHealthGeneric, {}});
    return rules;
}

std::vector<CollectionRule> rules_from_json(const json& j, const KeywordLexicon& lexicon) {
    std::vector<CollectionRule> rules;
    try {
        for (const auto& item : j.at("rules")) {
            CollectionRule rule;
            rule.source_subreddit = item.at("subreddit").get<std::string>();
            const auto& include = item.at("include");
            auto add_symbolic = [&](const std::string& name) {
                if (name == "conditions") {
                    auto p = all_condition_phrases(lexicon);
                    rule.include_phrases.insert(p.begin(), p.end());
                } else if (name == "background_markers") {
                    rule.include_phrases.insert(lexicon.background_markers.begin(),
                                                lexicon.background_markers.end());
                } else if (name == "auxiliary") {
                    auto p = all_auxiliary_phrases(lexicon);
                    rule.include_phrases.insert(p.begin(), p.end());
                } else {
                    rule.include_phrases.insert(name);
                }
            };
            if (include.is_string()) {
                add_symbolic(include.get<std::string>());
            } else {
                for (const auto& phrase : include) add_symbolic(phrase.get<std::string>());
            }
            rule.require_background_marker = item.value("require_background_marker", false);
            const std::string trait = item.value("trait", std::string("per-keyword"));
            if (trait == "per-keyword") {
                rule.trait = TraitMode::PerKeyword;
            } else if (trait == "mental-health-generic") {
                rule.trait = TraitMode::MentalHealthGeneric;
            } else if (auto label = parse_condition(trait)) {
                rule.trait = TraitMode::Fixed;
                rule.fixed_label = label;
            } else {
                throw ConfigError("unknown trait '" + trait + "' for subreddit " +
                                  rule.source_subreddit);
            }
            if (rule.include_phrases.empty()) {
                throw ConfigError("rule for " + rule.source_subreddit + " has no include phrases");
            }
            rules.push_back(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed rules: ") + e.what());
    }
    return rules;
}

std::vector<CollectionRule> load_rules(const std::filesystem::path& path,
                                       const KeywordLexicon& lexicon) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("rules " + path.string() + " is not valid JSON: " + e.what());
    }
    return rules_from_json(j, lexicon);
}

json rules_to_json(const std::vector<CollectionRule>& rules) {
    json arr = json::array();
    for (const auto& rule : rules) {
        json r;
        r["subreddit"] = rule.source_subreddit;
        r["include"] = rule.include_phrases;
        r["require_background_marker"] = rule.require_background_marker;
        r["trait"] = rule.trait == TraitMode::Fixed
                         ? std::string(to_string(*rule.fixed_label))
                         : std::string(trait_name(rule.trait));
        arr.push_back(r);
    }
    return json{{"rules", arr}};
}

Corpus collect(std::span<const ArchiveRecord> records, std::span<const CollectionRule> rules,
               const KeywordLexicon& lexicon, std::string_view salt, CollectReport* report) {
    CollectReport local;
    CollectReport& rep = report != nullptr ? *report : local;

    std::map<std::string, std::vector<const CollectionRule*>> by_subreddit;
    for (const auto& rule : rules) {
        by_subreddit[lower_subreddit(rule.source_subreddit)].push_back(&rule);
    }

    Corpus corpus;
    corpus.background = BackgroundTag::WithCsa;
    std::set<std::string> seen;
    for (auto& post : clean(records, salt, &rep.clean)) {
        auto it = by_subreddit.find(lower_subreddit(post.subreddit));
        if (it == by_subreddit.end()) {
            ++rep.ignored_subreddits[post.subreddit];
            continue;
        }
        const std::string text = post.canonical_text();
        const bool has_marker = matches_any(text, lexicon.background_markers);
        std::optional<LabelSet> assigned;
        for (const CollectionRule* rule : it->second) {
            if (!matches_any(text, rule->include_phrases)) continue;
            if (rule->require_background_marker && !has_marker) continue;
            LabelSet labels;
            if (rule->trait == TraitMode::Fixed) {
                if (rule->fixed_label) labels.insert(*rule->fixed_label);
            } else {
                labels = match_keywords_text(text, lexicon);
                if (rule->trait == TraitMode::PerKeyword && labels.empty()) continue;
            }
            assigned = std::move(labels);
            break;
        }
        if (!assigned) continue;
        if (!seen.insert(post.id).second) {
            ++rep.duplicate_ids;
            continue;
        }
        ++rep.collected_per_subreddit[post.subreddit];
        for (auto label : *assigned) ++rep.condition_counts[std::string(to_string(label))];
        for (const auto& [group, phrases] : lexicon.auxiliary) {
            if (matches_any(text, phrases)) ++rep.condition_counts[group];
        }
        if (!assigned->empty()) corpus.labels[post.id] = *assigned;
        corpus.posts.push_back(std::move(post));
    }
    return corpus;
}

Corpus build_negative_corpus(std::span<const ArchiveRecord> records,
                             const KeywordLexicon& lexicon, std::string_view salt,
                             CleanReport* report) {
    Corpus corpus;
    corpus.background = BackgroundTag::WithoutCsa;
    std::set<std::string> seen;
    std::map<std::string, LabelSet> labels_by_id;
    for (const auto& record : records) {
        labels_by_id.emplace(string_field(record, "id"), record_labels(record));
    }
    for (auto& post : clean(records, salt, report)) {
        if (has_background_marker(post, lexicon)) continue;
        const LabelSet& labels = labels_by_id[post.id];
        if (labels.empty()) continue;
        if (!seen.insert(post.id).second) continue;
        corpus.labels[post.id] = labels;
        corpus.posts.push_back(std::move(post));
    }
    return corpus;
}

std::vector<Post> audit_sample(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> order(corpus.posts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(seed, "audit"));
    rng.shuffle(order);
    order.resize(std::min(k, order.size()));
    std::sort(order.begin(), order.end());
    std::vector<Post> out;
    for (auto i : order) out.push_back(corpus.posts[i]);
    return out;
}

}  // namespace csakit

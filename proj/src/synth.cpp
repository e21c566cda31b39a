#include "csakit/synth.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "csakit/errors.hpp"
#include "csakit/rng.hpp"
#include "csakit/text.hpp"

namespace csakit {

using nlohmann::json;

namespace {

const std::vector<std::string>& default_filler() {
    static const std::vector<std::string> words = {
        "today",   "morning", "evening", "week",    "month",   "year",    "work",    "job",
        "school",  "friend",  "family",  "home",    "house",   "city",    "car",     "road",
        "walk",    "dinner",  "lunch",   "coffee",  "music",   "movie",   "book",    "phone",
        "computer", "weather", "rain",   "sun",     "garden",  "kitchen", "window",  "door",
        "table",   "chair",   "street",  "park",    "store",   "money",   "plan",    "idea",
        "question", "answer", "story",   "place",   "time",    "moment",  "minute",  "hour",
        "game",    "sport",   "team",    "class",   "teacher", "office",  "meeting", "email",
        "letter",  "picture", "color",   "light"};
    return words;
}

const std::vector<LabelSet>& nonempty_label_sets() {
    using C = ConditionLabel;
    static const std::vector<LabelSet> sets = {
        {C::Depression}, {C::Anxiety}, {C::Ptsd},
        {C::Depression, C::Anxiety}, {C::Depression, C::Ptsd}, {C::Anxiety, C::Ptsd},
        {C::Depression, C::Anxiety, C::Ptsd}};
    return sets;
}

int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.index(static_cast<std::size_t>(hi - lo + 1)));
}

std::string hex_id(Rng& rng) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 2; ++i) {
        std::uint64_t v = rng.next();
        for (int k = 0; k < 16; ++k, v >>= 4) out += digits[v & 0xF];
    }
    return out;
}

}  // namespace

std::string pseudo_word(std::size_t index) {
    static const std::string consonants = "bdfgklmnprtvz";
    static const std::string vowels = "aeiou";
    static const std::string finals = "knrtm";
    std::string w;
    std::size_t i = index;
    for (int syllable = 0; syllable < 3; ++syllable) {
        w += consonants[i % consonants.size()];
        i /= consonants.size();
        w += vowels[i % vowels.size()];
        i /= vowels.size();
    }
    w += finals[i % finals.size()];
    i /= finals.size();
    while (i > 0) {
        w += vowels[i % vowels.size()];
        i /= vowels.size();
        w += 'k';
    }
    return w;
}

std::string SynthCell::name() const {
    return std::string(to_string(background)) + "/" + label_code(labels);
}

SynthSpec default_synth_spec(int posts_per_cell, std::uint64_t seed) {
    SynthSpec spec;
    spec.posts_per_cell = posts_per_cell;
    spec.seed = seed;
    spec.filler = default_filler();
    constexpr std::size_t kMarkersPerCell = 9;
    // Stride through the index space so neighbouring cells do not share prefixes.
    std::size_t next = 0;
    for (auto bg : {BackgroundTag::WithCsa, BackgroundTag::WithoutCsa}) {
        for (const auto& labels : nonempty_label_sets()) {
            SynthCell cell{bg, labels, {}};
            for (std::size_t k = 0; k < kMarkersPerCell; ++k) cell.markers.push_back(pseudo_word(next++ * 7919 + 11));
            spec.cells.push_back(std::move(cell));
        }
    }
    return spec;
}

void SynthSpec::validate() const {
    if (posts_per_cell < 0) throw SpecError("posts_per_cell must be non-negative");
    if (cells.empty()) throw SpecError("spec has no cells");
    if (min_filler < 0 || max_filler < min_filler) throw SpecError("bad filler length range");
    if (min_markers < 3 || max_markers < min_markers) throw SpecError("marker range must start at 3 or more");
    std::map<std::string, std::string> owner;
    for (const auto& w : filler) {
        if (w.empty()) throw SpecError("empty filler word");
        owner.emplace(w, "filler");
    }
    std::set<std::string> names;
    for (const auto& cell : cells) {
        if (cell.labels.empty()) throw SpecError("cell " + cell.name() + " has no labels");
        if (!names.insert(cell.name()).second) throw SpecError("duplicate cell " + cell.name());
        if (cell.markers.size() < cell.labels.size()) {
            throw SpecError("cell " + cell.name() + " needs at least one marker per label");
        }
        for (const auto& m : cell.markers) {
            if (m.empty()) throw SpecError("empty marker in cell " + cell.name());
            auto [it, inserted] = owner.emplace(m, cell.name());
            if (!inserted && it->second != cell.name()) {
                throw SpecError("marker '" + m + "' is shared by " + it->second + " and " + cell.name());
            }
        }
    }
}

json SynthSpec::to_json() const {
    json cs = json::array();
    for (const auto& cell : cells) {
        json labels = json::array();
        for (auto l : cell.labels) labels.push_back(std::string(to_string(l)));
        cs.push_back({{"background", std::string(to_string(cell.background))},
                      {"labels", labels},
                      {"markers", cell.markers}});
    }
    return {{"posts_per_cell", posts_per_cell},
            {"seed", seed},
            {"filler_length", {min_filler, max_filler}},
            {"markers_per_post", {min_markers, max_markers}},
            {"filler", filler},
            {"cells", cs}};
}

SynthSpec spec_from_json(const json& j) {
    try {
        SynthSpec spec = default_synth_spec(j.value("posts_per_cell", 80), j.value("seed", std::uint64_t{0}));
        if (j.contains("filler")) spec.filler = j.at("filler").get<std::vector<std::string>>();
        if (j.contains("filler_length")) {
            spec.min_filler = j.at("filler_length").at(0).get<int>();
            spec.max_filler = j.at("filler_length").at(1).get<int>();
        }
        if (j.contains("markers_per_post")) {
            spec.min_markers = j.at("markers_per_post").at(0).get<int>();
            spec.max_markers = j.at("markers_per_post").at(1).get<int>();
        }
        if (j.contains("cells")) {
            spec.cells.clear();
            std::size_t next = 1000003;
            for (const auto& c : j.at("cells")) {
                SynthCell cell;
                const auto bg = parse_background(c.at("background").get<std::string>());
                if (!bg) throw SpecError("unknown background " + c.at("background").dump());
                cell.background = *bg;
                for (const auto& l : c.at("labels")) {
                    const auto label = parse_condition(l.get<std::string>());
                    if (!label) throw SpecError("unknown label " + l.dump());
                    cell.labels.insert(*label);
                }
                if (c.contains("markers")) {
                    cell.markers = c.at("markers").get<std::vector<std::string>>();
                } else {
                    for (int k = 0; k < 9; ++k) cell.markers.push_back(pseudo_word(next++ * 7919 + 11));
                }
                spec.cells.push_back(std::move(cell));
            }
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw SpecError(std::string("malformed synth spec: ") + e.what());
    }
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw SpecError("synth spec " + path.string() + " is not valid JSON: " + e.what());
    }
    return spec_from_json(j);
}

std::vector<std::pair<ConditionLabel, std::string>> marker_assignment(const SynthCell& cell) {
    std::vector<ConditionLabel> labels(cell.labels.begin(), cell.labels.end());
    std::vector<std::pair<ConditionLabel, std::string>> out;
    for (std::size_t i = 0; i < cell.markers.size(); ++i) {
        out.emplace_back(labels[i % labels.size()], cell.markers[i]);
    }
    return out;
}

SynthCorpora generate(const SynthSpec& spec) {
    spec.validate();
    SynthCorpora out;
    out.with_csa.background = BackgroundTag::WithCsa;
    out.without_csa.background = BackgroundTag::WithoutCsa;
    std::int64_t clock = 1577836800;  // 2020-01-01
    for (const auto& cell : spec.cells) {
        Rng rng(derive_seed(spec.seed, "synth/" + cell.name()));
        const auto assigned = marker_assignment(cell);
        std::map<ConditionLabel, std::vector<std::string>> by_label;
        for (const auto& [label, marker] : assigned) by_label[label].push_back(marker);
        Corpus& target = cell.background == BackgroundTag::WithCsa ? out.with_csa : out.without_csa;
        const std::string code = label_code(cell.labels);
        for (int i = 0; i < spec.posts_per_cell; ++i) {
            std::vector<std::string> words;
            for (const auto& [label, markers] : by_label) words.push_back(markers[rng.index(markers.size())]);
            const int n_markers = std::max<int>(uniform_int(rng, spec.min_markers, spec.max_markers),
                                                static_cast<int>(cell.labels.size()));
            while (static_cast<int>(words.size()) < n_markers) {
                words.push_back(cell.markers[rng.index(cell.markers.size())]);
            }
            if (!spec.filler.empty()) {
                const int n_filler = uniform_int(rng, spec.min_filler, spec.max_filler);
                for (int k = 0; k < n_filler; ++k) words.push_back(spec.filler[rng.index(spec.filler.size())]);
            }
            rng.shuffle(words);
            Post post;
            post.id = "syn-" + std::string(cell.background == BackgroundTag::WithCsa ? "w" : "o") + "-" + code +
                      "-" + std::to_string(i);
            post.author_hash = hex_id(rng);
            post.subreddit = cell.background == BackgroundTag::WithCsa ? "synth_with_csa" : "synth_without_csa";
            const std::size_t title_len = std::min<std::size_t>(3, words.size());
            for (std::size_t k = 0; k < words.size(); ++k) {
                std::string& dest = k < title_len ? post.title : post.body;
                if (!dest.empty()) dest += ' ';
                dest += words[k];
            }
            post.created_utc = clock++;
            target.labels[post.id] = cell.labels;
            target.posts.push_back(std::move(post));
        }
    }
    return out;
}

KeywordLexicon lexicon_from_spec(const SynthSpec& spec) {
    KeywordLexicon lex;
    lex.name = "synthetic-markers";
    for (auto label : kAllConditions) lex.entries[label];
    for (const auto& cell : spec.cells) {
        for (const auto& [label, marker] : marker_assignment(cell)) lex.entries[label].insert(to_lower_ascii(marker));
    }
    return lex;
}

TopicFixture two_vocabulary_corpus(int docs_per_vocab, std::uint64_t seed, int words_per_doc) {
    TopicFixture f;
    for (std::size_t i = 0; i < 12; ++i) {
        f.vocab_a.push_back(pseudo_word(3 * i + 500000));
        f.vocab_b.push_back(pseudo_word(3 * i + 900001));
    }
    Rng rng(derive_seed(seed, "synth/topics"));
    f.corpus.background = BackgroundTag::WithoutCsa;
    for (int src = 0; src < 2; ++src) {
        const auto& vocab = src == 0 ? f.vocab_a : f.vocab_b;
        for (int d = 0; d < docs_per_vocab; ++d) {
            Post p;
            p.id = "topic-" + std::to_string(src) + "-" + std::to_string(d);
            p.author_hash = hex_id(rng);
            p.subreddit = "synth_topics";
            for (int k = 0; k < words_per_doc; ++k) {
                if (!p.body.empty()) p.body += ' ';
                p.body += vocab[rng.index(vocab.size())];
            }
            p.created_utc = 1577836800 + src * docs_per_vocab + d;
            f.corpus.posts.push_back(std::move(p));
            f.source.push_back(src);
        }
    }
    return f;
}

}  // namespace csakit

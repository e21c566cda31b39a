#include "csakit/text.hpp"

#include <cctype>
#include <map>

namespace csakit {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?' || c == '\n'; }

bool all_digits(const std::string& s) {
    for (unsigned char c : s) {
        if (std::isdigit(c) == 0) return false;
    }
    return true;
}

bool starts_with_url(std::string_view s, std::size_t i) {
    auto rest = s.substr(i);
    return rest.starts_with("http://") || rest.starts_with("https://") ||
           rest.starts_with("www.");
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string normalize_whitespace_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c) != 0) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

bool contains_phrase(std::string_view normalized_text, std::string_view phrase) {
    if (phrase.empty()) return false;
    std::size_t pos = normalized_text.find(phrase);
    while (pos != std::string_view::npos) {
        const bool left_ok =
            pos == 0 || !is_word_byte(static_cast<unsigned char>(normalized_text[pos - 1]));
        const std::size_t end = pos + phrase.size();
        const bool right_ok =
            end == normalized_text.size() ||
            !is_word_byte(static_cast<unsigned char>(normalized_text[end]));
        if (left_ok && right_ok) return true;
        pos = normalized_text.find(phrase, pos + 1);
    }
    return false;
}

const std::set<std::string>& stopwords() {
    static const std::set<std::string> kWords = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
        "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
        "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
        "what", "which", "who", "whom", "this", "that", "these", "those", "am", "is", "are",
        "was", "were", "be", "been", "being", "have", "has", "had", "having", "do", "does",
        "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
        "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
        "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
        "in", "out", "on", "off", "over", "under", "again", "further", "then", "once", "here",
        "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
        "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so",
        "than", "too", "very", "s", "t", "can", "will", "just", "don", "should", "now", "d",
        "ll", "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn", "hadn",
        "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan", "shouldn", "wasn",
        "weren", "won", "wouldn", "im", "ive", "id", "dont", "didnt", "doesnt", "cant",
        "couldnt", "wouldnt", "shouldnt", "isnt", "wasnt", "arent", "werent", "havent",
        "hasnt", "hadnt", "youre", "youve", "theyre", "thats", "whats", "theres", "its",
        "also", "would", "could", "get", "got", "really", "like", "even", "much", "one",
        "amp", "x200b"};
    return kWords;
}

std::string lemmatize(std::string_view word) {
    static const std::map<std::string, std::string, std::less<>> kIrregular = {
        {"was", "be"},       {"were", "be"},       {"is", "be"},         {"are", "be"},
        {"been", "be"},      {"has", "have"},      {"had", "have"},      {"did", "do"},
        {"does", "do"},      {"went", "go"},       {"felt", "feel"},     {"told", "tell"},
        {"said", "say"},     {"thought", "think"}, {"made", "make"},     {"took", "take"},
        {"children", "child"}, {"men", "man"},     {"women", "woman"},   {"feet", "foot"},
        {"teeth", "tooth"},  {"mice", "mouse"},    {"knew", "know"},     {"saw", "see"},
        {"began", "begin"},  {"kept", "keep"},     {"left", "leave"},    {"lost", "lose"}};
    static const std::set<std::string, std::less<>> kKeep = {
        "always", "perhaps", "sometimes", "series", "news", "lens", "yes", "this", "thus",
        "bus", "gas", "plus", "physics", "species", "less", "unless", "across", "whereas",
        "towards", "afterwards", "besides", "anxious", "nervous", "various", "serious",
        "previous", "obvious", "jealous", "famous", "dangerous", "religious", "virus",
        "focus", "status", "basis", "crisis", "analysis", "diagnosis", "psychosis", "thesis",
        "genesis", "sepsis", "prognosis", "paralysis", "dyslexia", "always"};

    if (auto it = kIrregular.find(word); it != kIrregular.end()) return it->second;
    if (kKeep.contains(word)) return std::string(word);
    std::string w(word);
    if (w.size() >= 5 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "sses")) return w.substr(0, w.size() - 2);
    if (w.size() >= 5 && (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes") ||
                          ends_with(w, "zzes"))) {
        return w.substr(0, w.size() - 2);
    }
    if (w.size() >= 4 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
        !ends_with(w, "is") && !ends_with(w, "ous")) {
        return w.substr(0, w.size() - 1);
    }
    return w;
}

std::vector<std::vector<std::string>> sentence_tokens(std::string_view text,
                                                      const NormalizeOptions& opts) {
    std::vector<std::vector<std::string>> sentences(1);
    std::string current;
    auto flush_token = [&] {
        if (current.empty()) return;
        std::string token = std::move(current);
        current.clear();
        if (all_digits(token)) return;
        if (opts.remove_stopwords && stopwords().contains(token)) return;
        if (opts.lemmatize) token = lemmatize(token);
        if (opts.remove_stopwords && stopwords().contains(token)) return;
        sentences.back().push_back(std::move(token));
    };
    auto end_sentence = [&] {
        flush_token();
        if (!sentences.back().empty()) sentences.emplace_back();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (opts.strip_urls && (i == 0 || !is_word_byte(static_cast<unsigned char>(text[i - 1]))) &&
            starts_with_url(text, i)) {
            flush_token();
            while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])) == 0) ++i;
            continue;
        }
        if (c == '\'' || (c == 0xE2 && i + 2 < text.size() &&
                          static_cast<unsigned char>(text[i + 1]) == 0x80 &&
                          static_cast<unsigned char>(text[i + 2]) == 0x99)) {
            // Apostrophes (ASCII or U+2019) join contractions: "don't" -> "dont".
            if (c != '\'') i += 2;
            continue;
        }
        if (is_word_byte(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (is_sentence_end(static_cast<char>(c))) {
            end_sentence();
        } else {
            flush_token();
        }
    }
    flush_token();
    if (sentences.back().empty()) sentences.pop_back();
    return sentences;
}

std::vector<std::string> simple_tokens(std::string_view text) {
    NormalizeOptions opts;
    opts.remove_stopwords = false;
    opts.lemmatize = false;
    std::vector<std::string> out;
    for (auto& sentence : sentence_tokens(text, opts)) {
        for (auto& token : sentence) out.push_back(std::move(token));
    }
    return out;
}

}  // namespace csakit

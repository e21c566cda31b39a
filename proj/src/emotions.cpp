#include "csakit/emotions.hpp"

#include <algorithm>
#include <cmath>

#include "csakit/text.hpp"

namespace csakit {

std::string_view to_string(EmotionLabel label) {
    switch (label) {
        case EmotionLabel::Anger: return "anger";
        case EmotionLabel::Sadness: return "sadness";
        case EmotionLabel::Fear: return "fear";
        case EmotionLabel::Disgust: return "disgust";
        case EmotionLabel::Neutral: return "neutral";
        case EmotionLabel::Surprise: return "surprise";
        case EmotionLabel::Joy: return "joy";
    }
    return "?";
}

std::optional<EmotionLabel> parse_emotion(std::string_view text) {
    for (auto e : kAllEmotions) {
        if (to_string(e) == text) return e;
    }
    return std::nullopt;
}

LexiconEmotionBackend::LexiconEmotionBackend() {
    const std::map<EmotionLabel, std::vector<std::string>> lists = {
        {EmotionLabel::Anger,
         {"angry", "anger", "furious", "rage", "mad", "hate", "hatred", "annoyed", "irritated", "resent",
          "resentment", "outraged", "livid", "pissed", "frustrated", "bitter", "hostile"}},
        {EmotionLabel::Sadness,
         {"sad", "sadness", "unhappy", "depressed", "grief", "grieve", "cry", "crying", "cried", "tear",
          "lonely", "alone", "miserable", "hopeless", "heartbroken", "empty", "sorrow", "loss", "numb"}},
        {EmotionLabel::Fear,
         {"afraid", "fear", "scared", "scare", "terrified", "terror", "panic", "frightened", "frighten",
          "nervous", "dread", "horror", "threat", "threatened", "unsafe", "nightmare", "petrified", "worried"}},
        {EmotionLabel::Disgust,
         {"disgust", "disgusted", "disgusting", "gross", "sick", "dirty", "filthy", "revolting", "nasty",
          "repulsed", "vile", "shame", "ashamed", "contaminated", "nauseous"}},
        {EmotionLabel::Surprise,
         {"surprise", "surprised", "shocked", "shock", "amazed", "astonished", "unexpected", "suddenly",
          "stunned", "wow", "startled"}},
        {EmotionLabel::Joy,
         {"happy", "joy", "glad", "delighted", "excited", "love", "grateful", "thankful", "proud", "relieved",
          "cheerful", "wonderful", "great", "enjoy", "fun", "smile", "laugh"}},
    };
    for (const auto& [emotion, list] : lists) {
        for (const auto& w : list) {
            words_.emplace(w, emotion);
            words_.emplace(lemmatize(w), emotion);
        }
    }
}

EmotionDistribution LexiconEmotionBackend::probabilities(const std::string& text) const {
    NormalizeOptions opts;
    opts.remove_stopwords = false;
    opts.lemmatize = false;
    EmotionDistribution counts{};
    counts[static_cast<std::size_t>(EmotionLabel::Neutral)] = 1.0;
    for (const auto& sentence : sentence_tokens(text, opts)) {
        for (const auto& tok : sentence) {
            auto it = words_.find(tok);
            if (it == words_.end()) it = words_.find(lemmatize(tok));
            if (it != words_.end()) counts[static_cast<std::size_t>(it->second)] += 1.0;
        }
    }
    double total = 0.0;
    for (double c : counts) total += c;
    for (double& c : counts) c /= total;
    return counts;
}

EmotionDistribution HashEmotionBackend::probabilities(const std::string& text) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    EmotionDistribution p{};
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        h ^= h >> 29;
        h *= 0xBF58476D1CE4E5B9ULL;
        p[i] = std::exp(static_cast<double>(h >> 11) / 9007199254740992.0 * 3.0);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

EmotionLabel argmax_emotion(const EmotionDistribution& p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;
    }
    return kAllEmotions[best];
}

EmotionLabeling label_emotions(const Corpus& corpus, const EmotionBackend& backend) {
    EmotionLabeling out;
    for (const auto& post : corpus.posts) {
        EmotionDistribution p{};
        try {
            p = backend.probabilities(post.canonical_text());
        } catch (const std::exception&) {
            out.failed.push_back(post.id);
            continue;
        }
        double total = 0.0;
        bool finite = true;
        for (double v : p) {
            finite = finite && std::isfinite(v) && v >= 0.0;
            total += v;
        }
        if (!finite || std::abs(total - 1.0) > 1e-6) {
            out.failed.push_back(post.id);
            continue;
        }
        out.labels[post.id] = argmax_emotion(p);
    }
    return out;
}

std::map<EmotionLabel, double> emotion_profile(const std::map<std::string, EmotionLabel>& labels) {
    std::map<EmotionLabel, double> profile;
    for (auto e : kAllEmotions) profile[e] = 0.0;
    if (labels.empty()) return profile;
    for (const auto& [id, e] : labels) profile[e] += 1.0;
    for (auto& [e, v] : profile) v /= static_cast<double>(labels.size());
    return profile;
}

}  // namespace csakit

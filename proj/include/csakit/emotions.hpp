#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csakit/corpus.hpp"

namespace csakit {

// Enumeration order doubles as the argmax tie-break order.
enum class EmotionLabel { Anger, Sadness, Fear, Disgust, Neutral, Surprise, Joy };

inline constexpr std::array<EmotionLabel, 7> kAllEmotions = {
    EmotionLabel::Anger,   EmotionLabel::Sadness,  EmotionLabel::Fear, EmotionLabel::Disgust,
    EmotionLabel::Neutral, EmotionLabel::Surprise, EmotionLabel::Joy};

using EmotionDistribution = std::array<double, 7>;

std::string_view to_string(EmotionLabel label);
std::optional<EmotionLabel> parse_emotion(std::string_view text);

class EmotionBackend {
public:
    virtual ~EmotionBackend() = default;
    virtual std::string name() const = 0;
    // One probability per label in enumeration order.
    virtual EmotionDistribution probabilities(const std::string& text) const = 0;
};

// Counts hits against small per-emotion word lists; texts without hits are
// neutral.
class LexiconEmotionBackend final : public EmotionBackend {
public:
    LexiconEmotionBackend();
    std::string name() const override { return "emotion-lexicon-v1"; }
    EmotionDistribution probabilities(const std::string& text) const override;
    const std::map<std::string, EmotionLabel>& words() const { return words_; }

private:
    std::map<std::string, EmotionLabel> words_;
};

class ConstantEmotionBackend final : public EmotionBackend {
public:
    explicit ConstantEmotionBackend(EmotionDistribution p) : p_(p) {}
    std::string name() const override { return "constant"; }
    EmotionDistribution probabilities(const std::string&) const override { return p_; }

private:
    EmotionDistribution p_;
};

// Softmax over hash-derived scores; deterministic per text.
class HashEmotionBackend final : public EmotionBackend {
public:
    std::string name() const override { return "hash-stub"; }
    EmotionDistribution probabilities(const std::string& text) const override;
};

EmotionLabel argmax_emotion(const EmotionDistribution& p);

struct EmotionLabeling {
    std::map<std::string, EmotionLabel> labels;
    std::vector<std::string> failed;  // post ids the backend could not label
};

// A throwing backend, non-finite output or a distribution not summing to 1
// within 1e-6 marks the post as failed; the run continues.
EmotionLabeling label_emotions(const Corpus& corpus, const EmotionBackend& backend);

// Proportions over labelled posts; all zeros when empty.
std::map<EmotionLabel, double> emotion_profile(const std::map<std::string, EmotionLabel>& labels);

}  // namespace csakit

#include "csakit/cascade.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "csakit/classical.hpp"
#include "csakit/encoder.hpp"
#include "csakit/errors.hpp"
#include "csakit/hashing.hpp"
#include "csakit/lexical.hpp"
#include "csakit/split.hpp"

namespace csakit {

using nlohmann::json;

// ------------------------------------------------------------ shared types

std::string_view to_string(Backend backend) {
    switch (backend) {
        case Backend::GeneralEncoder: return "general-encoder";
        case Backend::DomainEncoder: return "domain-encoder";
        case Backend::NaiveBayes: return "naive-bayes";
        case Backend::RandomForest: return "random-forest";
        case Backend::GradientBoostedTrees: return "gradient-boosted-trees";
    }
    return "?";
}

Backend parse_backend(std::string_view name) {
    for (auto b : {Backend::GeneralEncoder, Backend::DomainEncoder, Backend::NaiveBayes,
                   Backend::RandomForest, Backend::GradientBoostedTrees}) {
        if (to_string(b) == name) return b;
    }
    throw ParameterError("unknown backend '" + std::string(name) + "'");
}

json TrainConfig::to_json() const {
    return {{"epochs", epochs},
            {"batch_size", batch_size},
            {"learning_rate", learning_rate},
            {"max_sequence_tokens", max_sequence_tokens},
            {"seed", seed},
            {"embedding_dim", embedding_dim},
            {"hidden_dim", hidden_dim},
            {"weight_decay", weight_decay},
            {"max_vocab", max_vocab},
            {"n_trees", n_trees},
            {"max_depth", max_depth},
            {"boosting_rounds", boosting_rounds},
            {"boosting_learning_rate", boosting_learning_rate}};
}

TrainConfig TrainConfig::from_json(const json& j) {
    TrainConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "epochs") c.epochs = value.get<int>();
        else if (key == "batch_size") c.batch_size = value.get<int>();
        else if (key == "learning_rate") c.learning_rate = value.get<double>();
        else if (key == "max_sequence_tokens") c.max_sequence_tokens = value.get<int>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "embedding_dim") c.embedding_dim = value.get<int>();
        else if (key == "hidden_dim") c.hidden_dim = value.get<int>();
        else if (key == "weight_decay") c.weight_decay = value.get<double>();
        else if (key == "max_vocab") c.max_vocab = value.get<int>();
        else if (key == "n_trees") c.n_trees = value.get<int>();
        else if (key == "max_depth") c.max_depth = value.get<int>();
        else if (key == "boosting_rounds") c.boosting_rounds = value.get<int>();
        else if (key == "boosting_learning_rate") c.boosting_learning_rate = value.get<double>();
        else throw ConfigError("unknown training option '" + key + "'");
    }
    return c;
}

TrainConfig parse_train_config(std::string_view text) {
    json j = json::object();
    std::istringstream lines{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        json parsed = json::parse(value, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_number()) {
            throw ConfigError("config value for '" + key + "' is not a number");
        }
        j[key] = parsed;
    }
    try {
        return TrainConfig::from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad training config: ") + e.what());
    }
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    return parse_train_config(read_text_file(path));
}

std::unique_ptr<TextModel> text_model_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "encoder") return EncoderModel::from_json(j);
    if (kind == "classical") return ClassicalModel::from_json(j);
    throw InputError("unknown model kind " + kind);
}

// ----------------------------------------------------------------- training

namespace {

std::unique_ptr<TextModel> train_any(std::span<const LabeledPost> train,
                                     std::span<const LabeledPost> val, TaskKind task,
                                     Backend backend, const TrainConfig& cfg) {
    if (backend == Backend::GeneralEncoder || backend == Backend::DomainEncoder) {
        return train_encoder(train, val, task, backend, cfg);
    }
    return train_classical(train, task, backend, cfg);
}

}  // namespace

std::unique_ptr<TextModel> train_stage1(std::span<const LabeledPost> train,
                                        std::span<const LabeledPost> val, Backend backend,
                                        const TrainConfig& cfg) {
    return train_any(train, val, TaskKind::Binary, backend, cfg);
}

std::unique_ptr<TextModel> train_stage2(std::span<const LabeledPost> train,
                                        std::span<const LabeledPost> val, Backend backend,
                                        const TrainConfig& cfg) {
    return train_any(train, val, TaskKind::MultiLabel, backend, cfg);
}

// --------------------------------------------------------------- prediction

void CascadeModel::validate() const {
    for (double t : thresholds) {
        if (!(t > 0.0 && t < 1.0)) throw ParameterError("thresholds must lie in (0, 1)");
    }
    if (stage1 && stage1->task() != TaskKind::Binary) throw InputError("stage-1 model is not binary");
    if (stage2 && stage2->task() != TaskKind::MultiLabel) throw InputError("stage-2 model is not multi-label");
}

LabelSet apply_thresholds(std::span<const double> probabilities, const std::array<double, 3>& thresholds) {
    LabelSet out;
    for (std::size_t i = 0; i < kAllConditions.size() && i < probabilities.size(); ++i) {
        if (probabilities[i] >= thresholds[i]) out.insert(kAllConditions[i]);
    }
    return out;
}

CascadePrediction predict(const CascadeModel& model, const std::string& text) {
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c) != 0; })) {
        throw InputError("cannot classify empty text");
    }
    if (!model.stage1) throw InputError("cascade has no stage-1 model");
    CascadePrediction out;
    const auto p1 = model.stage1->predict_proba(text);
    out.p_with_csa = p1.at(1);
    if (out.p_with_csa < 0.5) {
        out.background = BackgroundTag::WithoutCsa;
        return out;
    }
    out.background = BackgroundTag::WithCsa;
    if (!model.stage2) throw InputError("cascade has no stage-2 model");
    const auto p2 = model.stage2->predict_proba(text);
    std::array<double, 3> probs{p2.at(0), p2.at(1), p2.at(2)};
    out.label_probabilities = probs;
    out.conditions = apply_thresholds(probs, model.thresholds);
    return out;
}

// --------------------------------------------------------------- evaluation

json EvalReport::to_json() const {
    json j;
    j["stage"] = stage;
    j["samples"] = samples;
    j["accuracy"] = accuracy;
    j["macro_f1"] = macro_f1;
    j["hamming_score"] = hamming_score ? json(*hamming_score) : json(nullptr);
    j["hamming_loss"] = hamming_loss ? json(*hamming_loss) : json(nullptr);
    json per = json::object();
    for (const auto& [label, prf] : per_label) {
        per[label] = {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
    }
    j["per_label"] = per;
    j["confusion"] = confusion;
    return j;
}

EvalReport evaluate_stage1(const TextModel& model, std::span<const LabeledPost> test) {
    std::vector<int> truth;
    std::vector<int> pred;
    for (const auto& p : test) {
        truth.push_back(p.background == BackgroundTag::WithCsa ? 1 : 0);
        pred.push_back(model.predict_proba(p.text()).at(1) >= 0.5 ? 1 : 0);
    }
    EvalReport r;
    r.stage = 1;
    r.samples = test.size();
    r.accuracy = accuracy(truth, pred);
    r.macro_f1 = macro_f1(truth, pred, 2);
    r.confusion = confusion_matrix(truth, pred, 2);
    const auto& m = r.confusion;
    r.per_label["without_csa"] = prf_from_counts(m[0][0], m[1][0], m[0][1]);
    r.per_label["with_csa"] = prf_from_counts(m[1][1], m[0][1], m[1][0]);
    return r;
}

EvalReport evaluate_stage2(const TextModel& model, const std::array<double, 3>& thresholds,
                           std::span<const LabeledPost> test) {
    std::vector<LabelSet> truth;
    std::vector<LabelSet> pred;
    for (const auto& p : test) {
        truth.push_back(p.labels);
        pred.push_back(apply_thresholds(model.predict_proba(p.text()), thresholds));
    }
    EvalReport r;
    r.stage = 2;
    r.samples = test.size();
    r.hamming_score = hamming_score(truth, pred);
    r.hamming_loss = hamming_loss(truth, pred);
    r.accuracy = subset_accuracy(truth, pred);
    double f1_sum = 0.0;
    for (auto label : kAllConditions) {
        std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool t = truth[i].contains(label);
            const bool q = pred[i].contains(label);
            tp += t && q;
            fp += !t && q;
            fn += t && !q;
            tn += !t && !q;
        }
        const Prf prf = prf_from_counts(tp, fp, fn);
        r.per_label[std::string(to_string(label))] = prf;
        r.confusion.push_back({tp, fp, fn, tn});
        f1_sum += prf.f1;
    }
    r.macro_f1 = f1_sum / static_cast<double>(kAllConditions.size());
    return r;
}

// -------------------------------------------------------------- persistence

std::string data_fingerprint(std::span<const LabeledPost> train, std::span<const LabeledPost> val) {
    const std::vector<LabeledPost> t(train.begin(), train.end());
    const std::vector<LabeledPost> v(val.begin(), val.end());
    return sha256_hex(labeled_posts_jsonl(t) + "\n--\n" + labeled_posts_jsonl(v));
}

void save_stage(const std::filesystem::path& dir, int stage, const TextModel& model,
                const json& provenance) {
    if (stage != 1 && stage != 2) throw ParameterError("stage must be 1 or 2");
    std::filesystem::create_directories(dir);
    write_text_file(dir / ("stage" + std::to_string(stage) + ".json"), dump_json(model.to_json()) + "\n");
    json cascade = json::object();
    if (std::filesystem::exists(dir / "cascade.json")) cascade = json::parse(read_text_file(dir / "cascade.json"));
    if (!cascade.contains("thresholds")) {
        cascade["thresholds"] = {{"depression", 0.5}, {"anxiety", 0.5}, {"ptsd", 0.5}};
    }
    cascade["provenance"]["stage" + std::to_string(stage)] = provenance;
    write_text_file(dir / "cascade.json", dump_json(cascade, 2) + "\n");
}

CascadeModel load_cascade(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw InputNotFound("model directory " + dir.string() + " does not exist");
    CascadeModel m;
    auto load = [&](const char* name) -> std::shared_ptr<const TextModel> {
        const auto path = dir / name;
        if (!std::filesystem::exists(path)) return nullptr;
        try {
            return text_model_from_json(json::parse(read_text_file(path)));
        } catch (const json::exception& e) {
            throw InputError("corrupt model file " + path.string() + ": " + e.what());
        }
    };
    m.stage1 = load("stage1.json");
    m.stage2 = load("stage2.json");
    if (!m.stage1 && !m.stage2) throw InputNotFound("no trained stage found in " + dir.string());
    if (std::filesystem::exists(dir / "cascade.json")) {
        const json c = json::parse(read_text_file(dir / "cascade.json"));
        if (c.contains("thresholds")) {
            for (std::size_t i = 0; i < kAllConditions.size(); ++i) {
                m.thresholds[i] = c["thresholds"].value(std::string(to_string(kAllConditions[i])), 0.5);
            }
        }
        m.provenance = c.value("provenance", json::object());
    }
    m.validate();
    return m;
}

}  // namespace csakit

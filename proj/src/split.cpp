#include "csakit/split.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "csakit/errors.hpp"
#include "csakit/rng.hpp"

namespace csakit {

using nlohmann::json;

void SplitSpec::validate() const {
    auto in_open_unit = [](double x) { return x > 0.0 && x < 1.0; };
    if (!in_open_unit(train_fraction) || !in_open_unit(val_fraction_of_train)) {
        throw ParameterError("split fractions must lie in (0, 1)");
    }
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    // The epsilon absorbs representation error in products like 20 * 0.8.
    const auto train_portion =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction + 1e-9));
    const auto val = static_cast<std::size_t>(
        std::llround(static_cast<double>(train_portion) * spec.val_fraction_of_train));
    return {train_portion - val, val, n - train_portion};
}

std::vector<LabeledPost> labeled_posts(const Corpus& corpus) {
    std::vector<LabeledPost> out;
    out.reserve(corpus.posts.size());
    for (const auto& post : corpus.posts) {
        out.push_back({post, corpus.background, corpus.labels_of(post.id)});
    }
    return out;
}

namespace {

SplitSets partition(std::vector<LabeledPost> pool, const SplitSpec& spec, std::string_view stream) {
    Rng rng(derive_seed(spec.seed, stream));
    rng.shuffle(pool);
    const auto sizes = split_sizes(pool.size(), spec);
    SplitSets sets;
    auto first = pool.begin();
    sets.train.assign(first, first + static_cast<std::ptrdiff_t>(sizes.train));
    first += static_cast<std::ptrdiff_t>(sizes.train);
    sets.val.assign(first, first + static_cast<std::ptrdiff_t>(sizes.val));
    first += static_cast<std::ptrdiff_t>(sizes.val);
    sets.test.assign(first, pool.end());
    return sets;
}

SplitSets stratified_partition(const std::vector<LabeledPost>& pool, const SplitSpec& spec,
                               std::string_view stream) {
    std::vector<LabeledPost> with;
    std::vector<LabeledPost> without;
    for (const auto& p : pool) (p.background == BackgroundTag::WithCsa ? with : without).push_back(p);
    auto a = partition(with, spec, std::string(stream) + "/with");
    auto b = partition(without, spec, std::string(stream) + "/without");
    SplitSets sets;
    Rng rng(derive_seed(spec.seed, std::string(stream) + "/merge"));
    auto merge = [&](std::vector<LabeledPost>& dst, std::vector<LabeledPost>& x,
                     std::vector<LabeledPost>& y) {
        dst = std::move(x);
        dst.insert(dst.end(), y.begin(), y.end());
        rng.shuffle(dst);
    };
    merge(sets.train, a.train, b.train);
    merge(sets.val, a.val, b.val);
    merge(sets.test, a.test, b.test);
    return sets;
}

}  // namespace

DataSplit split(const Corpus& with_csa, const Corpus& without_csa, const SplitSpec& spec) {
    spec.validate();
    if (with_csa.posts.empty() || without_csa.posts.empty()) {
        throw InputError("split needs nonempty with-CSA and without-CSA corpora");
    }
    std::set<std::string> ids;
    for (const auto& p : with_csa.posts) ids.insert(p.id);
    for (const auto& p : without_csa.posts) {
        if (ids.contains(p.id)) throw InputError("post id " + p.id + " occurs in both corpora");
    }
    auto with_posts = labeled_posts(with_csa);
    for (auto& p : with_posts) p.background = BackgroundTag::WithCsa;
    auto without_posts = labeled_posts(without_csa);
    for (auto& p : without_posts) p.background = BackgroundTag::WithoutCsa;

    std::vector<LabeledPost> union_pool = with_posts;
    union_pool.insert(union_pool.end(), without_posts.begin(), without_posts.end());

    DataSplit data;
    data.stage1 = spec.stratified ? stratified_partition(union_pool, spec, "split/stage1")
                                  : partition(union_pool, spec, "split/stage1");
    data.stage2 = partition(with_posts, spec, "split/stage2");
    return data;
}

std::string labeled_posts_jsonl(const std::vector<LabeledPost>& posts) {
    std::string out;
    for (const auto& p : posts) {
        json j = post_to_json(p.post, p.labels);
        j["background"] = std::string(to_string(p.background));
        out += dump_json(j);
        out += '\n';
    }
    return out;
}

std::vector<LabeledPost> read_labeled_posts(const std::filesystem::path& path) {
    std::istringstream lines(read_text_file(path));
    std::vector<LabeledPost> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            LabeledPost lp;
            lp.post = post_from_json(j, &lp.labels);
            auto tag = parse_background(j.value("background", std::string("with_csa")));
            if (!tag) throw InputError("bad background value");
            lp.background = *tag;
            out.push_back(std::move(lp));
        } catch (const json::exception& e) {
            throw InputError(path.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_split(const DataSplit& data, const SplitSpec& spec, const std::filesystem::path& dir) {
    auto write_sets = [&](const SplitSets& sets, const std::string& stage) {
        write_text_file(dir / stage / "train.jsonl", labeled_posts_jsonl(sets.train));
        write_text_file(dir / stage / "val.jsonl", labeled_posts_jsonl(sets.val));
        write_text_file(dir / stage / "test.jsonl", labeled_posts_jsonl(sets.test));
    };
    write_sets(data.stage1, "stage1");
    write_sets(data.stage2, "stage2");
    json j;
    j["train_fraction"] = spec.train_fraction;
    j["val_fraction_of_train"] = spec.val_fraction_of_train;
    j["seed"] = spec.seed;
    j["stratified"] = spec.stratified;
    auto sizes = [](const SplitSets& s) {
        return json{{"train", s.train.size()}, {"val", s.val.size()}, {"test", s.test.size()}};
    };
    j["stage1"] = sizes(data.stage1);
    j["stage2"] = sizes(data.stage2);
    write_text_file(dir / "split.json", dump_json(j, 2) + "\n");
}

DataSplit read_split(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw InputNotFound("split directory " + dir.string() + " does not exist");
    }
    DataSplit data;
    auto read_sets = [&](const std::string& stage) {
        SplitSets sets;
        sets.train = read_labeled_posts(dir / stage / "train.jsonl");
        sets.val = read_labeled_posts(dir / stage / "val.jsonl");
        sets.test = read_labeled_posts(dir / stage / "test.jsonl");
        return sets;
    };
    data.stage1 = read_sets("stage1");
    data.stage2 = read_sets("stage2");
    return data;
}

}  // namespace csakit

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace csakit {

// Per-module seed derived from the single run seed:
// splitmix64(root ^ fnv1a64(module)). Every module that draws randomness
// documents the name it uses ("split", "train", "topics", "synth", ...).
std::uint64_t derive_seed(std::uint64_t root, std::string_view module);

// Portable random source. The standard distributions are implementation
// defined, so everything here is built on the raw mt19937_64 stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, n). n must be > 0.
    std::size_t index(std::size_t n);
    // Uniform in [0, 1).
    double uniform();
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace csakit

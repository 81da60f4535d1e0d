#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgsim {

using VertexTypeId = uint32_t;
using EdgeTypeId = uint32_t;
using VertexId = uint32_t;  // dense local id within a vertex type

// Global vertex address. Caches and traces are keyed by (type, id).
struct VertexRef {
    VertexTypeId type = 0;
    VertexId id = 0;

    friend bool operator==(const VertexRef&, const VertexRef&) = default;
    friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
};

struct VertexRefHash {
    size_t operator()(const VertexRef& v) const noexcept {
        return (static_cast<uint64_t>(v.type) << 40) ^ static_cast<uint64_t>(v.id);
    }
};

constexpr EdgeTypeId kNoRelation = 0xffffffffu;

// Execution stages of one inference pass.
enum class Stage : uint8_t {
    FeatureProjection = 0,
    NeighborAggregation = 1,
    SemanticFusion = 2,
};

enum class AccessRole : uint8_t { Target = 0, Neighbor = 1 };

const char* to_string(Stage s);
const char* to_string(AccessRole r);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UndefinedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

inline constexpr uint32_t ceil_log2(uint64_t x) {
    uint32_t bits = 0;
    uint64_t v = 1;
    while (v < x) {
        v <<= 1;
        ++bits;
    }
    return bits;
}

inline constexpr bool is_power_of_two(uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

// FNV-1a, used for content fingerprints that must be stable across runs.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a_u64(uint64_t value, uint64_t h = 0xcbf29ce484222325ull) {
    return fnv1a(&value, sizeof(value), h);
}

// Seeded RNG wrapper. Draws go through fixed bit manipulation rather than
// std:: distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n) via rejection sampling.
    uint64_t uniform_index(uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    float uniform_f32(float lo, float hi) { return static_cast<float>(uniform(lo, hi)); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Row-major Float32 matrix; the only dense container the engine needs.
struct MatrixF32 {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<float> data;

    MatrixF32() = default;
    MatrixF32(uint32_t r, uint32_t c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0f) {}

    std::span<float> row(uint32_t i) { return {data.data() + static_cast<size_t>(i) * cols, cols}; }
    std::span<const float> row(uint32_t i) const {
        return {data.data() + static_cast<size_t>(i) * cols, cols};
    }

    uint64_t bytes() const { return static_cast<uint64_t>(rows) * cols * sizeof(float); }

    uint64_t content_hash() const {
        uint64_t h = fnv1a_u64(rows, fnv1a_u64(cols));
        return data.empty() ? h : fnv1a(data.data(), data.size() * sizeof(float), h);
    }

    friend bool operator==(const MatrixF32&, const MatrixF32&) = default;
};

}  // namespace hgsim

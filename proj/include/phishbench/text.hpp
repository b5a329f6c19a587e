#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phishbench {

// Replaces every invalid UTF-8 sequence with U+FFFD. Valid input passes
// through unchanged.
std::string sanitize_utf8(const std::string& input);

std::string to_lower(std::string s);
std::string trim(const std::string& s);
bool is_blank(const std::string& s);

// FNV-1a over the raw bytes; used for replay-fixture request keys.
std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

// Fixed-precision decimal formatting, C locale, no scientific notation.
// The single float->text path for all report payloads.
std::string format_double(double v, int precision);

// CSV with RFC-4180 quoting for fields containing comma/quote/newline.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

// Deterministic 64-bit RNG (SplitMix64). std::uniform_int_distribution is
// implementation-defined, so sampling goes through this to keep outputs
// byte-identical across platforms.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    // Uniform in [0, bound) via rejection sampling; bound > 0.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

// In-place Fisher-Yates shuffle driven by DeterministicRng.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, DeterministicRng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace phishbench

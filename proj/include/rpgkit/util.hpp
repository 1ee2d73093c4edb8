#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rpgkit {

// FNV-1a, 64-bit. Used for replay keys and state hashing; the exact
// constants are part of the on-disk format, do not change them.
inline uint64_t fnv1a64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64_u64(uint64_t v, uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex64(uint64_t v);
std::optional<uint64_t> from_hex64(std::string_view s);

// splitmix64; the standard finalizer, stable across platforms.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string read_file(const std::string& path);               // throws std::runtime_error
bool try_read_file(const std::string& path, std::string& out);
void write_file(const std::string& path, std::string_view content);
void append_line(const std::string& path, std::string_view line);

// Whitespace-delimited token count.
size_t count_words(std::string_view text);

std::string trim(std::string_view s);

// Runs fn(item) over items with at most `workers` threads. workers <= 1
// degrades to a plain loop. Exceptions inside fn propagate (first one wins).
void parallel_for_each(size_t count, unsigned workers, const std::function<void(size_t)>& fn);

}  // namespace rpgkit

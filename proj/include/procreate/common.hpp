#ifndef PROCREATE_COMMON_HPP
#define PROCREATE_COMMON_HPP

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace procreate {

using Vec = std::vector<double>;

// Error taxonomy. Codes line up with the CLI exit codes (config = 2, io = 3).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// splitmix64; used to fan a single run seed out into independent streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic child seed for a named stream plus an index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag,
                                 std::uint64_t index = 0) {
    return splitmix64(splitmix64(master ^ stream_tag) + index);
}

// Stream tags (arbitrary fixed constants, one per consumer).
namespace seed_tag {
constexpr std::uint64_t init_noise = 0x6e6f697365ULL;
constexpr std::uint64_t ddpm_noise = 0x6464706dULL;
constexpr std::uint64_t references = 0x72656673ULL;
constexpr std::uint64_t real_set = 0x7265616cULL;
constexpr std::uint64_t embedder = 0x656d6264ULL;
}  // namespace seed_tag

// Shortest round-trip decimal for a double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace procreate

#endif

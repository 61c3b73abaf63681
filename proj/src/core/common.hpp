#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpass {

enum class Errc {
    invalid_argument,
    dimension_mismatch,
    validation,
    unauthorized,
    bad_signature,
    out_of_range,
    empty_input,
    no_valid_bits,
    too_large,
    duplicate,
    not_found,
    io,
    parse,
    state,
    bounds_failed,
    chain_invalid,
    internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

using Digest = std::array<uint8_t, 32>;
using Bytes = std::vector<uint8_t>;

Digest sha256(std::span<const uint8_t> data);
// Keyed BLAKE2b-256; the key selects the member of the hash family.
Digest blake2b_keyed(std::span<const uint8_t> key, std::span<const uint8_t> data);

std::string to_hex(std::span<const uint8_t> data);
Bytes from_hex(const std::string& hex);
std::string to_base64(std::span<const uint8_t> data);
Bytes from_base64(const std::string& b64);

// Deterministic RNG (splitmix64). Every draw is defined here rather than via
// std distributions, so streams are bit-identical across standard libraries
// and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {
        // warm-up so nearby seeds decorrelate
        for (int i = 0; i < 4; ++i) next_u64();
    }

    uint64_t next_u64() {
        uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform integer in [0, bound)
    uint64_t uniform(uint64_t bound) {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // uniform in [lo, hi] inclusive
    int64_t uniform_range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(uniform(static_cast<uint64_t>(hi - lo + 1)));
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // uniform trit in {-1, 0, 1}
    int trit() {
        switch (uniform(3)) {
            case 0: return -1;
            case 1: return 0;
            default: return 1;
        }
    }

private:
    uint64_t s_;
};

// Stable sub-seed derivation: first 8 bytes of SHA-256(tag || le64 args...).
uint64_t derive_seed(uint64_t base, const std::string& tag, uint64_t a = 0, uint64_t b = 0);

void append_u32(Bytes& out, uint32_t v);
void append_u64(Bytes& out, uint64_t v);
void append_bytes(Bytes& out, std::span<const uint8_t> data);
void append_str(Bytes& out, const std::string& s);  // u32 length prefix + bytes

// Sequential reader over a canonical encoding; throws Errc::parse on underrun.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}
    uint32_t read_u32();
    uint64_t read_u64();
    uint8_t read_u8();
    Bytes read_bytes(size_t len);
    std::string read_str();
    bool done() const { return pos_ == data_.size(); }
    size_t pos() const { return pos_; }
    size_t remaining() const { return data_.size() - pos_; }

private:
    void need(size_t len);
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace vpass

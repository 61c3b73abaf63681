#include "common.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

namespace vpass {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) fail(Errc::internal, "libsodium initialization failed");
    });
}

}  // namespace

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::dimension_mismatch: return "dimension_mismatch";
        case Errc::validation: return "validation";
        case Errc::unauthorized: return "unauthorized";
        case Errc::bad_signature: return "bad_signature";
        case Errc::out_of_range: return "out_of_range";
        case Errc::empty_input: return "empty_input";
        case Errc::no_valid_bits: return "no_valid_bits";
        case Errc::too_large: return "too_large";
        case Errc::duplicate: return "duplicate";
        case Errc::not_found: return "not_found";
        case Errc::io: return "io";
        case Errc::parse: return "parse";
        case Errc::state: return "state";
        case Errc::bounds_failed: return "bounds_failed";
        case Errc::chain_invalid: return "chain_invalid";
        case Errc::internal: return "internal";
    }
    return "unknown";
}

Digest sha256(std::span<const uint8_t> data) {
    ensure_sodium();
    Digest out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Digest blake2b_keyed(std::span<const uint8_t> key, std::span<const uint8_t> data) {
    ensure_sodium();
    Digest out{};
    if (crypto_generichash(out.data(), out.size(), data.data(), data.size(), key.data(),
                           key.size()) != 0)
        fail(Errc::internal, "blake2b failed");
    return out;
}

std::string to_hex(std::span<const uint8_t> data) {
    ensure_sodium();
    std::string out(data.size() * 2 + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), data.data(), data.size());
    out.resize(data.size() * 2);
    return out;
}

Bytes from_hex(const std::string& hex) {
    ensure_sodium();
    Bytes out(hex.size() / 2 + 1);
    size_t len = 0;
    if (sodium_hex2bin(out.data(), out.size(), hex.data(), hex.size(), nullptr, &len, nullptr) != 0)
        fail(Errc::parse, "invalid hex string");
    out.resize(len);
    return out;
}

std::string to_base64(std::span<const uint8_t> data) {
    ensure_sodium();
    std::string out(sodium_base64_encoded_len(data.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
    sodium_bin2base64(out.data(), out.size(), data.data(), data.size(),
                      sodium_base64_VARIANT_ORIGINAL);
    out.resize(std::strlen(out.c_str()));
    return out;
}

Bytes from_base64(const std::string& b64) {
    ensure_sodium();
    Bytes out(b64.size() * 3 / 4 + 4);
    size_t len = 0;
    if (sodium_base642bin(out.data(), out.size(), b64.data(), b64.size(), nullptr, &len, nullptr,
                          sodium_base64_VARIANT_ORIGINAL) != 0)
        fail(Errc::parse, "invalid base64 string");
    out.resize(len);
    return out;
}

uint64_t derive_seed(uint64_t base, const std::string& tag, uint64_t a, uint64_t b) {
    Bytes buf;
    buf.reserve(tag.size() + 24);
    buf.insert(buf.end(), tag.begin(), tag.end());
    append_u64(buf, base);
    append_u64(buf, a);
    append_u64(buf, b);
    Digest d = sha256(buf);
    uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= static_cast<uint64_t>(d[i]) << (8 * i);
    return out;
}

void append_u32(Bytes& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void append_u64(Bytes& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void append_bytes(Bytes& out, std::span<const uint8_t> data) {
    out.insert(out.end(), data.begin(), data.end());
}

void append_str(Bytes& out, const std::string& s) {
    append_u32(out, static_cast<uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void ByteReader::need(size_t len) {
    if (pos_ + len > data_.size()) fail(Errc::parse, "truncated encoding");
}

uint32_t ByteReader::read_u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

uint64_t ByteReader::read_u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

uint8_t ByteReader::read_u8() {
    need(1);
    return data_[pos_++];
}

Bytes ByteReader::read_bytes(size_t len) {
    need(len);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + len);
    pos_ += len;
    return out;
}

std::string ByteReader::read_str() {
    uint32_t len = read_u32();
    need(len);
    std::string out(data_.begin() + pos_, data_.begin() + pos_ + len);
    pos_ += len;
    return out;
}

}  // namespace vpass

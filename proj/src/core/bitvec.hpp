#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "common.hpp"

namespace vpass {

// Fixed-length binary vector packed into 64-bit words. Bit i lives at word
// i/64, position i%64. External byte packings (base64/hex formats) are
// MSB-first within each byte so the serialized form reads left to right.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool v = true) {
        uint64_t m = uint64_t{1} << (i & 63);
        if (v)
            words_[i >> 6] |= m;
        else
            words_[i >> 6] &= ~m;
    }

    size_t count_ones() const;

    BitVec operator^(const BitVec& rhs) const;
    BitVec operator&(const BitVec& rhs) const;
    BitVec operator|(const BitVec& rhs) const;
    BitVec operator~() const;
    // this AND NOT rhs
    BitVec and_not(const BitVec& rhs) const;

    bool operator==(const BitVec& rhs) const = default;
    // Lexicographic order on the bit sequence (b0, b1, ..., b_{n-1}).
    std::strong_ordering operator<=>(const BitVec& rhs) const;

    // Cyclic rotation: bit i of the input lands at index (i + k) mod n.
    BitVec rotated(int64_t k) const;

    void fill_random(Rng& rng);
    void fill_bernoulli(Rng& rng, double p);
    // flips each bit independently with probability p
    void apply_noise(Rng& rng, double p);

    Bytes to_packed_bytes() const;
    static BitVec from_packed_bytes(std::span<const uint8_t> bytes, size_t nbits);

    std::string to_hex() const { return vpass::to_hex(to_packed_bytes()); }
    static BitVec from_hex(const std::string& hex, size_t nbits);

    std::span<const uint64_t> words() const { return words_; }

    friend size_t hamming(const BitVec& a, const BitVec& b);

private:
    void mask_tail();
    void check_same_size(const BitVec& rhs) const;

    size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

// Unnormalized Hamming distance (popcount of XOR).
size_t hamming(const BitVec& a, const BitVec& b);

// Binary matrix stored row-major in a BitVec (bit index = r*cols + c).
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols) {
        if (rows == 0 || cols == 0) fail(Errc::invalid_argument, "matrix dimensions must be >= 1");
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t size() const { return rows_ * cols_; }

    bool get(size_t r, size_t c) const { return bits_.get(r * cols_ + c); }
    void set(size_t r, size_t c, bool v = true) { bits_.set(r * cols_ + c, v); }

    const BitVec& bits() const { return bits_; }
    BitVec& bits() { return bits_; }

    bool same_shape(const BitMatrix& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_;
    }
    bool operator==(const BitMatrix& rhs) const = default;

private:
    size_t rows_ = 0, cols_ = 0;
    BitVec bits_;
};

// Matrix record format: header line "IRIS1 rows cols", then one line of
// base64-encoded row-major packed bits. Files may hold several records.
void write_matrix_record(std::ostream& os, const BitMatrix& m);
std::optional<BitMatrix> read_matrix_record(std::istream& is);
std::string matrix_record_string(const BitMatrix& m);
BitMatrix matrix_from_record_string(const std::string& rec);

}  // namespace vpass

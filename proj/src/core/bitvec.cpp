#include "bitvec.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace vpass {

void BitVec::mask_tail() {
    size_t rem = nbits_ & 63;
    if (rem && !words_.empty()) words_.back() &= (uint64_t{1} << rem) - 1;
}

void BitVec::check_same_size(const BitVec& rhs) const {
    if (nbits_ != rhs.nbits_)
        fail(Errc::dimension_mismatch, "bit vector length mismatch: " + std::to_string(nbits_) +
                                           " vs " + std::to_string(rhs.nbits_));
}

size_t BitVec::count_ones() const {
    size_t n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
}

BitVec BitVec::operator^(const BitVec& rhs) const {
    check_same_size(rhs);
    BitVec out(nbits_);
    for (size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] ^ rhs.words_[i];
    return out;
}

BitVec BitVec::operator&(const BitVec& rhs) const {
    check_same_size(rhs);
    BitVec out(nbits_);
    for (size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] & rhs.words_[i];
    return out;
}

BitVec BitVec::operator|(const BitVec& rhs) const {
    check_same_size(rhs);
    BitVec out(nbits_);
    for (size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] | rhs.words_[i];
    return out;
}

BitVec BitVec::operator~() const {
    BitVec out(nbits_);
    for (size_t i = 0; i < words_.size(); ++i) out.words_[i] = ~words_[i];
    out.mask_tail();
    return out;
}

BitVec BitVec::and_not(const BitVec& rhs) const {
    check_same_size(rhs);
    BitVec out(nbits_);
    for (size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] & ~rhs.words_[i];
    return out;
}

std::strong_ordering BitVec::operator<=>(const BitVec& rhs) const {
    if (nbits_ != rhs.nbits_) return nbits_ <=> rhs.nbits_;
    for (size_t i = 0; i < words_.size(); ++i) {
        uint64_t diff = words_[i] ^ rhs.words_[i];
        if (diff) {
            int k = std::countr_zero(diff);
            bool a = (words_[i] >> k) & 1;
            return a ? std::strong_ordering::greater : std::strong_ordering::less;
        }
    }
    return std::strong_ordering::equal;
}

BitVec BitVec::rotated(int64_t k) const {
    if (nbits_ == 0) return *this;
    int64_t n = static_cast<int64_t>(nbits_);
    uint64_t shift = static_cast<uint64_t>(((k % n) + n) % n);
    if (shift == 0) return *this;
    BitVec out(nbits_);
    if ((nbits_ & 63) == 0) {
        size_t nw = words_.size();
        size_t word_shift = shift >> 6;
        size_t bit_shift = shift & 63;
        for (size_t i = 0; i < nw; ++i) {
            uint64_t w = words_[i];
            size_t j = (i + word_shift) % nw;
            if (bit_shift == 0) {
                out.words_[j] |= w;
            } else {
                out.words_[j] |= w << bit_shift;
                out.words_[(j + 1) % nw] |= w >> (64 - bit_shift);
            }
        }
    } else {
        for (size_t i = 0; i < nbits_; ++i)
            if (get(i)) out.set((i + shift) % nbits_);
    }
    return out;
}

void BitVec::fill_random(Rng& rng) {
    for (auto& w : words_) w = rng.next_u64();
    mask_tail();
}

void BitVec::fill_bernoulli(Rng& rng, double p) {
    for (size_t i = 0; i < nbits_; ++i) set(i, rng.bernoulli(p));
}

void BitVec::apply_noise(Rng& rng, double p) {
    if (p <= 0) return;
    for (size_t i = 0; i < nbits_; ++i)
        if (rng.bernoulli(p)) set(i, !get(i));
}

Bytes BitVec::to_packed_bytes() const {
    Bytes out((nbits_ + 7) / 8, 0);
    for (size_t i = 0; i < nbits_; ++i)
        if (get(i)) out[i >> 3] |= uint8_t(0x80u >> (i & 7));
    return out;
}

BitVec BitVec::from_packed_bytes(std::span<const uint8_t> bytes, size_t nbits) {
    if (bytes.size() != (nbits + 7) / 8)
        fail(Errc::parse, "packed length does not match bit count");
    BitVec out(nbits);
    for (size_t i = 0; i < nbits; ++i)
        if (bytes[i >> 3] & (0x80u >> (i & 7))) out.set(i);
    return out;
}

BitVec BitVec::from_hex(const std::string& hex, size_t nbits) {
    return from_packed_bytes(vpass::from_hex(hex), nbits);
}

size_t hamming(const BitVec& a, const BitVec& b) {
    a.check_same_size(b);
    size_t n = 0;
    for (size_t i = 0; i < a.words_.size(); ++i) n += std::popcount(a.words_[i] ^ b.words_[i]);
    return n;
}

void write_matrix_record(std::ostream& os, const BitMatrix& m) {
    os << "IRIS1 " << m.rows() << ' ' << m.cols() << '\n'
       << to_base64(m.bits().to_packed_bytes()) << '\n';
}

std::optional<BitMatrix> read_matrix_record(std::istream& is) {
    std::string header;
    while (std::getline(is, header)) {
        if (!header.empty()) break;
    }
    if (header.empty()) return std::nullopt;
    std::istringstream hs(header);
    std::string magic;
    size_t rows = 0, cols = 0;
    hs >> magic >> rows >> cols;
    if (magic != "IRIS1" || rows == 0 || cols == 0)
        fail(Errc::parse, "bad matrix record header: " + header);
    std::string b64;
    if (!std::getline(is, b64)) fail(Errc::parse, "matrix record missing data line");
    BitMatrix m(rows, cols);
    m.bits() = BitVec::from_packed_bytes(from_base64(b64), rows * cols);
    return m;
}

std::string matrix_record_string(const BitMatrix& m) {
    std::ostringstream os;
    write_matrix_record(os, m);
    return os.str();
}

BitMatrix matrix_from_record_string(const std::string& rec) {
    std::istringstream is(rec);
    auto m = read_matrix_record(is);
    if (!m) fail(Errc::parse, "empty matrix record");
    return *m;
}

}  // namespace vpass

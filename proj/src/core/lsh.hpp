#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitvec.hpp"

namespace vpass::lsh {

// m-bit hash output of a ProjectionSet.
using HashVector = BitVec;

// m ternary projection vectors in {-1,0,+1}^n. Each vector is stored as two
// bitmasks (plus/minus), so a dot product against a binary input is two
// masked popcounts. Serialized form: header line "S3H1 n m seed", then one
// base64 line per vector holding 2-bit-packed trits, MSB-first within each
// byte (00 = 0, 01 = +1, 10 = -1).
class ProjectionSet {
public:
    ProjectionSet() = default;

    static ProjectionSet sample(size_t n, size_t m, uint64_t seed);
    // build from explicit trit rows (tests, degenerate cases); seed recorded as 0
    static ProjectionSet from_trits(const std::vector<std::vector<int8_t>>& rows);

    size_t n() const { return n_; }
    size_t m() const { return m_; }
    uint64_t seed() const { return seed_; }

    int trit(size_t i, size_t j) const;
    // <x, r_i> over the integers; x must have length n
    int64_t dot(size_t i, const BitVec& x) const;

    std::string to_string() const;
    static ProjectionSet parse(const std::string& text);
    void save(const std::string& path) const;
    static ProjectionSet load(const std::string& path);

    bool operator==(const ProjectionSet& rhs) const = default;

private:
    size_t n_ = 0, m_ = 0;
    uint64_t seed_ = 0;
    std::vector<BitVec> plus_;   // plus_[i] bit j set iff r_i[j] = +1
    std::vector<BitVec> minus_;  // minus_[i] bit j set iff r_i[j] = -1
};

ProjectionSet sample_projections(size_t n, size_t m, uint64_t seed);

// 0 for negative arguments, 1 otherwise (zero maps to 1)
inline int sgn(int64_t z) { return z < 0 ? 0 : 1; }

// bit i = sgn(<x, r_i>)
HashVector s3hash(const ProjectionSet& R, const BitVec& x);

// popcount(h1 XOR h2) / m
double hash_hamming(const HashVector& h1, const HashVector& h2);

// Theoretical per-bit agreement rate 1 - theta/pi, where theta is the angle
// between the binary vectors. Errors on a zero vector (angle undefined).
double collision_prob(const BitVec& x1, const BitVec& x2);

// All x in {0,1}^n hashing to h, in lexicographic order of the bit sequence
// (x_0 most significant). Exhaustive; refuses n > 20.
std::vector<BitVec> preimage_oracle(const ProjectionSet& R, const HashVector& h);

// For each input index i, the empirical advantage over 1/2 of the best
// single-hash-bit predictor of x_i, measured over `trials` uniform inputs.
// The adversary class is deliberately narrow (one output bit) so the
// statistic is measurable; stronger adversaries are out of reach of testing.
std::vector<double> bit_balance_advantage(const ProjectionSet& R, size_t trials, uint64_t seed);

// Sum of per-coordinate marginal binary entropies, in bits. This is an UPPER
// BOUND on the joint entropy; the exact joint entropy of long binary vectors
// is not estimable from feasible sample counts.
double entropy_estimate(const std::vector<BitVec>& samples);

struct SecurityParams {
    size_t lambda = 128;
    size_t m = 256;
    double entropy_estimate = 0;
    // hiding regime requires H(X) >= m + lambda
    bool input_hiding() const {
        return entropy_estimate >= static_cast<double>(m + lambda);
    }
};

struct LocalityRow {
    double target_theta = 0;    // requested angle
    double achieved_theta = 0;  // realized angle after integer rounding of the overlap
    double predicted = 0;       // 1 - achieved_theta/pi
    double measured = 0;        // mean per-bit hash agreement
    size_t pairs = 0;
};

// Empirical check of the collision law. For each angle, generates pairs of
// weight-`weight` binary vectors with overlap c = round(weight * cos theta),
// so cos(achieved_theta) = c/weight exactly, hashes them under fresh
// projection sets (one per small batch of pairs), and averages per-bit
// agreement. Angles above pi/2 are not realizable with binary vectors.
std::vector<LocalityRow> eval_locality(const std::vector<double>& thetas, size_t pairs_per_angle,
                                       size_t n, size_t weight, size_t m, uint64_t seed);

}  // namespace vpass::lsh

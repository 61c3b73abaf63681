#include "lsh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace vpass::lsh {

ProjectionSet ProjectionSet::sample(size_t n, size_t m, uint64_t seed) {
    if (n == 0 || m == 0) fail(Errc::invalid_argument, "projection set needs n >= 1 and m >= 1");
    ProjectionSet ps;
    ps.n_ = n;
    ps.m_ = m;
    ps.seed_ = seed;
    ps.plus_.assign(m, BitVec(n));
    ps.minus_.assign(m, BitVec(n));
    Rng rng(derive_seed(seed, "s3hash.projections"));
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) {
            int t = rng.trit();
            if (t > 0)
                ps.plus_[i].set(j);
            else if (t < 0)
                ps.minus_[i].set(j);
        }
    }
    return ps;
}

ProjectionSet ProjectionSet::from_trits(const std::vector<std::vector<int8_t>>& rows) {
    if (rows.empty() || rows.front().empty())
        fail(Errc::invalid_argument, "projection set needs n >= 1 and m >= 1");
    ProjectionSet ps;
    ps.m_ = rows.size();
    ps.n_ = rows.front().size();
    ps.plus_.assign(ps.m_, BitVec(ps.n_));
    ps.minus_.assign(ps.m_, BitVec(ps.n_));
    for (size_t i = 0; i < ps.m_; ++i) {
        if (rows[i].size() != ps.n_)
            fail(Errc::dimension_mismatch, "projection rows must have uniform length");
        for (size_t j = 0; j < ps.n_; ++j) {
            int8_t t = rows[i][j];
            if (t > 1 || t < -1) fail(Errc::invalid_argument, "trit entries must be in {-1,0,1}");
            if (t > 0)
                ps.plus_[i].set(j);
            else if (t < 0)
                ps.minus_[i].set(j);
        }
    }
    return ps;
}

int ProjectionSet::trit(size_t i, size_t j) const {
    if (i >= m_ || j >= n_) fail(Errc::out_of_range, "trit index out of range");
    if (plus_[i].get(j)) return 1;
    if (minus_[i].get(j)) return -1;
    return 0;
}

int64_t ProjectionSet::dot(size_t i, const BitVec& x) const {
    if (i >= m_) fail(Errc::out_of_range, "projection index out of range");
    if (x.size() != n_) fail(Errc::dimension_mismatch, "input length does not match n");
    auto xw = x.words();
    auto pw = plus_[i].words();
    auto mw = minus_[i].words();
    int64_t acc = 0;
    for (size_t k = 0; k < xw.size(); ++k)
        acc += std::popcount(xw[k] & pw[k]) - std::popcount(xw[k] & mw[k]);
    return acc;
}

std::string ProjectionSet::to_string() const {
    std::ostringstream os;
    os << "S3H1 " << n_ << ' ' << m_ << ' ' << seed_ << '\n';
    size_t nbytes = (n_ + 3) / 4;
    Bytes packed(nbytes);
    for (size_t i = 0; i < m_; ++i) {
        std::fill(packed.begin(), packed.end(), 0);
        for (size_t j = 0; j < n_; ++j) {
            uint8_t code = plus_[i].get(j) ? 1 : (minus_[i].get(j) ? 2 : 0);
            packed[j / 4] |= static_cast<uint8_t>(code << (6 - 2 * (j % 4)));
        }
        os << to_base64(packed) << '\n';
    }
    return os.str();
}

ProjectionSet ProjectionSet::parse(const std::string& text) {
    std::istringstream is(text);
    std::string magic;
    size_t n = 0, m = 0;
    uint64_t seed = 0;
    if (!(is >> magic >> n >> m >> seed) || magic != "S3H1")
        fail(Errc::parse, "bad projection set header (want \"S3H1 n m seed\")");
    if (n == 0 || m == 0) fail(Errc::parse, "projection set needs n >= 1 and m >= 1");
    size_t nbytes = (n + 3) / 4;
    // each row encodes nbytes bytes as base64 (4 chars per 3 bytes), so a
    // header promising more rows than the payload could hold is corruption;
    // checking before the allocations keeps bad input from turning into
    // allocation failures
    size_t row_chars = 4 * ((nbytes + 2) / 3);
    if (row_chars == 0 || m > text.size() / row_chars)
        fail(Errc::parse, "projection set header exceeds payload");
    ProjectionSet ps;
    ps.n_ = n;
    ps.m_ = m;
    ps.seed_ = seed;
    ps.plus_.assign(m, BitVec(n));
    ps.minus_.assign(m, BitVec(n));
    std::string line;
    for (size_t i = 0; i < m; ++i) {
        if (!(is >> line)) fail(Errc::parse, "projection set truncated");
        Bytes packed = from_base64(line);
        if (packed.size() != nbytes)
            fail(Errc::parse, "projection vector has wrong packed length");
        for (size_t j = 0; j < n; ++j) {
            uint8_t code = (packed[j / 4] >> (6 - 2 * (j % 4))) & 3;
            if (code == 1)
                ps.plus_[i].set(j);
            else if (code == 2)
                ps.minus_[i].set(j);
            else if (code == 3)
                fail(Errc::parse, "invalid trit code 3");
        }
        for (size_t j = n; j < nbytes * 4; ++j)
            if ((packed[j / 4] >> (6 - 2 * (j % 4))) & 3)
                fail(Errc::parse, "nonzero padding in projection vector");
    }
    return ps;
}

void ProjectionSet::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot open for writing: " + path);
    out << to_string();
    if (!out) fail(Errc::io, "write failed: " + path);
}

ProjectionSet ProjectionSet::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open projection set: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

ProjectionSet sample_projections(size_t n, size_t m, uint64_t seed) {
    return ProjectionSet::sample(n, m, seed);
}

HashVector s3hash(const ProjectionSet& R, const BitVec& x) {
    if (x.size() != R.n()) fail(Errc::dimension_mismatch, "input length does not match n");
    HashVector h(R.m());
    for (size_t i = 0; i < R.m(); ++i)
        if (sgn(R.dot(i, x))) h.set(i);
    return h;
}

double hash_hamming(const HashVector& h1, const HashVector& h2) {
    if (h1.size() != h2.size()) fail(Errc::dimension_mismatch, "hash length mismatch");
    if (h1.empty()) fail(Errc::empty_input, "empty hash");
    return static_cast<double>(hamming(h1, h2)) / static_cast<double>(h1.size());
}

double collision_prob(const BitVec& x1, const BitVec& x2) {
    if (x1.size() != x2.size()) fail(Errc::dimension_mismatch, "vector length mismatch");
    size_t w1 = x1.count_ones(), w2 = x2.count_ones();
    if (w1 == 0 || w2 == 0)
        fail(Errc::invalid_argument, "angle undefined for a zero vector");
    auto d = static_cast<double>((x1 & x2).count_ones());
    double c = d / std::sqrt(static_cast<double>(w1) * static_cast<double>(w2));
    c = std::clamp(c, -1.0, 1.0);
    return 1.0 - std::acos(c) / std::numbers::pi;
}

std::vector<BitVec> preimage_oracle(const ProjectionSet& R, const HashVector& h) {
    if (R.n() > 20) fail(Errc::too_large, "exhaustive oracle limited to n <= 20");
    if (h.size() != R.m()) fail(Errc::dimension_mismatch, "hash length does not match m");
    size_t n = R.n(), m = R.m();
    // single-word candidates; pull each projection's masks into scalars
    std::vector<uint64_t> pw(m), mw(m);
    std::vector<uint8_t> want(m);
    BitVec probe(n);
    for (size_t i = 0; i < m; ++i) {
        // reconstruct word-0 masks through the public trit accessor
        uint64_t p = 0, q = 0;
        for (size_t j = 0; j < n; ++j) {
            int t = R.trit(i, j);
            if (t > 0) p |= uint64_t{1} << j;
            if (t < 0) q |= uint64_t{1} << j;
        }
        pw[i] = p;
        mw[i] = q;
        want[i] = h.get(i);
    }
    std::vector<BitVec> out;
    uint64_t limit = uint64_t{1} << n;
    for (uint64_t cand = 0; cand < limit; ++cand) {
        bool ok = true;
        for (size_t i = 0; i < m; ++i) {
            int d = std::popcount(cand & pw[i]) - std::popcount(cand & mw[i]);
            if (static_cast<uint8_t>(sgn(d)) != want[i]) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        BitVec x(n);
        for (size_t j = 0; j < n; ++j)
            if ((cand >> j) & 1) x.set(j);
        out.push_back(std::move(x));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> bit_balance_advantage(const ProjectionSet& R, size_t trials, uint64_t seed) {
    if (trials < 1000) fail(Errc::validation, "advantage estimate needs trials >= 1000");
    size_t n = R.n(), m = R.m();
    // columnar layout: one bitset of length `trials` per input bit and per
    // hash bit, so each (i, j) agreement count is a single XOR-popcount pass
    std::vector<BitVec> xcols(n, BitVec(trials));
    std::vector<BitVec> hcols(m, BitVec(trials));
    Rng rng(derive_seed(seed, "lsh.bitbalance"));
    BitVec x(n);
    for (size_t t = 0; t < trials; ++t) {
        x.fill_random(rng);
        HashVector h = s3hash(R, x);
        for (size_t i = 0; i < n; ++i)
            if (x.get(i)) xcols[i].set(t);
        for (size_t j = 0; j < m; ++j)
            if (h.get(j)) hcols[j].set(t);
    }
    std::vector<double> adv(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        size_t best = 0;
        for (size_t j = 0; j < m; ++j) {
            size_t agree = trials - hamming(xcols[i], hcols[j]);
            size_t dev = agree > trials - agree ? agree * 2 - trials : trials - agree * 2;
            best = std::max(best, dev);
        }
        // best = max_j |2*agree - trials|; advantage = |agree/trials - 1/2|
        adv[i] = static_cast<double>(best) / (2.0 * static_cast<double>(trials));
    }
    return adv;
}

double entropy_estimate(const std::vector<BitVec>& samples) {
    if (samples.empty()) fail(Errc::empty_input, "entropy estimate needs samples");
    size_t n = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != n) fail(Errc::dimension_mismatch, "samples must have uniform length");
    auto total = static_cast<double>(samples.size());
    std::vector<size_t> ones(n, 0);
    for (const auto& s : samples)
        for (size_t i = 0; i < n; ++i) ones[i] += s.get(i);
    double bits = 0;
    for (size_t i = 0; i < n; ++i) {
        double p = static_cast<double>(ones[i]) / total;
        if (p <= 0.0 || p >= 1.0) continue;
        bits += -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
    }
    return bits;
}

std::vector<LocalityRow> eval_locality(const std::vector<double>& thetas, size_t pairs_per_angle,
                                       size_t n, size_t weight, size_t m, uint64_t seed) {
    if (thetas.empty()) fail(Errc::empty_input, "no angles given");
    if (pairs_per_angle == 0) fail(Errc::invalid_argument, "pairs_per_angle must be >= 1");
    if (weight == 0 || n == 0 || m == 0)
        fail(Errc::invalid_argument, "n, weight and m must be >= 1");
    constexpr size_t kBatch = 50;  // pairs sharing one projection set
    std::vector<LocalityRow> rows;
    rows.reserve(thetas.size());
    for (size_t a = 0; a < thetas.size(); ++a) {
        double theta = thetas[a];
        if (theta < 0 || theta > std::numbers::pi / 2 + 1e-12)
            fail(Errc::out_of_range,
                 "angles above pi/2 are not realizable with binary vectors");
        auto c = static_cast<size_t>(std::llround(std::cos(theta) * static_cast<double>(weight)));
        c = std::min(c, weight);
        if (2 * weight - c > n)
            fail(Errc::invalid_argument, "n too small for requested weight/angle");
        double achieved = std::acos(static_cast<double>(c) / static_cast<double>(weight));

        Rng pair_rng(derive_seed(seed, "locality.pairs", a));
        std::vector<uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        size_t agree_total = 0;
        ProjectionSet R;
        for (size_t p = 0; p < pairs_per_angle; ++p) {
            if (p % kBatch == 0)
                R = ProjectionSet::sample(n, m, derive_seed(seed, "locality.R", a, p / kBatch));
            // draw 2*weight - c distinct support indices
            size_t need = 2 * weight - c;
            for (size_t k = 0; k < need; ++k) {
                size_t r = k + static_cast<size_t>(pair_rng.uniform(n - k));
                std::swap(idx[k], idx[r]);
            }
            BitVec x1(n), x2(n);
            for (size_t k = 0; k < c; ++k) {
                x1.set(idx[k]);
                x2.set(idx[k]);
            }
            for (size_t k = c; k < weight; ++k) x1.set(idx[k]);
            for (size_t k = weight; k < need; ++k) x2.set(idx[k]);
            agree_total += m - hamming(s3hash(R, x1), s3hash(R, x2));
        }
        LocalityRow row;
        row.target_theta = theta;
        row.achieved_theta = achieved;
        row.predicted = 1.0 - achieved / std::numbers::pi;
        row.measured = static_cast<double>(agree_total) /
                       static_cast<double>(pairs_per_angle * m);
        row.pairs = pairs_per_angle;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace vpass::lsh

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "core/biometric.hpp"

using namespace vpass;
using namespace vpass::bio;

namespace {

BitMatrix matrix_from_rows(const std::vector<std::vector<int>>& rows) {
    BitMatrix m(rows.size(), rows.at(0).size());
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c) m.set(r, c, rows[r][c] != 0);
    return m;
}

IrisTemplate random_template(size_t rows, size_t cols, uint64_t seed) {
    IrisTemplate t{BitMatrix(rows, cols)};
    Rng rng(seed);
    BitVec v(rows * cols);
    v.fill_random(rng);
    t.bits = BitMatrix(rows, cols);
    for (size_t i = 0; i < v.size(); ++i)
        t.bits.set(i / cols, i % cols, v.get(i));
    return t;
}

NoiseMask bernoulli_mask(size_t rows, size_t cols, double p, uint64_t seed) {
    NoiseMask m{BitMatrix(rows, cols)};
    Rng rng(seed);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) m.bits.set(r, c, rng.bernoulli(p));
    return m;
}

NoiseMask zero_mask(size_t rows, size_t cols) { return NoiseMask{BitMatrix(rows, cols)}; }

}  // namespace

TEST_CASE("per-sample masking with an all-zero mask is the identity") {
    IrisTemplate t = random_template(4, 6, 1);
    MaskedTemplate out = apply_mask_type1(t, zero_mask(4, 6));
    CHECK(out.bits == t.bits);
    CHECK(out.mode == MaskingMode::Type1);
}

TEST_CASE("per-sample masking with an all-ones mask annihilates the template") {
    IrisTemplate t = random_template(4, 6, 2);
    NoiseMask ones{BitMatrix(4, 6)};
    for (size_t r = 0; r < 4; ++r)
        for (size_t c = 0; c < 6; ++c) ones.bits.set(r, c, true);
    MaskedTemplate out = apply_mask_type1(t, ones);
    CHECK(out.bits.bits().count_ones() == 0);
}

TEST_CASE("per-sample masking clears exactly the flagged bits") {
    IrisTemplate t{matrix_from_rows({{1, 1, 0, 1}})};
    NoiseMask m{matrix_from_rows({{0, 1, 0, 0}})};
    MaskedTemplate out = apply_mask_type1(t, m);
    CHECK(out.bits == matrix_from_rows({{1, 0, 0, 1}}));
}

TEST_CASE("masking rejects mismatched shapes") {
    IrisTemplate t = random_template(4, 6, 3);
    try {
        (void)apply_mask_type1(t, zero_mask(4, 7));
        FAIL("expected dimension error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::dimension_mismatch);
    }
}

TEST_CASE("global mask of a single mask is that mask") {
    NoiseMask m = bernoulli_mask(3, 5, 0.5, 4);
    CHECK(compute_global_mask({m}).bits == m.bits);
}

TEST_CASE("global mask is the positionwise AND") {
    NoiseMask a{matrix_from_rows({{1, 1, 0}})};
    NoiseMask b{matrix_from_rows({{1, 0, 0}})};
    CHECK(compute_global_mask({a, b}).bits == matrix_from_rows({{1, 0, 0}}));
}

TEST_CASE("an all-zero mask absorbs the global mask") {
    NoiseMask a = bernoulli_mask(3, 5, 0.7, 5);
    NoiseMask b = bernoulli_mask(3, 5, 0.7, 6);
    NoiseMask z = zero_mask(3, 5);
    CHECK(compute_global_mask({a, z, b}).bits.bits().count_ones() == 0);
}

TEST_CASE("global mask of an empty list is an error") {
    try {
        (void)compute_global_mask({});
        FAIL("expected empty-input error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_input);
    }
}

TEST_CASE("global masking with an all-zero mask leaves the template unchanged") {
    IrisTemplate t = random_template(4, 6, 7);
    CHECK(apply_mask_type2(t, zero_mask(4, 6)).bits == t.bits);
}

TEST_CASE("global masking with the sample's own mask matches per-sample masking") {
    IrisTemplate t = random_template(4, 6, 8);
    NoiseMask m = bernoulli_mask(4, 6, 0.3, 9);
    CHECK(apply_mask_type2(t, m).bits == apply_mask_type1(t, m).bits);
}

TEST_CASE("a denser global mask never keeps more bits than per-sample masking") {
    // the population-wide mask discards at least as much as any sparser one
    for (uint64_t s = 0; s < 5; ++s) {
        IrisTemplate t = random_template(20, 480, 100 + s);
        NoiseMask sample_mask = bernoulli_mask(20, 480, 0.1, 200 + s);
        NoiseMask global = sample_mask;
        // densify: add extra corrupt positions on top of the sample mask
        NoiseMask extra = bernoulli_mask(20, 480, 0.2, 300 + s);
        global.bits = BitMatrix(20, 480);
        BitVec merged = sample_mask.bits.bits() | extra.bits.bits();
        for (size_t i = 0; i < merged.size(); ++i)
            global.bits.set(i / 480, i % 480, merged.get(i));
        size_t kept_type1 = apply_mask_type1(t, sample_mask).bits.bits().count_ones();
        size_t kept_type2 = apply_mask_type2(t, global).bits.bits().count_ones();
        CHECK(kept_type2 <= kept_type1);
    }
}

TEST_CASE("linearization is column-major") {
    for (int bits = 0; bits < 16; ++bits) {
        int a = bits & 1, b = (bits >> 1) & 1, c = (bits >> 2) & 1, d = (bits >> 3) & 1;
        MaskedTemplate mt{matrix_from_rows({{a, b}, {c, d}}), MaskingMode::Type1};
        FeatureVector fv = linearize(mt);
        REQUIRE(fv.size() == 4);
        CHECK(fv.get(0) == (a != 0));
        CHECK(fv.get(1) == (c != 0));
        CHECK(fv.get(2) == (b != 0));
        CHECK(fv.get(3) == (d != 0));
    }
}

TEST_CASE("linearizing a zero matrix gives a zero vector") {
    MaskedTemplate mt{BitMatrix(3, 4), MaskingMode::Type1};
    CHECK(linearize(mt).count_ones() == 0);
}

TEST_CASE("full-size linearization puts (row 0, col 1) at index 20") {
    BitMatrix m(20, 480);
    m.set(0, 1, true);
    FeatureVector fv = linearize(MaskedTemplate{m, MaskingMode::Type1});
    CHECK(fv.count_ones() == 1);
    CHECK(fv.get(20));
}

TEST_CASE("rotation by zero steps is the identity") {
    Rng rng(10);
    FeatureVector fv(100);
    fv.fill_random(rng);
    CHECK(rotate(fv, 0, 20) == fv);
}

TEST_CASE("opposite rotations cancel") {
    Rng rng(11);
    FeatureVector fv(100);
    fv.fill_random(rng);
    CHECK(rotate(rotate(fv, 3, 20), -3, 20) == fv);
}

TEST_CASE("rotating by the column count is a full revolution") {
    Rng rng(12);
    FeatureVector fv(100);  // 20 rows x 5 cols
    fv.fill_random(rng);
    CHECK(rotate(fv, 5, 20) == fv);
}

TEST_CASE("one rotation step moves a bit by one column stride") {
    FeatureVector fv(9600);
    fv.set(20, true);
    FeatureVector r = rotate(fv, 1, 20);
    CHECK(r.count_ones() == 1);
    CHECK(r.get(40));
}

TEST_CASE("masked distance of a template against itself is zero") {
    IrisTemplate t = random_template(4, 8, 13);
    NoiseMask m1 = bernoulli_mask(4, 8, 0.2, 14);
    NoiseMask m2 = bernoulli_mask(4, 8, 0.2, 15);
    CHECK(masked_hamming(t, m1, t, m2) == 0.0);
}

TEST_CASE("masked distance of complementary templates is one") {
    IrisTemplate t = random_template(4, 8, 16);
    IrisTemplate inv{BitMatrix(4, 8)};
    for (size_t r = 0; r < 4; ++r)
        for (size_t c = 0; c < 8; ++c) inv.bits.set(r, c, !t.bits.get(r, c));
    CHECK(masked_hamming(t, zero_mask(4, 8), inv, zero_mask(4, 8)) == 1.0);
}

TEST_CASE("masked distance errors when no bit is mutually valid") {
    IrisTemplate t = random_template(2, 3, 17);
    NoiseMask ones{BitMatrix(2, 3)};
    for (size_t r = 0; r < 2; ++r)
        for (size_t c = 0; c < 3; ++c) ones.bits.set(r, c, true);
    try {
        (void)masked_hamming(t, ones, t, ones);
        FAIL("expected no-valid-bits error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::no_valid_bits);
    }
}

TEST_CASE("masked distance matches a per-bit reference on mixed masks") {
    IrisTemplate t1 = random_template(6, 10, 18), t2 = random_template(6, 10, 19);
    NoiseMask m1 = bernoulli_mask(6, 10, 0.25, 20), m2 = bernoulli_mask(6, 10, 0.25, 21);
    size_t diff = 0, valid = 0;
    for (size_t r = 0; r < 6; ++r)
        for (size_t c = 0; c < 10; ++c) {
            if (m1.bits.get(r, c) || m2.bits.get(r, c)) continue;
            ++valid;
            diff += t1.bits.get(r, c) != t2.bits.get(r, c);
        }
    REQUIRE(valid > 0);
    CHECK(masked_hamming(t1, m1, t2, m2) ==
          doctest::Approx(static_cast<double>(diff) / valid).epsilon(1e-12));
}

TEST_CASE("independent random templates sit near distance one half") {
    double sum = 0;
    const int pairs = 1000;
    for (int i = 0; i < pairs; ++i) {
        IrisTemplate a = random_template(20, 480, 1000 + 2 * i);
        IrisTemplate b = random_template(20, 480, 1001 + 2 * i);
        sum += masked_hamming(a, zero_mask(20, 480), b, zero_mask(20, 480));
    }
    CHECK(sum / pairs == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("an exact rotational match is found within the shift window") {
    Rng rng(22);
    FeatureVector fv(9600);
    fv.fill_random(rng);
    FeatureVector shifted = rotate(fv, 3, 20);
    CHECK(min_shift_distance(fv, shifted, 3, 20) == 0.0);
    CHECK(min_shift_distance(fv, shifted, 8, 20) == 0.0);
}

TEST_CASE("a zero shift window degenerates to the plain normalized distance") {
    Rng rng(23);
    FeatureVector a(9600), b(9600);
    a.fill_random(rng);
    b.fill_random(rng);
    double plain = static_cast<double>(hamming(a, b)) / 9600.0;
    CHECK(min_shift_distance(a, b, 0, 20) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("widening the shift window never increases the distance") {
    Rng rng(24);
    FeatureVector a(9600), b(9600);
    a.fill_random(rng);
    b.fill_random(rng);
    double d0 = min_shift_distance(a, b, 0, 20);
    double d4 = min_shift_distance(a, b, 4, 20);
    double d8 = min_shift_distance(a, b, 8, 20);
    CHECK(d4 <= d0);
    CHECK(d8 <= d4);
}

TEST_CASE("feature extraction with a zero mask is plain linearization") {
    IrisTemplate t = random_template(5, 7, 25);
    FeatureVector fv = extract_feature_vector(t, zero_mask(5, 7), MaskingMode::Type1);
    CHECK(fv == linearize(MaskedTemplate{t.bits, MaskingMode::Type1}));
}

TEST_CASE("type-2 extraction with the sample's own mask equals type-1 extraction") {
    IrisTemplate t = random_template(5, 7, 26);
    NoiseMask m = bernoulli_mask(5, 7, 0.3, 27);
    FeatureVector t1 = extract_feature_vector(t, m, MaskingMode::Type1);
    FeatureVector t2 = extract_feature_vector(t, m, MaskingMode::Type2, m);
    CHECK(t1 == t2);
}

TEST_CASE("type-2 extraction without a global mask is an error") {
    IrisTemplate t = random_template(5, 7, 28);
    NoiseMask m = bernoulli_mask(5, 7, 0.3, 29);
    try {
        (void)extract_feature_vector(t, m, MaskingMode::Type2);
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::validation);
    }
}

TEST_CASE("zero intra-subject noise makes all samples of a subject identical") {
    SyntheticDataset ds = synth_generate(3, 4, 0.0, 0.0, 31, 8, 24);
    for (size_t s = 0; s < 3; ++s)
        for (size_t k = 1; k < 4; ++k) CHECK(ds.scan(s, k).tpl.bits == ds.scan(s, 0).tpl.bits);
}

TEST_CASE("generation is seed-deterministic") {
    SyntheticDataset a = synth_generate(4, 3, 0.1, 0.1, 77);
    SyntheticDataset b = synth_generate(4, 3, 0.1, 0.1, 77);
    SyntheticDataset c = synth_generate(4, 3, 0.1, 0.1, 78);
    for (size_t s = 0; s < 4; ++s)
        for (size_t k = 0; k < 3; ++k) {
            CHECK(a.scan(s, k).tpl.bits == b.scan(s, k).tpl.bits);
            CHECK(a.scan(s, k).mask.bits == b.scan(s, k).mask.bits);
        }
    bool any_diff = false;
    for (size_t s = 0; s < 4 && !any_diff; ++s)
        for (size_t k = 0; k < 3 && !any_diff; ++k)
            any_diff = !(a.scan(s, k).tpl.bits == c.scan(s, k).tpl.bits);
    CHECK(any_diff);
}

TEST_CASE("mask density lands near the requested fraction") {
    SyntheticDataset ds = synth_generate(5, 2, 0.1, 0.15, 32);
    for (size_t s = 0; s < 5; ++s)
        for (size_t k = 0; k < 2; ++k) {
            double density =
                static_cast<double>(ds.scan(s, k).mask.bits.bits().count_ones()) / 9600.0;
            CHECK(density == doctest::Approx(0.15).epsilon(0.01));
        }
}

TEST_CASE("intra and inter subject distances match the noise model") {
    const double p = 0.1;
    SyntheticDataset ds = synth_generate(20, 4, p, 0.1, 33);
    double intra_sum = 0;
    size_t intra_n = 0;
    for (size_t s = 0; s < 20; ++s)
        for (size_t k1 = 0; k1 < 4; ++k1)
            for (size_t k2 = k1 + 1; k2 < 4; ++k2) {
                intra_sum += masked_hamming(ds.scan(s, k1).tpl, ds.scan(s, k1).mask,
                                            ds.scan(s, k2).tpl, ds.scan(s, k2).mask);
                ++intra_n;
            }
    // two independently flipped copies differ where exactly one flip happened
    double expected_intra = 2 * p * (1 - p);
    CHECK(std::abs(intra_sum / static_cast<double>(intra_n) - expected_intra) < 0.02);

    double inter_sum = 0;
    size_t inter_n = 0;
    for (size_t s1 = 0; s1 < 20; ++s1)
        for (size_t s2 = s1 + 1; s2 < 20; ++s2) {
            inter_sum += masked_hamming(ds.scan(s1, 0).tpl, ds.scan(s1, 0).mask,
                                        ds.scan(s2, 0).tpl, ds.scan(s2, 0).mask);
            ++inter_n;
        }
    CHECK(inter_sum / static_cast<double>(inter_n) == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("generation rejects out-of-range parameters") {
    CHECK_THROWS_AS((void)synth_generate(0, 2, 0.1, 0.1, 1), Error);
    CHECK_THROWS_AS((void)synth_generate(2, 0, 0.1, 0.1, 1), Error);
    CHECK_THROWS_AS((void)synth_generate(2, 2, 0.6, 0.1, 1), Error);
    CHECK_THROWS_AS((void)synth_generate(2, 2, 0.1, 1.0, 1), Error);
}

TEST_CASE("dataset files persist shape, parameters and every scan") {
    SyntheticDataset ds = synth_generate(3, 2, 0.05, 0.1, 34, 10, 30);
    std::string path = "test_biometric_dataset.jsonl";
    save_dataset_jsonl(ds, path);
    SyntheticDataset back = load_dataset_jsonl(path);
    CHECK(back.subjects == 3);
    CHECK(back.samples_per_subject == 2);
    CHECK(back.rows == 10);
    CHECK(back.cols == 30);
    CHECK(back.p_intra == doctest::Approx(0.05));
    CHECK(back.seed == 34);
    for (size_t s = 0; s < 3; ++s)
        for (size_t k = 0; k < 2; ++k) {
            CHECK(back.scan(s, k).tpl.bits == ds.scan(s, k).tpl.bits);
            CHECK(back.scan(s, k).mask.bits == ds.scan(s, k).mask.bits);
        }
    std::remove(path.c_str());
    CHECK_THROWS_AS((void)load_dataset_jsonl("does_not_exist.jsonl"), Error);
}

TEST_CASE("scan files round trip a template with its mask") {
    SyntheticDataset ds = synth_generate(1, 1, 0.1, 0.1, 35);
    std::string path = "test_biometric_scan.txt";
    write_scan_file(ds.scan(0, 0), path);
    Scan back = read_scan_file(path);
    CHECK(back.tpl.bits == ds.scan(0, 0).tpl.bits);
    CHECK(back.mask.bits == ds.scan(0, 0).mask.bits);
    std::remove(path.c_str());
}

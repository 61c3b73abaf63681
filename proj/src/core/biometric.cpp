#include "biometric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace vpass::bio {

using nlohmann::json;

namespace {

void check_pair(const BitMatrix& a, const BitMatrix& b, const char* what) {
    if (!a.same_shape(b))
        fail(Errc::dimension_mismatch,
             std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                 " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

}  // namespace

MaskedTemplate apply_mask_type1(const IrisTemplate& tpl, const NoiseMask& mask) {
    check_pair(tpl.bits, mask.bits, "template/mask dimension mismatch");
    MaskedTemplate out;
    out.bits = tpl.bits;
    out.bits.bits() = tpl.bits.bits().and_not(mask.bits.bits());
    out.mode = MaskingMode::Type1;
    return out;
}

NoiseMask compute_global_mask(const std::vector<NoiseMask>& masks) {
    if (masks.empty()) fail(Errc::empty_input, "global mask needs at least one mask");
    NoiseMask out = masks.front();
    for (size_t i = 1; i < masks.size(); ++i) {
        check_pair(out.bits, masks[i].bits, "mask dimension mismatch");
        out.bits.bits() = out.bits.bits() & masks[i].bits.bits();
    }
    return out;
}

MaskedTemplate apply_mask_type2(const IrisTemplate& tpl, const NoiseMask& global_mask) {
    check_pair(tpl.bits, global_mask.bits, "template/global mask dimension mismatch");
    MaskedTemplate out;
    out.bits = tpl.bits;
    out.bits.bits() = tpl.bits.bits().and_not(global_mask.bits.bits());
    out.mode = MaskingMode::Type2;
    return out;
}

FeatureVector linearize(const MaskedTemplate& mt) {
    size_t rows = mt.bits.rows(), cols = mt.bits.cols();
    FeatureVector fv(rows * cols);
    for (size_t c = 0; c < cols; ++c)
        for (size_t r = 0; r < rows; ++r)
            if (mt.bits.get(r, c)) fv.set(c * rows + r);
    return fv;
}

FeatureVector rotate(const FeatureVector& fv, int64_t steps, size_t rows) {
    return fv.rotated(steps * static_cast<int64_t>(rows));
}

double masked_hamming(const IrisTemplate& t1, const NoiseMask& m1, const IrisTemplate& t2,
                      const NoiseMask& m2) {
    check_pair(t1.bits, m1.bits, "template/mask dimension mismatch");
    check_pair(t2.bits, m2.bits, "template/mask dimension mismatch");
    check_pair(t1.bits, t2.bits, "template dimension mismatch");
    // mask bits flag corrupt positions, so a position contributes only when
    // it is clean in both samples: the combined mask is the union
    BitVec c_mask = m1.bits.bits() | m2.bits.bits();
    size_t valid = c_mask.size() - c_mask.count_ones();
    if (valid == 0) fail(Errc::no_valid_bits, "mask pair leaves no valid bits");
    BitVec a = t1.bits.bits().and_not(c_mask);
    BitVec b = t2.bits.bits().and_not(c_mask);
    return static_cast<double>(hamming(a, b)) / static_cast<double>(valid);
}

double min_shift_distance(const FeatureVector& fv1, const FeatureVector& fv2, size_t max_shifts,
                          size_t rows) {
    if (fv1.size() != fv2.size()) fail(Errc::dimension_mismatch, "feature vector length mismatch");
    size_t n = fv1.size();
    size_t best = n + 1;
    int64_t window = static_cast<int64_t>(max_shifts);
    for (int64_t s = -window; s <= window; ++s) {
        size_t d = hamming(fv1, rotate(fv2, s, rows));
        best = std::min(best, d);
    }
    return static_cast<double>(best) / static_cast<double>(n);
}

FeatureVector extract_feature_vector(const IrisTemplate& tpl, const NoiseMask& mask,
                                     MaskingMode mode,
                                     const std::optional<NoiseMask>& global_mask) {
    MaskedTemplate mt;
    if (mode == MaskingMode::Type1) {
        mt = apply_mask_type1(tpl, mask);
    } else {
        if (!global_mask)
            fail(Errc::validation, "type2 masking requires a global mask");
        mt = apply_mask_type2(tpl, *global_mask);
    }
    return linearize(mt);
}

const Scan& SyntheticDataset::scan(size_t subject, size_t sample) const {
    if (subject >= scans.size() || sample >= scans[subject].size())
        fail(Errc::out_of_range, "no such subject/sample: " + std::to_string(subject) + "/" +
                                     std::to_string(sample));
    return scans[subject][sample];
}

namespace {

// Band occlusion: k full rows plus a partial run in the next row, totaling
// exactly round(density * rows * cols) corrupt bits.
NoiseMask make_band_mask(size_t rows, size_t cols, double density, size_t row0, size_t col0) {
    NoiseMask mask;
    mask.bits = BitMatrix(rows, cols);
    auto total = static_cast<size_t>(std::llround(density * static_cast<double>(rows * cols)));
    size_t full = total / cols;
    size_t rem = total % cols;
    for (size_t r = 0; r < full; ++r)
        for (size_t c = 0; c < cols; ++c) mask.bits.set(row0 + r, c);
    if (rem > 0)
        for (size_t k = 0; k < rem; ++k) mask.bits.set(row0 + full, (col0 + k) % cols);
    return mask;
}

}  // namespace

SyntheticDataset synth_generate(size_t subjects, size_t samples_per_subject, double p_intra,
                                double mask_density, uint64_t seed, size_t rows, size_t cols) {
    if (p_intra < 0 || p_intra >= 0.5) fail(Errc::validation, "p_intra must be in [0, 0.5)");
    if (mask_density < 0 || mask_density >= 1)
        fail(Errc::validation, "mask_density must be in [0, 1)");
    if (subjects == 0 || samples_per_subject == 0)
        fail(Errc::validation, "subjects and samples_per_subject must be >= 1");
    if (rows < 1 || cols < 1) fail(Errc::validation, "rows and cols must be >= 1");

    SyntheticDataset ds;
    ds.subjects = subjects;
    ds.samples_per_subject = samples_per_subject;
    ds.rows = rows;
    ds.cols = cols;
    ds.p_intra = p_intra;
    ds.mask_density = mask_density;
    ds.seed = seed;
    ds.scans.resize(subjects);

    auto total = static_cast<size_t>(std::llround(mask_density * static_cast<double>(rows * cols)));
    size_t band_rows = total / cols + (total % cols ? 1 : 0);

    for (size_t s = 0; s < subjects; ++s) {
        Rng subject_rng(derive_seed(seed, "synth.subject", s));
        BitMatrix base(rows, cols);
        base.bits().fill_random(subject_rng);
        size_t row0 = band_rows >= rows
                          ? 0
                          : static_cast<size_t>(subject_rng.uniform(rows - band_rows + 1));
        size_t col0 = static_cast<size_t>(subject_rng.uniform(cols));

        ds.scans[s].reserve(samples_per_subject);
        for (size_t k = 0; k < samples_per_subject; ++k) {
            Rng sample_rng(derive_seed(seed, "synth.sample", s, k));
            Scan scan;
            scan.tpl.bits = base;
            scan.tpl.bits.bits().apply_noise(sample_rng, p_intra);
            // the mask drifts a little between samples of one subject
            int64_t jitter = sample_rng.uniform_range(-2, 2);
            size_t col = static_cast<size_t>(
                ((static_cast<int64_t>(col0) + jitter) % static_cast<int64_t>(cols) +
                 static_cast<int64_t>(cols)) %
                static_cast<int64_t>(cols));
            scan.mask = make_band_mask(rows, cols, mask_density, row0, col);
            ds.scans[s].push_back(std::move(scan));
        }
    }
    return ds;
}

void save_dataset_jsonl(const SyntheticDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot open for writing: " + path);
    json header{{"subjects", ds.subjects},
                {"samples_per_subject", ds.samples_per_subject},
                {"rows", ds.rows},
                {"cols", ds.cols},
                {"p_intra", ds.p_intra},
                {"mask_density", ds.mask_density},
                {"seed", ds.seed}};
    out << header.dump() << '\n';
    for (size_t s = 0; s < ds.subjects; ++s) {
        for (size_t k = 0; k < ds.samples_per_subject; ++k) {
            const Scan& scan = ds.scans[s][k];
            json line{{"subject", s},
                      {"sample", k},
                      {"template", matrix_record_string(scan.tpl.bits)},
                      {"mask", matrix_record_string(scan.mask.bits)}};
            out << line.dump() << '\n';
        }
    }
    if (!out) fail(Errc::io, "write failed: " + path);
}

SyntheticDataset load_dataset_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open dataset: " + path);
    std::string line;
    if (!std::getline(in, line)) fail(Errc::parse, "dataset file is empty: " + path);
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad dataset header: ") + e.what());
    }
    SyntheticDataset ds;
    ds.subjects = header.at("subjects").get<size_t>();
    ds.samples_per_subject = header.at("samples_per_subject").get<size_t>();
    ds.rows = header.at("rows").get<size_t>();
    ds.cols = header.at("cols").get<size_t>();
    ds.p_intra = header.at("p_intra").get<double>();
    ds.mask_density = header.at("mask_density").get<double>();
    ds.seed = header.at("seed").get<uint64_t>();
    ds.scans.assign(ds.subjects, std::vector<Scan>(ds.samples_per_subject));

    size_t count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(Errc::parse, std::string("bad dataset line: ") + e.what());
        }
        size_t s = j.at("subject").get<size_t>();
        size_t k = j.at("sample").get<size_t>();
        if (s >= ds.subjects || k >= ds.samples_per_subject)
            fail(Errc::parse, "dataset line out of declared range");
        Scan scan;
        scan.tpl.bits = matrix_from_record_string(j.at("template").get<std::string>());
        scan.mask.bits = matrix_from_record_string(j.at("mask").get<std::string>());
        if (scan.tpl.bits.rows() != ds.rows || scan.tpl.bits.cols() != ds.cols ||
            !scan.tpl.bits.same_shape(scan.mask.bits))
            fail(Errc::parse, "dataset record dimensions disagree with header");
        ds.scans[s][k] = std::move(scan);
        ++count;
    }
    if (count != ds.subjects * ds.samples_per_subject)
        fail(Errc::parse, "dataset record count does not match header");
    return ds;
}

void write_scan_file(const Scan& scan, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot open for writing: " + path);
    write_matrix_record(out, scan.tpl.bits);
    write_matrix_record(out, scan.mask.bits);
    if (!out) fail(Errc::io, "write failed: " + path);
}

Scan read_scan_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open scan file: " + path);
    auto tpl = read_matrix_record(in);
    auto mask = read_matrix_record(in);
    if (!tpl || !mask) fail(Errc::parse, "scan file must hold a template and a mask record");
    if (!tpl->same_shape(*mask)) fail(Errc::dimension_mismatch, "scan template/mask shape mismatch");
    Scan scan;
    scan.tpl.bits = std::move(*tpl);
    scan.mask.bits = std::move(*mask);
    return scan;
}

}  // namespace vpass::bio

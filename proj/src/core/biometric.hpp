#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "bitvec.hpp"
#include "config.hpp"

namespace vpass::bio {

// Extracted iris pattern, a rows x cols binary matrix.
struct IrisTemplate {
    BitMatrix bits;
};

// Corruption mask paired with a template: 1 = corrupt bit, 0 = valid bit.
struct NoiseMask {
    BitMatrix bits;
};

struct MaskedTemplate {
    BitMatrix bits;
    MaskingMode mode = MaskingMode::Type1;
};

// Column-linearized masked template, length rows*cols.
using FeatureVector = BitVec;

struct Scan {
    IrisTemplate tpl;
    NoiseMask mask;
};

// masked = template AND NOT mask, per-sample mask (type 1)
MaskedTemplate apply_mask_type1(const IrisTemplate& tpl, const NoiseMask& mask);

// positionwise AND of all masks
NoiseMask compute_global_mask(const std::vector<NoiseMask>& masks);

// masked = template AND NOT global_mask (type 2)
MaskedTemplate apply_mask_type2(const IrisTemplate& tpl, const NoiseMask& global_mask);

// Columns concatenated left to right, each read top to bottom.
FeatureVector linearize(const MaskedTemplate& mt);

// Cyclic shift by steps * rows bits; one step corresponds to one template
// column rotation. Positive steps move content toward higher indices.
FeatureVector rotate(const FeatureVector& fv, int64_t steps, size_t rows);

// Normalized Hamming distance over mutually valid bits. c_mask = m1 AND m2;
// both templates are masked with NOT c_mask and the XOR popcount is divided
// by the number of positions where c_mask = 0.
double masked_hamming(const IrisTemplate& t1, const NoiseMask& m1, const IrisTemplate& t2,
                      const NoiseMask& m2);

// Minimum normalized Hamming distance over shifts in [-max_shifts, +max_shifts].
double min_shift_distance(const FeatureVector& fv1, const FeatureVector& fv2, size_t max_shifts,
                          size_t rows);

// Mask-then-linearize composition. Type2 requires a global mask.
FeatureVector extract_feature_vector(const IrisTemplate& tpl, const NoiseMask& mask,
                                     MaskingMode mode,
                                     const std::optional<NoiseMask>& global_mask = std::nullopt);

struct SyntheticDataset {
    size_t subjects = 0;
    size_t samples_per_subject = 0;
    size_t rows = 0, cols = 0;
    double p_intra = 0;
    double mask_density = 0;
    uint64_t seed = 0;
    // indexed [subject][sample]
    std::vector<std::vector<Scan>> scans;

    const Scan& scan(size_t subject, size_t sample) const;
};

// Synthetic substitute for an upstream image pipeline. Each subject gets a
// uniform base template; samples flip bits independently at rate p_intra.
// Masks are contiguous row bands (eyelid-style occlusion) with subject-stable
// placement and a small per-sample column jitter. Fully seed-deterministic.
SyntheticDataset synth_generate(size_t subjects, size_t samples_per_subject, double p_intra,
                                double mask_density, uint64_t seed, size_t rows = 20,
                                size_t cols = 480);

// JSON Lines dataset persistence: {"subject":i,"sample":j,"template":rec,"mask":rec}
void save_dataset_jsonl(const SyntheticDataset& ds, const std::string& path);
SyntheticDataset load_dataset_jsonl(const std::string& path);

void write_scan_file(const Scan& scan, const std::string& path);
Scan read_scan_file(const std::string& path);

}  // namespace vpass::bio

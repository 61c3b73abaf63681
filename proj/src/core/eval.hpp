#pragma once

#include <string>
#include <vector>

#include "biometric.hpp"
#include "config.hpp"
#include "lsh.hpp"

namespace vpass::eval {

enum class Domain { Raw, Hashed };
Domain domain_from_string(const std::string& s);
const char* domain_name(Domain d);

struct FarFrrRow {
    double threshold = 0;
    double far = 0;  // percent of impostor pairs with distance < threshold
    double frr = 0;  // percent of genuine pairs with distance >= threshold
    size_t genuine_comparisons = 0;
    size_t impostor_comparisons = 0;

    bool operator==(const FarFrrRow&) const = default;
};

// Feature vectors of every scan in the dataset under cfg's masking mode
// (type-2 derives the population mask from the dataset itself), flattened in
// (subject, sample) order.
std::vector<bio::FeatureVector> extract_feature_vectors(const bio::SyntheticDataset& ds,
                                                        const Config& cfg);

// Threshold sweep over all same-subject pairs (genuine) and a seeded
// subsample of cross-subject pairs (impostor, capped at
// impostor_cap_factor * genuine). Raw domain scores min_shift_distance over
// linearized masked templates; hashed domain scores hash_hamming of the
// unrotated hashes, matching the protocol path. Percentages carry 3 decimals.
std::vector<FarFrrRow> run_far_frr(const bio::SyntheticDataset& ds, Domain domain,
                                   const std::vector<double>& thresholds, const Config& cfg);

struct SecurityReport {
    // input-hiding probe (best single-hash-bit predictor)
    size_t advantage_n = 0, advantage_m = 0, advantage_trials = 0;
    double max_advantage = 0;
    double mean_advantage = 0;
    double advantage_bound = 0.05;
    bool advantage_ok = false;
    bool degenerate_projections = false;  // all-zero projection set

    // exhaustive preimage census at small (n, m)
    size_t census_n = 0, census_m = 0, census_trials = 0;
    std::vector<size_t> census_counts;  // preimage-set size per trial
    double census_median = 0;
    double census_expected = 0;      // 2^(n-m)
    double census_factor_bound = 4;  // median within this factor of expected
    bool census_ok = false;

    // marginal-entropy upper bound vs the hiding-regime threshold m + lambda
    double entropy_bits = 0;
    size_t entropy_samples = 0;
    double entropy_threshold = 0;
    bool entropy_ok = false;

    bool all_ok() const { return advantage_ok && census_ok && entropy_ok; }
    std::string to_json() const;
};

// True when every trit of every projection is zero; such a set hashes all
// inputs identically and makes the advantage probe vacuous.
bool projections_degenerate(const lsh::ProjectionSet& R);

// Runs the three probes using cfg for dimensions, dataset parameters and
// seed. advantage_trials = 0 picks the default (5000).
SecurityReport run_security_suite(const Config& cfg, size_t advantage_trials = 0,
                                  size_t census_n = 12, size_t census_m = 4,
                                  size_t census_trials = 50);

// Executes a JSON scenario (list of {op, ...} steps) over one simulated
// ledger and one or more passport nodes. Returns a deterministic JSONL
// transcript: one line per step with the chain height and redacted results
// (IDs become stable aliases user-0, user-1, ...), then a summary line with
// per-node state digests and the chain verification verdict.
std::string run_scenario(const std::string& scenario_json, const Config& cfg);

// Column order: threshold, far, frr, genuine_comparisons, impostor_comparisons.
void export_report(const std::vector<FarFrrRow>& rows, const std::string& path,
                   const std::string& format);
std::vector<FarFrrRow> parse_report(const std::string& path, const std::string& format);

}  // namespace vpass::eval

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "biometric.hpp"
#include "config.hpp"
#include "ledger.hpp"
#include "lsh.hpp"

namespace vpass::passport {

struct VaccinationRecord {
    std::string vaccine;
    uint32_t dose = 1;
    std::string date;  // ISO-8601, YYYY-MM-DD
    std::string issuer;
    std::optional<std::string> free_text;

    void validate() const;
    // sorted-key single-line JSON; the on-chain byte form
    std::string canonical_json() const;
    static VaccinationRecord from_json(const std::string& text);

    bool operator==(const VaccinationRecord&) const = default;
};

void validate_dob(const std::string& dob);        // dd/mm/yyyy
void validate_gender(const std::string& gender);  // male | female | other

// System-wide public parameters: the keyed 256-bit hash H1, the projection
// set H2, and the matching threshold. Every node must hold identical params
// or hashes and IDs will not line up.
struct PassportParams {
    uint64_t system_seed = 0;
    size_t lambda = 128;
    double threshold = 0.3;
    size_t rows = 20, cols = 480;
    size_t max_shifts = 8;
    MaskingMode masking_mode = MaskingMode::Type1;
    bool rotation_compensation = false;
    Bytes h1_key;                          // 32 bytes; selects the H1 family member
    lsh::ProjectionSet projections;        // H2
    std::optional<BitMatrix> global_mask;  // required when masking_mode = Type2

    static PassportParams setup(const Config& cfg,
                                const std::optional<BitMatrix>& global_mask = std::nullopt);

    size_t n() const { return rows * cols; }
    size_t m() const { return projections.m(); }

    // ID = H1(dob || gender || hscan), fields length-prefixed
    Digest compute_id(const std::string& dob, const std::string& gender,
                      const lsh::HashVector& hscan) const;
    // feature extraction + H2, the protocol hashing path
    lsh::HashVector hash_scan(const bio::Scan& scan) const;

    std::string to_json() const;
    static PassportParams from_json(const std::string& text);
    void save(const std::string& path) const;
    static PassportParams load(const std::string& path);
};

struct AddRecordReceipt {
    Digest id{};
    bool enrolled = false;  // true when the call fell through to Enroll
};

// One participant's view of the system: synchronized local state plus the
// protocol operations. Mutating operations require party credentials; a
// credential-less node can still sync, authenticate and fetch.
class PassportNode {
public:
    PassportNode(PassportParams params, ledger::Ledger* chain, uint64_t node_seed);
    PassportNode(PassportParams params, ledger::Ledger* chain, uint64_t node_seed,
                 std::string party_id, Bytes secret_key);

    const PassportParams& params() const { return params_; }

    // pull blocks [num_synced, chain end) into the local view
    void sync();

    std::optional<Digest> authenticate(const std::string& dob, const std::string& gender,
                                       const bio::Scan& scan);
    Digest enroll(const std::string& dob, const std::string& gender, const bio::Scan& scan,
                  const VaccinationRecord& init_record);
    AddRecordReceipt add_record(const std::string& dob, const std::string& gender,
                                const bio::Scan& scan, const VaccinationRecord& record);
    std::vector<VaccinationRecord> fetch_records(const std::string& dob, const std::string& gender,
                                                 const bio::Scan& scan);

    uint64_t num_synced_blocks() const { return num_blocks_; }
    const std::set<Digest>& ids() const { return ids_; }
    const std::set<std::pair<Digest, std::string>>& records() const { return records_; }
    const std::set<BitVec>& hscans() const { return hscans_; }
    // times authenticate found >1 in-threshold candidate mapping to a known ID
    uint64_t ambiguous_matches() const { return ambiguous_matches_; }
    const std::vector<std::string>& sync_warnings() const { return sync_warnings_; }

    // digest of the synchronized view (ids, records, hscans); equal for any
    // two nodes that synced the same chain prefix
    Digest state_digest() const;

    // node-local state (not the ledger) as JSON, for CLI persistence
    std::string state_to_json() const;
    void state_from_json(const std::string& text);

private:
    std::vector<lsh::HashVector> candidate_hashes(const bio::Scan& scan) const;
    void require_credentials() const;

    PassportParams params_;
    ledger::Ledger* chain_ = nullptr;
    uint64_t node_seed_ = 0;
    std::optional<std::string> party_id_;
    Bytes secret_key_;

    uint64_t num_blocks_ = 0;
    std::set<Digest> ids_;
    std::set<std::pair<Digest, std::string>> records_;
    std::set<BitVec> hscans_;
    uint64_t enroll_counter_ = 0;
    uint64_t ambiguous_matches_ = 0;
    std::vector<std::string> sync_warnings_;
};

}  // namespace vpass::passport

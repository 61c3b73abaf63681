#include "passport.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace vpass::passport {

using nlohmann::json;

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
}

int digits_to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

}  // namespace

void validate_dob(const std::string& dob) {
    if (dob.size() != 10 || dob[2] != '/' || dob[5] != '/' ||
        !all_digits(std::string_view(dob).substr(0, 2)) ||
        !all_digits(std::string_view(dob).substr(3, 2)) ||
        !all_digits(std::string_view(dob).substr(6, 4)))
        fail(Errc::validation, "dob must be dd/mm/yyyy, got '" + dob + "'");
    int dd = digits_to_int(std::string_view(dob).substr(0, 2));
    int mm = digits_to_int(std::string_view(dob).substr(3, 2));
    if (dd < 1 || dd > 31 || mm < 1 || mm > 12)
        fail(Errc::validation, "dob out of range: '" + dob + "'");
}

void validate_gender(const std::string& gender) {
    if (gender != "male" && gender != "female" && gender != "other")
        fail(Errc::validation, "gender must be male, female or other, got '" + gender + "'");
}

void VaccinationRecord::validate() const {
    if (vaccine.empty()) fail(Errc::validation, "record needs a vaccine name");
    if (dose < 1) fail(Errc::validation, "dose must be >= 1");
    if (issuer.empty()) fail(Errc::validation, "record needs an issuer");
    if (date.size() != 10 || date[4] != '-' || date[7] != '-' ||
        !all_digits(std::string_view(date).substr(0, 4)) ||
        !all_digits(std::string_view(date).substr(5, 2)) ||
        !all_digits(std::string_view(date).substr(8, 2)))
        fail(Errc::validation, "date must be YYYY-MM-DD, got '" + date + "'");
    int mm = digits_to_int(std::string_view(date).substr(5, 2));
    int dd = digits_to_int(std::string_view(date).substr(8, 2));
    if (mm < 1 || mm > 12 || dd < 1 || dd > 31)
        fail(Errc::validation, "date out of range: '" + date + "'");
}

std::string VaccinationRecord::canonical_json() const {
    json j{{"date", date}, {"dose", dose}, {"issuer", issuer}, {"vaccine", vaccine}};
    if (free_text) j["free_text"] = *free_text;
    return j.dump();  // nlohmann objects iterate in sorted key order
}

VaccinationRecord VaccinationRecord::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad record JSON: ") + e.what());
    }
    if (!j.is_object()) fail(Errc::parse, "record must be a JSON object");
    VaccinationRecord rec;
    try {
        rec.vaccine = j.at("vaccine").get<std::string>();
        rec.dose = j.at("dose").get<uint32_t>();
        rec.date = j.at("date").get<std::string>();
        rec.issuer = j.at("issuer").get<std::string>();
        if (j.contains("free_text")) rec.free_text = j.at("free_text").get<std::string>();
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad record JSON: ") + e.what());
    }
    for (const auto& [key, _] : j.items())
        if (key != "vaccine" && key != "dose" && key != "date" && key != "issuer" &&
            key != "free_text")
            fail(Errc::parse, "unknown record field '" + key + "'");
    rec.validate();
    return rec;
}

PassportParams PassportParams::setup(const Config& cfg,
                                     const std::optional<BitMatrix>& global_mask) {
    cfg.validate();
    PassportParams p;
    p.system_seed = cfg.seed;
    p.lambda = cfg.lambda;
    p.threshold = cfg.threshold;
    p.rows = cfg.rows;
    p.cols = cfg.cols;
    p.max_shifts = cfg.max_shifts;
    p.masking_mode = cfg.masking_mode;
    p.rotation_compensation = cfg.rotation_compensation;
    Bytes kbuf;
    append_str(kbuf, "passport.h1key");
    append_u64(kbuf, cfg.seed);
    Digest kd = sha256(kbuf);
    p.h1_key.assign(kd.begin(), kd.end());
    p.projections = lsh::sample_projections(cfg.feature_bits(), cfg.hash_bits,
                                            derive_seed(cfg.seed, "passport.h2"));
    if (cfg.masking_mode == MaskingMode::Type2) {
        if (!global_mask)
            fail(Errc::validation, "type2 masking requires a global mask at setup");
        if (global_mask->rows() != cfg.rows || global_mask->cols() != cfg.cols)
            fail(Errc::dimension_mismatch, "global mask dimensions disagree with config");
        p.global_mask = global_mask;
    }
    return p;
}

Digest PassportParams::compute_id(const std::string& dob, const std::string& gender,
                                  const lsh::HashVector& hscan) const {
    validate_dob(dob);
    validate_gender(gender);
    if (hscan.size() != m()) fail(Errc::dimension_mismatch, "hash length does not match params");
    Bytes msg;
    append_str(msg, dob);
    append_str(msg, gender);
    append_u32(msg, static_cast<uint32_t>(hscan.size()));
    append_bytes(msg, hscan.to_packed_bytes());
    return blake2b_keyed(h1_key, msg);
}

lsh::HashVector PassportParams::hash_scan(const bio::Scan& scan) const {
    if (scan.tpl.bits.rows() != rows || scan.tpl.bits.cols() != cols)
        fail(Errc::dimension_mismatch, "scan dimensions disagree with params");
    bio::FeatureVector fv =
        bio::extract_feature_vector(scan.tpl, scan.mask, masking_mode, global_mask
                                                                           ? std::optional<bio::NoiseMask>(
                                                                                 bio::NoiseMask{*global_mask})
                                                                           : std::nullopt);
    return lsh::s3hash(projections, fv);
}

std::string PassportParams::to_json() const {
    json j{{"system_seed", system_seed},
           {"lambda", lambda},
           {"threshold", threshold},
           {"rows", rows},
           {"cols", cols},
           {"max_shifts", max_shifts},
           {"masking_mode", masking_mode_name(masking_mode)},
           {"rotation_compensation", rotation_compensation},
           {"h1_key", to_hex(h1_key)},
           {"projections", projections.to_string()}};
    if (global_mask) j["global_mask"] = matrix_record_string(*global_mask);
    return j.dump(2);
}

PassportParams PassportParams::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad params JSON: ") + e.what());
    }
    PassportParams p;
    try {
        p.system_seed = j.at("system_seed").get<uint64_t>();
        p.lambda = j.at("lambda").get<size_t>();
        p.threshold = j.at("threshold").get<double>();
        p.rows = j.at("rows").get<size_t>();
        p.cols = j.at("cols").get<size_t>();
        p.max_shifts = j.at("max_shifts").get<size_t>();
        p.masking_mode = masking_mode_from_string(j.at("masking_mode").get<std::string>());
        p.rotation_compensation = j.at("rotation_compensation").get<bool>();
        p.h1_key = from_hex(j.at("h1_key").get<std::string>());
        p.projections = lsh::ProjectionSet::parse(j.at("projections").get<std::string>());
        if (j.contains("global_mask"))
            p.global_mask = matrix_from_record_string(j.at("global_mask").get<std::string>());
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad params JSON: ") + e.what());
    }
    if (p.h1_key.size() != 32) fail(Errc::parse, "h1_key must be 32 bytes");
    if (p.projections.n() != p.rows * p.cols)
        fail(Errc::parse, "projection input length disagrees with template dimensions");
    if (p.threshold <= 0 || p.threshold >= 1) fail(Errc::parse, "threshold must be in (0,1)");
    if (p.masking_mode == MaskingMode::Type2 && !p.global_mask)
        fail(Errc::parse, "type2 params lack a global mask");
    return p;
}

void PassportParams::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot open for writing: " + path);
    out << to_json() << '\n';
    if (!out) fail(Errc::io, "write failed: " + path);
}

PassportParams PassportParams::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open params: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

PassportNode::PassportNode(PassportParams params, ledger::Ledger* chain, uint64_t node_seed)
    : params_(std::move(params)), chain_(chain), node_seed_(node_seed) {
    if (!chain_) fail(Errc::invalid_argument, "node needs a ledger");
}

PassportNode::PassportNode(PassportParams params, ledger::Ledger* chain, uint64_t node_seed,
                           std::string party_id, Bytes secret_key)
    : PassportNode(std::move(params), chain, node_seed) {
    party_id_ = std::move(party_id);
    secret_key_ = std::move(secret_key);
}

void PassportNode::require_credentials() const {
    if (!party_id_ || secret_key_.empty())
        fail(Errc::unauthorized, "node has no party credentials");
}

void PassportNode::sync() {
    size_t end = chain_->num_blocks();
    for (uint64_t h = num_blocks_; h < end; ++h) {
        const ledger::Block& b = chain_->block(h);
        for (const auto& tx : b.transactions) {
            try {
                if (tx.type == "rec") {
                    auto [id, rec_json] = ledger::decode_rec_payload(tx.payload);
                    VaccinationRecord::from_json(rec_json);  // shape check only
                    ids_.insert(id);
                    records_.insert({id, rec_json});
                } else if (tx.type == "hscan") {
                    hscans_.insert(BitVec::from_packed_bytes(tx.payload, params_.m()));
                } else if (tx.type != "member") {
                    fail(Errc::parse, "unknown transaction type " + tx.type);
                }
            } catch (const Error& e) {
                sync_warnings_.push_back("block " + std::to_string(h) + ": skipped " + tx.type +
                                         " transaction: " + e.what());
            }
        }
    }
    num_blocks_ = end;
}

std::vector<lsh::HashVector> PassportNode::candidate_hashes(const bio::Scan& scan) const {
    std::vector<lsh::HashVector> out;
    out.push_back(params_.hash_scan(scan));
    if (params_.rotation_compensation) {
        bio::FeatureVector fv = bio::extract_feature_vector(
            scan.tpl, scan.mask, params_.masking_mode,
            params_.global_mask ? std::optional<bio::NoiseMask>(bio::NoiseMask{*params_.global_mask})
                                : std::nullopt);
        for (size_t s = 1; s <= params_.max_shifts; ++s) {
            out.push_back(lsh::s3hash(params_.projections,
                                      bio::rotate(fv, static_cast<int64_t>(s), params_.rows)));
            out.push_back(lsh::s3hash(params_.projections,
                                      bio::rotate(fv, -static_cast<int64_t>(s), params_.rows)));
        }
    }
    return out;
}

std::optional<Digest> PassportNode::authenticate(const std::string& dob, const std::string& gender,
                                                 const bio::Scan& scan) {
    validate_dob(dob);
    validate_gender(gender);
    sync();
    std::vector<lsh::HashVector> mine = candidate_hashes(scan);
    for (const auto& h : mine) {
        Digest id = params_.compute_id(dob, gender, h);
        if (ids_.contains(id)) return id;
    }
    // near matches: stored hashes within threshold, closest first
    std::vector<std::pair<double, const BitVec*>> near;
    for (const auto& stored : hscans_) {
        double d = 2.0;
        for (const auto& h : mine) d = std::min(d, lsh::hash_hamming(h, stored));
        if (d < params_.threshold) near.push_back({d, &stored});
    }
    std::sort(near.begin(), near.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return *a.second < *b.second;
    });
    std::optional<Digest> found;
    size_t matches = 0;
    for (const auto& [d, stored] : near) {
        Digest id = params_.compute_id(dob, gender, *stored);
        if (ids_.contains(id)) {
            if (!found) found = id;
            ++matches;
        }
    }
    if (matches > 1) ++ambiguous_matches_;
    return found;
}

Digest PassportNode::enroll(const std::string& dob, const std::string& gender,
                            const bio::Scan& scan, const VaccinationRecord& init_record) {
    require_credentials();
    validate_dob(dob);
    validate_gender(gender);
    init_record.validate();
    sync();
    lsh::HashVector h = params_.hash_scan(scan);
    Digest id = params_.compute_id(dob, gender, h);
    if (ids_.contains(id))
        fail(Errc::duplicate, "user already enrolled (hash storage happens once per user)");
    std::string rec_json = init_record.canonical_json();

    ledger::Transaction rec_tx;
    rec_tx.type = "rec";
    rec_tx.payload = ledger::encode_rec_payload(id, rec_json);
    rec_tx.party = *party_id_;
    chain_->broadcast(*party_id_, secret_key_, std::move(rec_tx));

    Rng rng(derive_seed(node_seed_, "enroll.delay", enroll_counter_++));
    uint64_t t = 1 + rng.uniform(100);  // delay in {1, ..., 100} ticks
    ledger::Transaction hscan_tx;
    hscan_tx.type = "hscan";
    hscan_tx.payload = h.to_packed_bytes();
    chain_->anon_broadcast(secret_key_, std::move(hscan_tx), t);

    ids_.insert(id);
    records_.insert({id, rec_json});
    hscans_.insert(h);
    return id;
}

AddRecordReceipt PassportNode::add_record(const std::string& dob, const std::string& gender,
                                          const bio::Scan& scan, const VaccinationRecord& record) {
    require_credentials();
    record.validate();
    std::optional<Digest> id = authenticate(dob, gender, scan);
    if (!id) return AddRecordReceipt{enroll(dob, gender, scan, record), true};
    std::string rec_json = record.canonical_json();
    ledger::Transaction tx;
    tx.type = "rec";
    tx.payload = ledger::encode_rec_payload(*id, rec_json);
    tx.party = *party_id_;
    chain_->broadcast(*party_id_, secret_key_, std::move(tx));
    records_.insert({*id, rec_json});
    return AddRecordReceipt{*id, false};
}

std::vector<VaccinationRecord> PassportNode::fetch_records(const std::string& dob,
                                                           const std::string& gender,
                                                           const bio::Scan& scan) {
    std::optional<Digest> id = authenticate(dob, gender, scan);
    std::vector<VaccinationRecord> out;
    if (!id) return out;
    for (const auto& [rid, rec_json] : records_)
        if (rid == *id) out.push_back(VaccinationRecord::from_json(rec_json));
    return out;
}

Digest PassportNode::state_digest() const {
    Bytes buf;
    append_u32(buf, static_cast<uint32_t>(ids_.size()));
    for (const auto& id : ids_) append_bytes(buf, id);
    append_u32(buf, static_cast<uint32_t>(records_.size()));
    for (const auto& [id, rec] : records_) {
        append_bytes(buf, id);
        append_str(buf, rec);
    }
    append_u32(buf, static_cast<uint32_t>(hscans_.size()));
    for (const auto& h : hscans_) {
        append_u32(buf, static_cast<uint32_t>(h.size()));
        append_bytes(buf, h.to_packed_bytes());
    }
    return sha256(buf);
}

std::string PassportNode::state_to_json() const {
    json j;
    j["num_blocks"] = num_blocks_;
    j["enroll_counter"] = enroll_counter_;
    j["ambiguous_matches"] = ambiguous_matches_;
    j["ids"] = json::array();
    for (const auto& id : ids_) j["ids"].push_back(to_hex(id));
    j["records"] = json::array();
    for (const auto& [id, rec] : records_) j["records"].push_back({{"id", to_hex(id)}, {"record", rec}});
    j["hscans"] = json::array();
    for (const auto& h : hscans_) j["hscans"].push_back(h.to_hex());
    return j.dump(2);
}

void PassportNode::state_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad node state: ") + e.what());
    }
    std::set<Digest> ids;
    std::set<std::pair<Digest, std::string>> records;
    std::set<BitVec> hscans;
    uint64_t num_blocks = 0, enroll_counter = 0, ambiguous = 0;
    try {
        num_blocks = j.at("num_blocks").get<uint64_t>();
        enroll_counter = j.at("enroll_counter").get<uint64_t>();
        ambiguous = j.at("ambiguous_matches").get<uint64_t>();
        for (const auto& s : j.at("ids")) {
            Bytes b = from_hex(s.get<std::string>());
            if (b.size() != 32) fail(Errc::parse, "id must be 32 bytes");
            Digest id{};
            std::copy(b.begin(), b.end(), id.begin());
            ids.insert(id);
        }
        for (const auto& r : j.at("records")) {
            Bytes b = from_hex(r.at("id").get<std::string>());
            if (b.size() != 32) fail(Errc::parse, "id must be 32 bytes");
            Digest id{};
            std::copy(b.begin(), b.end(), id.begin());
            records.insert({id, r.at("record").get<std::string>()});
        }
        for (const auto& s : j.at("hscans"))
            hscans.insert(BitVec::from_hex(s.get<std::string>(), params_.m()));
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad node state: ") + e.what());
    }
    num_blocks_ = num_blocks;
    enroll_counter_ = enroll_counter;
    ambiguous_matches_ = ambiguous;
    ids_ = std::move(ids);
    records_ = std::move(records);
    hscans_ = std::move(hscans);
}

}  // namespace vpass::passport

// C interface over the vaccpass core. Exceptions are caught at the boundary
// and converted into status codes plus a thread-local message.

#include "vaccpass.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>

#include "core/biometric.hpp"
#include "core/common.hpp"
#include "core/config.hpp"
#include "core/eval.hpp"
#include "core/ledger.hpp"
#include "core/lsh.hpp"
#include "core/passport.hpp"

using nlohmann::json;

struct vp_config {
    vpass::Config cfg;
};
struct vp_dataset {
    vpass::bio::SyntheticDataset ds;
};
struct vp_projection {
    vpass::lsh::ProjectionSet ps;
};
struct vp_ledger {
    vpass::ledger::Ledger lg;
};
struct vp_node {
    std::string dir;
    size_t index = 0;
    // heap-allocated so the chain pointer held by the node stays stable
    std::unique_ptr<vpass::ledger::Ledger> chain;
    std::unique_ptr<vpass::passport::PassportNode> node;
};

namespace {

thread_local std::string g_last_error;

vp_status status_from(vpass::Errc c) {
    using vpass::Errc;
    switch (c) {
        case Errc::invalid_argument: return VP_ERR_INVALID_ARGUMENT;
        case Errc::dimension_mismatch: return VP_ERR_DIMENSION;
        case Errc::validation: return VP_ERR_VALIDATION;
        case Errc::unauthorized: return VP_ERR_UNAUTHORIZED;
        case Errc::bad_signature: return VP_ERR_BAD_SIGNATURE;
        case Errc::out_of_range: return VP_ERR_OUT_OF_RANGE;
        case Errc::empty_input: return VP_ERR_EMPTY_INPUT;
        case Errc::no_valid_bits: return VP_ERR_NO_VALID_BITS;
        case Errc::too_large: return VP_ERR_TOO_LARGE;
        case Errc::duplicate: return VP_ERR_DUPLICATE;
        case Errc::not_found: return VP_ERR_NOT_FOUND;
        case Errc::io: return VP_ERR_IO;
        case Errc::parse: return VP_ERR_PARSE;
        case Errc::state: return VP_ERR_STATE;
        case Errc::bounds_failed: return VP_ERR_BOUNDS;
        case Errc::chain_invalid: return VP_ERR_CHAIN;
        case Errc::internal: return VP_ERR_INTERNAL;
    }
    return VP_ERR_INTERNAL;
}

template <typename F>
vp_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return VP_OK;
    } catch (const vpass::Error& e) {
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return VP_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return VP_ERR_INTERNAL;
    }
}

vp_status arg_error(const char* what) {
    g_last_error = what;
    return VP_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) vpass::fail(vpass::Errc::internal, "out of memory");
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) vpass::fail(vpass::Errc::io, "cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) vpass::fail(vpass::Errc::io, "cannot open for writing: " + path);
    out << text;
    if (!out) vpass::fail(vpass::Errc::io, "write failed: " + path);
}

std::optional<vpass::BitMatrix> dataset_population_mask(const vpass::bio::SyntheticDataset& ds,
                                                        vpass::MaskingMode mode) {
    if (mode != vpass::MaskingMode::Type2) return std::nullopt;
    std::vector<vpass::bio::NoiseMask> masks;
    for (const auto& subject : ds.scans)
        for (const auto& scan : subject) masks.push_back(scan.mask);
    return vpass::bio::compute_global_mask(masks).bits;
}

json tx_to_json(const vpass::ledger::Transaction& tx) {
    json j;
    j["type"] = tx.type;
    j["payload"] = vpass::to_hex(tx.payload);
    if (tx.party)
        j["party"] = *tx.party;
    else
        j["party"] = nullptr;
    if (tx.signature)
        j["signature"] = vpass::to_hex(*tx.signature);
    else
        j["signature"] = nullptr;
    return j;
}

json block_to_json(const vpass::ledger::Block& b) {
    json j;
    j["height"] = b.height;
    j["hash"] = vpass::to_hex(b.hash);
    j["prev_hash"] = vpass::to_hex(b.prev_hash);
    j["producer"] = b.producer;
    j["transactions"] = json::array();
    for (const auto& tx : b.transactions) j["transactions"].push_back(tx_to_json(tx));
    return j;
}

struct Keyfile {
    uint64_t seed = 0;
    std::vector<vpass::ledger::Party> parties;
    std::vector<vpass::ledger::KeyPair> keys;
};

std::string keys_path(const std::string& dir) { return dir + "/keys.json"; }

void save_keyfile(const std::string& dir, const Keyfile& kf) {
    json j;
    j["seed"] = kf.seed;
    j["parties"] = json::array();
    for (size_t i = 0; i < kf.parties.size(); ++i)
        j["parties"].push_back({{"id", kf.parties[i].id},
                                {"public_key", vpass::to_hex(kf.parties[i].public_key)},
                                {"secret_key", vpass::to_hex(kf.keys[i].secret_key)}});
    write_text_file(keys_path(dir), j.dump(2));
}

Keyfile load_keyfile(const std::string& dir) {
    Keyfile kf;
    try {
        json j = json::parse(read_text_file(keys_path(dir)));
        kf.seed = j.at("seed").get<uint64_t>();
        for (const auto& p : j.at("parties")) {
            vpass::ledger::Party party;
            party.id = p.at("id").get<std::string>();
            party.public_key = vpass::from_hex(p.at("public_key").get<std::string>());
            kf.parties.push_back(party);
            vpass::ledger::KeyPair kp;
            kp.public_key = party.public_key;
            kp.secret_key = vpass::from_hex(p.at("secret_key").get<std::string>());
            kf.keys.push_back(kp);
        }
    } catch (const json::exception& e) {
        vpass::fail(vpass::Errc::parse, std::string("bad key file: ") + e.what());
    }
    return kf;
}

std::string node_state_path(const std::string& dir, size_t index) {
    return dir + "/node-" + std::to_string(index) + ".json";
}

}  // namespace

extern "C" {

const char* vp_version(void) { return "0.1.0"; }

const char* vp_last_error(void) { return g_last_error.c_str(); }

void vp_string_free(char* s) { std::free(s); }

/* ---------------- config ---------------- */

vp_status vp_config_create(vp_config** out) {
    if (!out) return arg_error("out is null");
    return guarded([&] { *out = new vp_config(); });
}

vp_status vp_config_load_json(vp_config* cfg, const char* path) {
    if (!cfg || !path) return arg_error("null argument");
    return guarded([&] { cfg->cfg.load_json_file(path); });
}

vp_status vp_config_set(vp_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return arg_error("null argument");
    return guarded([&] { cfg->cfg.set(key, value); });
}

vp_status vp_config_get(const vp_config* cfg, const char* key, char** out_value) {
    if (!cfg || !key || !out_value) return arg_error("null argument");
    return guarded([&] { *out_value = dup_string(cfg->cfg.get(key)); });
}

vp_status vp_config_to_json(const vp_config* cfg, char** out_json) {
    if (!cfg || !out_json) return arg_error("null argument");
    return guarded([&] { *out_json = dup_string(cfg->cfg.to_json()); });
}

void vp_config_free(vp_config* cfg) { delete cfg; }

/* ---------------- dataset ---------------- */

vp_status vp_synth_generate(const vp_config* cfg, vp_dataset** out) {
    if (!cfg || !out) return arg_error("null argument");
    return guarded([&] {
        const vpass::Config& c = cfg->cfg;
        c.validate();
        auto ds = vpass::bio::synth_generate(c.subjects, c.samples_per_subject, c.p_intra,
                                             c.mask_density, c.seed, c.rows, c.cols);
        *out = new vp_dataset{std::move(ds)};
    });
}

vp_status vp_dataset_save(const vp_dataset* ds, const char* path) {
    if (!ds || !path) return arg_error("null argument");
    return guarded([&] { vpass::bio::save_dataset_jsonl(ds->ds, path); });
}

vp_status vp_dataset_load(const char* path, vp_dataset** out) {
    if (!path || !out) return arg_error("null argument");
    return guarded([&] { *out = new vp_dataset{vpass::bio::load_dataset_jsonl(path)}; });
}

vp_status vp_dataset_info(const vp_dataset* ds, char** out_json) {
    if (!ds || !out_json) return arg_error("null argument");
    return guarded([&] {
        json j{{"subjects", ds->ds.subjects},
               {"samples_per_subject", ds->ds.samples_per_subject},
               {"rows", ds->ds.rows},
               {"cols", ds->ds.cols},
               {"p_intra", ds->ds.p_intra},
               {"mask_density", ds->ds.mask_density},
               {"seed", ds->ds.seed}};
        *out_json = dup_string(j.dump(2));
    });
}

vp_status vp_dataset_export_scan(const vp_dataset* ds, size_t subject, size_t sample,
                                 const char* path) {
    if (!ds || !path) return arg_error("null argument");
    return guarded([&] { vpass::bio::write_scan_file(ds->ds.scan(subject, sample), path); });
}

void vp_dataset_free(vp_dataset* ds) { delete ds; }

/* ---------------- evaluation ---------------- */

vp_status vp_eval_far_frr(const vp_dataset* ds, const vp_config* cfg, const char* domain,
                          const double* thresholds, size_t n_thresholds, const char* out_path,
                          const char* format) {
    if (!ds || !cfg || !domain || !thresholds || !out_path || !format)
        return arg_error("null argument");
    return guarded([&] {
        std::vector<double> ts(thresholds, thresholds + n_thresholds);
        auto rows = vpass::eval::run_far_frr(ds->ds, vpass::eval::domain_from_string(domain), ts,
                                             cfg->cfg);
        vpass::eval::export_report(rows, out_path, format);
    });
}

vp_status vp_eval_security(const vp_config* cfg, size_t advantage_trials, size_t census_n,
                           size_t census_m, size_t census_trials, char** out_json,
                           int* out_all_ok) {
    if (!cfg || !out_json) return arg_error("null argument");
    return guarded([&] {
        auto rep = vpass::eval::run_security_suite(cfg->cfg, advantage_trials,
                                                   census_n ? census_n : 12,
                                                   census_m ? census_m : 4,
                                                   census_trials ? census_trials : 50);
        *out_json = dup_string(rep.to_json());
        if (out_all_ok) *out_all_ok = rep.all_ok() ? 1 : 0;
    });
}

vp_status vp_scenario_run(const char* scenario_path, const vp_config* cfg,
                          char** out_transcript) {
    if (!scenario_path || !cfg || !out_transcript) return arg_error("null argument");
    return guarded([&] {
        std::string text = read_text_file(scenario_path);
        *out_transcript = dup_string(vpass::eval::run_scenario(text, cfg->cfg));
    });
}

/* ---------------- projection hashing ---------------- */

vp_status vp_projection_sample(size_t n, size_t m, uint64_t seed, vp_projection** out) {
    if (!out) return arg_error("out is null");
    return guarded([&] { *out = new vp_projection{vpass::lsh::ProjectionSet::sample(n, m, seed)}; });
}

vp_status vp_projection_save(const vp_projection* ps, const char* path) {
    if (!ps || !path) return arg_error("null argument");
    return guarded([&] { ps->ps.save(path); });
}

vp_status vp_projection_load(const char* path, vp_projection** out) {
    if (!path || !out) return arg_error("null argument");
    return guarded([&] { *out = new vp_projection{vpass::lsh::ProjectionSet::load(path)}; });
}

vp_status vp_projection_info(const vp_projection* ps, size_t* out_n, size_t* out_m,
                             uint64_t* out_seed) {
    if (!ps) return arg_error("ps is null");
    if (out_n) *out_n = ps->ps.n();
    if (out_m) *out_m = ps->ps.m();
    if (out_seed) *out_seed = ps->ps.seed();
    return VP_OK;
}

void vp_projection_free(vp_projection* ps) { delete ps; }

vp_status vp_lsh_hash_hex(const vp_projection* ps, const char* x_hex, char** out_hex) {
    if (!ps || !x_hex || !out_hex) return arg_error("null argument");
    return guarded([&] {
        vpass::BitVec x = vpass::BitVec::from_hex(x_hex, ps->ps.n());
        *out_hex = dup_string(vpass::lsh::s3hash(ps->ps, x).to_hex());
    });
}

vp_status vp_lsh_preimage_count(const vp_projection* ps, const char* hash_hex,
                                size_t* out_count) {
    if (!ps || !hash_hex || !out_count) return arg_error("null argument");
    return guarded([&] {
        vpass::BitVec h = vpass::BitVec::from_hex(hash_hex, ps->ps.m());
        *out_count = vpass::lsh::preimage_oracle(ps->ps, h).size();
    });
}

vp_status vp_lsh_preimage_census(size_t n, size_t m, size_t trials, uint64_t seed,
                                 char** out_json) {
    if (!out_json) return arg_error("out_json is null");
    return guarded([&] {
        if (trials == 0) vpass::fail(vpass::Errc::validation, "census needs >= 1 trial");
        std::vector<size_t> counts;
        for (size_t t = 0; t < trials; ++t) {
            auto R = vpass::lsh::ProjectionSet::sample(n, m,
                                                       vpass::derive_seed(seed, "census.R", t));
            vpass::Rng xr(vpass::derive_seed(seed, "census.x", t));
            vpass::BitVec x(n);
            x.fill_random(xr);
            counts.push_back(vpass::lsh::preimage_oracle(R, vpass::lsh::s3hash(R, x)).size());
        }
        std::vector<size_t> sorted = counts;
        std::sort(sorted.begin(), sorted.end());
        double median = (static_cast<double>(sorted[(sorted.size() - 1) / 2]) +
                         static_cast<double>(sorted[sorted.size() / 2])) /
                        2.0;
        json j{{"n", n},
               {"m", m},
               {"trials", trials},
               {"counts", counts},
               {"median", median},
               {"expected", std::exp2(static_cast<double>(n) - static_cast<double>(m))}};
        *out_json = dup_string(j.dump(2));
    });
}

vp_status vp_lsh_bit_balance(const vp_projection* ps, size_t trials, uint64_t seed,
                             double* out_max, double* out_mean) {
    if (!ps || !out_max || !out_mean) return arg_error("null argument");
    return guarded([&] {
        auto adv = vpass::lsh::bit_balance_advantage(ps->ps, trials, seed);
        double mx = 0, sum = 0;
        for (double a : adv) {
            mx = std::max(mx, a);
            sum += a;
        }
        *out_max = mx;
        *out_mean = adv.empty() ? 0 : sum / static_cast<double>(adv.size());
    });
}

vp_status vp_lsh_eval_locality(const double* thetas, size_t n_thetas, size_t pairs_per_angle,
                               size_t n, size_t weight, size_t m, uint64_t seed,
                               char** out_json) {
    if (!thetas || !out_json) return arg_error("null argument");
    return guarded([&] {
        std::vector<double> ts(thetas, thetas + n_thetas);
        auto rows = vpass::lsh::eval_locality(ts, pairs_per_angle, n, weight, m, seed);
        json j = json::array();
        for (const auto& r : rows)
            j.push_back({{"target_theta", r.target_theta},
                         {"achieved_theta", r.achieved_theta},
                         {"predicted", r.predicted},
                         {"measured", r.measured},
                         {"pairs", r.pairs}});
        *out_json = dup_string(j.dump(2));
    });
}

vp_status vp_lsh_entropy(const vp_dataset* ds, const vp_config* cfg, double* out_bits,
                         size_t* out_samples) {
    if (!ds || !cfg || !out_bits) return arg_error("null argument");
    return guarded([&] {
        auto fvs = vpass::eval::extract_feature_vectors(ds->ds, cfg->cfg);
        *out_bits = vpass::lsh::entropy_estimate(fvs);
        if (out_samples) *out_samples = fvs.size();
    });
}

/* ---------------- ledger ---------------- */

vp_status vp_ledger_init(const char* dir, size_t num_parties, uint64_t seed, int empty_blocks) {
    if (!dir) return arg_error("dir is null");
    return guarded([&] {
        auto [parties, keys] = vpass::ledger::make_parties(num_parties, seed);
        auto lg = vpass::ledger::Ledger::create(parties, empty_blocks != 0);
        lg.save(dir);
        save_keyfile(dir, Keyfile{seed, std::move(parties), std::move(keys)});
    });
}

vp_status vp_ledger_open(const char* dir, vp_ledger** out) {
    if (!dir || !out) return arg_error("null argument");
    return guarded([&] { *out = new vp_ledger{vpass::ledger::Ledger::load(dir)}; });
}

vp_status vp_ledger_save(const vp_ledger* lg, const char* dir) {
    if (!lg || !dir) return arg_error("null argument");
    return guarded([&] { lg->lg.save(dir); });
}

vp_status vp_ledger_tick(vp_ledger* lg, size_t count, uint64_t* out_height) {
    if (!lg) return arg_error("lg is null");
    return guarded([&] {
        if (count == 0) vpass::fail(vpass::Errc::invalid_argument, "tick count must be >= 1");
        for (size_t i = 0; i < count; ++i) lg->lg.advance();
        if (out_height) *out_height = lg->lg.num_blocks();
    });
}

vp_status vp_ledger_height(const vp_ledger* lg, uint64_t* out_height) {
    if (!lg || !out_height) return arg_error("null argument");
    *out_height = lg->lg.num_blocks();
    return VP_OK;
}

vp_status vp_ledger_verify(const vp_ledger* lg, int* out_ok, char** out_what) {
    if (!lg || !out_ok) return arg_error("null argument");
    return guarded([&] {
        auto rep = lg->lg.verify_chain();
        *out_ok = rep.ok ? 1 : 0;
        if (out_what) *out_what = rep.ok ? nullptr : dup_string(rep.what);
    });
}

vp_status vp_ledger_show(const vp_ledger* lg, uint64_t height, char** out_json) {
    if (!lg || !out_json) return arg_error("null argument");
    return guarded([&] {
        const auto& b = lg->lg.block(static_cast<size_t>(height));
        *out_json = dup_string(block_to_json(b).dump(2));
    });
}

vp_status vp_ledger_export(const vp_ledger* lg, char** out_jsonl) {
    if (!lg || !out_jsonl) return arg_error("null argument");
    return guarded([&] {
        std::ostringstream ss;
        for (const auto& b : lg->lg.blocks()) ss << block_to_json(b).dump() << '\n';
        *out_jsonl = dup_string(ss.str());
    });
}

void vp_ledger_free(vp_ledger* lg) { delete lg; }

/* ---------------- passport nodes ---------------- */

vp_status vp_passport_setup(const vp_config* cfg, const char* dataset_path, const char* dir) {
    if (!cfg || !dir) return arg_error("null argument");
    return guarded([&] {
        std::optional<vpass::BitMatrix> global;
        if (cfg->cfg.masking_mode == vpass::MaskingMode::Type2) {
            if (!dataset_path)
                vpass::fail(vpass::Errc::validation,
                            "type2 masking requires a dataset to derive the population mask");
            auto ds = vpass::bio::load_dataset_jsonl(dataset_path);
            global = dataset_population_mask(ds, cfg->cfg.masking_mode);
        }
        auto params = vpass::passport::PassportParams::setup(cfg->cfg, global);
        params.save(std::string(dir) + "/params.json");
    });
}

vp_status vp_node_open(const char* dir, size_t node_index, vp_node** out) {
    if (!dir || !out) return arg_error("null argument");
    return guarded([&] {
        auto handle = std::make_unique<vp_node>();
        handle->dir = dir;
        handle->index = node_index;
        handle->chain =
            std::make_unique<vpass::ledger::Ledger>(vpass::ledger::Ledger::load(dir));
        auto params = vpass::passport::PassportParams::load(std::string(dir) + "/params.json");
        Keyfile kf = load_keyfile(dir);
        if (node_index >= kf.parties.size())
            vpass::fail(vpass::Errc::not_found,
                        "node index " + std::to_string(node_index) + " out of range (" +
                            std::to_string(kf.parties.size()) + " parties)");
        uint64_t node_seed = vpass::derive_seed(kf.seed, "cli.node", node_index);
        handle->node = std::make_unique<vpass::passport::PassportNode>(
            std::move(params), handle->chain.get(), node_seed, kf.parties[node_index].id,
            kf.keys[node_index].secret_key);
        std::string state_file = node_state_path(dir, node_index);
        if (std::ifstream probe(state_file); probe.good())
            handle->node->state_from_json(read_text_file(state_file));
        *out = handle.release();
    });
}

vp_status vp_node_save(vp_node* node) {
    if (!node) return arg_error("node is null");
    return guarded([&] {
        node->chain->save(node->dir);
        write_text_file(node_state_path(node->dir, node->index), node->node->state_to_json());
    });
}

vp_status vp_node_enroll(vp_node* node, const char* dob, const char* gender,
                         const char* scan_path, const char* record_json, char** out_id_hex) {
    if (!node || !dob || !gender || !scan_path || !record_json || !out_id_hex)
        return arg_error("null argument");
    return guarded([&] {
        auto scan = vpass::bio::read_scan_file(scan_path);
        auto record = vpass::passport::VaccinationRecord::from_json(record_json);
        auto id = node->node->enroll(dob, gender, scan, record);
        *out_id_hex = dup_string(vpass::to_hex(id));
    });
}

vp_status vp_node_auth(vp_node* node, const char* dob, const char* gender, const char* scan_path,
                       int* out_found, char** out_id_hex) {
    if (!node || !dob || !gender || !scan_path || !out_found) return arg_error("null argument");
    return guarded([&] {
        auto scan = vpass::bio::read_scan_file(scan_path);
        auto id = node->node->authenticate(dob, gender, scan);
        *out_found = id.has_value() ? 1 : 0;
        if (out_id_hex) *out_id_hex = id ? dup_string(vpass::to_hex(*id)) : nullptr;
    });
}

vp_status vp_node_add_record(vp_node* node, const char* dob, const char* gender,
                             const char* scan_path, const char* record_json, char** out_id_hex,
                             int* out_enrolled) {
    if (!node || !dob || !gender || !scan_path || !record_json || !out_id_hex)
        return arg_error("null argument");
    return guarded([&] {
        auto scan = vpass::bio::read_scan_file(scan_path);
        auto record = vpass::passport::VaccinationRecord::from_json(record_json);
        auto receipt = node->node->add_record(dob, gender, scan, record);
        *out_id_hex = dup_string(vpass::to_hex(receipt.id));
        if (out_enrolled) *out_enrolled = receipt.enrolled ? 1 : 0;
    });
}

vp_status vp_node_fetch(vp_node* node, const char* dob, const char* gender,
                        const char* scan_path, char** out_json) {
    if (!node || !dob || !gender || !scan_path || !out_json) return arg_error("null argument");
    return guarded([&] {
        auto scan = vpass::bio::read_scan_file(scan_path);
        auto records = node->node->fetch_records(dob, gender, scan);
        json j = json::array();
        for (const auto& r : records) j.push_back(json::parse(r.canonical_json()));
        *out_json = dup_string(j.dump(2));
    });
}

vp_status vp_node_sync(vp_node* node, uint64_t* out_blocks) {
    if (!node) return arg_error("node is null");
    return guarded([&] {
        node->node->sync();
        if (out_blocks) *out_blocks = node->node->num_synced_blocks();
    });
}

void vp_node_free(vp_node* node) { delete node; }

} /* extern "C" */

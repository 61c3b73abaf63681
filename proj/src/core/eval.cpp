#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "ledger.hpp"
#include "passport.hpp"

namespace vpass::eval {

using nlohmann::json;

Domain domain_from_string(const std::string& s) {
    if (s == "raw") return Domain::Raw;
    if (s == "hashed") return Domain::Hashed;
    fail(Errc::validation, "unknown domain: " + s + " (expected raw or hashed)");
}

const char* domain_name(Domain d) { return d == Domain::Raw ? "raw" : "hashed"; }

namespace {

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

void check_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty()) fail(Errc::validation, "threshold list is empty");
    for (size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0 || thresholds[i] > 1)
            fail(Errc::validation, "thresholds must lie in [0, 1]");
        if (i > 0 && thresholds[i] <= thresholds[i - 1])
            fail(Errc::validation, "thresholds must be strictly ascending");
    }
}

std::optional<bio::NoiseMask> dataset_global_mask(const bio::SyntheticDataset& ds,
                                                  MaskingMode mode) {
    if (mode != MaskingMode::Type2) return std::nullopt;
    std::vector<bio::NoiseMask> masks;
    for (const auto& subject : ds.scans)
        for (const auto& scan : subject) masks.push_back(scan.mask);
    return bio::compute_global_mask(masks);
}

std::vector<std::vector<bio::FeatureVector>> extract_all(const bio::SyntheticDataset& ds,
                                                         const Config& cfg) {
    auto global = dataset_global_mask(ds, cfg.masking_mode);
    std::vector<std::vector<bio::FeatureVector>> fvs(ds.subjects);
    for (size_t s = 0; s < ds.subjects; ++s) {
        fvs[s].reserve(ds.samples_per_subject);
        for (size_t k = 0; k < ds.samples_per_subject; ++k) {
            const bio::Scan& scan = ds.scan(s, k);
            fvs[s].push_back(
                bio::extract_feature_vector(scan.tpl, scan.mask, cfg.masking_mode, global));
        }
    }
    return fvs;
}

struct PairIndex {
    uint32_t s1, k1, s2, k2;
};

}  // namespace

std::vector<bio::FeatureVector> extract_feature_vectors(const bio::SyntheticDataset& ds,
                                                        const Config& cfg) {
    std::vector<bio::FeatureVector> flat;
    auto per_subject = extract_all(ds, cfg);
    for (auto& subject : per_subject)
        for (auto& fv : subject) flat.push_back(std::move(fv));
    return flat;
}

std::vector<FarFrrRow> run_far_frr(const bio::SyntheticDataset& ds, Domain domain,
                                   const std::vector<double>& thresholds, const Config& cfg) {
    check_thresholds(thresholds);
    if (ds.samples_per_subject < 2)
        fail(Errc::validation, "need >= 2 samples per subject for genuine pairs");
    if (ds.subjects < 2) fail(Errc::validation, "need >= 2 subjects for impostor pairs");

    auto fvs = extract_all(ds, cfg);

    std::vector<std::vector<lsh::HashVector>> hashes;
    if (domain == Domain::Hashed) {
        lsh::ProjectionSet R = lsh::sample_projections(ds.rows * ds.cols, cfg.hash_bits,
                                                       derive_seed(cfg.seed, "passport.h2"));
        hashes.resize(ds.subjects);
        for (size_t s = 0; s < ds.subjects; ++s)
            for (const auto& fv : fvs[s]) hashes[s].push_back(lsh::s3hash(R, fv));
    }

    auto score = [&](const PairIndex& p) {
        if (domain == Domain::Raw)
            return bio::min_shift_distance(fvs[p.s1][p.k1], fvs[p.s2][p.k2], cfg.max_shifts,
                                           ds.rows);
        return lsh::hash_hamming(hashes[p.s1][p.k1], hashes[p.s2][p.k2]);
    };

    std::vector<double> genuine;
    for (uint32_t s = 0; s < ds.subjects; ++s)
        for (uint32_t k1 = 0; k1 + 1 < ds.samples_per_subject; ++k1)
            for (uint32_t k2 = k1 + 1; k2 < ds.samples_per_subject; ++k2)
                genuine.push_back(score({s, k1, s, k2}));

    std::vector<PairIndex> impostor_pairs;
    for (uint32_t s1 = 0; s1 + 1 < ds.subjects; ++s1)
        for (uint32_t s2 = s1 + 1; s2 < ds.subjects; ++s2)
            for (uint32_t k1 = 0; k1 < ds.samples_per_subject; ++k1)
                for (uint32_t k2 = 0; k2 < ds.samples_per_subject; ++k2)
                    impostor_pairs.push_back({s1, k1, s2, k2});
    size_t cap = cfg.impostor_cap_factor * genuine.size();
    if (cap > 0 && impostor_pairs.size() > cap) {
        Rng rng(derive_seed(cfg.seed, "eval.impostor"));
        for (size_t i = 0; i < cap; ++i) {
            size_t j = i + static_cast<size_t>(rng.uniform(impostor_pairs.size() - i));
            std::swap(impostor_pairs[i], impostor_pairs[j]);
        }
        impostor_pairs.resize(cap);
    }
    std::vector<double> impostor;
    impostor.reserve(impostor_pairs.size());
    for (const auto& p : impostor_pairs) impostor.push_back(score(p));

    std::vector<FarFrrRow> rows;
    rows.reserve(thresholds.size());
    for (double t : thresholds) {
        size_t accepted_imp = 0, rejected_gen = 0;
        for (double d : impostor) accepted_imp += d < t;
        for (double d : genuine) rejected_gen += d >= t;
        FarFrrRow row;
        row.threshold = t;
        row.far = round3(100.0 * static_cast<double>(accepted_imp) /
                         static_cast<double>(impostor.size()));
        row.frr = round3(100.0 * static_cast<double>(rejected_gen) /
                         static_cast<double>(genuine.size()));
        row.genuine_comparisons = genuine.size();
        row.impostor_comparisons = impostor.size();
        rows.push_back(row);
    }
    return rows;
}

std::string SecurityReport::to_json() const {
    json j;
    j["advantage"] = {{"n", advantage_n},
                      {"m", advantage_m},
                      {"trials", advantage_trials},
                      {"max", max_advantage},
                      {"mean", mean_advantage},
                      {"bound", advantage_bound},
                      {"ok", advantage_ok},
                      {"degenerate_projections", degenerate_projections},
                      {"adversary", "best single-hash-bit predictor (an under-approximation "
                                    "of the full adversary class)"}};
    j["census"] = {{"n", census_n},
                   {"m", census_m},
                   {"trials", census_trials},
                   {"counts", census_counts},
                   {"median", census_median},
                   {"expected", census_expected},
                   {"factor_bound", census_factor_bound},
                   {"ok", census_ok}};
    j["entropy"] = {{"bits", entropy_bits},
                    {"samples", entropy_samples},
                    {"threshold", entropy_threshold},
                    {"ok", entropy_ok},
                    {"estimator", "sum of per-bit marginal entropies (upper bound)"}};
    j["all_ok"] = all_ok();
    return j.dump(2);
}

bool projections_degenerate(const lsh::ProjectionSet& R) {
    for (size_t i = 0; i < R.m(); ++i)
        for (size_t j = 0; j < R.n(); ++j)
            if (R.trit(i, j) != 0) return false;
    return true;
}

SecurityReport run_security_suite(const Config& cfg, size_t advantage_trials, size_t census_n,
                                  size_t census_m, size_t census_trials) {
    cfg.validate();
    if (advantage_trials == 0) advantage_trials = 5000;
    if (census_n == 0 || census_n > 20)
        fail(Errc::validation, "census n must be in [1, 20] (exhaustive oracle)");
    if (census_m == 0 || census_m > census_n)
        fail(Errc::validation, "census m must be in [1, n]");
    if (census_trials == 0) fail(Errc::validation, "census needs >= 1 trial");

    SecurityReport rep;
    rep.advantage_n = cfg.feature_bits();
    rep.advantage_m = cfg.hash_bits;
    rep.advantage_trials = advantage_trials;

    lsh::ProjectionSet R = lsh::sample_projections(cfg.feature_bits(), cfg.hash_bits,
                                                   derive_seed(cfg.seed, "passport.h2"));
    rep.degenerate_projections = projections_degenerate(R);

    std::vector<double> adv =
        lsh::bit_balance_advantage(R, advantage_trials, derive_seed(cfg.seed, "security.advantage"));
    double sum = 0;
    for (double a : adv) {
        rep.max_advantage = std::max(rep.max_advantage, a);
        sum += a;
    }
    rep.mean_advantage = sum / static_cast<double>(adv.size());
    rep.advantage_ok = rep.max_advantage < rep.advantage_bound;

    rep.census_n = census_n;
    rep.census_m = census_m;
    rep.census_trials = census_trials;
    for (size_t t = 0; t < census_trials; ++t) {
        lsh::ProjectionSet Rt =
            lsh::sample_projections(census_n, census_m, derive_seed(cfg.seed, "census.R", t));
        Rng xr(derive_seed(cfg.seed, "census.x", t));
        BitVec x(census_n);
        x.fill_random(xr);
        rep.census_counts.push_back(lsh::preimage_oracle(Rt, lsh::s3hash(Rt, x)).size());
    }
    std::vector<size_t> sorted = rep.census_counts;
    std::sort(sorted.begin(), sorted.end());
    rep.census_median = (static_cast<double>(sorted[(sorted.size() - 1) / 2]) +
                         static_cast<double>(sorted[sorted.size() / 2])) /
                        2.0;
    rep.census_expected = std::exp2(static_cast<double>(census_n) - static_cast<double>(census_m));
    rep.census_ok = rep.census_median >= rep.census_expected / rep.census_factor_bound &&
                    rep.census_median <= rep.census_expected * rep.census_factor_bound;

    bio::SyntheticDataset ds = bio::synth_generate(cfg.subjects, cfg.samples_per_subject,
                                                   cfg.p_intra, cfg.mask_density, cfg.seed,
                                                   cfg.rows, cfg.cols);
    std::vector<BitVec> fvs = extract_feature_vectors(ds, cfg);
    rep.entropy_bits = lsh::entropy_estimate(fvs);
    rep.entropy_samples = fvs.size();
    rep.entropy_threshold = static_cast<double>(cfg.hash_bits + cfg.lambda);
    rep.entropy_ok = rep.entropy_bits >= rep.entropy_threshold;
    return rep;
}

namespace {

std::string default_dob(size_t subject) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu/%02zu/%04zu", 1 + subject % 28, 1 + subject % 12,
                  1950 + subject % 50);
    return buf;
}

std::string default_gender(size_t subject) {
    switch (subject % 3) {
        case 0: return "male";
        case 1: return "female";
        default: return "other";
    }
}

}  // namespace

std::string run_scenario(const std::string& scenario_json, const Config& cfg) {
    cfg.validate();
    json steps;
    try {
        steps = json::parse(scenario_json);
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("bad scenario JSON: ") + e.what());
    }
    if (!steps.is_array()) fail(Errc::parse, "scenario must be a JSON list of steps");

    size_t node_count = 1;
    if (!steps.empty() && steps[0].is_object() && steps[0].value("op", "") == "init")
        node_count = std::max<size_t>(1, steps[0].value("nodes", 1));
    else
        for (const auto& step : steps)
            if (step.is_object() && step.contains("node"))
                node_count = std::max(node_count, step.at("node").get<size_t>() + 1);

    auto [parties, keys] = ledger::make_parties(node_count, derive_seed(cfg.seed, "scenario.parties"));
    ledger::Ledger chain = ledger::Ledger::create(parties, cfg.empty_blocks);

    bio::SyntheticDataset ds = bio::synth_generate(cfg.subjects, cfg.samples_per_subject,
                                                   cfg.p_intra, cfg.mask_density, cfg.seed,
                                                   cfg.rows, cfg.cols);
    std::optional<BitMatrix> global;
    if (cfg.masking_mode == MaskingMode::Type2)
        global = dataset_global_mask(ds, cfg.masking_mode)->bits;
    passport::PassportParams params = passport::PassportParams::setup(cfg, global);

    std::vector<passport::PassportNode> nodes;
    nodes.reserve(node_count);
    for (size_t i = 0; i < node_count; ++i)
        nodes.emplace_back(params, &chain, derive_seed(cfg.seed, "scenario.node", i),
                           parties[i].id, keys[i].secret_key);

    std::map<Digest, std::string> aliases;
    auto alias = [&aliases](const Digest& id) {
        auto it = aliases.find(id);
        if (it == aliases.end())
            it = aliases.emplace(id, "user-" + std::to_string(aliases.size())).first;
        return it->second;
    };

    auto node_at = [&](const json& step) -> passport::PassportNode& {
        size_t idx = step.value("node", 0);
        if (idx >= nodes.size())
            fail(Errc::validation, "node index " + std::to_string(idx) + " out of range");
        return nodes[idx];
    };
    auto scan_at = [&](const json& step) -> const bio::Scan& {
        return ds.scan(step.value("subject", 0), step.value("sample", 0));
    };
    auto dob_of = [&](const json& step) {
        return step.contains("dob") ? step.at("dob").get<std::string>()
                                    : default_dob(step.value("subject", 0));
    };
    auto gender_of = [&](const json& step) {
        return step.contains("gender") ? step.at("gender").get<std::string>()
                                       : default_gender(step.value("subject", 0));
    };
    auto record_of = [&](const json& step, const std::string& issuer) {
        if (step.contains("record"))
            return passport::VaccinationRecord::from_json(step.at("record").dump());
        passport::VaccinationRecord rec;
        rec.vaccine = "vx-basic";
        rec.dose = 1;
        rec.date = "2021-01-01";
        rec.issuer = issuer;
        return rec;
    };

    std::ostringstream transcript;
    for (size_t i = 0; i < steps.size(); ++i) {
        const json& step = steps[i];
        if (!step.is_object() || !step.contains("op"))
            fail(Errc::parse, "step " + std::to_string(i) + " lacks an op");
        std::string op = step.at("op").get<std::string>();
        json out;
        out["step"] = i;
        out["op"] = op;
        try {
            if (op == "init") {
                if (i != 0) fail(Errc::validation, "init must be the first step");
                out["nodes"] = node_count;
            } else if (op == "enroll") {
                auto& node = node_at(step);
                size_t idx = step.value("node", 0);
                Digest id = node.enroll(dob_of(step), gender_of(step), scan_at(step),
                                        record_of(step, parties[idx].id));
                out["alias"] = alias(id);
            } else if (op == "auth") {
                auto id = node_at(step).authenticate(dob_of(step), gender_of(step), scan_at(step));
                if (id)
                    out["alias"] = alias(*id);
                else
                    out["alias"] = nullptr;
            } else if (op == "add-record" || op == "add_record") {
                auto& node = node_at(step);
                size_t idx = step.value("node", 0);
                auto receipt = node.add_record(dob_of(step), gender_of(step), scan_at(step),
                                               record_of(step, parties[idx].id));
                out["alias"] = alias(receipt.id);
                out["enrolled"] = receipt.enrolled;
            } else if (op == "fetch") {
                auto records =
                    node_at(step).fetch_records(dob_of(step), gender_of(step), scan_at(step));
                out["count"] = records.size();
            } else if (op == "tick") {
                size_t count = step.value("count", 1);
                if (count == 0) fail(Errc::validation, "tick count must be >= 1");
                for (size_t t = 0; t < count; ++t) chain.advance();
            } else if (op == "sync") {
                auto& node = node_at(step);
                node.sync();
                out["num_blocks"] = node.num_synced_blocks();
                out["state_digest"] = to_hex(node.state_digest());
            } else if (op == "verify") {
                auto rep = chain.verify_chain();
                out["ok"] = rep.ok;
                if (!rep.ok) out["what"] = rep.what;
            } else {
                fail(Errc::validation, "unknown op '" + op + "'");
            }
        } catch (const Error& e) {
            fail(e.code(), "step " + std::to_string(i) + " (" + op + "): " + e.what());
        }
        out["height"] = chain.num_blocks();
        transcript << out.dump() << '\n';
    }

    json summary;
    summary["op"] = "summary";
    summary["height"] = chain.num_blocks();
    summary["verify"] = chain.verify_chain().ok;
    summary["nodes"] = json::array();
    for (size_t i = 0; i < nodes.size(); ++i) {
        nodes[i].sync();
        summary["nodes"].push_back({{"node", i},
                                    {"num_blocks", nodes[i].num_synced_blocks()},
                                    {"state_digest", to_hex(nodes[i].state_digest())},
                                    {"ambiguous_matches", nodes[i].ambiguous_matches()}});
    }
    transcript << summary.dump() << '\n';
    return transcript.str();
}

void export_report(const std::vector<FarFrrRow>& rows, const std::string& path,
                   const std::string& format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot open for writing: " + path);
    if (format == "csv") {
        out << "threshold,far,frr,genuine_comparisons,impostor_comparisons\n";
        char buf[128];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%g,%.3f,%.3f,%zu,%zu\n", r.threshold, r.far, r.frr,
                          r.genuine_comparisons, r.impostor_comparisons);
            out << buf;
        }
    } else if (format == "jsonl") {
        for (const auto& r : rows) {
            json j{{"threshold", r.threshold},
                   {"far", r.far},
                   {"frr", r.frr},
                   {"genuine_comparisons", r.genuine_comparisons},
                   {"impostor_comparisons", r.impostor_comparisons}};
            out << j.dump() << '\n';
        }
    } else {
        fail(Errc::validation, "unknown report format: " + format + " (expected csv or jsonl)");
    }
    if (!out) fail(Errc::io, "write failed: " + path);
}

std::vector<FarFrrRow> parse_report(const std::string& path, const std::string& format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open report: " + path);
    std::vector<FarFrrRow> rows;
    std::string line;
    if (format == "csv") {
        if (!std::getline(in, line) ||
            line != "threshold,far,frr,genuine_comparisons,impostor_comparisons")
            fail(Errc::parse, "bad report header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            FarFrrRow r;
            char* end = nullptr;
            const char* p = line.c_str();
            r.threshold = std::strtod(p, &end);
            if (end == p || *end != ',') fail(Errc::parse, "bad report row: " + line);
            p = end + 1;
            r.far = std::strtod(p, &end);
            if (end == p || *end != ',') fail(Errc::parse, "bad report row: " + line);
            p = end + 1;
            r.frr = std::strtod(p, &end);
            if (end == p || *end != ',') fail(Errc::parse, "bad report row: " + line);
            p = end + 1;
            r.genuine_comparisons = std::strtoull(p, &end, 10);
            if (end == p || *end != ',') fail(Errc::parse, "bad report row: " + line);
            p = end + 1;
            r.impostor_comparisons = std::strtoull(p, &end, 10);
            if (end == p || *end != '\0') fail(Errc::parse, "bad report row: " + line);
            rows.push_back(r);
        }
    } else if (format == "jsonl") {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j;
            try {
                j = json::parse(line);
            } catch (const json::exception& e) {
                fail(Errc::parse, std::string("bad report line: ") + e.what());
            }
            FarFrrRow r;
            r.threshold = j.at("threshold").get<double>();
            r.far = j.at("far").get<double>();
            r.frr = j.at("frr").get<double>();
            r.genuine_comparisons = j.at("genuine_comparisons").get<size_t>();
            r.impostor_comparisons = j.at("impostor_comparisons").get<size_t>();
            rows.push_back(r);
        }
    } else {
        fail(Errc::validation, "unknown report format: " + format + " (expected csv or jsonl)");
    }
    return rows;
}

}  // namespace vpass::eval

// vaccpass command-line front end. Talks to the core exclusively through the
// C interface in vaccpass.h; its only other dependency is the argument
// parser. Exit codes: 0 success, 2 usage/validation/runtime error, 3 an
// evaluation bound was not met.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vaccpass.h"

namespace {

constexpr int kExitError = 2;
constexpr int kExitBound = 3;

[[noreturn]] void die(const std::string& what) {
    std::fprintf(stderr, "error: %s\n", what.c_str());
    std::exit(kExitError);
}

void check(vp_status st) {
    if (st != VP_OK) die(vp_last_error());
}

// RAII for strings returned by the library
struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { vp_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

struct ConfigOpts {
    std::string config_path;
    std::vector<std::string> sets;
    uint64_t seed = 0;
    bool seed_given = false;
};

void add_config_options(CLI::App* cmd, ConfigOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON configuration file");
    cmd->add_option("--set", opts.sets, "Override a configuration key (key=value, repeatable)");
    cmd->add_option("--seed", opts.seed, "Seed override")->each([&opts](const std::string&) {
        opts.seed_given = true;
    });
}

using ConfigPtr = std::unique_ptr<vp_config, decltype(&vp_config_free)>;

ConfigPtr build_config(const ConfigOpts& opts) {
    vp_config* raw = nullptr;
    check(vp_config_create(&raw));
    ConfigPtr cfg(raw, &vp_config_free);
    if (!opts.config_path.empty()) check(vp_config_load_json(cfg.get(), opts.config_path.c_str()));
    for (const std::string& kv : opts.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) die("--set expects key=value, got: " + kv);
        check(vp_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (opts.seed_given)
        check(vp_config_set(cfg.get(), "seed", std::to_string(opts.seed).c_str()));
    return cfg;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        std::string item = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (item.empty()) die(std::string(what) + ": empty element in list");
        char* end = nullptr;
        double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            die(std::string(what) + ": cannot parse '" + item + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void write_file_or_die(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) die("cannot open for writing: " + path);
    if (std::fwrite(text.data(), 1, text.size(), f) != text.size()) {
        std::fclose(f);
        die("write failed: " + path);
    }
    std::fclose(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vaccpass: privacy-preserving vaccination passport toolkit"};
    app.require_subcommand(1);

    // ---------------- synth ----------------
    struct {
        ConfigOpts cfg;
        std::string out;
        std::vector<std::string> export_scan;  // subject sample path, repeatable
    } synth;
    {
        auto* cmd = app.add_subcommand("synth", "Generate a synthetic scan dataset");
        add_config_options(cmd, synth.cfg);
        cmd->add_option("--out", synth.out, "Output dataset (JSONL)")->required();
        cmd->add_option("--export-scan", synth.export_scan,
                        "Also write one scan file: SUBJECT SAMPLE PATH")
            ->expected(-3);
        cmd->callback([&] {
            auto cfg = build_config(synth.cfg);
            vp_dataset* ds = nullptr;
            check(vp_synth_generate(cfg.get(), &ds));
            std::unique_ptr<vp_dataset, decltype(&vp_dataset_free)> guard(ds, &vp_dataset_free);
            check(vp_dataset_save(ds, synth.out.c_str()));
            if (synth.export_scan.size() % 3 != 0)
                die("--export-scan expects triples: SUBJECT SAMPLE PATH");
            for (size_t i = 0; i + 2 < synth.export_scan.size(); i += 3) {
                size_t subject = std::stoull(synth.export_scan[i]);
                size_t sample = std::stoull(synth.export_scan[i + 1]);
                check(vp_dataset_export_scan(ds, subject, sample,
                                             synth.export_scan[i + 2].c_str()));
            }
            OwnedString info;
            check(vp_dataset_info(ds, &info.p));
            std::printf("%s\n", info.str().c_str());
        });
    }

    // ---------------- eval ----------------
    auto* eval_cmd = app.add_subcommand("eval", "Recognition and security evaluation");
    eval_cmd->require_subcommand(1);

    struct {
        ConfigOpts cfg;
        std::string dataset, domain = "raw", thresholds, out, format = "csv";
    } farfrr;
    {
        auto* cmd = eval_cmd->add_subcommand("far-frr", "FAR/FRR threshold sweep");
        add_config_options(cmd, farfrr.cfg);
        cmd->add_option("--dataset", farfrr.dataset, "Dataset JSONL")->required();
        cmd->add_option("--domain", farfrr.domain, "raw or hashed");
        cmd->add_option("--thresholds", farfrr.thresholds,
                        "Comma-separated ascending thresholds in [0,1]")
            ->required();
        cmd->add_option("--out", farfrr.out, "Report output path")->required();
        cmd->add_option("--format", farfrr.format, "csv or jsonl");
        cmd->callback([&] {
            auto cfg = build_config(farfrr.cfg);
            vp_dataset* ds = nullptr;
            check(vp_dataset_load(farfrr.dataset.c_str(), &ds));
            std::unique_ptr<vp_dataset, decltype(&vp_dataset_free)> guard(ds, &vp_dataset_free);
            auto ts = parse_double_list(farfrr.thresholds, "--thresholds");
            check(vp_eval_far_frr(ds, cfg.get(), farfrr.domain.c_str(), ts.data(), ts.size(),
                                  farfrr.out.c_str(), farfrr.format.c_str()));
            std::printf("wrote %zu rows to %s (%s, %s domain)\n", ts.size(), farfrr.out.c_str(),
                        farfrr.format.c_str(), farfrr.domain.c_str());
        });
    }

    struct {
        ConfigOpts cfg;
        size_t trials = 0, census_n = 0, census_m = 0, census_trials = 0;
        std::string out;
    } security;
    {
        auto* cmd = eval_cmd->add_subcommand("security", "Run the security probe suite");
        add_config_options(cmd, security.cfg);
        cmd->add_option("--trials", security.trials, "Predictor-advantage trials (default 5000)");
        cmd->add_option("--census-n", security.census_n, "Census input length (default 12)");
        cmd->add_option("--census-m", security.census_m, "Census hash length (default 4)");
        cmd->add_option("--census-trials", security.census_trials, "Census trials (default 50)");
        cmd->add_option("--out", security.out, "Also write the JSON report to this path");
        cmd->callback([&] {
            auto cfg = build_config(security.cfg);
            OwnedString report;
            int all_ok = 0;
            check(vp_eval_security(cfg.get(), security.trials, security.census_n,
                                   security.census_m, security.census_trials, &report.p,
                                   &all_ok));
            std::printf("%s\n", report.str().c_str());
            if (!security.out.empty()) write_file_or_die(security.out, report.str() + "\n");
            if (!all_ok) std::exit(kExitBound);
        });
    }

    // ---------------- scenario ----------------
    auto* scenario_cmd = app.add_subcommand("scenario", "Scripted multi-node runs");
    scenario_cmd->require_subcommand(1);
    struct {
        ConfigOpts cfg;
        std::string file, out;
    } scen;
    {
        auto* cmd = scenario_cmd->add_subcommand("run", "Execute a scenario file");
        add_config_options(cmd, scen.cfg);
        cmd->add_option("--file", scen.file, "Scenario JSON (list of steps)")->required();
        cmd->add_option("--out", scen.out, "Write the JSONL transcript here instead of stdout");
        cmd->callback([&] {
            auto cfg = build_config(scen.cfg);
            OwnedString transcript;
            check(vp_scenario_run(scen.file.c_str(), cfg.get(), &transcript.p));
            if (scen.out.empty())
                std::fputs(transcript.str().c_str(), stdout);
            else
                write_file_or_die(scen.out, transcript.str());
        });
    }

    // ---------------- lsh ----------------
    auto* lsh_cmd = app.add_subcommand("lsh", "Ternary projection hashing tools");
    lsh_cmd->require_subcommand(1);

    struct {
        std::string projections, x_hex, save;
        size_t n = 0, m = 0;
        uint64_t seed = 1;
    } lhash;
    {
        auto* cmd = lsh_cmd->add_subcommand("hash", "Hash an input bit string");
        cmd->add_option("--projections", lhash.projections, "Load a projection set file");
        cmd->add_option("--n", lhash.n, "Input length (when sampling fresh projections)");
        cmd->add_option("--m", lhash.m, "Hash length (when sampling fresh projections)");
        cmd->add_option("--seed", lhash.seed, "Sampling seed");
        cmd->add_option("--x", lhash.x_hex, "Input bits as hex (MSB-first packing)")->required();
        cmd->add_option("--save-projections", lhash.save, "Persist the projection set");
        cmd->callback([&] {
            vp_projection* ps = nullptr;
            if (!lhash.projections.empty())
                check(vp_projection_load(lhash.projections.c_str(), &ps));
            else if (lhash.n && lhash.m)
                check(vp_projection_sample(lhash.n, lhash.m, lhash.seed, &ps));
            else
                die("provide --projections or both --n and --m");
            std::unique_ptr<vp_projection, decltype(&vp_projection_free)> guard(
                ps, &vp_projection_free);
            if (!lhash.save.empty()) check(vp_projection_save(ps, lhash.save.c_str()));
            OwnedString h;
            check(vp_lsh_hash_hex(ps, lhash.x_hex.c_str(), &h.p));
            std::printf("%s\n", h.str().c_str());
        });
    }

    struct {
        std::string angles = "0.392699,0.785398,1.178097,1.570796";
        size_t pairs = 2500, n = 1024, weight = 256, m = 256;
        uint64_t seed = 1;
        double tol = -1;
    } loc;
    {
        auto* cmd = lsh_cmd->add_subcommand("eval-locality",
                                            "Measure hash agreement against the collision law");
        cmd->add_option("--angles", loc.angles, "Comma-separated angles in radians, [0, pi/2]");
        cmd->add_option("--pairs", loc.pairs, "Pairs per angle");
        cmd->add_option("--n", loc.n, "Vector length");
        cmd->add_option("--weight", loc.weight, "Hamming weight of each vector");
        cmd->add_option("--m", loc.m, "Hash length");
        cmd->add_option("--seed", loc.seed, "Seed");
        cmd->add_option("--tol", loc.tol,
                        "Fail (exit 3) when |measured - predicted| exceeds this");
        cmd->callback([&] {
            auto ts = parse_double_list(loc.angles, "--angles");
            OwnedString rows;
            check(vp_lsh_eval_locality(ts.data(), ts.size(), loc.pairs, loc.n, loc.weight, loc.m,
                                       loc.seed, &rows.p));
            std::printf("%s\n", rows.str().c_str());
            if (loc.tol >= 0) {
                // crude but dependency-free: re-scan the JSON we just printed;
                // keys are emitted alphabetically, so each row's "predicted"
                // follows its "measured"
                std::string text = rows.str();
                size_t pos = 0;
                bool ok = true;
                while ((pos = text.find("\"measured\":", pos)) != std::string::npos) {
                    double measured = std::strtod(text.c_str() + pos + 11, nullptr);
                    size_t ppos = text.find("\"predicted\":", pos);
                    if (ppos == std::string::npos) {
                        ok = false;
                        break;
                    }
                    double predicted = std::strtod(text.c_str() + ppos + 12, nullptr);
                    if (measured - predicted > loc.tol || predicted - measured > loc.tol)
                        ok = false;
                    ++pos;
                }
                if (!ok) std::exit(kExitBound);
            }
        });
    }

    struct {
        size_t n = 12, m = 4, trials = 50;
        uint64_t seed = 1;
    } census;
    {
        auto* cmd = lsh_cmd->add_subcommand("preimage-census",
                                            "Exhaustive preimage counts at small n");
        cmd->add_option("--n", census.n, "Input length (<= 20)");
        cmd->add_option("--m", census.m, "Hash length (<= n)");
        cmd->add_option("--trials", census.trials, "Number of fresh draws");
        cmd->add_option("--seed", census.seed, "Seed");
        cmd->callback([&] {
            OwnedString out;
            check(vp_lsh_preimage_census(census.n, census.m, census.trials, census.seed, &out.p));
            std::printf("%s\n", out.str().c_str());
        });
    }

    struct {
        size_t n = 9600, m = 256, trials = 5000;
        uint64_t seed = 1;
        double bound = -1;
    } balance;
    {
        auto* cmd = lsh_cmd->add_subcommand("bit-balance",
                                            "Best single-bit predictor advantage probe");
        cmd->add_option("--n", balance.n, "Input length");
        cmd->add_option("--m", balance.m, "Hash length");
        cmd->add_option("--trials", balance.trials, "Trials (>= 1000)");
        cmd->add_option("--seed", balance.seed, "Seed");
        cmd->add_option("--bound", balance.bound, "Fail (exit 3) when max advantage >= bound");
        cmd->callback([&] {
            vp_projection* ps = nullptr;
            check(vp_projection_sample(balance.n, balance.m, balance.seed, &ps));
            std::unique_ptr<vp_projection, decltype(&vp_projection_free)> guard(
                ps, &vp_projection_free);
            double mx = 0, mean = 0;
            check(vp_lsh_bit_balance(ps, balance.trials, balance.seed, &mx, &mean));
            std::printf("{\"n\": %zu, \"m\": %zu, \"trials\": %zu, \"max\": %.6f, \"mean\": %.6f}\n",
                        balance.n, balance.m, balance.trials, mx, mean);
            if (balance.bound >= 0 && mx >= balance.bound) std::exit(kExitBound);
        });
    }

    struct {
        ConfigOpts cfg;
        std::string dataset;
        bool strict = false;
    } entropy;
    {
        auto* cmd = lsh_cmd->add_subcommand("entropy",
                                            "Marginal-entropy estimate of dataset features");
        add_config_options(cmd, entropy.cfg);
        cmd->add_option("--dataset", entropy.dataset, "Dataset JSONL")->required();
        cmd->add_flag("--check", entropy.strict,
                      "Fail (exit 3) when the estimate is below hash_bits + lambda");
        cmd->callback([&] {
            auto cfg = build_config(entropy.cfg);
            vp_dataset* ds = nullptr;
            check(vp_dataset_load(entropy.dataset.c_str(), &ds));
            std::unique_ptr<vp_dataset, decltype(&vp_dataset_free)> guard(ds, &vp_dataset_free);
            double bits = 0;
            size_t samples = 0;
            check(vp_lsh_entropy(ds, cfg.get(), &bits, &samples));
            OwnedString m_str, lambda_str;
            check(vp_config_get(cfg.get(), "hash_bits", &m_str.p));
            check(vp_config_get(cfg.get(), "lambda", &lambda_str.p));
            double threshold = std::strtod(m_str.str().c_str(), nullptr) +
                               std::strtod(lambda_str.str().c_str(), nullptr);
            std::printf("{\"entropy_bits\": %.3f, \"samples\": %zu, \"threshold\": %.1f, "
                        "\"ok\": %s}\n",
                        bits, samples, threshold, bits >= threshold ? "true" : "false");
            if (entropy.strict && bits < threshold) std::exit(kExitBound);
        });
    }

    // ---------------- ledger ----------------
    auto* ledger_cmd = app.add_subcommand("ledger", "Permissioned ledger workspaces");
    ledger_cmd->require_subcommand(1);

    struct {
        std::string dir;
        size_t parties = 3;
        uint64_t seed = 1;
        bool no_empty = false;
    } linit;
    {
        auto* cmd = ledger_cmd->add_subcommand("init", "Create a ledger workspace");
        cmd->add_option("--dir", linit.dir, "Workspace directory (must exist)")->required();
        cmd->add_option("--parties", linit.parties, "Number of member parties")->required();
        cmd->add_option("--seed", linit.seed, "Key/derivation seed");
        cmd->add_flag("--no-empty-blocks", linit.no_empty,
                      "Skip block production when the mempool is empty");
        cmd->callback([&] {
            check(vp_ledger_init(linit.dir.c_str(), linit.parties, linit.seed,
                                 linit.no_empty ? 0 : 1));
            std::printf("initialized %s with %zu parties\n", linit.dir.c_str(), linit.parties);
        });
    }

    struct {
        std::string dir;
        size_t count = 1;
    } ltick;
    {
        auto* cmd = ledger_cmd->add_subcommand("tick", "Advance block production");
        cmd->add_option("--dir", ltick.dir, "Workspace directory")->required();
        cmd->add_option("--count", ltick.count, "Number of production slots");
        cmd->callback([&] {
            vp_ledger* lg = nullptr;
            check(vp_ledger_open(ltick.dir.c_str(), &lg));
            std::unique_ptr<vp_ledger, decltype(&vp_ledger_free)> guard(lg, &vp_ledger_free);
            uint64_t height = 0;
            check(vp_ledger_tick(lg, ltick.count, &height));
            check(vp_ledger_save(lg, ltick.dir.c_str()));
            std::printf("height: %llu\n", static_cast<unsigned long long>(height));
        });
    }

    struct {
        std::string dir;
    } lverify;
    {
        auto* cmd = ledger_cmd->add_subcommand("verify", "Re-validate the chain");
        cmd->add_option("--dir", lverify.dir, "Workspace directory")->required();
        cmd->callback([&] {
            vp_ledger* lg = nullptr;
            check(vp_ledger_open(lverify.dir.c_str(), &lg));
            std::unique_ptr<vp_ledger, decltype(&vp_ledger_free)> guard(lg, &vp_ledger_free);
            int ok = 0;
            OwnedString what;
            check(vp_ledger_verify(lg, &ok, &what.p));
            if (ok) {
                std::printf("ok\n");
            } else {
                std::printf("INVALID: %s\n", what.str().c_str());
                std::exit(kExitBound);
            }
        });
    }

    struct {
        std::string dir;
        uint64_t height = 0;
    } lshow;
    {
        auto* cmd = ledger_cmd->add_subcommand("show", "Print one block as JSON");
        cmd->add_option("--dir", lshow.dir, "Workspace directory")->required();
        cmd->add_option("--height", lshow.height, "Block height")->required();
        cmd->callback([&] {
            vp_ledger* lg = nullptr;
            check(vp_ledger_open(lshow.dir.c_str(), &lg));
            std::unique_ptr<vp_ledger, decltype(&vp_ledger_free)> guard(lg, &vp_ledger_free);
            OwnedString out;
            check(vp_ledger_show(lg, lshow.height, &out.p));
            std::printf("%s\n", out.str().c_str());
        });
    }

    struct {
        std::string dir, format = "jsonl", out;
    } lexport;
    {
        auto* cmd = ledger_cmd->add_subcommand("export", "Dump the chain");
        cmd->add_option("--dir", lexport.dir, "Workspace directory")->required();
        cmd->add_option("--format", lexport.format, "jsonl (one block per line)");
        cmd->add_option("--out", lexport.out, "Write here instead of stdout");
        cmd->callback([&] {
            if (lexport.format != "jsonl") die("unknown export format: " + lexport.format);
            vp_ledger* lg = nullptr;
            check(vp_ledger_open(lexport.dir.c_str(), &lg));
            std::unique_ptr<vp_ledger, decltype(&vp_ledger_free)> guard(lg, &vp_ledger_free);
            OwnedString out;
            check(vp_ledger_export(lg, &out.p));
            if (lexport.out.empty())
                std::fputs(out.str().c_str(), stdout);
            else
                write_file_or_die(lexport.out, out.str());
        });
    }

    // ---------------- passport ----------------
    auto* pp_cmd = app.add_subcommand("passport", "Passport protocol operations");
    pp_cmd->require_subcommand(1);

    struct {
        ConfigOpts cfg;
        std::string dir, dataset;
    } psetup;
    {
        auto* cmd = pp_cmd->add_subcommand("setup", "Write system parameters into a workspace");
        add_config_options(cmd, psetup.cfg);
        cmd->add_option("--dir", psetup.dir, "Ledger workspace directory")->required();
        cmd->add_option("--dataset", psetup.dataset,
                        "Dataset for population-mask derivation (type2 masking)");
        cmd->callback([&] {
            auto cfg = build_config(psetup.cfg);
            check(vp_passport_setup(cfg.get(),
                                    psetup.dataset.empty() ? nullptr : psetup.dataset.c_str(),
                                    psetup.dir.c_str()));
            std::printf("wrote %s/params.json\n", psetup.dir.c_str());
        });
    }

    struct PassportOp {
        std::string dir, dob, gender, scan, record;
        size_t node = 0;
    };
    auto open_node = [](const PassportOp& op) {
        vp_node* node = nullptr;
        check(vp_node_open(op.dir.c_str(), op.node, &node));
        return std::unique_ptr<vp_node, decltype(&vp_node_free)>(node, &vp_node_free);
    };
    auto add_user_options = [](CLI::App* cmd, PassportOp& op, bool record) {
        cmd->add_option("--dir", op.dir, "Ledger workspace directory")->required();
        cmd->add_option("--node", op.node, "Node (party) index");
        cmd->add_option("--dob", op.dob, "Date of birth, dd/mm/yyyy")->required();
        cmd->add_option("--gender", op.gender, "male | female | other")->required();
        cmd->add_option("--scan", op.scan, "Scan file")->required();
        if (record)
            cmd->add_option("--record", op.record, "Vaccination record JSON")->required();
    };

    static PassportOp penroll;
    {
        auto* cmd = pp_cmd->add_subcommand("enroll", "Enroll a user");
        add_user_options(cmd, penroll, true);
        cmd->callback([&] {
            auto node = open_node(penroll);
            OwnedString id;
            check(vp_node_enroll(node.get(), penroll.dob.c_str(), penroll.gender.c_str(),
                                 penroll.scan.c_str(), penroll.record.c_str(), &id.p));
            check(vp_node_save(node.get()));
            std::printf("enrolled: %s\n", id.str().c_str());
        });
    }

    static PassportOp pauth;
    {
        auto* cmd = pp_cmd->add_subcommand("auth", "Authenticate a user");
        add_user_options(cmd, pauth, false);
        cmd->callback([&] {
            auto node = open_node(pauth);
            int found = 0;
            OwnedString id;
            check(vp_node_auth(node.get(), pauth.dob.c_str(), pauth.gender.c_str(),
                               pauth.scan.c_str(), &found, &id.p));
            check(vp_node_save(node.get()));
            if (found)
                std::printf("match: %s\n", id.str().c_str());
            else
                std::printf("no match\n");
        });
    }

    static PassportOp padd;
    {
        auto* cmd = pp_cmd->add_subcommand("add-record", "Append a record (enrolls if unknown)");
        add_user_options(cmd, padd, true);
        cmd->callback([&] {
            auto node = open_node(padd);
            OwnedString id;
            int enrolled = 0;
            check(vp_node_add_record(node.get(), padd.dob.c_str(), padd.gender.c_str(),
                                     padd.scan.c_str(), padd.record.c_str(), &id.p, &enrolled));
            check(vp_node_save(node.get()));
            std::printf("%s: %s\n", enrolled ? "enrolled" : "appended", id.str().c_str());
        });
    }

    static PassportOp pfetch;
    {
        auto* cmd = pp_cmd->add_subcommand("fetch", "Fetch a user's records");
        add_user_options(cmd, pfetch, false);
        cmd->callback([&] {
            auto node = open_node(pfetch);
            OwnedString out;
            check(vp_node_fetch(node.get(), pfetch.dob.c_str(), pfetch.gender.c_str(),
                                pfetch.scan.c_str(), &out.p));
            check(vp_node_save(node.get()));
            std::printf("%s\n", out.str().c_str());
        });
    }

    struct {
        std::string dir;
        size_t node = 0;
    } psync;
    {
        auto* cmd = pp_cmd->add_subcommand("sync", "Synchronize a node's local view");
        cmd->add_option("--dir", psync.dir, "Ledger workspace directory")->required();
        cmd->add_option("--node", psync.node, "Node (party) index");
        cmd->callback([&] {
            PassportOp op;
            op.dir = psync.dir;
            op.node = psync.node;
            auto node = open_node(op);
            uint64_t blocks = 0;
            check(vp_node_sync(node.get(), &blocks));
            check(vp_node_save(node.get()));
            std::printf("synced blocks: %llu\n", static_cast<unsigned long long>(blocks));
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitError;
    }
    return 0;
}

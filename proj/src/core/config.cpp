#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

namespace vpass {

using nlohmann::json;

MaskingMode masking_mode_from_string(const std::string& s) {
    if (s == "type1") return MaskingMode::Type1;
    if (s == "type2") return MaskingMode::Type2;
    fail(Errc::validation, "unknown masking mode: " + s + " (expected type1 or type2)");
}

const char* masking_mode_name(MaskingMode m) {
    return m == MaskingMode::Type1 ? "type1" : "type2";
}

namespace {

uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(Errc::validation, "config key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(Errc::validation, "config key '" + key + "' expects a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(Errc::validation, "config key '" + key + "' expects a boolean, got '" + value + "'");
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
    if (key == "rows")
        rows = parse_u64(key, value);
    else if (key == "cols")
        cols = parse_u64(key, value);
    else if (key == "max_shifts")
        max_shifts = parse_u64(key, value);
    else if (key == "masking_mode")
        masking_mode = masking_mode_from_string(value);
    else if (key == "p_intra")
        p_intra = parse_double(key, value);
    else if (key == "mask_density")
        mask_density = parse_double(key, value);
    else if (key == "seed")
        seed = parse_u64(key, value);
    else if (key == "subjects")
        subjects = parse_u64(key, value);
    else if (key == "samples_per_subject")
        samples_per_subject = parse_u64(key, value);
    else if (key == "m" || key == "hash_bits")
        hash_bits = parse_u64(key, value);
    else if (key == "lambda")
        lambda = parse_u64(key, value);
    else if (key == "threshold")
        threshold = parse_double(key, value);
    else if (key == "empty_blocks")
        empty_blocks = parse_bool(key, value);
    else if (key == "rotation_compensation")
        rotation_compensation = parse_bool(key, value);
    else if (key == "impostor_cap_factor")
        impostor_cap_factor = parse_u64(key, value);
    else
        fail(Errc::validation, "unknown config key: " + key);
}

namespace {

// shortest representation that parses back to the same double
std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string Config::get(const std::string& key) const {
    if (key == "rows") return std::to_string(rows);
    if (key == "cols") return std::to_string(cols);
    if (key == "max_shifts") return std::to_string(max_shifts);
    if (key == "masking_mode") return masking_mode_name(masking_mode);
    if (key == "p_intra") return format_double(p_intra);
    if (key == "mask_density") return format_double(mask_density);
    if (key == "seed") return std::to_string(seed);
    if (key == "subjects") return std::to_string(subjects);
    if (key == "samples_per_subject") return std::to_string(samples_per_subject);
    if (key == "m" || key == "hash_bits") return std::to_string(hash_bits);
    if (key == "lambda") return std::to_string(lambda);
    if (key == "threshold") return format_double(threshold);
    if (key == "empty_blocks") return empty_blocks ? "true" : "false";
    if (key == "rotation_compensation") return rotation_compensation ? "true" : "false";
    if (key == "impostor_cap_factor") return std::to_string(impostor_cap_factor);
    fail(Errc::validation, "unknown config key: " + key);
}

void Config::load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(Errc::parse, "config file must hold a JSON object");
    for (auto& [key, value] : j.items()) {
        std::string s;
        if (value.is_string())
            s = value.get<std::string>();
        else
            s = value.dump();
        set(key, s);
    }
    validate();
}

std::string Config::to_json() const {
    json j{{"rows", rows},
           {"cols", cols},
           {"max_shifts", max_shifts},
           {"masking_mode", masking_mode_name(masking_mode)},
           {"p_intra", p_intra},
           {"mask_density", mask_density},
           {"seed", seed},
           {"subjects", subjects},
           {"samples_per_subject", samples_per_subject},
           {"m", hash_bits},
           {"lambda", lambda},
           {"threshold", threshold},
           {"empty_blocks", empty_blocks},
           {"rotation_compensation", rotation_compensation},
           {"impostor_cap_factor", impostor_cap_factor}};
    return j.dump(2);
}

void Config::validate() const {
    if (rows < 1 || cols < 1) fail(Errc::validation, "rows and cols must be >= 1");
    if (p_intra < 0 || p_intra >= 0.5) fail(Errc::validation, "p_intra must be in [0, 0.5)");
    if (mask_density < 0 || mask_density >= 1)
        fail(Errc::validation, "mask_density must be in [0, 1)");
    if (hash_bits < 1) fail(Errc::validation, "m must be >= 1");
    if (threshold <= 0 || threshold >= 1)
        fail(Errc::validation, "threshold must be strictly between 0 and 1");
}

}  // namespace vpass

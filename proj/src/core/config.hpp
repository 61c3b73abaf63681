#pragma once

#include <cstdint>
#include <string>

#include "common.hpp"

namespace vpass {

enum class MaskingMode { Type1, Type2 };

MaskingMode masking_mode_from_string(const std::string& s);
const char* masking_mode_name(MaskingMode m);

// Global knobs shared across modules. Keys match the JSON config file.
struct Config {
    size_t rows = 20;
    size_t cols = 480;
    size_t max_shifts = 8;
    MaskingMode masking_mode = MaskingMode::Type1;
    double p_intra = 0.1;
    double mask_density = 0.1;
    uint64_t seed = 1;
    size_t subjects = 10;
    size_t samples_per_subject = 4;
    size_t hash_bits = 256;    // m
    size_t lambda = 128;       // security parameter
    double threshold = 0.3;    // hash-distance acceptance threshold
    bool empty_blocks = true;  // produce a block even when the mempool is empty
    // apply rotational-shift compensation before hashing in the protocol path
    bool rotation_compensation = false;
    size_t impostor_cap_factor = 10;  // impostor pairs capped at factor * genuine pairs

    size_t feature_bits() const { return rows * cols; }

    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
    void load_json_file(const std::string& path);
    std::string to_json() const;
    void validate() const;
};

}  // namespace vpass

#pragma once

// Plain-text model descriptions.
//
//   # comment
//   omega_c = 1.0
//   rwa = true
//   photon_cutoff = 1
//   atom.1.omega = 1.0
//   atom.1.g = 0.01
//   atom.2.omega = 1.0
//   atom.2.x = 1.2e-6          # position instead of g, needs physical.*
//   physical.omega_c = 2.4e15  # rad/s
//   physical.dipole = 2.5e-29  # C m
//   physical.volume = 1e-15    # m^3
//   zs.atom = 1
//   zs.ds = 0.01
//   zs.dg = 0.007
//
// One `key = value` per line. Atoms are numbered from 1 without gaps.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "darkcav/model.hpp"

namespace darkcav {

class ModelFileError : public std::runtime_error {
public:
    ModelFileError(std::string source, int line, const std::string& message);

    int line() const noexcept { return line_; }

private:
    int line_;
};

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;  ///< 0 for command-line overrides
};

std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source = "<input>");

/// Applies `key=value` overrides; a matching key is replaced, otherwise appended.
void apply_overrides(std::vector<KeyValue>& entries, const std::vector<std::string>& overrides);

struct ModelDescription {
    CavityModel model;
    std::size_t zs_atom = 0;  ///< 0-based
    double zs_ds = 0.0;
    double zs_dg = 0.0;
};

ModelDescription interpret(const std::vector<KeyValue>& entries, const std::string& source = "<input>");

ModelDescription load_model_file(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Locale-independent strict number parsing; throws std::invalid_argument.
double parse_double(const std::string& text);
long long parse_integer(const std::string& text);
bool parse_bool(const std::string& text);

}  // namespace darkcav

#include "darkcav/model_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>

namespace darkcav {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string describe(const std::string& source, int line) {
    return line > 0 ? source + ":" + std::to_string(line) : source + ": override";
}

}  // namespace

ModelFileError::ModelFileError(std::string source, int line, const std::string& message)
    : std::runtime_error(describe(source, line) + ": " + message), line_(line) {}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (!t.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (t.empty() || ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw std::invalid_argument("not a finite number: '" + text + "'");
    }
    return value;
}

long long parse_integer(const std::string& text) {
    const std::string t = trim(text);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw std::invalid_argument("not an integer: '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    throw std::invalid_argument("not a boolean: '" + text + "'");
}

std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source) {
    std::vector<KeyValue> entries;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string text = trim(raw);
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ModelFileError(source, line, "expected 'key = value'");
        }
        KeyValue kv{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
        if (kv.key.empty()) {
            throw ModelFileError(source, line, "missing key");
        }
        if (kv.value.empty()) {
            throw ModelFileError(source, line, "missing value for '" + kv.key + "'");
        }
        if (!seen.insert(kv.key).second) {
            throw ModelFileError(source, line, "duplicate key '" + kv.key + "'");
        }
        entries.push_back(std::move(kv));
    }
    return entries;
}

void apply_overrides(std::vector<KeyValue>& entries, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            throw ModelFileError("<command line>", 0, "override '" + o + "' is not key=value");
        }
        KeyValue kv{trim(o.substr(0, eq)), trim(o.substr(eq + 1)), 0};
        if (kv.key.empty() || kv.value.empty()) {
            throw ModelFileError("<command line>", 0, "override '" + o + "' is not key=value");
        }
        auto it = std::find_if(entries.begin(), entries.end(), [&](const KeyValue& e) { return e.key == kv.key; });
        if (it != entries.end()) {
            *it = std::move(kv);
        } else {
            entries.push_back(std::move(kv));
        }
    }
}

ModelDescription interpret(const std::vector<KeyValue>& entries, const std::string& source) {
    struct AtomEntry {
        std::optional<double> omega, g, x;
        int line = 0;
    };
    std::map<long long, AtomEntry> atoms;
    std::optional<double> omega_c, phys_omega_c, dipole, volume;
    ModelDescription out;
    out.model.atoms.clear();
    bool any_position = false;
    int first_position_line = 0;

    for (const auto& kv : entries) {
        try {
            if (kv.key == "omega_c") {
                omega_c = parse_double(kv.value);
            } else if (kv.key == "rwa") {
                out.model.rwa = parse_bool(kv.value);
            } else if (kv.key == "photon_cutoff") {
                const long long n = parse_integer(kv.value);
                if (n < 1 || n > 1 << 16) {
                    throw std::invalid_argument("photon_cutoff must be >= 1");
                }
                out.model.photon_cutoff = static_cast<int>(n);
            } else if (kv.key == "physical.omega_c") {
                phys_omega_c = parse_double(kv.value);
            } else if (kv.key == "physical.dipole") {
                dipole = parse_double(kv.value);
            } else if (kv.key == "physical.volume") {
                volume = parse_double(kv.value);
            } else if (kv.key == "zs.atom") {
                const long long a = parse_integer(kv.value);
                if (a < 1) {
                    throw std::invalid_argument("zs.atom is 1-based");
                }
                out.zs_atom = static_cast<std::size_t>(a - 1);
            } else if (kv.key == "zs.ds") {
                out.zs_ds = parse_double(kv.value);
            } else if (kv.key == "zs.dg") {
                out.zs_dg = parse_double(kv.value);
            } else if (kv.key.rfind("atom.", 0) == 0) {
                const auto dot = kv.key.find('.', 5);
                if (dot == std::string::npos) {
                    throw std::invalid_argument("unknown key '" + kv.key + "'");
                }
                const long long index = parse_integer(kv.key.substr(5, dot - 5));
                if (index < 1 || index > static_cast<long long>(kMaxAtoms)) {
                    throw std::invalid_argument("atom index out of range in '" + kv.key + "'");
                }
                const std::string field = kv.key.substr(dot + 1);
                AtomEntry& atom = atoms[index];
                atom.line = atom.line == 0 ? kv.line : atom.line;
                if (field == "omega") {
                    atom.omega = parse_double(kv.value);
                } else if (field == "g") {
                    atom.g = parse_double(kv.value);
                } else if (field == "x") {
                    atom.x = parse_double(kv.value);
                    if (!any_position) {
                        first_position_line = kv.line;
                    }
                    any_position = true;
                } else {
                    throw std::invalid_argument("unknown key '" + kv.key + "'");
                }
            } else {
                throw std::invalid_argument("unknown key '" + kv.key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw ModelFileError(source, kv.line, e.what());
        }
    }

    if (!omega_c) {
        throw ModelFileError(source, 1, "missing required key 'omega_c'");
    }
    out.model.omega_c = *omega_c;
    if (any_position && (!phys_omega_c || !dipole || !volume)) {
        throw ModelFileError(source, first_position_line,
                             "atom positions need physical.omega_c, physical.dipole and physical.volume");
    }
    long long expected = 1;
    for (const auto& [index, atom] : atoms) {
        if (index != expected) {
            throw ModelFileError(source, atom.line, "atoms must be numbered 1..n without gaps (missing atom " +
                                                        std::to_string(expected) + ")");
        }
        ++expected;
        if (!atom.omega) {
            throw ModelFileError(source, atom.line, "atom " + std::to_string(index) + " has no omega");
        }
        if (atom.g.has_value() == atom.x.has_value()) {
            throw ModelFileError(source, atom.line, "atom " + std::to_string(index) + " needs exactly one of g or x");
        }
        AtomParams p;
        p.omega = *atom.omega;
        if (atom.g) {
            p.g = *atom.g;
        } else {
            try {
                const double g_si = coupling_from_position(*atom.x, cavity_length(*phys_omega_c), *phys_omega_c,
                                                           *dipole, *volume);
                p.g = g_si / *phys_omega_c * out.model.omega_c;
            } catch (const std::invalid_argument& e) {
                throw ModelFileError(source, atom.line, e.what());
            }
            p.position = atom.x;
        }
        out.model.atoms.push_back(p);
    }
    try {
        validate(out.model);
    } catch (const std::invalid_argument& e) {
        throw ModelFileError(source, 0 + (atoms.empty() ? 1 : atoms.begin()->second.line), e.what());
    }
    if (out.zs_atom >= out.model.n_atoms()) {
        throw ModelFileError(source, 1, "zs.atom refers to a missing atom");
    }
    return out;
}

ModelDescription load_model_file(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read model file '" + path.string() + "'");
    }
    auto entries = parse_key_values(in, path.string());
    apply_overrides(entries, overrides);
    return interpret(entries, path.string());
}

}  // namespace darkcav

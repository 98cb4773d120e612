#include "dstbc/spec_io.hpp"

#include <fstream>
#include <sstream>

#include "dstbc/errors.hpp"

namespace dstbc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long parse_long(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long value = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ConfigError("spec file: bad integer for key '" + key + "': '" + s + "'");
    }
}

std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<int>(parse_long(trim(item), key)));
    if (out.empty()) throw ConfigError("spec file: empty list for key '" + key + "'");
    return out;
}

} // namespace

CyclicCodeSpec parse_spec(const std::string& text) {
    bool have_r = false, have_l = false, have_u = false;
    long relays = 0, order = 0;
    std::vector<int> u;
    GbhKind gbh = GbhKind::real_hadamard;

    std::stringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("spec file: expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "R") {
            relays = parse_long(value, key);
            have_r = true;
        } else if (key == "L") {
            order = parse_long(value, key);
            have_l = true;
        } else if (key == "u") {
            u = parse_int_list(value, key);
            have_u = true;
        } else if (key == "gbh_kind") {
            gbh = gbh_from_string(value);
        } else {
            throw ConfigError("spec file: unknown key '" + key + "'");
        }
    }
    if (!have_r || !have_l || !have_u)
        throw ConfigError("spec file: keys R, L and u are all required");
    if (relays < 1 || order < 1)
        throw ConfigError("spec file: R and L must be positive");

    CyclicCodeSpec spec;
    spec.relays = static_cast<std::size_t>(relays);
    spec.order = static_cast<std::size_t>(order);
    spec.gbh = gbh;
    spec.exponents.reserve(u.size());
    for (int e : u) {
        long m = e % order;
        if (m < 0) m += order;
        spec.exponents.push_back(static_cast<int>(m));
    }
    spec.validate();
    return spec;
}

CyclicCodeSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

std::string format_spec(const CyclicCodeSpec& spec) {
    std::ostringstream out;
    out << "R=" << spec.relays << "\n";
    out << "L=" << spec.order << "\n";
    out << "u=";
    for (std::size_t i = 0; i < spec.exponents.size(); ++i) {
        if (i) out << ",";
        out << spec.exponents[i];
    }
    out << "\n";
    out << "gbh_kind=" << to_string(spec.gbh) << "\n";
    return out.str();
}

void save_spec(const CyclicCodeSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write spec file: " + path);
    out << format_spec(spec);
    if (!out) throw ConfigError("failed writing spec file: " + path);
}

} // namespace dstbc

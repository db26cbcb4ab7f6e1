#include "fracwave/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fracwave {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected `key = value`, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.entries_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
        cfg.entries_[key] = value;
    }
    return cfg;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        throw ConfigError(origin_ + ": missing required config field `" + key + "`");
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": field `" + key + "` is not a number: " + v);
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": field `" + key + "` is not an integer: " + v);
    }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::vector<std::string> KeyValueConfig::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k.rfind(prefix, 0) == 0) out.push_back(k);
    return out;
}

std::string KeyValueConfig::canonical_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    return out.str();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_domain_header(std::ostream& out, const DomainSpec& dom, const TimeGrid& time) {
    out << "dim " << dom.dim << "\n";
    out << "lengths " << format_double(dom.lengths[0]);
    if (dom.dim == 2) out << " " << format_double(dom.lengths[1]);
    out << "\n";
    out << "n_interior " << dom.n_interior[0];
    if (dom.dim == 2) out << " " << dom.n_interior[1];
    out << "\n";
    out << "T " << format_double(time.T) << "\n";
    out << "n_steps " << time.n_steps << "\n";
}

std::map<std::string, std::string> read_header(std::istream& in, int header_lines) {
    std::map<std::string, std::string> h;
    std::string line;
    for (int i = 0; i < header_lines; ++i) {
        if (!std::getline(in, line)) throw ConfigError("field file: truncated header");
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw ConfigError("field file: malformed header line: " + line);
        h[line.substr(0, sp)] = line.substr(sp + 1);
    }
    return h;
}

} // namespace

void write_time_series(const std::filesystem::path& path, const TimeSeriesField& u,
                       const std::string& kind) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write field file: " + path.string());
    out << "# fracwave-field v1\n";
    out << "kind " << kind << "\n";
    write_domain_header(out, u.basis->domain(), u.time);
    out << "cols " << u.modes() << "\n";
    for (int n = 0; n < u.snapshots(); ++n) {
        auto snap = u.snapshot(n);
        for (int k = 0; k < u.modes(); ++k) {
            if (k) out << ' ';
            out << format_double(snap[k]);
        }
        out << '\n';
    }
}

TimeSeriesField read_time_series(const std::filesystem::path& path, const BasisPtr& basis) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field file: " + path.string());
    std::string magic;
    std::getline(in, magic);
    if (magic != "# fracwave-field v1") throw ConfigError("not a fracwave field file: " + path.string());
    auto h = read_header(in, 7);
    const DomainSpec& dom = basis->domain();
    if (std::stoi(h.at("dim")) != dom.dim)
        throw ConfigError("field file dimension mismatch: " + path.string());
    TimeGrid time{std::stod(h.at("T")), std::stoi(h.at("n_steps"))};
    const int cols = std::stoi(h.at("cols"));
    if (cols != basis->size()) throw ConfigError("field file mode count mismatch: " + path.string());
    TimeSeriesField u = TimeSeriesField::zeros(basis, time);
    for (int n = 0; n < u.snapshots(); ++n) {
        auto snap = u.snapshot(n);
        for (int k = 0; k < cols; ++k)
            if (!(in >> snap[k])) throw ConfigError("field file: truncated data: " + path.string());
    }
    return u;
}

void write_window_field(const std::filesystem::path& path, const WindowField& w,
                        const DomainSpec& domain) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write field file: " + path.string());
    out << "# fracwave-window v1\n";
    write_domain_header(out, domain, w.time);
    out << "window " << w.window.lo[0] << " " << w.window.hi[0] << " " << w.window.lo[1] << " "
        << w.window.hi[1] << "\n";
    out << "cols " << w.nodes_per_snapshot << "\n";
    for (int n = 0; n < w.snapshots(); ++n) {
        auto snap = w.snapshot(n);
        for (int k = 0; k < w.nodes_per_snapshot; ++k) {
            if (k) out << ' ';
            out << format_double(snap[k]);
        }
        out << '\n';
    }
}

WindowField read_window_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field file: " + path.string());
    std::string magic;
    std::getline(in, magic);
    if (magic != "# fracwave-window v1")
        throw ConfigError("not a fracwave window file: " + path.string());
    auto h = read_header(in, 7);
    WindowField w;
    w.time = TimeGrid{std::stod(h.at("T")), std::stoi(h.at("n_steps"))};
    {
        std::istringstream ws(h.at("window"));
        ws >> w.window.lo[0] >> w.window.hi[0] >> w.window.lo[1] >> w.window.hi[1];
    }
    w.nodes_per_snapshot = std::stoi(h.at("cols"));
    w.values.resize(static_cast<size_t>(w.snapshots()) * w.nodes_per_snapshot);
    for (double& v : w.values)
        if (!(in >> v)) throw ConfigError("window file: truncated data: " + path.string());
    return w;
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write table: " + path.string());
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ',';
        out << columns[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
}

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot checksum missing file: " + path.string());
    uint64_t h = 14695981039346656037ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void RunManifest::add_artifact(const std::filesystem::path& dir, const std::string& name) {
    artifacts.emplace_back(name, file_checksum(dir / name));
}

void RunManifest::add_diagnostic(const std::string& key, const std::string& value) {
    diagnostics.emplace_back(key, value);
}

void RunManifest::add_diagnostic(const std::string& key, double value) {
    diagnostics.emplace_back(key, format_double(value));
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest: " + path.string());
    out << "# fracwave-manifest v1\n";
    out << "[config]\n" << config_text;
    out << "[diagnostics]\n";
    for (const auto& [k, v] : diagnostics) out << k << " = " << v << "\n";
    out << "[artifacts]\n";
    for (const auto& [name, sum] : artifacts) out << name << " " << sum << "\n";
    out << "wall_seconds " << format_double(wall_seconds) << "\n";
}

} // namespace fracwave

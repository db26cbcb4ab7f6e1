#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fracwave/sts.hpp"

namespace fracwave {

// Flat key-value configuration: one `section.key = value` per line,
// '#' comments, blank lines ignored. Parse errors carry line numbers.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::filesystem::path& path);
    static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;

    // keys with a given prefix (e.g. all "source.3." keys), sorted
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }
    // canonical text form (sorted keys), used for the manifest echo
    std::string canonical_text() const;

private:
    std::map<std::string, std::string> entries_;
    std::string origin_;
};

// ---- field files: plain text, header lines then one snapshot per row ----

void write_time_series(const std::filesystem::path& path, const TimeSeriesField& u,
                       const std::string& kind = "spectral");
TimeSeriesField read_time_series(const std::filesystem::path& path, const BasisPtr& basis);

void write_window_field(const std::filesystem::path& path, const WindowField& w,
                        const DomainSpec& domain);
WindowField read_window_field(const std::filesystem::path& path);

void write_table(const std::filesystem::path& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows);

// FNV-1a 64-bit checksum of a file's bytes, hex encoded
std::string file_checksum(const std::filesystem::path& path);

// exact round-trip formatting of a double
std::string format_double(double v);

struct RunManifest {
    std::string config_text;
    std::vector<std::pair<std::string, std::string>> artifacts;  // name -> checksum
    std::vector<std::pair<std::string, std::string>> diagnostics;
    double wall_seconds = 0.0;

    void add_artifact(const std::filesystem::path& dir, const std::string& name);
    void add_diagnostic(const std::string& key, const std::string& value);
    void add_diagnostic(const std::string& key, double value);
    void write(const std::filesystem::path& path) const;
};

} // namespace fracwave

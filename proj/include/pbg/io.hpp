// io.hpp — CSV output with digest tracking, run manifests, and a small
// parallel-for used by the sweep commands.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace pbg::io {

// FNV-1a, 64 bit; good enough to fingerprint runs and outputs.
class Digest {
  public:
    void update(const char* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= static_cast<unsigned char>(data[i]);
            state_ *= 0x100000001b3ull;
        }
    }
    void update(const std::string& s) { update(s.data(), s.size()); }
    std::string hex() const;

  private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

struct OutputRecord {
    std::string path;   // relative to the output directory
    std::string digest; // content digest
    std::uint64_t bytes = 0;
};

// A manifest fully determines a run: command, resolved parameters, numerics.
// The digest covers exactly those three (outputs are derived), so it can be
// stamped into every file the run writes.
struct RunManifest {
    std::string command;
    nlohmann::json params;
    nlohmann::json numerics;
    std::vector<OutputRecord> outputs;

    std::string digest() const;
    nlohmann::json to_json() const;
};

// Writes <command>_manifest.json atomically; returns the relative file name.
std::string write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

// Numeric CSV writer: '#' comment header block, then a column header row,
// then rows at %.12g.  Content goes to a temp file that is renamed into
// place on close, and the digest accumulates as bytes are written.
class CsvFile {
  public:
    CsvFile(std::filesystem::path path, const std::vector<std::string>& comments,
            const std::vector<std::string>& columns);
    ~CsvFile();

    CsvFile(const CsvFile&) = delete;
    CsvFile& operator=(const CsvFile&) = delete;

    void row(const std::vector<double>& values);
    void row(const std::vector<double>& values, const std::string& trailing_label);
    OutputRecord close(); // rename into place, return the record

  private:
    void write(const std::string& line);

    std::filesystem::path path_;
    std::filesystem::path temp_path_;
    std::ofstream stream_;
    Digest digest_;
    std::uint64_t bytes_ = 0;
    bool open_ = true;
};

// Runs fn(0..n-1) on up to `threads` workers; rethrows the first exception.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace pbg::io

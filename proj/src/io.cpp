#include "pbg/io.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace pbg::io {

std::string Digest::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
    return std::string(buf);
}

std::string RunManifest::digest() const {
    Digest d;
    d.update(command);
    d.update(params.dump());
    d.update(numerics.dump());
    return d.hex();
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json out;
    out["command"] = command;
    out["digest"] = digest();
    out["units"] = "reduced: coupling C = 1, frequencies in C^(2/3), times in C^(-2/3)";
    out["params"] = params;
    out["numerics"] = numerics;
    auto& files = out["outputs"];
    files = nlohmann::json::array();
    for (const auto& rec : outputs) {
        files.push_back({{"path", rec.path}, {"digest", rec.digest}, {"bytes", rec.bytes}});
    }
    return out;
}

std::string write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
    std::filesystem::create_directories(dir);
    const std::string name = manifest.command + "_manifest.json";
    const auto path = dir / name;
    const auto temp = dir / (name + ".tmp");
    {
        std::ofstream out(temp, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open for writing: " + temp.string());
        }
        out << manifest.to_json().dump(2) << "\n";
    }
    std::filesystem::rename(temp, path);
    return name;
}

CsvFile::CsvFile(std::filesystem::path path, const std::vector<std::string>& comments,
                 const std::vector<std::string>& columns)
    : path_(std::move(path)), temp_path_(path_.string() + ".tmp") {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    stream_.open(temp_path_, std::ios::trunc);
    if (!stream_) {
        throw std::runtime_error("cannot open for writing: " + temp_path_.string());
    }
    for (const auto& comment : comments) {
        write("# " + comment + "\n");
    }
    std::string header;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        header += (i ? "," : "") + columns[i];
    }
    write(header + "\n");
}

CsvFile::~CsvFile() {
    if (open_) {
        stream_.close();
        std::error_code ec;
        std::filesystem::remove(temp_path_, ec); // abandoned writer leaves no partial file
    }
}

void CsvFile::write(const std::string& line) {
    stream_ << line;
    digest_.update(line);
    bytes_ += line.size();
}

void CsvFile::row(const std::vector<double>& values) {
    std::string line;
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g", values[i]);
        if (i) {
            line += ',';
        }
        line += buf;
    }
    line += '\n';
    write(line);
}

void CsvFile::row(const std::vector<double>& values, const std::string& trailing_label) {
    std::string line;
    char buf[40];
    for (const double value : values) {
        std::snprintf(buf, sizeof(buf), "%.12g", value);
        line += buf;
        line += ',';
    }
    line += trailing_label;
    line += '\n';
    write(line);
}

OutputRecord CsvFile::close() {
    stream_.close();
    std::filesystem::rename(temp_path_, path_);
    open_ = false;
    OutputRecord rec;
    rec.path = path_.filename().string();
    rec.digest = digest_.hex();
    rec.bytes = bytes_;
    return rec;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

} // namespace pbg::io

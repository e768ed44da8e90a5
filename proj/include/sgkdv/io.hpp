#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sgkdv/trace.hpp"

namespace sgkdv {

// Writes through a temporary file in the target directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

// Shortest decimal form that round-trips (at most 17 significant digits).
std::string format_double(double v);

std::string trace_to_csv(const SpaceTimeTrace& tr);
std::string field_to_csv(const Field& f);

// Header: n (u64), L (f64), m (u64), dt (f64); payload (m+1) x n doubles,
// snapshot-major, all little-endian.
std::string trace_to_binary(const SpaceTimeTrace& tr);
SpaceTimeTrace trace_from_binary(const std::string& bytes, double t0 = 0.0);

void write_trace_csv(const std::filesystem::path& path, const SpaceTimeTrace& tr);
void write_trace_binary(const std::filesystem::path& path, const SpaceTimeTrace& tr);
SpaceTimeTrace read_trace_binary(const std::filesystem::path& path, double t0 = 0.0);

std::string read_file(const std::filesystem::path& path);

// Simple CSV builder with round-trip number formatting.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);
    const std::string& str() const { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

}  // namespace sgkdv

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "sgkdv/error.hpp"
#include "sgkdv/io.hpp"

namespace sgkdv {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::string& contents) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(dir);
    std::random_device rd;
    const fs::path tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    require(cells.size() == columns_, "csv row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
}

std::string trace_to_csv(const SpaceTimeTrace& tr) {
    std::vector<std::string> header{"x"};
    for (std::size_t i = 0; i < tr.size(); ++i) header.push_back("t=" + format_double(tr.time(i)));
    CsvWriter csv(header);
    const std::size_t n = tr.grid()->n();
    std::vector<double> row(tr.size() + 1);
    for (std::size_t j = 0; j < n; ++j) {
        row[0] = tr.grid()->point(j);
        for (std::size_t i = 0; i < tr.size(); ++i) row[i + 1] = tr.data()[i * n + j];
        csv.row(row);
    }
    return csv.str();
}

std::string field_to_csv(const Field& f) {
    CsvWriter csv({"x", "u"});
    for (std::size_t j = 0; j < f.size(); ++j) csv.row(std::vector<double>{f.grid->point(j), f.values[j]});
    return csv.str();
}

namespace {

static_assert(sizeof(double) == 8);

template <class T>
void put_le(std::string& out, T v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char b[8];
    std::memcpy(b, &bits, 8);
    out.append(b, 8);
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
    if (pos + 8 > in.size()) throw Error("truncated binary trace");
    std::uint64_t bits;
    std::memcpy(&bits, in.data() + pos, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    pos += 8;
    T v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

std::string trace_to_binary(const SpaceTimeTrace& tr) {
    std::string out;
    out.reserve(32 + tr.data().size() * 8);
    put_le<std::uint64_t>(out, tr.grid()->n());
    put_le<double>(out, tr.grid()->length());
    put_le<std::uint64_t>(out, tr.steps());
    put_le<double>(out, tr.dt());
    for (double v : tr.data()) put_le<double>(out, v);
    return out;
}

SpaceTimeTrace trace_from_binary(const std::string& bytes, double t0) {
    std::size_t pos = 0;
    const auto n = get_le<std::uint64_t>(bytes, pos);
    const auto length = get_le<double>(bytes, pos);
    const auto m = get_le<std::uint64_t>(bytes, pos);
    const auto dt = get_le<double>(bytes, pos);
    if (bytes.size() != 32 + (m + 1) * n * 8) throw Error("binary trace size does not match header");
    SpaceTimeTrace tr(make_grid(n, length), t0, dt, m);
    for (double& v : tr.data()) v = get_le<double>(bytes, pos);
    return tr;
}

void write_trace_csv(const fs::path& path, const SpaceTimeTrace& tr) { atomic_write(path, trace_to_csv(tr)); }

void write_trace_binary(const fs::path& path, const SpaceTimeTrace& tr) {
    atomic_write(path, trace_to_binary(tr));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SpaceTimeTrace read_trace_binary(const fs::path& path, double t0) {
    return trace_from_binary(read_file(path), t0);
}

}  // namespace sgkdv

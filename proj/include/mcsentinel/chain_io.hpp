#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "mcsentinel/chain.hpp"
#include "mcsentinel/source.hpp"

namespace mcsentinel {

enum class ChainEncoding { kCsv, kF64le };

/// Binary chain files start with this 24-byte header:
///   bytes 0-7   "MCSTREAM"
///   bytes 8-11  version (u32 LE, currently 1)
///   bytes 12-15 encoding (u32 LE, 1 = f64le)
///   bytes 16-23 p (u64 LE)
/// followed by rows of p little-endian doubles.
/// Anything not starting with the magic is read as CSV: comma separated,
/// one row per iteration, with an optional header row detected by a
/// non-numeric first field.
inline constexpr char kChainMagic[8] = {'M', 'C', 'S', 'T', 'R', 'E', 'A', 'M'};
inline constexpr std::uint32_t kChainVersion = 1;
inline constexpr std::size_t kChainHeaderBytes = 24;

struct ChainFileHeader {
    std::uint32_t version = kChainVersion;
    std::uint64_t dim = 0;
    ChainEncoding encoding = ChainEncoding::kCsv;
};

/// Streams rows of a chain file. Throws FormatError on malformed input,
/// naming the line (CSV) or byte offset (f64le).
class ChainFileReader final : public SampleSource {
public:
    explicit ChainFileReader(const std::filesystem::path& path);

    [[nodiscard]] std::size_t dim() const override { return header_.dim; }
    bool next(std::span<double> out) override;

    [[nodiscard]] const ChainFileHeader& header() const noexcept { return header_; }
    [[nodiscard]] const std::vector<std::string>& column_names() const noexcept { return names_; }
    [[nodiscard]] std::uint64_t rows_read() const noexcept { return rows_; }

private:
    bool next_csv(std::span<double> out);
    bool next_binary(std::span<double> out);
    bool read_csv_line(std::string& line);

    std::filesystem::path path_;
    std::ifstream in_;
    ChainFileHeader header_;
    std::vector<std::string> names_;
    std::string pending_;  // first CSV data row, held back after dimension sniffing
    bool has_pending_ = false;
    std::uint64_t line_no_ = 0;
    std::uint64_t pending_line_ = 0;
    std::uint64_t rows_ = 0;
    std::vector<char> buffer_;
};

class ChainFileWriter {
public:
    ChainFileWriter(const std::filesystem::path& path, std::size_t dim, ChainEncoding encoding);

    void write(std::span<const double> row);
    void close();

private:
    std::ofstream out_;
    std::size_t dim_;
    ChainEncoding encoding_;
    std::vector<char> buffer_;
};

/// Chooses CSV for a ".csv" extension and f64le otherwise.
[[nodiscard]] ChainEncoding encoding_for_path(const std::filesystem::path& path);

/// Reads a whole chain file into memory.
[[nodiscard]] ChainMatrix read_chain(const std::filesystem::path& path);

void write_chain(const std::filesystem::path& path, const ChainMatrix& chain, ChainEncoding encoding);

}  // namespace mcsentinel

#include "mcsentinel/chain_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>

#include "mcsentinel/error.hpp"

namespace mcsentinel {

namespace {

template <typename T>
T load_le(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof v);
    if constexpr (std::endian::native == std::endian::big) {
        auto* b = reinterpret_cast<unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof v / 2; ++i) std::swap(b[i], b[sizeof v - 1 - i]);
    }
    return v;
}

template <typename T>
void store_le(char* p, T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto* b = reinterpret_cast<unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof v / 2; ++i) std::swap(b[i], b[sizeof v - 1 - i]);
    }
    std::memcpy(p, &v, sizeof v);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end && !s.empty();
}

}  // namespace

ChainEncoding encoding_for_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? ChainEncoding::kCsv : ChainEncoding::kF64le;
}

ChainFileReader::ChainFileReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path.string());

    char head[kChainHeaderBytes];
    in_.read(head, sizeof head);
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got >= sizeof kChainMagic && std::memcmp(head, kChainMagic, sizeof kChainMagic) == 0) {
        if (got < kChainHeaderBytes) throw FormatError(path.string() + ": truncated header");
        header_.version = load_le<std::uint32_t>(head + 8);
        const auto enc = load_le<std::uint32_t>(head + 12);
        header_.dim = load_le<std::uint64_t>(head + 16);
        if (header_.version != kChainVersion) {
            throw FormatError(path.string() + ": unsupported version " + std::to_string(header_.version));
        }
        if (enc != 1) throw FormatError(path.string() + ": unknown encoding code " + std::to_string(enc));
        if (header_.dim == 0) throw FormatError(path.string() + ": zero coordinates in header");
        header_.encoding = ChainEncoding::kF64le;
        buffer_.resize(header_.dim * sizeof(double));
        return;
    }

    header_.encoding = ChainEncoding::kCsv;
    in_.clear();
    in_.seekg(0);
    std::string line;
    while (read_csv_line(line)) {
        const auto fields = split(line);
        double probe;
        if (!parse_double(fields.front(), probe)) {
            if (!names_.empty() || rows_ > 0) {
                throw FormatError(path.string() + ": line " + std::to_string(line_no_) +
                                  ": non-numeric value");
            }
            for (auto f : fields) names_.emplace_back(f);
            header_.dim = fields.size();
            continue;
        }
        if (!names_.empty() && fields.size() != header_.dim) {
            throw FormatError(path.string() + ": line " + std::to_string(line_no_) + ": expected " +
                              std::to_string(header_.dim) + " columns, found " +
                              std::to_string(fields.size()));
        }
        header_.dim = fields.size();
        pending_ = line;
        pending_line_ = line_no_;
        has_pending_ = true;
        break;
    }
    if (!has_pending_) throw FormatError(path.string() + ": no data rows");
}

bool ChainFileReader::read_csv_line(std::string& line) {
    while (std::getline(in_, line)) {
        ++line_no_;
        if (!trim(line).empty()) return true;
    }
    return false;
}

bool ChainFileReader::next(std::span<double> out) {
    if (out.size() != header_.dim) throw DimensionError("output buffer has wrong dimension");
    const bool ok = header_.encoding == ChainEncoding::kCsv ? next_csv(out) : next_binary(out);
    if (ok) ++rows_;
    return ok;
}

bool ChainFileReader::next_csv(std::span<double> out) {
    std::string line;
    std::uint64_t where = 0;
    if (has_pending_) {
        line = std::move(pending_);
        where = pending_line_;
        has_pending_ = false;
    } else {
        if (!read_csv_line(line)) return false;
        where = line_no_;
    }
    const auto fields = split(line);
    if (fields.size() != header_.dim) {
        throw FormatError(path_.string() + ": line " + std::to_string(where) + ": expected " +
                          std::to_string(header_.dim) + " columns, found " +
                          std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (!parse_double(fields[i], out[i])) {
            throw FormatError(path_.string() + ": line " + std::to_string(where) + ", column " +
                              std::to_string(i + 1) + ": cannot parse '" + std::string(fields[i]) +
                              "'");
        }
    }
    return true;
}

bool ChainFileReader::next_binary(std::span<double> out) {
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0) return false;
    if (got < buffer_.size()) {
        const std::uint64_t offset = kChainHeaderBytes + rows_ * buffer_.size();
        throw FormatError(path_.string() + ": truncated record at byte offset " +
                          std::to_string(offset) + " (" + std::to_string(got) + " of " +
                          std::to_string(buffer_.size()) + " bytes)");
    }
    for (std::size_t i = 0; i < header_.dim; ++i) out[i] = load_le<double>(buffer_.data() + 8 * i);
    return true;
}

ChainFileWriter::ChainFileWriter(const std::filesystem::path& path, std::size_t dim,
                                 ChainEncoding encoding)
    : out_(path, std::ios::binary | std::ios::trunc), dim_(dim), encoding_(encoding) {
    if (!out_) throw FormatError("cannot open " + path.string() + " for writing");
    if (dim == 0) throw InvalidArgument("dimension must be at least 1");
    if (encoding_ == ChainEncoding::kF64le) {
        char head[kChainHeaderBytes];
        std::memcpy(head, kChainMagic, sizeof kChainMagic);
        store_le<std::uint32_t>(head + 8, kChainVersion);
        store_le<std::uint32_t>(head + 12, 1);
        store_le<std::uint64_t>(head + 16, dim);
        out_.write(head, sizeof head);
        buffer_.resize(dim * sizeof(double));
    } else {
        for (std::size_t i = 0; i < dim; ++i) out_ << (i ? ",x" : "x") << i;
        out_ << '\n';
    }
}

void ChainFileWriter::write(std::span<const double> row) {
    if (row.size() != dim_) throw DimensionError("row has wrong dimension");
    if (encoding_ == ChainEncoding::kF64le) {
        for (std::size_t i = 0; i < dim_; ++i) store_le<double>(buffer_.data() + 8 * i, row[i]);
        out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    } else {
        char text[32];
        for (std::size_t i = 0; i < dim_; ++i) {
            auto [ptr, ec] = std::to_chars(text, text + sizeof text, row[i]);
            if (i) out_.put(',');
            out_.write(text, ptr - text);
        }
        out_.put('\n');
    }
    if (!out_) throw FormatError("write failed");
}

void ChainFileWriter::close() {
    out_.close();
    if (out_.fail()) throw FormatError("closing chain file failed");
}

ChainMatrix read_chain(const std::filesystem::path& path) {
    ChainFileReader reader(path);
    ChainMatrix chain(reader.dim());
    std::vector<double> row(reader.dim());
    while (reader.next(row)) chain.append(row);
    return chain;
}

void write_chain(const std::filesystem::path& path, const ChainMatrix& chain, ChainEncoding encoding) {
    ChainFileWriter w(path, chain.dim(), encoding);
    for (std::size_t i = 0; i < chain.rows(); ++i) w.write(chain.row(i));
    w.close();
}

}  // namespace mcsentinel

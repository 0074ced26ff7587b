#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace powermarket {

class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what);

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view s);

// Buffered CSV writer. Fields are written verbatim; none of the outputs
// produced here contain delimiters or quotes.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

    CsvWriter& field(std::string_view s);
    CsvWriter& field(double v) { return field(format_double(v)); }
    CsvWriter& field(std::uint64_t v) { return field(std::string_view(std::to_string(v))); }
    void end_row();

    // Flushes and checks the stream; throws IoError on failure.
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    bool first_in_row_ = true;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based source line for each row.
    std::vector<std::size_t> lines;

    // Index of a header column; nullopt when absent.
    std::optional<std::size_t> column(std::string_view name) const;
};

// Splits on the first of ',', ';' or tab found in the first non-empty line.
// Blank lines and lines starting with '#' are skipped.
CsvTable read_delimited(const std::filesystem::path& path, bool has_header);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace powermarket

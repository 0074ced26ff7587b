#include "powermarket/csv.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

namespace powermarket {

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), path_(path) {}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError(path, "cannot open for writing");
    for (auto h : header) field(h);
    end_row();
}

CsvWriter& CsvWriter::field(std::string_view s) {
    if (!first_in_row_) out_.put(',');
    out_ << s;
    first_in_row_ = false;
    return *this;
}

void CsvWriter::end_row() {
    out_.put('\n');
    first_in_row_ = true;
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw IoError(path_, "write failed");
    out_.close();
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(path, "read failed");
    return ss.str();
}

CsvTable read_delimited(const std::filesystem::path& path, bool has_header) {
    const std::string text = read_text_file(path);
    CsvTable table;
    char delim = 0;
    bool header_pending = has_header;
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        if (delim == 0) {
            delim = ',';
            for (char c : {',', ';', '\t'})
                if (view.find(c) != std::string_view::npos) {
                    delim = c;
                    break;
                }
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = view.find(delim, start);
            const auto piece = view.substr(start, pos == std::string_view::npos ? pos : pos - start);
            std::string f(trim(piece));
            if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
            fields.push_back(std::move(f));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        if (header_pending) {
            table.header = std::move(fields);
            header_pending = false;
        } else {
            table.rows.push_back(std::move(fields));
            table.lines.push_back(line_no);
        }
    }
    return table;
}

}  // namespace powermarket

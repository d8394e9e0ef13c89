#include "bitekit/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace bitekit {

std::string fmt_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

CsvTable CsvTable::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    CsvTable table;
    table.path_ = path;
    std::string line;
    bool header_done = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_line(line);
        if (!header_done) {
            table.header_ = std::move(fields);
            header_done = true;
            continue;
        }
        if (fields.size() != table.header_.size())
            raise(ErrorCode::InvalidRow,
                  path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(table.header_.size()) + " fields, got " +
                      std::to_string(fields.size()));
        table.rows_.push_back(std::move(fields));
    }
    if (!header_done) raise(ErrorCode::MissingColumn, path + ": empty file, no header");
    return table;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return i;
    raise(ErrorCode::MissingColumn, path_ + ": missing column '" + name + "'");
}

double CsvTable::number_at(std::size_t row, std::size_t col) const {
    const std::string& text = rows_[row][col];
    // Decimal text converts to binary floating point exactly once, here.
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        raise(ErrorCode::InvalidRow,
              path_ + " row " + std::to_string(row + 2) + ": '" + text + "' is not a number");
    return value;
}

long long CsvTable::integer_at(std::size_t row, std::size_t col) const {
    const std::string& text = rows_[row][col];
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        raise(ErrorCode::InvalidRow,
              path_ + " row " + std::to_string(row + 2) + ": '" + text + "' is not an integer");
    return value;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) raise(ErrorCode::IoError, "cannot write " + path);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path);
    out << content;
}

}  // namespace bitekit

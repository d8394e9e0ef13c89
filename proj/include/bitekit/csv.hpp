#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "bitekit/errors.hpp"

namespace bitekit {

// Formats a double so the decimal text round-trips to the identical bits.
// All numeric artifacts go through this one function, which is what makes
// repeated runs byte-identical.
std::string fmt_double(double value);

// Minimal CSV support for the toolkit's schemas: UTF-8, comma-separated,
// '.' decimal, header row, no quoting. Lines starting with '#' are
// metadata comments (e.g. the config hash) and are skipped on read.
class CsvTable {
  public:
    static CsvTable read_file(const std::string& path);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t row_count() const { return rows_.size(); }
    const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

    // Column index by name; MissingColumn names the file.
    std::size_t column(const std::string& name) const;

    double number_at(std::size_t row, std::size_t col) const;
    long long integer_at(std::size_t row, std::size_t col) const;
    const std::string& text_at(std::size_t row, std::size_t col) const { return rows_[row][col]; }

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

class CsvWriter {
  public:
    CsvWriter(const std::string& path);
    ~CsvWriter();

    void comment(const std::string& text);
    void row(const std::vector<std::string>& fields);

  private:
    std::ofstream out_;
    std::string path_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bitekit

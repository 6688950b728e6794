#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace biaslens::csv {

/// Quotes a field per RFC 4180 when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Accumulates CSV rows (CRLF-free: rows end with LF) in memory.
class Table {
public:
    explicit Table(std::vector<std::string> header);

    void add_row(std::vector<std::string> row);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Parses a CSV document produced by Table::str (RFC 4180 quoting).
std::vector<std::vector<std::string>> parse(std::string_view text);

std::string format_real(double value);

}  // namespace biaslens::csv

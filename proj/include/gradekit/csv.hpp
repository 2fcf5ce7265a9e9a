#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

/**
 * @file csv.hpp
 * @brief Strict RFC-4180 reader and writer used for every tabular file.
 *
 * The reader accepts LF or CRLF line endings, a leading UTF-8 byte order mark,
 * quoted fields with embedded separators, doubled quotes and line breaks.
 * Every record must have as many fields as the header; blank lines are
 * skipped. Anything else raises MalformedTable.
 */

namespace gradekit::csv {

using Record = std::vector<std::string>;

struct Table {
    Record header;
    std::vector<Record> rows;
    /// CSV record number of each data row (the header is record 1).
    std::vector<std::size_t> record_numbers;

    /// Index of a header column, or npos.
    std::size_t column(std::string_view name) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Parses delimited text. `source` names the input in error messages.
Table parse(std::string_view text, const std::string& source = "<csv>");

/// Serializes one record, quoting fields only when needed. Ends with '\n'.
std::string format_record(const Record& record);

std::string format_table(const Record& header, const std::vector<Record>& rows);

} // namespace gradekit::csv

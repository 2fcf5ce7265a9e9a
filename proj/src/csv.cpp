#include "gradekit/csv.hpp"

#include "gradekit/errors.hpp"

#include <algorithm>

namespace gradekit::csv {

std::size_t Table::column(std::string_view name) const
{
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? npos : static_cast<std::size_t>(it - header.begin());
}

Table parse(std::string_view text, const std::string& source)
{
    if (text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }

    std::vector<Record> records;
    std::vector<std::size_t> numbers;
    Record current;
    std::string field;
    std::size_t record_no = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();
    bool at_end = n == 0;
    bool quoted = false; // a quoted empty field is data, not a blank line

    auto end_record = [&] {
        current.push_back(std::move(field));
        field.clear();
        if (quoted || current.size() != 1 || !current.front().empty()) {
            records.push_back(std::move(current));
            numbers.push_back(record_no);
        }
        current.clear();
        quoted = false;
        ++record_no;
    };

    while (!at_end) {
        if (i < n && text[i] == '"') {
            quoted = true;
            ++i;
            for (;;) {
                if (i >= n) {
                    throw MalformedTable(source, record_no, "unterminated quoted field");
                }
                char c = text[i++];
                if (c == '"') {
                    if (i < n && text[i] == '"') {
                        field.push_back('"');
                        ++i;
                    } else {
                        break;
                    }
                } else {
                    field.push_back(c);
                }
            }
            if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                throw MalformedTable(source, record_no, "unexpected character after closing quote");
            }
        } else {
            while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                if (text[i] == '"') {
                    throw MalformedTable(source, record_no, "stray quote inside unquoted field");
                }
                field.push_back(text[i++]);
            }
        }

        if (i >= n) {
            end_record();
            at_end = true;
        } else if (text[i] == ',') {
            current.push_back(std::move(field));
            field.clear();
            ++i;
        } else {
            if (text[i] == '\r') {
                ++i;
                if (i < n && text[i] == '\n') {
                    ++i;
                }
            } else {
                ++i;
            }
            end_record();
            at_end = i >= n;
        }
    }

    Table table;
    if (records.empty()) {
        throw MalformedTable(source, 1, "missing header row");
    }
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw MalformedTable(source, numbers[r],
                                 "expected " + std::to_string(table.header.size()) + " fields, found " +
                                     std::to_string(records[r].size()));
        }
        table.rows.push_back(std::move(records[r]));
        table.record_numbers.push_back(numbers[r]);
    }
    return table;
}

std::string format_record(const Record& record)
{
    std::string out;
    for (std::size_t i = 0; i < record.size(); ++i) {
        if (i > 0) {
            out.push_back(',');
        }
        const std::string& f = record[i];
        bool quote = f.find_first_of(",\"\r\n") != std::string::npos ||
                     (!f.empty() && (f.front() == ' ' || f.back() == ' '));
        // A lone empty field would serialize to a blank line, which the reader skips.
        if (record.size() == 1 && f.empty()) {
            quote = true;
        }
        if (!quote) {
            out += f;
            continue;
        }
        out.push_back('"');
        for (char c : f) {
            if (c == '"') {
                out.push_back('"');
            }
            out.push_back(c);
        }
        out.push_back('"');
    }
    out.push_back('\n');
    return out;
}

std::string format_table(const Record& header, const std::vector<Record>& rows)
{
    std::string out = format_record(header);
    for (const auto& row : rows) {
        out += format_record(row);
    }
    return out;
}

} // namespace gradekit::csv

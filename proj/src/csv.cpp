#include "hypobgk/csv.hpp"

#include <cstdio>

#include "hypobgk/errors.hpp"

namespace hypobgk {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header,
                     const std::optional<std::string>& comment)
    : out_(path), columns_(header.size()) {
    if (!out_) throw UsageError("cannot open " + path.string() + " for writing");
    if (comment) out_ << "# " << *comment << '\n';
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw UsageError("CSV row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

}  // namespace hypobgk

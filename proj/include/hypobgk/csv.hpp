#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace hypobgk {

/// Round-trippable text form of a double (17 significant digits).
std::string format_double(double x);

/// Minimal CSV writer: optional leading comment line, fixed header, string cells.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header,
              const std::optional<std::string>& comment = std::nullopt);

    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t columns_;
};

/// Header of every per-sample result file.
inline const std::vector<std::string> kResultHeader{"run_id", "z", "t", "level", "entropy", "envelope", "ratio", "verdict"};

}  // namespace hypobgk

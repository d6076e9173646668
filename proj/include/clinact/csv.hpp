#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace clinact::csv {

/// Quotes a cell when it contains a comma, quote, or newline.
std::string escape_cell(std::string_view cell);

std::string format_row(const std::vector<std::string>& cells);

/// Strict reader: quoted cells may contain commas, quotes (doubled), and
/// newlines. Rejects stray quotes with a 1-based row number. Accepts CRLF
/// input; a trailing newline does not produce an empty row.
std::vector<std::vector<std::string>> parse(std::string_view text,
                                            std::string_view origin = "csv");

std::vector<std::vector<std::string>> read_file(
    const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace clinact::csv

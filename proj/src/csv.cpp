#include "clinact/csv.hpp"

#include <fstream>
#include <sstream>

#include "clinact/errors.hpp"

namespace clinact::csv {

std::string escape_cell(std::string_view cell) {
  bool needs_quotes = cell.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(cell);
  std::string out;
  out.reserve(cell.size() + 2);
  out.push_back('"');
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    out += escape_cell(cells[i]);
  }
  out.push_back('\n');
  return out;
}

std::vector<std::vector<std::string>> parse(std::string_view text,
                                            std::string_view origin) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  std::size_t row_number = 1;

  auto fail = [&](const std::string& what) {
    throw ParseError(std::string(origin) + ": row " +
                     std::to_string(row_number) + ": " + what);
  };
  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    cell_was_quoted = false;
  };
  auto end_row = [&] {
    end_cell();
    rows.push_back(std::move(row));
    row.clear();
    ++row_number;
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  bool any_content = false;
  while (i < n) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          cell.push_back('"');
          i += 2;
        } else {
          in_quotes = false;
          ++i;
        }
      } else {
        cell.push_back(c);
        ++i;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty() || cell_was_quoted) fail("unexpected quote");
        in_quotes = true;
        cell_was_quoted = true;
        any_content = true;
        ++i;
        break;
      case ',':
        end_cell();
        any_content = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < n && text[i + 1] == '\n') {
          end_row();
          any_content = false;
          i += 2;
        } else {
          fail("bare carriage return");
        }
        break;
      case '\n':
        end_row();
        any_content = false;
        ++i;
        break;
      default:
        if (cell_was_quoted) fail("data after closing quote");
        cell.push_back(c);
        any_content = true;
        ++i;
        break;
    }
  }
  if (in_quotes) fail("unterminated quoted cell");
  if (any_content || !row.empty() || !cell.empty()) end_row();
  return rows;
}

std::vector<std::vector<std::string>> read_file(
    const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace clinact::csv

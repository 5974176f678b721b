#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpnav {

/// Parse failure in one of the line-oriented text formats. Line numbers are 1-based;
/// 0 means the error is not tied to a line (for example a missing file).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct TextLine {
  int number = 0;
  std::string text;
  std::vector<std::string> tokens;
};

/// Reads every line, keeping blank lines so numbering stays faithful.
std::vector<TextLine> read_lines(std::istream& in);
std::vector<TextLine> read_lines_file(const std::string& path);

std::vector<std::string> split_ws(const std::string& s);
double parse_double(const std::string& token, int line);
long long parse_int(const std::string& token, int line);

/// Formats with 9 significant digits, the precision of the map file format.
std::string format_g9(double v);
/// Fixed 6-decimal formatting used by all reports.
std::string format_f6(double v);

/// Checks a "<MAGIC> <version>" header line.
void expect_header(const TextLine& line, const std::string& magic, int version);

}  // namespace wpnav

#include "wpnav/textio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace wpnav {

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<TextLine> read_lines(std::istream& in) {
  std::vector<TextLine> lines;
  std::string text;
  int n = 0;
  while (std::getline(in, text)) {
    ++n;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    lines.push_back({n, text, split_ws(text)});
  }
  return lines;
}

std::vector<TextLine> read_lines_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return read_lines(in);
}

double parse_double(const std::string& token, int line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line, "expected a number, got '" + token + "'");
  }
  return v;
}

long long parse_int(const std::string& token, int line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected an integer, got '" + token + "'");
  }
  return v;
}

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_f6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void expect_header(const TextLine& line, const std::string& magic, int version) {
  if (line.tokens.size() != 2 || line.tokens[0] != magic) {
    throw ParseError(line.number, "expected header '" + magic + " " + std::to_string(version) + "'");
  }
  if (parse_int(line.tokens[1], line.number) != version) {
    throw ParseError(line.number, "unsupported " + magic + " version " + line.tokens[1]);
  }
}

}  // namespace wpnav

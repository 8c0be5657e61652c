#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "iabplan/errors.hpp"
#include "iabplan/linkbudget.hpp"

namespace iab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

GainMatrix parse_gains_csv(std::istream& in, int num_nodes) {
  GainMatrix gains(num_nodes);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(num_nodes) * num_nodes, 0);
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split(body);
    if (!header) {
      if (fields.size() != 3 || fields[0] != "from" || fields[1] != "to" || fields[2] != "gain_db") {
        throw IngestError(fmt::format("line {}: expected header 'from,to,gain_db'", line_no), line_no);
      }
      header = true;
      continue;
    }
    int from = 0;
    int to = 0;
    double gain = 0.0;
    if (fields.size() != 3 || !parse_number(fields[0], from) || !parse_number(fields[1], to) ||
        !parse_number(fields[2], gain) || std::isnan(gain)) {
      throw IngestError(fmt::format("line {}: malformed row '{}'", line_no, body), line_no);
    }
    if (from < 0 || from >= num_nodes || to < 0 || to >= num_nodes) {
      throw IngestError(fmt::format("line {}: unknown node id in pair ({}, {}); {} nodes", line_no,
                                    from, to, num_nodes),
                        line_no);
    }
    if (from == to) throw IngestError(fmt::format("line {}: self pair ({}, {})", line_no, from, to), line_no);
    auto& mark = seen[static_cast<std::size_t>(from) * num_nodes + to];
    if (mark) {
      throw IngestError(fmt::format("line {}: duplicate pair ({}, {})", line_no, from, to), line_no);
    }
    mark = 1;
    gains.set(from, to, gain);
  }
  if (!header) throw IngestError("missing header 'from,to,gain_db'", std::max(line_no, 1));
  return gains;
}

GainMatrix load_gains_csv(const std::filesystem::path& path, int num_nodes) {
  std::ifstream in(path);
  if (!in) throw IngestError(fmt::format("cannot open gains file '{}'", path.string()), 0);
  return parse_gains_csv(in, num_nodes);
}

}  // namespace iab

// SPDX-License-Identifier: Apache-2.0
#include "carpetdim/carpet_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "carpetdim/error.hpp"

namespace carpetdim {

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

int parse_index(std::string_view tok, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || v < 1)
    parse_fail(line, "bad index '" + std::string(tok) + "'");
  return v;
}

Poly parse_poly(const std::vector<std::string_view>& toks, std::size_t from, std::size_t to,
                int line) {
  if (from >= to) parse_fail(line, "empty polynomial");
  if (to - from > static_cast<std::size_t>(Poly::kMaxDegree + 1))
    parse_fail(line, "polynomial degree above 16");
  std::vector<double> c;
  for (std::size_t k = from; k < to; ++k) {
    try {
      c.push_back(parse_real(toks[k]));
    } catch (const Error& e) {
      parse_fail(line, e.what());
    }
  }
  return Poly(std::move(c));
}

}  // namespace

double parse_real(std::string_view token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || first == last)
    throw Error(ErrorKind::ParseError, "bad number '" + std::string(token) + "'");
  return v;
}

std::string format_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

CarpetSpec parse_carpet(std::string_view text) {
  std::map<int, Poly> rows;
  std::map<std::pair<int, int>, CellSpec> cells;
  bool header = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (!header) {
      if (toks.size() != 2 || toks[0] != "carpet" || toks[1] != "v1")
        parse_fail(line_no, "expected header 'carpet v1'");
      header = true;
      continue;
    }
    if (toks[0] == "row") {
      if (toks.size() < 4 || toks[2] != "b:") parse_fail(line_no, "expected 'row <i> b: ...'");
      const int i = parse_index(toks[1], line_no);
      if (rows.count(i)) parse_fail(line_no, "duplicate row " + std::to_string(i));
      rows[i] = parse_poly(toks, 3, toks.size(), line_no);
    } else if (toks[0] == "cell") {
      if (toks.size() < 5 || toks[3] != "a:") parse_fail(line_no, "expected 'cell <i> <j> a: ...'");
      const int i = parse_index(toks[1], line_no);
      const int j = parse_index(toks[2], line_no);
      std::size_t semi = 4;
      while (semi < toks.size() && toks[semi] != ";") ++semi;
      if (semi + 1 >= toks.size() || toks[semi + 1] != "u:")
        parse_fail(line_no, "expected '; u: ...'");
      CellSpec c{parse_poly(toks, 4, semi, line_no), parse_poly(toks, semi + 2, toks.size(), line_no)};
      if (cells.count({i, j}))
        parse_fail(line_no, "duplicate cell " + std::to_string(i) + " " + std::to_string(j));
      cells[{i, j}] = std::move(c);
    } else {
      parse_fail(line_no, "unknown record '" + std::string(toks[0]) + "'");
    }
  }
  if (!header) throw Error(ErrorKind::ParseError, "missing 'carpet v1' header");

  CarpetSpec spec;
  int expect = 1;
  for (auto& [i, b] : rows) {
    if (i != expect) throw Error(ErrorKind::ParseError, "rows must be numbered 1..m");
    spec.rows.push_back({b, {}});
    ++expect;
  }
  for (auto& [key, c] : cells) {
    const auto [i, j] = key;
    if (i > spec.row_count())
      throw Error(ErrorKind::ParseError, "cell refers to missing row " + std::to_string(i));
    auto& row = spec.rows[i - 1];
    if (j != static_cast<int>(row.cells.size()) + 1)
      throw Error(ErrorKind::ParseError, "cells of row " + std::to_string(i) + " must be numbered 1..m_i");
    row.cells.push_back(c);
  }
  check_well_formed(spec);
  return spec;
}

CarpetSpec read_carpet_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_carpet(ss.str());
}

std::string format_carpet(const CarpetSpec& spec) {
  std::ostringstream os;
  auto poly = [&](const Poly& p) {
    for (double c : p.coeffs()) os << ' ' << format_real(c);
  };
  os << "carpet v1\n";
  for (int i = 0; i < spec.row_count(); ++i) {
    os << "row " << i + 1 << " b:";
    poly(spec.b(i));
    os << '\n';
  }
  for (int i = 0; i < spec.row_count(); ++i)
    for (int j = 0; j < spec.cell_count(i); ++j) {
      os << "cell " << i + 1 << ' ' << j + 1 << " a:";
      poly(spec.a_tilde(i, j));
      os << " ; u:";
      poly(spec.u(i, j));
      os << '\n';
    }
  return os.str();
}

void write_carpet_file(const CarpetSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << format_carpet(spec);
}

}  // namespace carpetdim

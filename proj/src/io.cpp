#include "ddt/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ddt/errors.hpp"

namespace ddt::io {

std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_number(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && !s.empty();
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return out;
}

Error parse_error(const fs::path& path, std::size_t line, const std::string& what) {
  return Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<std::vector<double>> read_table_csv(const fs::path& path, bool header) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool skip = header;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (skip) {
      skip = false;
      continue;
    }
    std::vector<double> row;
    for (auto field : split(line)) {
      double v;
      if (!parse_number(field, v)) throw parse_error(path, lineno, "not a number: '" + std::string(field) + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw parse_error(path, lineno, "expected " + std::to_string(rows.front().size()) + " columns, found " +
                                          std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

DenseMatrix read_matrix_csv(const fs::path& path, bool header) {
  const auto rows = read_table_csv(path, header);
  DenseMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows.front().size();
  m.values.reserve(m.rows * m.cols);
  for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
  if (m.rows == 0) throw Error(ErrorKind::Parse, path.string() + ": empty matrix");
  return m;
}

void write_matrix_csv(const fs::path& path, const DenseMatrix& m) {
  std::ofstream out = open_out(path);
  std::string line;
  for (std::size_t i = 0; i < m.rows; ++i) {
    line.clear();
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) line += ',';
      line += format_double(m.at(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

void write_matrix_csv(const fs::path& path, const SymmetricMatrix& m) { write_matrix_csv(path, to_dense(m)); }

void write_adjacency_csv(const fs::path& path, const AdjacencyMatrix& a) {
  std::ofstream out = open_out(path);
  const std::size_t n = a.size();
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j) line += ',';
      line += a(i, j) ? '1' : '0';
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

AdjacencyMatrix read_adjacency_csv(const fs::path& path, bool header) {
  const DenseMatrix m = read_matrix_csv(path, header);
  if (m.rows != m.cols) {
    throw Error(ErrorKind::DimensionMismatch, path.string() + ": adjacency is " + std::to_string(m.rows) + "x" +
                                                  std::to_string(m.cols));
  }
  AdjacencyMatrix a(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = i + 1; j < m.cols; ++j) {
      const double v = m.at(i, j);
      if ((v != 0.0 && v != 1.0) || v != m.at(j, i)) {
        throw Error(ErrorKind::InvalidValue, path.string() + ": adjacency must be symmetric 0/1, bad entry at (" +
                                                 std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
      }
      a.set(i, j, v == 1.0);
    }
  }
  return a;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

void write_gzip(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  gzFile f = gzopen(path.string().c_str(), "wb9");
  if (!f) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  std::size_t done = 0;
  while (done < text.size()) {
    const auto chunk = static_cast<unsigned>(std::min<std::size_t>(text.size() - done, 1u << 20));
    if (gzwrite(f, text.data() + done, chunk) != static_cast<int>(chunk)) {
      gzclose(f);
      throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
    }
    done += chunk;
  }
  if (gzclose(f) != Z_OK) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::string read_gzip(const fs::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::string out;
  char buf[1 << 15];
  int got;
  while ((got = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(got));
  gzclose(f);
  if (got < 0) throw Error(ErrorKind::Parse, path.string() + ": corrupt gzip stream");
  return out;
}

ModulePartition read_modules_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::map<long, std::pair<int, std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  bool named = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    double node;
    double module;
    if (first && !parse_number(f[0], node)) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() < 2 || f.size() > 3) throw parse_error(path, lineno, "expected node_index,module_id[,module_name]");
    if (!parse_number(f[0], node) || node != std::floor(node) || node < 1) {
      throw parse_error(path, lineno, "node_index must be a positive integer");
    }
    if (!parse_number(f[1], module) || module != std::floor(module)) {
      throw parse_error(path, lineno, "module_id must be an integer");
    }
    named = named || f.size() == 3;
    if (!rows.emplace(static_cast<long>(node), std::pair{static_cast<int>(module), f.size() == 3 ? std::string(f[2]) : ""})
             .second) {
      throw parse_error(path, lineno, "node " + std::string(f[0]) + " listed twice");
    }
  }
  if (rows.empty()) throw Error(ErrorKind::Parse, path.string() + ": no module assignments");
  std::vector<int> assignment;
  std::map<int, std::string> names;
  long expect = 1;
  for (const auto& [node, entry] : rows) {
    if (node != expect) throw Error(ErrorKind::InvalidValue, path.string() + ": node " + std::to_string(expect) + " is unassigned");
    ++expect;
    assignment.push_back(entry.first);
    auto [it, fresh] = names.emplace(entry.first, entry.second);
    if (!fresh && it->second != entry.second) {
      throw Error(ErrorKind::InvalidValue, path.string() + ": module " + std::to_string(entry.first) +
                                               " has conflicting names");
    }
  }
  std::vector<std::string> module_names;
  if (named)
    for (const auto& [id, name] : names) module_names.push_back(name.empty() ? std::to_string(id) : name);
  return ModulePartition(std::move(assignment), std::move(module_names));
}

ConnectivityCohort load_cohort(const CohortFiles& files) {
  RawCohort raw;
  for (const auto& p : files.group1) raw.group1.push_back(read_matrix_csv(p, files.header));
  for (const auto& p : files.group2) raw.group2.push_back(read_matrix_csv(p, files.header));
  if (!files.covariates.empty()) {
    // A covariate file may carry column names; a non-numeric first row is one.
    const auto lines = read_lines(files.covariates);
    bool named = false;
    if (!lines.empty()) {
      double v;
      for (auto f : split(lines.front())) named = named || !parse_number(f, v);
    }
    raw.covariates = read_table_csv(files.covariates, named);
  }
  if (!files.labels.empty()) raw.labels = read_lines(files.labels);
  return validate_cohort(raw);
}

}  // namespace ddt::io

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ddt/enrich.hpp"
#include "ddt/netcore.hpp"

namespace ddt::io {

namespace fs = std::filesystem;

/// Shortest text that parses back to the same double.
std::string format_double(double x);

/// Comma-separated numeric table. Blank lines are ignored; every row must
/// have the same width.
std::vector<std::vector<double>> read_table_csv(const fs::path& path, bool header = false);
DenseMatrix read_matrix_csv(const fs::path& path, bool header = false);

void write_matrix_csv(const fs::path& path, const DenseMatrix& m);
void write_matrix_csv(const fs::path& path, const SymmetricMatrix& m);
void write_adjacency_csv(const fs::path& path, const AdjacencyMatrix& a);
AdjacencyMatrix read_adjacency_csv(const fs::path& path, bool header = false);

/// Non-empty lines, trailing whitespace stripped.
std::vector<std::string> read_lines(const fs::path& path);
std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);
/// gzip-compressed text with a fixed header, so equal input gives equal bytes.
void write_gzip(const fs::path& path, std::string_view text);
std::string read_gzip(const fs::path& path);

/// node_index,module_id[,module_name] with 1-based node indices, each node
/// listed once. A non-numeric first line is taken as a header.
ModulePartition read_modules_csv(const fs::path& path);

struct CohortFiles {
  std::vector<fs::path> group1;
  std::vector<fs::path> group2;
  fs::path covariates;
  fs::path labels;
  bool header = false;
};

/// Reads and validates every subject matrix, covariates and labels.
ConnectivityCohort load_cohort(const CohortFiles& files);

}  // namespace ddt::io

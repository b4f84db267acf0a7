#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starweyl/graph.hpp"
#include "starweyl/numerics.hpp"

namespace starweyl {

struct LoadedGraph {
  GraphSpec spec;
  std::vector<int> permutation;  // position i holds the config index of edge i+1
};

/// Graph configuration (JSON): edges[] {order, length, nu[], q[][]}, optional
/// gamma (defaults to identity forms) and omitted_edge. Complex numbers are
/// two-element [re, im] arrays; plain numbers are accepted as real.
LoadedGraph parse_graph_config(const std::string& json_text);
LoadedGraph load_graph_config(const std::string& path);
std::string graph_config_to_json(const GraphSpec& spec);

/// FNV-1a over the canonical serialization.
std::uint64_t graph_hash(const GraphSpec& spec);

struct GridSpec {
  double re_start = 0.0;
  double re_end = 0.0;
  int count = 0;
  double im_offset = 1.0;

  std::vector<Cplx> points() const;
  std::string describe() const;
};

struct MatrixSampleRow {
  Cplx lambda;
  bool ok = true;
  std::string reason;
  CMatrix entries;
};

struct MatrixSampleFile {
  std::string kind;  // "boundary" or "internal"
  int index = 0;     // s or j
  int size = 0;      // matrix dimension
  std::uint64_t hash = 0;
  std::string grid_desc;
  std::string timestamp;  // empty = no timestamp line
  std::vector<MatrixSampleRow> rows;
};

void write_matrix_samples(const std::string& path, const MatrixSampleFile& file);
MatrixSampleFile read_matrix_samples(const std::string& path);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// CSV with one `#` comment line when a timestamp is supplied; readers skip
/// comment lines.
void write_csv(const std::string& path, const CsvTable& table, const std::string& timestamp);
CsvTable read_csv(const std::string& path);

std::string iso_timestamp_now();

}  // namespace starweyl

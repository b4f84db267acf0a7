#include "starweyl/io.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace starweyl {

using Json = nlohmann::ordered_json;

namespace {

Cplx parse_complex(const Json& v, const char* what) {
  if (v.is_number()) return Cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Cplx(v[0].get<double>(), v[1].get<double>());
  throw Error(Errc::InvalidConfig, std::string(what) + ": expected [re, im]");
}

Json dump_complex(const Cplx& z) { return Json::array({z.real(), z.imag()}); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path);
  out << text;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LoadedGraph parse_graph_config(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("config parse: ") + e.what());
  }
  if (!root.contains("edges") || !root["edges"].is_array())
    throw Error(Errc::InvalidConfig, "config needs an edges array");

  GraphSpec spec;
  for (const Json& ej : root["edges"]) {
    EdgeSpec edge;
    edge.order = ej.at("order").get<int>();
    edge.length = ej.at("length").get<double>();
    if (ej.contains("nu"))
      for (const Json& v : ej["nu"]) edge.nu.push_back(parse_complex(v, "nu"));
    if (ej.contains("q")) {
      for (const Json& poly : ej["q"]) {
        Polynomial p;
        for (const Json& c : poly) p.coeffs.push_back(parse_complex(c, "q"));
        edge.q.push_back(std::move(p));
      }
    }
    spec.edges.push_back(std::move(edge));
  }

  if (root.contains("gamma") && !root["gamma"].is_null()) {
    MatchingForms forms;
    for (const Json& edge_tri : root["gamma"]) {
      std::vector<std::vector<Cplx>> tri;
      for (const Json& row : edge_tri) {
        std::vector<Cplx> r;
        for (const Json& c : row) r.push_back(parse_complex(c, "gamma"));
        tri.push_back(std::move(r));
      }
      forms.gamma.push_back(std::move(tri));
    }
    spec.matching = std::move(forms);
  }

  if (root.contains("omitted_edge")) spec.omitted_edge = root["omitted_edge"].get<int>();

  LoadedGraph out;
  out.permutation = normalize_omitted_edge(spec);
  out.spec = std::move(spec);
  return out;
}

LoadedGraph load_graph_config(const std::string& path) {
  return parse_graph_config(read_file(path));
}

std::string graph_config_to_json(const GraphSpec& spec) {
  Json root;
  root["edges"] = Json::array();
  for (const EdgeSpec& e : spec.edges) {
    Json ej;
    ej["order"] = e.order;
    ej["length"] = e.length;
    ej["nu"] = Json::array();
    for (const Cplx& v : e.nu) ej["nu"].push_back(dump_complex(v));
    ej["q"] = Json::array();
    for (const Polynomial& p : e.q) {
      Json pj = Json::array();
      for (const Cplx& c : p.coeffs) pj.push_back(dump_complex(c));
      ej["q"].push_back(pj);
    }
    root["edges"].push_back(ej);
  }
  if (!spec.matching.is_identity()) {
    Json g = Json::array();
    for (const auto& tri : spec.matching.gamma) {
      Json tj = Json::array();
      for (const auto& row : tri) {
        Json rj = Json::array();
        for (const Cplx& c : row) rj.push_back(dump_complex(c));
        tj.push_back(rj);
      }
      g.push_back(tj);
    }
    root["gamma"] = g;
  }
  root["omitted_edge"] = spec.omitted_edge;
  return root.dump(2) + "\n";
}

std::uint64_t graph_hash(const GraphSpec& spec) {
  const std::string canon = graph_config_to_json(spec);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<Cplx> GridSpec::points() const {
  if (count < 1) throw Error(Errc::InvalidConfig, "grid count must be >= 1");
  std::vector<Cplx> pts;
  for (int i = 0; i < count; ++i) {
    const double t = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
    pts.emplace_back(re_start + t * (re_end - re_start), im_offset);
  }
  return pts;
}

std::string GridSpec::describe() const {
  return format_double(re_start) + ":" + format_double(re_end) + ":" + std::to_string(count) +
         " im " + format_double(im_offset);
}

void write_matrix_samples(const std::string& path, const MatrixSampleFile& file) {
  Json root;
  root["format"] = "weyl-matrix-samples";
  Json header;
  header["graph_hash"] = file.hash;
  header["kind"] = file.kind;
  header["index"] = file.index;
  header["size"] = file.size;
  header["grid"] = file.grid_desc;
  if (!file.timestamp.empty()) header["timestamp"] = file.timestamp;
  root["header"] = header;

  Json rows = Json::array();
  for (const MatrixSampleRow& r : file.rows) {
    Json row;
    row["lambda"] = dump_complex(r.lambda);
    row["status"] = r.ok ? "ok" : "skipped";
    if (!r.ok) row["reason"] = r.reason;
    Json entries = Json::array();
    if (r.ok) {
      for (int i = 0; i < r.entries.rows(); ++i)
        for (int j = 0; j < r.entries.cols(); ++j)
          entries.push_back(dump_complex(r.entries(i, j)));
    }
    row["entries"] = entries;
    rows.push_back(row);
  }
  root["rows"] = rows;
  write_file(path, root.dump(2) + "\n");
}

MatrixSampleFile read_matrix_samples(const std::string& path) {
  Json root;
  try {
    root = Json::parse(read_file(path));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::IoFailure, std::string("sample file parse: ") + e.what());
  }
  if (root.value("format", "") != "weyl-matrix-samples")
    throw Error(Errc::IoFailure, "not a weyl-matrix-samples file");

  MatrixSampleFile file;
  const Json& header = root.at("header");
  file.hash = header.at("graph_hash").get<std::uint64_t>();
  file.kind = header.at("kind").get<std::string>();
  file.index = header.at("index").get<int>();
  file.size = header.at("size").get<int>();
  file.grid_desc = header.value("grid", "");
  file.timestamp = header.value("timestamp", "");

  for (const Json& row : root.at("rows")) {
    MatrixSampleRow r;
    r.lambda = parse_complex(row.at("lambda"), "lambda");
    r.ok = row.at("status").get<std::string>() == "ok";
    r.reason = row.value("reason", "");
    const Json& entries = row.at("entries");
    if (r.ok) {
      if (static_cast<int>(entries.size()) != file.size * file.size)
        throw Error(Errc::IoFailure, "entry count does not match the declared size");
      r.entries = CMatrix(file.size, file.size);
      int at = 0;
      for (int i = 0; i < file.size; ++i)
        for (int j = 0; j < file.size; ++j)
          r.entries(i, j) = parse_complex(entries[static_cast<size_t>(at++)], "entries");
    }
    file.rows.push_back(std::move(r));
  }
  return file;
}

void write_csv(const std::string& path, const CsvTable& table, const std::string& timestamp) {
  std::ostringstream out;
  if (!timestamp.empty()) out << "# generated " << timestamp << "\n";
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ",";
    out << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << format_double(row[i]);
    }
    out << "\n";
  }
  write_file(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cells(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(cells, cell, ',')) table.columns.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string iso_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace starweyl

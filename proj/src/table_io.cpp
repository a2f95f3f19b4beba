#include "rmt/table_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rmt/config.hpp"

namespace rmt::cli {
namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Splits one line on commas, honoring double-quoted fields (the column labels
// contain commas, e.g. zeta[1,2]).  Data fields are plain numbers.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_csv_field(const std::string& field) {
  if (field.find(',') == std::string::npos) return field;
  return "\"" + field + "\"";
}

}  // namespace

std::vector<std::string> sample_column_names(const TrialSet& trials,
                                             const std::string& symbol) {
  std::vector<std::string> names;
  names.reserve(trials.indices.size());
  for (std::size_t c = 0; c < trials.indices.size(); ++c)
    names.push_back(symbol + "[" + std::to_string(trials.block_of[c] + 1) + "," +
                    std::to_string(trials.indices[c]) + "]");
  return names;
}

void write_samples_csv(const std::string& path, const TrialSet& trials,
                       const std::string& symbol) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::vector<std::string> names = sample_column_names(trials, symbol);
  for (std::size_t c = 0; c < names.size(); ++c)
    out << (c ? "," : "") << quote_csv_field(names[c]);
  out << "\n";
  for (Index t = 0; t < trials.values.rows(); ++t) {
    for (Index c = 0; c < trials.values.cols(); ++c)
      out << (c ? "," : "") << format_double(trials.values(t, c));
    out << "\n";
  }
}

SampleTable read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open sample table: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("", "empty sample table: " + path);
  SampleTable table;
  table.columns = split_csv_line(line);
  if (table.columns.empty()) throw ConfigError("", "sample table has no columns: " + path);

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != table.columns.size())
      throw ConfigError("", path + ":" + std::to_string(line_no) + ": expected " +
                                std::to_string(table.columns.size()) + " fields, got " +
                                std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      char* end = nullptr;
      row[c] = std::strtod(fields[c].c_str(), &end);
      if (end == fields[c].c_str() || *end != '\0')
        throw ConfigError("", path + ":" + std::to_string(line_no) +
                                  ": not a number: \"" + fields[c] + "\"");
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(table.columns.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t c = 0; c < rows[t].size(); ++c)
      table.values(static_cast<Index>(t), static_cast<Index>(c)) = rows[t][c];
  return table;
}

nlohmann::json partition_to_json(const Partition& partition) {
  nlohmann::json j;
  j["kind"] = partition.kind == Partition::Kind::fine ? "fine" : "coarse";
  j["cutoff"] = partition.cutoff;
  j["blocks"] = partition.blocks;
  j["covered"] = partition.covered();
  return j;
}

Partition partition_from_json(const nlohmann::json& j) {
  Partition p;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fine")
    p.kind = Partition::Kind::fine;
  else if (kind == "coarse")
    p.kind = Partition::Kind::coarse;
  else
    throw ConfigError("partition.kind", "unknown kind \"" + kind + "\"");
  p.cutoff = j.at("cutoff").get<double>();
  p.blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
  return p;
}

nlohmann::json tensor_to_json(const CovarianceTensor& tensor) {
  const Index r = tensor.dim();
  nlohmann::json entries = nlohmann::json::array();
  for (Index i = 0; i < r; ++i) {
    nlohmann::json ji = nlohmann::json::array();
    for (Index j = 0; j < r; ++j) {
      nlohmann::json jj = nlohmann::json::array();
      for (Index k = 0; k < r; ++k) {
        nlohmann::json jk = nlohmann::json::array();
        for (Index l = 0; l < r; ++l) {
          const Complex v = tensor.at(i, j, k, l);
          jk.push_back({v.real(), v.imag()});
        }
        jj.push_back(std::move(jk));
      }
      ji.push_back(std::move(jj));
    }
    entries.push_back(std::move(ji));
  }
  nlohmann::json j;
  j["dim"] = r;
  j["entries"] = std::move(entries);
  return j;
}

CovarianceTensor tensor_from_json(const nlohmann::json& j) {
  const Index r = j.at("dim").get<Index>();
  CovarianceTensor t(r);
  const nlohmann::json& entries = j.at("entries");
  for (Index i = 0; i < r; ++i)
    for (Index jj = 0; jj < r; ++jj)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l) {
          const nlohmann::json& pair = entries.at(i).at(jj).at(k).at(l);
          t.at(i, jj, k, l) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
  return t;
}

nlohmann::json complex_matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json real_matrix_to_json(const RealMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json report_to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["sim_trials"] = report.sim_trials;
  j["ref_trials"] = report.ref_trials;
  j["sim_failures"] = report.sim_failures;
  j["ref_failures"] = report.ref_failures;
  j["coordinates"] = nlohmann::json::array();
  for (const CoordinateComparison& c : report.coordinates) {
    nlohmann::json jc;
    jc["index"] = c.index;
    jc["block"] = c.block + 1;
    jc["ks"] = c.ks;
    jc["w1"] = c.w1;
    jc["sim"] = {{"mean", c.sim_mean}, {"var", c.sim_var}, {"skew", c.sim_skew},
                 {"kurt", c.sim_kurt}};
    jc["ref"] = {{"mean", c.ref_mean}, {"var", c.ref_var}, {"skew", c.ref_skew},
                 {"kurt", c.ref_kurt}};
    j["coordinates"].push_back(std::move(jc));
  }
  j["blocks"] = nlohmann::json::array();
  for (const BlockComparison& b : report.blocks) {
    nlohmann::json jb;
    jb["block"] = b.block + 1;
    jb["indices"] = b.indices;
    jb["min_gap_ks"] = b.min_gap_ks;
    jb["sim_min_gap_count"] = b.sim_min_gaps.size();
    jb["ref_min_gap_count"] = b.ref_min_gaps.size();
    j["blocks"].push_back(std::move(jb));
  }
  j["sim_correlation"] = real_matrix_to_json(report.sim_correlation);
  j["ref_correlation"] = real_matrix_to_json(report.ref_correlation);
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", path + " is not valid JSON: " + e.what());
  }
}

}  // namespace rmt::cli

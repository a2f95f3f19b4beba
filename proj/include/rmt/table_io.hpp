#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rmt/montecarlo.hpp"
#include "rmt/outliers.hpp"
#include "rmt/tensors.hpp"

namespace rmt::cli {

/// Writes one row per kept trial, one column per covered outlier index, with
/// headers like symbol[b,i] (b = 1-based block, i = 1-based strength index).
/// Values are printed with %.17g, which round-trips doubles exactly.
void write_samples_csv(const std::string& path, const TrialSet& trials,
                       const std::string& symbol);

struct SampleTable {
  std::vector<std::string> columns;
  RealMatrix values;
};

SampleTable read_samples_csv(const std::string& path);

/// Column labels in the scheme used by write_samples_csv.
std::vector<std::string> sample_column_names(const TrialSet& trials,
                                             const std::string& symbol);

nlohmann::json partition_to_json(const Partition& partition);
Partition partition_from_json(const nlohmann::json& j);

/// Entrywise serialization: entries[i][j][k][l] = [re, im].
nlohmann::json tensor_to_json(const CovarianceTensor& tensor);
CovarianceTensor tensor_from_json(const nlohmann::json& j);

nlohmann::json complex_matrix_to_json(const ComplexMatrix& m);
nlohmann::json real_matrix_to_json(const RealMatrix& m);

nlohmann::json report_to_json(const ComparisonReport& report);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace rmt::cli

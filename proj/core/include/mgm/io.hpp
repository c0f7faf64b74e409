#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mgm/model.hpp"
#include "mgm/prediction.hpp"

namespace mgm {

inline constexpr int kSchemaVersion = 1;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 style CSV with a header row.
CsvTable parse_csv(const std::string& text);
std::string to_csv(const CsvTable& table);

/// Numbers with 17 significant digits; NaN becomes NA.
std::string format_double(double value);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

struct ColumnSchema {
  std::string name;
  VariableSpec spec;
  std::vector<long long> codes;  // raw codes of categories 0..m-1
};

/// Column types of a data file plus the optional time and consec columns.
struct Schema {
  std::vector<ColumnSchema> variables;
  std::optional<std::string> timepoints;
  std::optional<std::string> consec;
};

Schema parse_schema(const std::string& json);
std::string schema_to_json(const Schema& schema, const std::map<std::string, std::string>& extra = {});

/// Throws DataError unless every binary variable is coded {0, 1}; edge signs
/// involving binary variables are only meaningful under that coding.
void require_binary_01(const Schema& schema);

/// Schema naming columns after the dataset and using codes 0..m-1.
Schema default_schema(const Dataset& data);

struct LoadedData {
  Dataset data;
  Schema schema;
};

/// Typed dataset from a CSV table; categorical cells are mapped to 0-based
/// indices through the schema codes.
LoadedData make_dataset(const CsvTable& table, const Schema& schema);
LoadedData load_dataset(const std::string& data_path, const std::string& schema_path);

/// CSV of a dataset with categorical indices mapped back to their codes.
std::string dataset_to_csv(const Dataset& data, const Schema& schema);

using Metadata = std::map<std::string, std::string>;
using AnyFit = std::variant<MgmFit, MvarFit, TvMgmFit, TvMvarFit>;

std::string fit_to_json(const AnyFit& fit, const Metadata& metadata = {});
/// Throws ParseError for malformed documents and Error on version mismatch.
AnyFit fit_from_json(const std::string& text);
/// Metadata fields stored alongside a fit.
Metadata fit_metadata(const std::string& text);

void save_fit(const std::string& path, const AnyFit& fit, const Metadata& metadata = {});
AnyFit load_fit(const std::string& path);

using AnyModel = std::variant<FactorModel, MvarModel, std::vector<FactorModel>, std::vector<MvarModel>>;

struct ModelDocument {
  AnyModel model;
  std::vector<std::string> names;
};

/// Model specifications consumed by the samplers.
ModelDocument model_from_json(const std::string& text);
std::string model_to_json(const ModelDocument& doc);

/// Per-row predictions (categorical nodes as codes) and probabilities.
std::string predictions_to_csv(const PredictionResult& result, const Schema& schema);
/// Node × metric error table.
std::string errors_to_csv(const PredictionResult& result, const Schema& schema);

/// Edge list with columns source, target, lag, weight, sign.
std::string graph_to_csv(const MgmFit& fit);
std::string graph_to_csv(const MvarFit& fit);

}  // namespace mgm

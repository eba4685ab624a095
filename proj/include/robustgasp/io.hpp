#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robustgasp/fitting.hpp"

namespace rgasp {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file had none
  Eigen::MatrixXd values;
};

/// Parses a numeric CSV. A first row that does not parse as numbers is taken
/// as the header.
CsvTable read_csv(const std::string& path);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);
bool parse_double(const std::string& text, double& out);

void write_csv(const std::string& path, const Eigen::MatrixXd& values, const std::vector<std::string>& header = {});
std::string to_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& header = {});

enum class ModelKind { kGaSP, kPPGaSP };

const char* to_string(ModelKind kind);

struct LoadedModel {
  ModelKind kind = ModelKind::kGaSP;
  Emulator model;
};

constexpr int kModelSchemaVersion = 1;

std::string model_to_json(const Emulator& model, ModelKind kind);
LoadedModel model_from_json(const std::string& text);

void save_model(const std::string& path, const Emulator& model, ModelKind kind);
LoadedModel load_model(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rgasp

#include "robustgasp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "robustgasp/errors.hpp"

namespace rgasp {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

// Non-finite values (e.g. the objective of a failed start) are stored as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? -std::numeric_limits<double>::infinity() : j.get<double>();
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != cols) fail(ErrorCode::kParse, "model file: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = number_from(j[static_cast<std::size_t>(i)]);
  return v;
}

TrendKind parse_trend_kind(const std::string& name) {
  for (TrendKind k : {TrendKind::kZero, TrendKind::kConstant, TrendKind::kLinear, TrendKind::kExplicit}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorCode::kParse, "model file: unknown trend kind '" + name + "'");
}

const char* nugget_mode_name(NuggetSpec::Mode mode) {
  switch (mode) {
    case NuggetSpec::Mode::kNoiseFree: return "noise_free";
    case NuggetSpec::Mode::kFixed: return "fixed";
    case NuggetSpec::Mode::kEstimated: return "estimated";
  }
  return "noise_free";
}

NuggetSpec::Mode parse_nugget_mode(const std::string& name) {
  if (name == "noise_free") return NuggetSpec::Mode::kNoiseFree;
  if (name == "fixed") return NuggetSpec::Mode::kFixed;
  if (name == "estimated") return NuggetSpec::Mode::kEstimated;
  fail(ErrorCode::kParse, "model file: unknown nugget mode '" + name + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kFileNotFound, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kFileNotFound, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorCode::kFileNotFound, "write to '" + path + "' failed");
}

CsvTable read_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream is(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  CsvTable table;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t c = 0; c < fields.size(); ++c) numeric = numeric && parse_double(fields[c], row[c]);
    if (!numeric) {
      if (rows.empty() && table.header.empty()) {
        table.header = fields;
        continue;
      }
      fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    for (double v : row) {
      if (!std::isfinite(v)) fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) + ": non-finite value");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(rows.front().size()) + " fields, found " +
                                  std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::kParse, path + ": no data rows");
  if (!table.header.empty() && table.header.size() != rows.front().size()) {
    fail(ErrorCode::kParse, path + ": header and data have different widths");
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) { return read_csv(path).values; }

std::string to_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out += ',';
    out += header[c];
  }
  if (!header.empty()) out += '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(values(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const Eigen::MatrixXd& values, const std::vector<std::string>& header) {
  require(header.empty() || static_cast<Eigen::Index>(header.size()) == values.cols(),
          "CSV header width differs from the number of columns");
  write_text_file(path, to_csv(values, header));
}

const char* to_string(ModelKind kind) { return kind == ModelKind::kGaSP ? "gasp" : "ppgasp"; }

std::string model_to_json(const Emulator& m, ModelKind kind) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["model_kind"] = to_string(kind);
  j["design"] = matrix_to_json(m.design);
  j["response"] = matrix_to_json(m.response);

  json trend;
  trend["kind"] = to_string(m.trend.kind);
  if (m.trend.kind == TrendKind::kExplicit) trend["matrix"] = matrix_to_json(m.trend.matrix);
  j["trend"] = trend;

  json kernel;
  kernel["families"] = json::array();
  for (auto f : m.kernel.families) kernel["families"].push_back(to_string(f));
  kernel["alpha"] = m.kernel.alpha;
  j["kernel"] = kernel;

  j["beta_hat"] = vector_to_json(m.beta_hat);
  j["eta_hat"] = m.eta_hat;
  j["theta_hat"] = matrix_to_json(m.theta_hat);
  j["sigma2_hat"] = vector_to_json(m.sigma2_hat);

  json prior;
  prior["choice"] = to_string(m.options.prior);
  prior["a"] = m.prior_params.a;
  prior["b"] = m.prior_params.b;
  prior["C"] = vector_to_json(m.prior_params.C);
  prior["scale_rule"] = to_string(m.options.prior_scale);
  j["prior"] = prior;

  json opts;
  opts["nugget_mode"] = nugget_mode_name(m.options.nugget.mode);
  opts["nugget_eta"] = m.options.nugget.eta;
  opts["lower_bound"] = m.options.lower_bound;
  opts["beta_lower"] = vector_to_json(m.beta_lower);
  opts["multiple_starts"] = m.options.multiple_starts;
  opts["max_eval"] = m.options.max_eval;
  opts["xtol_rel"] = m.options.xtol_rel;
  opts["optimizer_memory"] = m.options.optimizer_memory;
  j["options"] = opts;

  json diag;
  diag["objective"] = number_or_null(m.diagnostics.objective);
  diag["best_start"] = m.diagnostics.best_start;
  diag["at_lower_bound"] = m.diagnostics.at_lower_bound;
  diag["degenerate"] = m.diagnostics.degenerate;
  diag["wall_seconds"] = m.diagnostics.wall_seconds;
  diag["starts"] = json::array();
  for (const auto& s : m.diagnostics.starts) {
    json js;
    js["initial"] = vector_to_json(s.initial);
    js["final"] = vector_to_json(s.final);
    js["objective"] = number_or_null(s.objective);
    js["evaluations"] = s.evaluations;
    js["iterations"] = s.iterations;
    js["status"] = s.status;
    js["message"] = s.message;
    js["ok"] = s.ok;
    js["extended"] = s.extended;
    diag["starts"].push_back(std::move(js));
  }
  j["diagnostics"] = diag;
  return j.dump(2) + "\n";
}

LoadedModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      fail(ErrorCode::kParse, "unsupported model schema_version " + std::to_string(version));
    }
    LoadedModel out;
    const std::string kind = j.at("model_kind").get<std::string>();
    if (kind == "gasp") {
      out.kind = ModelKind::kGaSP;
    } else if (kind == "ppgasp") {
      out.kind = ModelKind::kPPGaSP;
    } else {
      fail(ErrorCode::kParse, "unknown model_kind '" + kind + "'");
    }

    Emulator& m = out.model;
    m.design = matrix_from_json(j.at("design"));
    m.response = matrix_from_json(j.at("response"));
    const json& trend = j.at("trend");
    m.trend.kind = parse_trend_kind(trend.at("kind").get<std::string>());
    if (m.trend.kind == TrendKind::kExplicit) m.trend.matrix = matrix_from_json(trend.at("matrix"));

    const json& kernel = j.at("kernel");
    for (const auto& f : kernel.at("families")) m.kernel.families.push_back(parse_kernel_family(f.get<std::string>()));
    m.kernel.alpha = kernel.at("alpha").get<std::vector<double>>();
    m.kernel.validate();

    const json& prior = j.at("prior");
    m.options.prior = parse_prior_choice(prior.at("choice").get<std::string>());
    m.options.prior_scale = parse_scale_rule(prior.at("scale_rule").get<std::string>());
    m.prior_params.a = prior.at("a").get<double>();
    m.prior_params.b = prior.at("b").get<double>();
    m.prior_params.C = vector_from_json(prior.at("C"));

    const json& opts = j.at("options");
    m.options.nugget.mode = parse_nugget_mode(opts.at("nugget_mode").get<std::string>());
    m.options.nugget.eta = opts.at("nugget_eta").get<double>();
    m.options.lower_bound = opts.at("lower_bound").get<bool>();
    m.beta_lower = vector_from_json(opts.at("beta_lower"));
    m.options.multiple_starts = opts.at("multiple_starts").get<bool>();
    m.options.max_eval = opts.at("max_eval").get<int>();
    m.options.xtol_rel = opts.at("xtol_rel").get<double>();
    m.options.optimizer_memory = opts.at("optimizer_memory").get<int>();

    m.beta_hat = vector_from_json(j.at("beta_hat"));
    m.eta_hat = j.at("eta_hat").get<double>();
    require(m.beta_hat.size() == m.design.cols(), "model file: beta_hat length differs from p");
    require(m.design.rows() == m.response.rows(), "model file: design and response row counts differ");

    const json& diag = j.at("diagnostics");
    m.diagnostics.objective = number_from(diag.at("objective"));
    m.diagnostics.best_start = diag.at("best_start").get<int>();
    m.diagnostics.at_lower_bound = diag.at("at_lower_bound").get<bool>();
    m.diagnostics.degenerate = diag.at("degenerate").get<bool>();
    m.diagnostics.wall_seconds = diag.at("wall_seconds").get<double>();
    for (const auto& js : diag.at("starts")) {
      StartDiagnostics s;
      s.initial = vector_from_json(js.at("initial"));
      s.final = vector_from_json(js.at("final"));
      s.objective = number_from(js.at("objective"));
      s.evaluations = js.at("evaluations").get<int>();
      s.iterations = js.at("iterations").get<int>();
      s.status = js.at("status").get<std::string>();
      s.message = js.at("message").get<std::string>();
      s.ok = js.at("ok").get<bool>();
      s.extended = js.at("extended").get<bool>();
      m.diagnostics.starts.push_back(std::move(s));
    }

    refresh_cache(m);
    const Eigen::MatrixXd theta = matrix_from_json(j.at("theta_hat"), m.response.cols());
    const Eigen::VectorXd sigma2 = vector_from_json(j.at("sigma2_hat"));
    require(theta.rows() == m.theta_hat.rows() && theta.cols() == m.theta_hat.cols(),
            "model file: theta_hat shape differs from the trend");
    require(sigma2.size() == m.sigma2_hat.size(), "model file: sigma2_hat length differs from k");
    m.theta_hat = theta;
    m.sigma2_hat = sigma2;
    return out;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const Emulator& model, ModelKind kind) {
  write_text_file(path, model_to_json(model, kind));
}

LoadedModel load_model(const std::string& path) { return model_from_json(read_text_file(path)); }

}  // namespace rgasp

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "clusterkriging/bench.hpp"
#include "clusterkriging/error.hpp"

namespace ck {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// The value as it appears after 6-significant-digit formatting.
json json_float(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_float(v));
}

double float_from(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

json row_to_json(const ResultRow& row) {
  json j = {{"dataset", row.dataset},
            {"flavor", row.flavor},
            {"sweep", row.sweep},
            {"fold", row.fold ? json(*row.fold) : json("mean")},
            {"r2", json_float(row.report.r2)},
            {"smse", json_float(row.report.smse)},
            {"msll", json_float(row.report.msll)},
            {"fit_time_s", json_float(row.report.fit_time_s)},
            {"predict_time_s", json_float(row.report.predict_time_s)}};
  if (row.failed()) j["error"] = row.error;
  return j;
}

std::string rows_to_json(const std::vector<ResultRow>& rows) {
  json doc = json::array();
  for (const auto& r : rows) doc.push_back(row_to_json(r));
  return doc.dump(1) + "\n";
}

void write_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << text;
    if (!out.flush()) throw IoError("failed writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace '" + path + "': " + ec.message());
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_metric(const std::string& s) {
  if (s == "nan" || s == "-nan") return kNaN;
  return std::stod(s);
}

}  // namespace

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::csv;
  if (name == "json") return ResultFormat::json;
  throw ParameterError("unknown result format '" + std::string(name) + "' (expected csv|json)");
}

std::string format_csv_row(const ResultRow& row) {
  std::string line = row.dataset + "," + row.flavor + "," + std::to_string(row.sweep) + ",";
  line += row.fold ? std::to_string(*row.fold) : "mean";
  for (double v : {row.report.r2, row.report.smse, row.report.msll, row.report.fit_time_s,
                   row.report.predict_time_s}) {
    line += "," + format_float(v);
  }
  return line;
}

std::vector<ResultRow> aggregate_rows(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, Index>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    if (!r.fold) continue;
    Key key{r.dataset, r.flavor, r.sweep};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<ResultRow> out;
  for (const auto& key : order) {
    const auto& members = groups.at(key);
    ResultRow agg;
    std::tie(agg.dataset, agg.flavor, agg.sweep) = key;
    const double count = static_cast<double>(members.size());
    EvalReport& m = agg.report;
    m = {};
    for (const ResultRow* r : members) {
      m.r2 += r->report.r2;
      m.smse += r->report.smse;
      m.msll += r->report.msll;
      m.fit_time_s += r->report.fit_time_s;
      m.predict_time_s += r->report.predict_time_s;
      if (r->failed() && agg.error.empty()) agg.error = "fold " + std::to_string(*r->fold) + ": " + r->error;
    }
    m.r2 /= count;
    m.smse /= count;
    m.msll /= count;
    m.fit_time_s /= count;
    m.predict_time_s /= count;
    out.push_back(std::move(agg));
  }
  return out;
}

ResultWriter::ResultWriter(std::string path, ResultFormat format) : path_(std::move(path)), format_(format) {
  if (format_ == ResultFormat::csv) {
    write_file(path_, std::string(kResultsHeader) + "\n");
  } else {
    write_file(path_, "[]\n");
  }
}

void ResultWriter::write(const ResultRow& row) {
  if (format_ == ResultFormat::json) {
    rows_.push_back(row);
    write_file(path_, rows_to_json(rows_));
    return;
  }
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot open '" + path_ + "' for appending");
  out << format_csv_row(row) << '\n';
  if (!out.flush()) throw IoError("failed writing '" + path_ + "'");
}

std::string format_results(const std::vector<ResultRow>& rows, ResultFormat format) {
  if (format == ResultFormat::json) return rows_to_json(rows);
  std::string text = std::string(kResultsHeader) + "\n";
  for (const auto& r : rows) text += format_csv_row(r) + "\n";
  return text;
}

void emit_results(const std::vector<ResultRow>& rows, ResultFormat format, const std::string& path) {
  if (rows.empty()) throw ParameterError("no result rows to emit");
  write_file(path, format_results(rows, format));
}

std::vector<ResultRow> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start == std::string::npos) throw InputError(path + ": empty results file");

  std::vector<ResultRow> rows;
  if (text[start] == '[') {
    try {
      for (const json& j : json::parse(text)) {
        ResultRow r;
        r.dataset = j.at("dataset").get<std::string>();
        r.flavor = j.at("flavor").get<std::string>();
        r.sweep = j.at("sweep").get<Index>();
        if (!j.at("fold").is_string()) r.fold = j.at("fold").get<Index>();
        r.report = {float_from(j.at("r2")), float_from(j.at("smse")), float_from(j.at("msll")),
                    float_from(j.at("fit_time_s")), float_from(j.at("predict_time_s"))};
        if (j.contains("error")) r.error = j.at("error").get<std::string>();
        rows.push_back(std::move(r));
      }
    } catch (const json::exception& e) {
      throw InputError(path + ": malformed results JSON: " + e.what());
    }
    return rows;
  }

  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw InputError(path + ": unexpected results header '" + line + "'");
  std::size_t line_no = 1;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != 9) throw InputError(path + ": line " + std::to_string(line_no) + " does not have 9 fields");
    try {
      ResultRow r;
      r.dataset = cells[0];
      r.flavor = cells[1];
      r.sweep = std::stoll(cells[2]);
      if (cells[3] != "mean") r.fold = std::stoll(cells[3]);
      r.report = {parse_metric(cells[4]), parse_metric(cells[5]), parse_metric(cells[6]), parse_metric(cells[7]),
                  parse_metric(cells[8])};
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InputError(path + ": line " + std::to_string(line_no) + " has a non-numeric field");
    }
  }
  return rows;
}

}  // namespace ck

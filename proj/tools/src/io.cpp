#include "nmsse/cli/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "nmsse/version.hpp"

namespace nmsse::cli {

using Json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) throw std::runtime_error("not a number: '" + text + "'");
  return v;
}

CsvTable trajectory_table(const Trajectory& traj, const std::vector<std::string>& observable_names) {
  CsvTable table;
  table.header = {"t", "z_re", "z_im"};
  const std::size_t dims = traj.hidden.empty() ? 0 : flatten(traj.hidden.front()).size();
  for (std::size_t j = 0; j < dims; ++j) table.header.push_back("q_" + std::to_string(j + 1));
  table.header.push_back("L_re");
  table.header.push_back("L_im");
  for (const auto& name : observable_names) table.header.push_back(name);

  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row{traj.times[i], traj.noise[i].z.real(), traj.noise[i].z.imag()};
    const std::vector<double> q = flatten(traj.hidden[i]);
    row.insert(row.end(), q.begin(), q.end());
    row.push_back(traj.lexp[i].real());
    row.push_back(traj.lexp[i].imag());
    row.insert(row.end(), traj.observables[i].begin(), traj.observables[i].end());
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out += ',';
    out += table.header[j];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

CsvTable read_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  const auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) return table;
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_double(cell));
    if (row.size() != table.header.size()) throw std::runtime_error("CSV row width differs from the header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

Json matrix_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

Json ensemble_json(const EnsembleResult& result, const Json& config_echo, double truncation_loss) {
  Json cps = Json::array();
  for (const auto& c : result.checkpoints) {
    Json obs = Json::array();
    for (const auto& o : c.observables) {
      obs.push_back(Json{{"name", o.name}, {"mean", o.mean}, {"standard_error", o.standard_error}, {"exact", o.exact}});
    }
    cps.push_back(Json{{"t", c.time},
                       {"estimate", matrix_json(c.estimate)},
                       {"standard_error", matrix_json(c.standard_error)},
                       {"exact", matrix_json(c.exact)},
                       {"trace_distance", c.trace_distance},
                       {"hidden_moments",
                        Json{{"mean", c.hidden_mean},
                             {"mean_standard_error", c.hidden_mean_se},
                             {"variance", c.hidden_variance},
                             {"variance_standard_error", c.hidden_variance_se},
                             {"reference_mean", c.reference_mean},
                             {"reference_variance", c.reference_variance}}},
                       {"observables", std::move(obs)}});
  }
  Json trace = Json::array();
  for (const auto& c : result.checkpoints) trace.push_back(c.trace_distance);
  return Json{{"version", kVersion},
              {"status", result.failed ? "FAILED" : "OK"},
              {"unraveling", std::string(to_string(result.unraveling))},
              {"n_traj", result.n_traj},
              {"completed", result.completed},
              {"failures", result.failures},
              {"failure_rate", result.failure_rate},
              {"failed_indices", result.failed_indices},
              {"failure_times", result.failure_times},
              {"diagnostics", result.diagnostics},
              {"truncation_loss", truncation_loss},
              {"trace_distance", std::move(trace)},
              {"checkpoints", std::move(cps)},
              {"config", config_echo}};
}

Json bell_json(const JumpStatistics& stats, const Decomposition& dec, const Json& config_echo) {
  Json rows = Json::array();
  for (std::size_t c = 0; c < stats.times.size(); ++c) {
    rows.push_back(Json{{"t", stats.times[c]}, {"empirical", stats.empirical[c]}, {"exact", stats.exact[c]}});
  }
  return Json{{"version", kVersion},
              {"runs", stats.runs},
              {"total_jumps", stats.total_jumps},
              {"values", dec.values},
              {"table", std::move(rows)},
              {"config", config_echo}};
}

Json report_json(const VerificationReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"measured", c.measured},
                          {"threshold", c.threshold},
                          {"passed", c.passed},
                          {"detail", c.detail}});
  }
  return Json{{"version", kVersion}, {"suite", report.suite}, {"passed", report.passed()}, {"checks", std::move(checks)}};
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << contents;
    if (!out) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nmsse::cli

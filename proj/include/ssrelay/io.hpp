#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ssrelay/config.hpp"

namespace ssrelay {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

using Cell = std::variant<double, long long, std::string>;

/// Column-oriented result table with provenance metadata; renders to CSV
/// (metadata as leading '#' lines) or JSON ({"meta": ..., "rows": [...]}).
struct OutputTable {
  std::vector<std::pair<std::string, Cell>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_meta(std::string key, Cell value) { meta.emplace_back(std::move(key), std::move(value)); }
  void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string cell_text(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  return std::get<std::string>(c);
}

inline void write_csv(const OutputTable& table, std::ostream& os) {
  for (const auto& [key, value] : table.meta) os << "# " << key << " = " << cell_text(value) << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      os << cell_text(row[c]) << (c + 1 < row.size() ? "," : "");
    os << "\n";
  }
}

inline void write_json(const OutputTable& table, std::ostream& os) {
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, value] : table.meta) {
    if (std::holds_alternative<double>(value)) meta[key] = std::get<double>(value);
    else if (std::holds_alternative<long long>(value)) meta[key] = std::get<long long>(value);
    else meta[key] = std::get<std::string>(value);
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c) {
      const Cell& cell = row[c];
      if (std::holds_alternative<double>(cell)) obj[table.columns[c]] = std::get<double>(cell);
      else if (std::holds_alternative<long long>(cell)) obj[table.columns[c]] = std::get<long long>(cell);
      else obj[table.columns[c]] = std::get<std::string>(cell);
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::json doc{{"meta", std::move(meta)}, {"rows", std::move(rows)}};
  os << doc.dump(2) << "\n";
}

/// Writes a table to `path` ("-" for stdout) as "csv" or "json".
inline void write_table(const OutputTable& table, const std::string& path,
                        const std::string& format) {
  auto emit = [&](std::ostream& os) {
    if (format == "csv") write_csv(table, os);
    else if (format == "json") write_json(table, os);
    else throw std::invalid_argument("unknown output format: " + format);
  };
  if (path == "-" || path.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open output file: " + path);
  emit(os);
  if (!os) throw IoError("failed writing output file: " + path);
}

inline void apply_config_entry(NetworkConfig& cfg, const std::string& key,
                               const std::string& value) {
  auto as_int = [&] { return std::stoi(value); };
  auto as_double = [&] { return std::stod(value); };
  if (key == "n") cfg.n = as_int();
  else if (key == "M") cfg.M = as_int();
  else if (key == "N_p") cfg.Np = as_int();
  else if (key == "sigma_s2") cfg.sigma_s2 = as_double();
  else if (key == "sigma_d2") cfg.sigma_d2 = as_double();
  else if (key == "sigma_p2") cfg.sigma_p2 = as_double();
  else if (key == "sigma_sp2") cfg.sigma_sp2 = as_double();
  else if (key == "sigma_r2") cfg.sigma_r2 = as_double();
  else if (key == "gamma") cfg.gamma = as_double();
  else if (key == "Ps_max") cfg.ps_max = as_double();
  else if (key == "alpha") cfg.alpha = as_double();
  else if (key == "log_base") {
    if (value == "2" || value == "bits") cfg.rate_unit = RateUnit::bits;
    else if (value == "e" || value == "nats") cfg.rate_unit = RateUnit::nats;
    else throw std::invalid_argument("config: log_base must be 2|e|bits|nats");
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

/// Flat "key = value" config file; '#' starts a comment, blank lines are
/// ignored. Keys mirror the NetworkConfig fields (n, M, N_p, sigma_s2,
/// sigma_d2, sigma_p2, sigma_sp2, sigma_r2, gamma, Ps_max, alpha, log_base).
inline NetworkConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path);
  NetworkConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    try {
      apply_config_entry(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": bad value");
    }
  }
  cfg.validate();
  return cfg;
}

inline void add_config_meta(OutputTable& table, const NetworkConfig& cfg) {
  table.add_meta("n", static_cast<long long>(cfg.n));
  table.add_meta("M", static_cast<long long>(cfg.M));
  table.add_meta("N_p", static_cast<long long>(cfg.Np));
  table.add_meta("sigma_s2", cfg.sigma_s2);
  table.add_meta("sigma_d2", cfg.sigma_d2);
  table.add_meta("sigma_p2", cfg.sigma_p2);
  table.add_meta("sigma_sp2", cfg.sigma_sp2);
  table.add_meta("sigma_r2", cfg.sigma_r2);
  table.add_meta("gamma", cfg.gamma);
  table.add_meta("Ps_max", cfg.ps_max);
  table.add_meta("alpha", cfg.alpha);
  table.add_meta("log_base", std::string(cfg.rate_unit == RateUnit::bits ? "2" : "e"));
}

}  // namespace ssrelay

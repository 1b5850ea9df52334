#pragma once

#include "dynsen/graph.hpp"
#include "dynsen/graph_generators.hpp"
#include "dynsen/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynsen {

/// Spatial measurement table reduced to a graph: sampled locations become
/// nodes, their time series become the columns of `signals` (nodes x T).
struct GridData {
  Graph graph;
  Eigen::MatrixXd signals;
};

namespace detail {

struct GridRow {
  double lat = 0.0;
  double lon = 0.0;
  std::vector<double> values;
};

inline std::string csv_trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) fields.push_back(csv_trim(field));
  return fields;
}

inline bool parse_csv_number(const std::string& field, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(field, &pos);
    return pos == field.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

/// Reads a `lat,lon,v_0,...,v_{T-1}` table. A leading header line is skipped
/// automatically (detected by a non-numeric first field); rows containing any
/// non-finite value are dropped entirely (missing-data sentinel NaN).
inline std::vector<detail::GridRow> read_grid_rows(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_grid_rows: cannot open " + path);
  std::vector<detail::GridRow> rows;
  std::string line;
  bool first = true;
  std::size_t n_columns = 0;
  while (std::getline(is, line)) {
    if (detail::csv_trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 3) throw std::runtime_error("read_grid_rows: need lat, lon and at least one value");
    double probe = 0.0;
    if (first) {
      first = false;
      if (!detail::parse_csv_number(fields[0], probe)) continue;  // header line
    }
    if (n_columns == 0) {
      n_columns = fields.size();
    } else if (fields.size() != n_columns) {
      throw std::runtime_error("read_grid_rows: inconsistent column count");
    }
    detail::GridRow row;
    bool valid = true;
    if (!detail::parse_csv_number(fields[0], row.lat)) valid = false;
    if (valid && !detail::parse_csv_number(fields[1], row.lon)) valid = false;
    for (std::size_t i = 2; valid && i < fields.size(); ++i) {
      double v = 0.0;
      if (!detail::parse_csv_number(fields[i], v)) valid = false;
      row.values.push_back(v);
    }
    if (!valid) throw std::runtime_error("read_grid_rows: malformed row: " + line);
    bool finite = std::isfinite(row.lat) && std::isfinite(row.lon);
    for (double v : row.values) finite = finite && std::isfinite(v);
    if (!finite) continue;  // masked location
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_grid_rows: no valid rows in " + path);
  return rows;
}

/// Random subset of n_nodes valid locations turned into a k-nearest-neighbor
/// graph plus their time-series matrix. Resamples (up to max_attempts) when
/// the sampled point set yields a disconnected graph.
inline GridData ingest_grid_csv(const std::string& path, int n_nodes, int knn, Rng& rng,
                                int max_attempts = 100) {
  const auto rows = read_grid_rows(path);
  if (static_cast<int>(rows.size()) < n_nodes)
    throw std::runtime_error("ingest_grid_csv: fewer valid locations than requested nodes");
  std::vector<int> all(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) all[i] = static_cast<int>(i);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<int> picked;
    std::sample(all.begin(), all.end(), std::back_inserter(picked), n_nodes, rng);
    Eigen::MatrixX2d points(n_nodes, 2);
    for (int i = 0; i < n_nodes; ++i) {
      points(i, 0) = rows[picked[i]].lon;
      points(i, 1) = rows[picked[i]].lat;
    }
    try {
      Graph graph = knn_graph(points, knn);
      const std::size_t t = rows[picked[0]].values.size();
      Eigen::MatrixXd signals(n_nodes, static_cast<Eigen::Index>(t));
      for (int i = 0; i < n_nodes; ++i)
        for (std::size_t j = 0; j < t; ++j)
          signals(i, static_cast<Eigen::Index>(j)) = rows[picked[i]].values[j];
      return {std::move(graph), std::move(signals)};
    } catch (const std::invalid_argument&) {
      continue;  // disconnected subset; draw again
    }
  }
  throw std::runtime_error("ingest_grid_csv: no connected node subset found");
}

}  // namespace dynsen

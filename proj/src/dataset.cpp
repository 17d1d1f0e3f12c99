#include "sal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sal {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, Eigen::Index row,
                  const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::runtime_error("load_csv: cell '" + cell + "' at data row " +
                             std::to_string(row + 1) + ", column '" + column +
                             "' does not parse as a real number");
  }
  if (!std::isfinite(value)) {
    throw std::runtime_error("load_csv: non-finite value at data row " +
                             std::to_string(row + 1) + ", column '" + column +
                             "'");
  }
  return value;
}

void format17(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

} // namespace

RawDataset load_csv(const std::string& path,
                    const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_csv: '" + path + "' is empty");
  const std::vector<std::string> header = split_line(line);
  if (header.empty())
    throw std::runtime_error("load_csv: '" + path + "' has an empty header");

  Eigen::Index response_index = -1;
  if (!response_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), response_column);
    if (it == header.end())
      throw std::runtime_error("load_csv: response column '" +
                               response_column + "' not found in header of '" +
                               path + "'");
    response_index = it - header.begin();
  }

  std::vector<std::vector<double>> rows;
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      // only a trailing blank line is tolerated
      std::string rest;
      while (std::getline(in, rest)) {
        if (!trim(rest).empty())
          throw std::runtime_error("load_csv: blank line before data row " +
                                   std::to_string(row + 1));
      }
      break;
    }
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(
          "load_csv: data row " + std::to_string(row + 1) + " has " +
          std::to_string(cells.size()) + " cells, header has " +
          std::to_string(header.size()));
    }
    std::vector<double> values(cells.size());
    for (size_t j = 0; j < cells.size(); ++j)
      values[j] = parse_cell(cells[j], row, header[j]);
    rows.push_back(std::move(values));
    ++row;
  }
  if (rows.empty())
    throw std::runtime_error("load_csv: '" + path + "' has no data rows");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p_all = static_cast<Eigen::Index>(header.size());
  const Eigen::Index p = response_index >= 0 ? p_all - 1 : p_all;
  if (p < 1)
    throw std::runtime_error("load_csv: no feature columns remain in '" +
                             path + "'");

  RawDataset data;
  data.features.resize(n, p);
  data.feature_names.reserve(p);
  for (Eigen::Index j = 0; j < p_all; ++j)
    if (j != response_index) data.feature_names.push_back(header[j]);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index jj = 0;
    for (Eigen::Index j = 0; j < p_all; ++j) {
      if (j == response_index)
        y(i) = rows[i][j];
      else
        data.features(i, jj++) = rows[i][j];
    }
  }
  if (response_index >= 0) data.response = std::move(y);
  return data;
}

void write_csv(const RawDataset& data, const std::string& path,
               const std::string& response_name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  std::string buffer;
  for (size_t j = 0; j < data.feature_names.size(); ++j) {
    if (j) buffer += ',';
    buffer += data.feature_names[j];
  }
  if (data.has_response()) {
    buffer += ',';
    buffer += response_name;
  }
  buffer += '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j) buffer += ',';
      format17(buffer, data.features(i, j));
    }
    if (data.has_response()) {
      buffer += ',';
      format17(buffer, (*data.response)(i));
    }
    buffer += '\n';
  }
  out << buffer;
  if (!out) throw std::runtime_error("write_csv: write to '" + path + "' failed");
}

Standardizer fit_standardizer(const RawDataset& data) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (n < 2)
    throw std::invalid_argument("fit_standardizer: need at least 2 rows");

  Standardizer s;
  s.means = data.features.colwise().mean();
  s.scales.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double ss =
        (data.features.col(j).array() - s.means(j)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // effectively constant columns stay unscaled
    const double tiny = 1e-12 * std::max(1.0, std::abs(s.means(j)));
    s.scales(j) = sd <= tiny ? 1.0 : sd;
  }
  return s;
}

Eigen::VectorXd apply(const Standardizer& s, const Eigen::VectorXd& x) {
  if (x.size() != s.dim())
    throw std::invalid_argument("standardize: dimension mismatch");
  return (x - s.means).cwiseQuotient(s.scales);
}

Eigen::MatrixXd apply(const Standardizer& s, const Eigen::MatrixXd& X) {
  if (X.cols() != s.dim())
    throw std::invalid_argument("standardize: dimension mismatch");
  return (X.rowwise() - s.means.transpose()).array().rowwise() /
         s.scales.transpose().array();
}

Eigen::VectorXd invert(const Standardizer& s, const Eigen::VectorXd& z) {
  if (z.size() != s.dim())
    throw std::invalid_argument("unstandardize: dimension mismatch");
  return z.cwiseProduct(s.scales) + s.means;
}

Eigen::MatrixXd invert(const Standardizer& s, const Eigen::MatrixXd& Z) {
  if (Z.cols() != s.dim())
    throw std::invalid_argument("unstandardize: dimension mismatch");
  return (Z.array().rowwise() * s.scales.transpose().array()).matrix()
             .rowwise() +
         s.means.transpose();
}

RawDataset standardize(const RawDataset& data, const Standardizer& s) {
  RawDataset out = data;
  out.features = apply(s, data.features);
  return out;
}

RawDataset unstandardize(const RawDataset& data, const Standardizer& s) {
  RawDataset out = data;
  out.features = invert(s, data.features);
  return out;
}

StreamSource::StreamSource(Eigen::MatrixXd features,
                           Eigen::VectorXd hidden_labels)
    : features_(std::move(features)), labels_(std::move(hidden_labels)) {
  if (features_.rows() != labels_.size())
    throw std::invalid_argument(
        "StreamSource: label count does not match observation count");
}

StreamSource::StreamSource(const RawDataset& labeled)
    : StreamSource(labeled.features,
                   labeled.has_response()
                       ? *labeled.response
                       : throw std::invalid_argument(
                             "StreamSource: dataset has no response")) {}

std::optional<StreamSource::Item> StreamSource::next() {
  if (exhausted()) return std::nullopt;
  Item item{cursor_, features_.row(cursor_).transpose()};
  ++cursor_;
  return item;
}

double StreamSource::query_label(Eigen::Index index) const {
  if (index < 0 || index >= cursor_)
    throw std::logic_error(
        "StreamSource::query_label: index has not been emitted");
  return labels_(index);
}

} // namespace sal

#include "aroc/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "aroc/common.hpp"

namespace aroc::data {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_number(const std::string& cell, const std::string& col, std::size_t line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != cell.size() || cell.empty()) {
    std::ostringstream os;
    os << "line " << line_no << ": cannot parse '" << cell << "' in column '" << col << "'";
    throw DataError(os.str());
  }
  return v;
}

}  // namespace

std::size_t Dataset::count(int status_value) const {
  std::size_t n = 0;
  for (int s : status) n += (s == status_value);
  return n;
}

const std::vector<double>& Dataset::covariate(const std::string& name) const {
  const auto it = covariates.find(name);
  if (it == covariates.end()) throw DataError("unknown covariate '" + name + "'");
  return it->second;
}

Dataset Dataset::subset(int status_value) const {
  Dataset out;
  for (const auto& [name, col] : covariates) out.covariates[name] = {};
  for (std::size_t i = 0; i < size(); ++i) {
    if (status[i] != status_value) continue;
    out.y.push_back(y[i]);
    out.status.push_back(status[i]);
    for (const auto& [name, col] : covariates) out.covariates[name].push_back(col[i]);
  }
  return out;
}

splines::ValueLookup Dataset::row_lookup(std::size_t i) const {
  return [this, i](const std::string& name) { return covariate(name).at(i); };
}

std::function<const std::vector<double>&(const std::string&)> Dataset::column_lookup() const {
  return [this](const std::string& name) -> const std::vector<double>& {
    return covariate(name);
  };
}

void Dataset::validate() const {
  if (status.size() != y.size()) throw DataError("dataset: status/response length mismatch");
  for (const auto& [name, col] : covariates)
    if (col.size() != y.size())
      throw DataError("dataset: covariate '" + name + "' length mismatch");
  for (double v : y)
    if (!std::isfinite(v)) throw DataError("dataset: non-finite response value");
  for (const auto& [name, col] : covariates)
    for (double v : col)
      if (!std::isfinite(v)) throw DataError("dataset: non-finite value in '" + name + "'");
}

Dataset read_csv(const std::string& path, const std::string& response_column,
                 const std::string& status_column, const std::string& nondiseased_tag) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "': empty file");
  const std::vector<std::string> header = split_csv_line(line);

  int resp_idx = -1, status_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == response_column) resp_idx = static_cast<int>(j);
    if (header[j] == status_column) status_idx = static_cast<int>(j);
  }
  if (resp_idx < 0) throw DataError("'" + path + "': missing response column '" + response_column + "'");
  if (status_idx < 0) throw DataError("'" + path + "': missing status column '" + status_column + "'");

  Dataset d;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<int>(j) == resp_idx || static_cast<int>(j) == status_idx) continue;
    if (header[j].empty()) throw DataError("'" + path + "': empty covariate name in header");
    if (d.covariates.count(header[j]))
      throw DataError("'" + path + "': duplicate column '" + header[j] + "'");
    d.covariates[header[j]] = {};
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << "line " << line_no << ": expected " << header.size() << " cells, got " << cells.size();
      throw DataError(os.str());
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (static_cast<int>(j) == resp_idx)
        d.y.push_back(parse_number(cells[j], response_column, line_no));
      else if (static_cast<int>(j) == status_idx)
        d.status.push_back(cells[j] == nondiseased_tag ? 0 : 1);
      else
        d.covariates[header[j]].push_back(parse_number(cells[j], header[j], line_no));
    }
  }
  if (d.y.empty()) throw DataError("'" + path + "': no data rows");
  d.validate();
  return d;
}

void write_curve_csv(const std::string& path, const Eigen::VectorXd& grid,
                     const Eigen::VectorXd& mean, const Eigen::VectorXd& lower,
                     const Eigen::VectorXd& upper) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.precision(17);
  out << "t,mean,lower,upper\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out << grid[i] << ',' << mean[i] << ',' << lower[i] << ',' << upper[i] << '\n';
}

}  // namespace aroc::data

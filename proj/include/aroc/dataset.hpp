#pragma once

// Two-group test-result data: a response, a diseased/nondiseased status, and
// named numeric covariates. CSV ingestion is strict (header row, comma
// separated, '.' decimal, no quoting) and reports 1-based line numbers.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "aroc/splines.hpp"

namespace aroc::data {

struct Dataset {
  std::vector<double> y;
  std::vector<int> status;  // 1 = diseased, 0 = nondiseased
  std::map<std::string, std::vector<double>> covariates;

  std::size_t size() const { return y.size(); }
  std::size_t count(int status_value) const;

  const std::vector<double>& covariate(const std::string& name) const;

  // rows with the given status only
  Dataset subset(int status_value) const;

  // covariate lookup for record i, for building design rows
  splines::ValueLookup row_lookup(std::size_t i) const;

  // column accessor in the shape build_design expects
  std::function<const std::vector<double>&(const std::string&)> column_lookup() const;

  void validate() const;  // consistent lengths, finite values
};

// Read a CSV with a response column, a status column, and covariate columns.
// Rows whose status cell equals `nondiseased_tag` are nondiseased; every other
// value is diseased. Throws DataError with a line number on malformed input.
Dataset read_csv(const std::string& path, const std::string& response_column = "y",
                 const std::string& status_column = "status",
                 const std::string& nondiseased_tag = "0");

// Tidy curve output: header t,mean,lower,upper.
void write_curve_csv(const std::string& path, const Eigen::VectorXd& grid,
                     const Eigen::VectorXd& mean, const Eigen::VectorXd& lower,
                     const Eigen::VectorXd& upper);

}  // namespace aroc::data

#include "xfode/dataset.hpp"

#include "xfode/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>

namespace xfode {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

bool parse_finite(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string> default_names(const char* prefix, int count) {
  std::vector<std::string> names;
  for (int i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i + 1));
  return names;
}

void check_channels(const RawDataset& ds, const NormStats& stats) {
  if (stats.channels() != ds.n_u() + ds.n_y() || stats.std.size() != stats.mean.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "normalizer has " + std::to_string(stats.channels()) + " channels, dataset has " +
                    std::to_string(ds.n_u() + ds.n_y()));
  }
}

}  // namespace

RawDataset load_csv(const std::filesystem::path& path, int n_u, int n_y) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::HeaderMismatch, path.string() + " has no header row");
  }
  // Tolerate a UTF-8 byte order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  const auto header = split_commas(line);
  const auto width = static_cast<std::size_t>(n_u + n_y);
  if (header.size() != width) {
    throw Error(ErrorCode::HeaderMismatch, "expected " + std::to_string(width) + " columns, header has " +
                                               std::to_string(header.size()));
  }

  std::vector<std::string> names(header.begin(), header.end());

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != width) {
      throw Error(ErrorCode::HeaderMismatch, "row " + std::to_string(rows) + " (line " + std::to_string(line_no) +
                                                 ") has " + std::to_string(cells.size()) + " cells");
    }
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_finite(cells[c], v)) {
        throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(rows) + ", column " + std::to_string(c + 1) +
                                                   ": '" + std::string(cells[c]) + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }

  RawDataset ds;
  ds.name = path.stem().string();
  ds.inputs.resize(static_cast<Eigen::Index>(rows), n_u);
  ds.outputs.resize(static_cast<Eigen::Index>(rows), n_y);
  for (std::size_t r = 0; r < rows; ++r) {
    for (int c = 0; c < n_u; ++c) ds.inputs(static_cast<Eigen::Index>(r), c) = values[r * width + c];
    for (int c = 0; c < n_y; ++c) ds.outputs(static_cast<Eigen::Index>(r), c) = values[r * width + n_u + c];
  }
  ds.input_names.assign(names.begin(), names.begin() + n_u);
  ds.output_names.assign(names.begin() + n_u, names.end());
  validate(ds);
  return ds;
}

void save_csv(const RawDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const auto in_names = ds.input_names.size() == static_cast<std::size_t>(ds.n_u()) ? ds.input_names
                                                                                     : default_names("u", ds.n_u());
  const auto out_names = ds.output_names.size() == static_cast<std::size_t>(ds.n_y())
                             ? ds.output_names
                             : default_names("y", ds.n_y());
  bool first = true;
  for (const auto& n : in_names) {
    out << (first ? "" : ",") << n;
    first = false;
  }
  for (const auto& n : out_names) {
    out << (first ? "" : ",") << n;
    first = false;
  }
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index k = 0; k < ds.outputs.rows(); ++k) {
    first = true;
    for (Eigen::Index c = 0; c < ds.inputs.cols(); ++c) {
      out << (first ? "" : ",") << ds.inputs(k, c);
      first = false;
    }
    for (Eigen::Index c = 0; c < ds.outputs.cols(); ++c) {
      out << (first ? "" : ",") << ds.outputs(k, c);
      first = false;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed while writing " + path.string());
}

void validate(const RawDataset& ds) {
  if (ds.inputs.rows() != ds.outputs.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "input and output row counts differ");
  }
  if (ds.outputs.rows() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "a dataset needs at least 2 samples");
  }
  for (Eigen::Index k = 0; k < ds.outputs.rows(); ++k) {
    if (!ds.inputs.row(k).allFinite() || !ds.outputs.row(k).allFinite()) {
      throw Error(ErrorCode::NonFiniteValue, "row " + std::to_string(k));
    }
  }
}

NormStats fit_normalizer(const RawDataset& train) {
  validate(train);
  const int n_u = train.n_u();
  const int channels = n_u + train.n_y();
  const double count = static_cast<double>(train.sample_count());
  NormStats stats;
  stats.mean.resize(channels);
  stats.std.resize(channels);
  for (int c = 0; c < channels; ++c) {
    const auto column = c < n_u ? train.inputs.col(c) : train.outputs.col(c - n_u);
    const double mean = column.sum() / count;
    const double var = (column.array() - mean).square().sum() / count;
    stats.mean(c) = mean;
    stats.std(c) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return stats;
}

RawDataset normalize(const RawDataset& ds, const NormStats& stats) {
  check_channels(ds, stats);
  RawDataset out = ds;
  const int n_u = ds.n_u();
  for (int c = 0; c < n_u; ++c) {
    out.inputs.col(c) = (ds.inputs.col(c).array() - stats.mean(c)) / stats.std(c);
  }
  for (int c = 0; c < ds.n_y(); ++c) {
    out.outputs.col(c) = (ds.outputs.col(c).array() - stats.mean(n_u + c)) / stats.std(n_u + c);
  }
  return out;
}

RawDataset denormalize(const RawDataset& ds, const NormStats& stats) {
  check_channels(ds, stats);
  RawDataset out = ds;
  const int n_u = ds.n_u();
  for (int c = 0; c < n_u; ++c) {
    out.inputs.col(c) = ds.inputs.col(c).array() * stats.std(c) + stats.mean(c);
  }
  for (int c = 0; c < ds.n_y(); ++c) {
    out.outputs.col(c) = ds.outputs.col(c).array() * stats.std(n_u + c) + stats.mean(n_u + c);
  }
  return out;
}

Eigen::VectorXd output_mean(const NormStats& stats, int n_u) {
  return stats.mean.tail(stats.channels() - n_u);
}

Eigen::VectorXd output_std(const NormStats& stats, int n_u) {
  return stats.std.tail(stats.channels() - n_u);
}

std::pair<RawDataset, RawDataset> split_rows(const RawDataset& ds, std::size_t train_rows) {
  const auto total = ds.sample_count();
  if (train_rows < 2 || train_rows + 2 > total) {
    throw Error(ErrorCode::InsufficientSamples, "cannot split " + std::to_string(total) + " samples at row " +
                                                    std::to_string(train_rows));
  }
  const auto head = static_cast<Eigen::Index>(train_rows);
  const auto tail = static_cast<Eigen::Index>(total - train_rows);
  RawDataset train = ds;
  RawDataset test = ds;
  train.inputs = ds.inputs.topRows(head);
  train.outputs = ds.outputs.topRows(head);
  test.inputs = ds.inputs.bottomRows(tail);
  test.outputs = ds.outputs.bottomRows(tail);
  train.name = ds.name + ":train";
  test.name = ds.name + ":test";
  return {std::move(train), std::move(test)};
}

}  // namespace xfode

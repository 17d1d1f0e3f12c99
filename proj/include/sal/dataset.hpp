// Data ingestion, standardization and the dataset / stream abstractions
// shared by the rest of the library. All dataset types are plain value
// types, immutable by convention after construction; StreamSource is the
// one stateful object and must be consumed by a single owner.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace sal {

// n x p observation matrix with named columns and an optional response.
struct RawDataset {
  Eigen::MatrixXd features;                // n x p, one row per observation
  std::vector<std::string> feature_names;  // size p, order fixed by header
  std::optional<Eigen::VectorXd> response; // length n when present

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }
  bool has_response() const { return response.has_value(); }
};

// Per-column location/scale transform. scales[j] > 0 always.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd scales;

  Eigen::Index dim() const { return means.size(); }
};

// Reads a CSV file (UTF-8, comma separated, mandatory header, '.' decimal
// point). Every data cell must parse as a finite real; violations are
// reported with their row and column. When response_column is non-empty,
// that column is extracted into the response vector and removed from the
// feature block.
RawDataset load_csv(const std::string& path,
                    const std::string& response_column = "");

// Writes the dataset back out with 17 significant digits so that a
// load/write cycle is value-exact. The response, when present, is appended
// as the final column.
void write_csv(const RawDataset& data, const std::string& path,
               const std::string& response_name = "y");

// Column sample means and sample standard deviations (divisor n-1).
// Columns with (numerically) zero spread get scale 1.
Standardizer fit_standardizer(const RawDataset& data);

Eigen::VectorXd apply(const Standardizer& s, const Eigen::VectorXd& x);
Eigen::MatrixXd apply(const Standardizer& s, const Eigen::MatrixXd& X);
Eigen::VectorXd invert(const Standardizer& s, const Eigen::VectorXd& z);
Eigen::MatrixXd invert(const Standardizer& s, const Eigen::MatrixXd& Z);

RawDataset standardize(const RawDataset& data, const Standardizer& s);
RawDataset unstandardize(const RawDataset& data, const Standardizer& s);

// Ordered stream of observations whose labels stay hidden until queried.
// Each index is emitted exactly once; labels are only revealed for indices
// that have already been emitted.
class StreamSource {
public:
  struct Item {
    Eigen::Index index;
    Eigen::VectorXd x;
  };

  StreamSource(Eigen::MatrixXd features, Eigen::VectorXd hidden_labels);
  explicit StreamSource(const RawDataset& labeled);

  // Emits the next observation, or nullopt once the stream is exhausted.
  std::optional<Item> next();

  // Reveals the label of an already-emitted observation (the oracle).
  double query_label(Eigen::Index index) const;

  Eigen::Index size() const { return features_.rows(); }
  Eigen::Index dim() const { return features_.cols(); }
  Eigen::Index cursor() const { return cursor_; }
  Eigen::Index remaining() const { return features_.rows() - cursor_; }
  bool exhausted() const { return cursor_ >= features_.rows(); }

private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  Eigen::Index cursor_ = 0;
};

} // namespace sal

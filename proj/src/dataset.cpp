#include "rankbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace rankbench {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

Dataset::Dataset(Matrix features, Vector target, std::vector<std::string> feature_names)
    : features_(std::move(features)), target_(std::move(target)), names_(std::move(feature_names)) {
  if (features_.rows() != target_.size()) {
    throw InvalidArgument("dataset: feature rows (" + std::to_string(features_.rows()) +
                          ") != target length (" + std::to_string(target_.size()) + ")");
  }
  if (features_.rows() < 2) throw InvalidArgument("dataset: need at least 2 rows");
  if (static_cast<Index>(names_.size()) != features_.cols()) {
    throw InvalidArgument("dataset: feature name count does not match column count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) throw InvalidArgument("dataset: duplicate feature name '" + name + "'");
  }
  if (!features_.allFinite()) throw InvalidArgument("dataset: non-finite feature value");
  Index positives = 0;
  for (Index i = 0; i < target_.size(); ++i) {
    const double t = target_(i);
    if (t != 0.0 && t != 1.0) throw InvalidArgument("dataset: target values must be 0 or 1");
    positives += t == 1.0;
  }
  if (positives == 0 || positives == target_.size()) {
    throw InvalidArgument("dataset: target must contain both classes");
  }
  base_rate_ = static_cast<double>(positives) / static_cast<double>(target_.size());
}

Index Dataset::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidArgument("unknown feature '" + name + "'");
  return static_cast<Index>(it - names_.begin());
}

Dataset Dataset::take_rows(const std::vector<Index>& rows) const {
  Matrix x(static_cast<Index>(rows.size()), cols());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(static_cast<Index>(i)) = features_.row(rows[i]);
    y(static_cast<Index>(i)) = target_(rows[i]);
  }
  return Dataset(std::move(x), std::move(y), names_);
}

void SyntheticSpec::validate() const {
  if (n_samples < 2) throw InvalidArgument("synthetic: n_samples must be >= 2");
  if (n_features() < 1) throw InvalidArgument("synthetic: need at least one feature");
  if (noise_features < 0) throw InvalidArgument("synthetic: noise_features must be >= 0");
  std::set<Index> used;
  for (const auto& block : correlation_blocks) {
    if (!(block.rho > -1.0 && block.rho < 1.0)) {
      throw InvalidArgument("synthetic: block correlation must lie in (-1, 1)");
    }
    for (Index f : block.features) {
      if (f < 0 || f >= n_features()) throw InvalidArgument("synthetic: block feature index out of range");
      if (!used.insert(f).second) throw InvalidArgument("synthetic: correlation blocks must be disjoint");
    }
  }
  for (const auto& term : interaction_pairs) {
    if (term.first < 0 || term.first >= n_features() || term.second < 0 ||
        term.second >= n_features() || term.first == term.second) {
      throw InvalidArgument("synthetic: interaction pair must name two distinct valid features");
    }
  }
}

std::vector<double> pareto_weights(Index count, double first) {
  std::vector<double> w(static_cast<std::size_t>(count));
  double value = first;
  for (auto& v : w) {
    v = value;
    value *= 0.5;
  }
  return w;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("CSV file '" + path.string() + "' is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_commas(line);
  std::unordered_set<std::string> seen;
  for (const auto& h : header) {
    if (h.empty()) throw Error("CSV header has an empty column name");
    if (!seen.insert(h).second) throw Error("CSV header has duplicate column name '" + h + "'");
  }
  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end()) throw Error("CSV has no target column '" + target_column + "'");
  const auto target_idx = static_cast<std::size_t>(target_it - header.begin());

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw Error("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                  " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error("CSV line " + std::to_string(line_no) + ", column '" + header[c] +
                    "': non-numeric value '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw Error("CSV line " + std::to_string(line_no) + ", column '" + header[c] +
                    "': non-finite value '" + cell + "'");
      }
      if (c == target_idx && v != 0.0 && v != 1.0) {
        throw Error("CSV line " + std::to_string(line_no) + ": target '" + target_column +
                    "' must be 0 or 1, found '" + cell + "'");
      }
      values[c] = v;
    }
    rows.push_back(std::move(values));
  }
  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(header.size()) - 1;
  Matrix x(n, p);
  Vector y(n);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_idx) names.push_back(header[c]);
  }
  for (Index i = 0; i < n; ++i) {
    Index col = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == target_idx) {
        y(i) = rows[static_cast<std::size_t>(i)][c];
      } else {
        x(i, col++) = rows[static_cast<std::size_t>(i)][c];
      }
    }
  }
  if (n >= 2 && (y.minCoeff() == y.maxCoeff())) {
    throw Error("CSV target '" + target_column + "' is constant");
  }
  return Dataset(std::move(x), std::move(y), std::move(names));
}

void write_csv(const Dataset& data, const std::filesystem::path& path, const std::string& target_column) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write CSV file '" + path.string() + "'");
  for (const auto& name : data.feature_names()) out << name << ',';
  out << target_column << '\n';
  char buf[64];
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, data.features()(i, j));
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << static_cast<int>(data.target()(i)) << '\n';
  }
}

std::pair<std::vector<Index>, std::vector<Index>> split_indices(const Dataset& data, double test_fraction,
                                                                std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("split: test fraction must lie in (0, 1)");
  }
  std::vector<Index> classes[2];
  for (Index i = 0; i < data.rows(); ++i) classes[data.target()(i) == 1.0 ? 1 : 0].push_back(i);
  Rng rng(seed);
  std::vector<Index> train, test;
  for (auto& members : classes) {
    const auto perm = random_permutation(static_cast<Index>(members.size()), rng);
    const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(members.size())));
    for (std::size_t k = 0; k < members.size(); ++k) {
      (k < n_test ? test : train).push_back(members[static_cast<std::size_t>(perm[k])]);
    }
  }
  auto check = [&](const std::vector<Index>& part, const char* label) {
    Index positives = 0;
    for (Index i : part) positives += data.target()(i) == 1.0;
    if (part.size() < 2 || positives == 0 || positives == static_cast<Index>(part.size())) {
      throw InvalidArgument(std::string("split: test fraction leaves the ") + label +
                            " split with fewer than 2 rows or a single class");
    }
  };
  check(train, "train");
  check(test, "test");
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  const auto [train, test] = split_indices(data, test_fraction, seed);
  return {data.take_rows(train), data.take_rows(test)};
}

std::vector<Index> bootstrap_indices(const Dataset& data, std::uint64_t seed) {
  const Index n = data.rows();
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (int attempt = 0; attempt < kMaxBootstrapAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    Index positives = 0;
    for (auto& r : rows) {
      r = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
      positives += data.target()(r) == 1.0;
    }
    if (positives > 0 && positives < n) return rows;
  }
  throw Error("bootstrap: no two-class resample after " + std::to_string(kMaxBootstrapAttempts) + " attempts");
}

Dataset bootstrap(const Dataset& data, std::uint64_t seed) {
  return data.take_rows(bootstrap_indices(data, seed));
}

CorrelationSummary correlation_summary(const Dataset& data) {
  const Index p = data.cols();
  Matrix z = data.features().rowwise() - data.features().colwise().mean();
  for (Index j = 0; j < p; ++j) {
    const double norm = z.col(j).norm();
    if (norm == 0.0) {
      throw InvalidArgument("correlation_summary: feature '" + data.feature_names()[static_cast<std::size_t>(j)] +
                            "' is constant");
    }
    z.col(j) /= norm;
  }
  CorrelationSummary out;
  out.rho.resize(p, p);
  for (Index a = 0; a < p; ++a) {
    out.rho(a, a) = 1.0;
    for (Index b = a + 1; b < p; ++b) {
      const double r = std::clamp(z.col(a).dot(z.col(b)), -1.0, 1.0);
      out.rho(a, b) = r;
      out.rho(b, a) = r;
    }
  }
  if (p > 1) {
    double sum = 0.0;
    for (Index a = 0; a < p; ++a)
      for (Index b = a + 1; b < p; ++b) sum += std::abs(out.rho(a, b));
    out.avg_feature_corr = sum / (static_cast<double>(p) * static_cast<double>(p - 1) / 2.0);
  }
  Vector yc = data.target().array() - data.target().mean();
  yc /= yc.norm();
  out.avg_target_corr = (z.transpose() * yc).cwiseAbs().mean();
  return out;
}

std::vector<FeaturePair> correlated_pairs(const Dataset& data, double threshold) {
  const auto summary = correlation_summary(data);
  std::vector<FeaturePair> pairs;
  const auto& names = data.feature_names();
  for (Index a = 0; a < data.cols(); ++a) {
    for (Index b = a + 1; b < data.cols(); ++b) {
      if (std::abs(summary.rho(a, b)) >= threshold) {
        pairs.push_back({names[static_cast<std::size_t>(a)], names[static_cast<std::size_t>(b)], summary.rho(a, b)});
      }
    }
  }
  return pairs;
}

SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  const Index p = spec.n_features();
  const Index n = spec.n_samples;
  Matrix cov = Matrix::Identity(p, p);
  for (const auto& block : spec.correlation_blocks) {
    for (Index a : block.features)
      for (Index b : block.features)
        if (a != b) cov(a, b) = block.rho;
  }
  const Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("synthetic: block correlation matrix is not positive definite");
  }
  const Matrix lower = llt.matrixL();

  Vector weights = Vector::Zero(p);
  for (std::size_t j = 0; j < spec.signal_weights.size(); ++j) weights(static_cast<Index>(j)) = spec.signal_weights[j];

  Rng rng(spec.seed);
  Matrix x(n, p);
  Vector y(n);
  Vector z(p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(j) = standard_normal(rng);
    x.row(i) = (lower * z).transpose();
    double logit = spec.intercept + x.row(i).dot(weights);
    for (const auto& term : spec.interaction_pairs) logit += term.strength * x(i, term.first) * x(i, term.second);
    y(i) = uniform01(rng) < sigmoid(logit) ? 1.0 : 0.0;
  }
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  return {Dataset(std::move(x), std::move(y), std::move(names)), std::move(weights)};
}

Dataset subset(const Dataset& data, const std::vector<std::string>& names) {
  if (names.empty()) throw InvalidArgument("subset: feature list is empty");
  std::unordered_set<std::string> seen;
  std::vector<std::string> unknown;
  std::vector<Index> cols;
  for (const auto& name : names) {
    if (!seen.insert(name).second) throw InvalidArgument("subset: duplicate feature '" + name + "'");
    const auto& all = data.feature_names();
    const auto it = std::find(all.begin(), all.end(), name);
    if (it == all.end()) {
      unknown.push_back(name);
    } else {
      cols.push_back(static_cast<Index>(it - all.begin()));
    }
  }
  if (!unknown.empty()) {
    std::string msg = "subset: unknown feature(s):";
    for (const auto& u : unknown) msg += " '" + u + "'";
    throw InvalidArgument(msg);
  }
  Matrix x(data.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) x.col(static_cast<Index>(c)) = data.features().col(cols[c]);
  return Dataset(std::move(x), data.target(), names);
}

}  // namespace rankbench

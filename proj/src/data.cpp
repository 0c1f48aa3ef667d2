#include "latestop/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "latestop/errors.hpp"
#include "latestop/hash.hpp"
#include "latestop/rng.hpp"

namespace latestop {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_field(std::string_view field, const std::filesystem::path& path, std::size_t line, std::size_t col) {
  field = trim(field);
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw InputError(path.string() + ":" + std::to_string(line) + ": column " + std::to_string(col + 1) +
                     ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  const auto offset = in.tellg();
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw InputError(path.string() + ": truncated header at offset " + std::to_string(static_cast<long long>(offset)));
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

struct IdxFile {
  std::vector<std::uint32_t> dims;
  std::vector<unsigned char> bytes;
};

IdxFile read_idx(const std::filesystem::path& path, std::size_t expected_rank) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::uint32_t magic = read_be32(in, path);
  const std::uint32_t type = (magic >> 8) & 0xff;
  const std::uint32_t rank = magic & 0xff;
  if ((magic >> 16) != 0 || type != 0x08) {
    throw InputError(path.string() + ": offset 0: bad magic number 0x" + to_hex32(magic) +
                     " (only unsigned-byte IDX is supported)");
  }
  if (rank != expected_rank) {
    throw InputError(path.string() + ": offset 0: magic 0x" + to_hex32(magic) + " has rank " +
                     std::to_string(rank) + ", expected " + std::to_string(expected_rank));
  }
  IdxFile f;
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    f.dims.push_back(read_be32(in, path));
    total *= f.dims.back();
  }
  f.bytes.resize(total);
  const std::size_t header = 4 + 4 * rank;
  if (!in.read(reinterpret_cast<char*>(f.bytes.data()), static_cast<std::streamsize>(total))) {
    throw InputError(path.string() + ": offset " + std::to_string(header + static_cast<std::size_t>(in.gcount())) +
                     ": truncated payload, expected " + std::to_string(total) + " bytes");
  }
  return f;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void Dataset::validate() const {
  const std::size_t n = ids.size();
  if (features.rows() != n) throw InputError("feature rows != number of ids");
  if (given_labels.size() != n) throw InputError("given label count != number of ids");
  if (clean_labels && clean_labels->size() != n) throw InputError("clean label count != number of ids");
  if (num_classes < 1) throw InputError("num_classes must be >= 1");
  if (!features.all_finite()) throw InputError("features contain non-finite values");
  std::unordered_set<ExampleId> seen;
  seen.reserve(n);
  for (ExampleId id : ids) {
    if (!seen.insert(id).second) throw InputError("duplicate example id " + std::to_string(id));
  }
  auto check = [&](const std::vector<int>& labels, const char* what) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= num_classes) {
        throw InputError(std::string(what) + " " + std::to_string(labels[i]) + " of id " +
                         std::to_string(ids[i]) + " outside [0, " + std::to_string(num_classes) + ")");
      }
    }
  };
  check(given_labels, "label");
  if (clean_labels) check(*clean_labels, "clean label");
}

std::unordered_map<ExampleId, std::size_t> Dataset::index() const {
  std::unordered_map<ExampleId, std::size_t> idx;
  idx.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) idx.emplace(ids[i], i);
  return idx;
}

Dataset Dataset::subset(std::span<const ExampleId> wanted) const {
  const auto idx = index();
  std::vector<std::size_t> rows;
  rows.reserve(wanted.size());
  for (ExampleId id : wanted) {
    auto it = idx.find(id);
    if (it == idx.end()) throw InputError("unknown example id " + std::to_string(id));
    rows.push_back(it->second);
  }
  Dataset out;
  out.num_classes = num_classes;
  out.ids.assign(wanted.begin(), wanted.end());
  out.features = features.gather_rows(rows);
  out.given_labels.reserve(rows.size());
  for (auto r : rows) out.given_labels.push_back(given_labels[r]);
  if (clean_labels) {
    std::vector<int> c;
    c.reserve(rows.size());
    for (auto r : rows) c.push_back((*clean_labels)[r]);
    out.clean_labels = std::move(c);
  }
  return out;
}

TrainingSet Dataset::training_view() const { return TrainingSet{ids, features, given_labels, num_classes}; }

std::string Dataset::fingerprint() const {
  Fnv1a h;
  h.update_value(static_cast<std::int64_t>(num_classes));
  h.update_value(static_cast<std::uint64_t>(features.cols()));
  for (ExampleId id : ids) h.update_value(id);
  for (int l : given_labels) h.update_value(l);
  if (clean_labels) {
    for (int l : *clean_labels) h.update_value(l);
  }
  for (double v : features.data()) h.update_value(v);
  return h.hex();
}

void SyntheticSpec::validate() const {
  if (num_classes < 1) throw ConfigError("num_classes must be >= 1");
  if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
  if (clusters_per_class < 1) throw ConfigError("clusters_per_class must be >= 1");
  if (cluster_weights.size() != clusters_per_class) {
    throw ConfigError("cluster_weights needs one entry per cluster");
  }
  double sum = 0.0;
  for (double w : cluster_weights) {
    if (!(w >= 0.0)) throw ConfigError("cluster weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("cluster_weights must sum to 1");
  if (cluster_spreads.size() != 1 && cluster_spreads.size() != clusters_per_class) {
    throw ConfigError("cluster_spreads needs one entry or one per cluster");
  }
  for (double s : cluster_spreads) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("cluster spreads must be positive");
  }
  if (!cluster_means.empty()) {
    if (cluster_means.size() != static_cast<std::size_t>(num_classes) * clusters_per_class) {
      throw ConfigError("cluster_means needs num_classes * clusters_per_class rows");
    }
    for (const auto& m : cluster_means) {
      if (m.size() != feature_dim) throw ConfigError("cluster mean length != feature_dim");
    }
  } else if (!(mean_scale >= 0.0)) {
    throw ConfigError("mean_scale must be non-negative");
  }
}

std::vector<std::vector<double>> overlapping_subgroup_means(int num_classes, std::size_t feature_dim,
                                                            double mean_scale, std::uint64_t seed) {
  if (num_classes < 2) throw ConfigError("overlapping subgroups need at least 2 classes");
  if (feature_dim == 0) throw ConfigError("feature_dim must be positive");
  const auto c = static_cast<std::size_t>(num_classes);
  Rng rng(mix_seed(seed, 77));
  std::vector<std::vector<double>> dominant(c, std::vector<double>(feature_dim));
  for (auto& m : dominant)
    for (auto& v : m) v = mean_scale * rng.normal();
  std::vector<std::vector<double>> means;
  means.reserve(2 * c);
  for (std::size_t k = 0; k < c; ++k) {
    means.push_back(dominant[k]);
    means.push_back(dominant[(k + 1) % c]);
  }
  return means;
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::vector<std::size_t>* clusters) {
  spec.validate();
  const auto n_classes = static_cast<std::size_t>(spec.num_classes);
  const std::size_t k = spec.clusters_per_class;
  const std::size_t d = spec.feature_dim;

  std::vector<std::vector<double>> means = spec.cluster_means;
  if (means.empty()) {
    Rng mean_rng(mix_seed(spec.seed, 0x6d65616e73ULL));
    means.assign(n_classes * k, std::vector<double>(d));
    for (auto& m : means) {
      for (double& v : m) v = spec.mean_scale * mean_rng.normal();
    }
  }

  std::vector<double> cumulative(k);
  std::partial_sum(spec.cluster_weights.begin(), spec.cluster_weights.end(), cumulative.begin());

  const std::size_t n = n_classes * spec.examples_per_class;
  Dataset ds;
  ds.num_classes = spec.num_classes;
  ds.ids.resize(n);
  ds.features = Matrix(n, d);
  ds.given_labels.resize(n);
  if (clusters) clusters->assign(n, 0);

  Rng rng(mix_seed(spec.seed, 0x73616d706c65ULL));
  std::size_t row = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t e = 0; e < spec.examples_per_class; ++e, ++row) {
      const double u = rng.uniform();
      std::size_t cl = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                cumulative.begin());
      cl = std::min(cl, k - 1);
      while (spec.cluster_weights[cl] == 0.0 && cl > 0) --cl;
      const double spread = spec.cluster_spreads.size() == 1 ? spec.cluster_spreads[0] : spec.cluster_spreads[cl];
      const auto& mean = means[c * k + cl];
      auto dst = ds.features.row(row);
      for (std::size_t j = 0; j < d; ++j) dst[j] = mean[j] + spread * rng.normal();
      ds.ids[row] = static_cast<ExampleId>(row);
      ds.given_labels[row] = static_cast<int>(c);
      if (clusters) (*clusters)[row] = cl;
    }
  }
  ds.clean_labels = ds.given_labels;
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, int num_classes_hint) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ":1: missing header row");
  const auto header = split_commas(line);
  if (header.size() < 2 || trim(header[0]) != "id" || trim(header[1]) != "label") {
    throw InputError(path.string() + ":1: header must start with 'id,label'");
  }
  const bool has_clean = header.size() > 2 && trim(header[2]) == "clean_label";
  const std::size_t first_feature = has_clean ? 3 : 2;
  const std::size_t dim = header.size() - first_feature;
  for (std::size_t j = 0; j < dim; ++j) {
    if (trim(header[first_feature + j]) != "f" + std::to_string(j)) {
      throw InputError(path.string() + ":1: expected feature column 'f" + std::to_string(j) + "'");
    }
  }

  Dataset ds;
  std::vector<double> feats;
  std::vector<int> clean;
  std::size_t line_no = 1;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    ds.ids.push_back(parse_field<ExampleId>(fields[0], path, line_no, 0));
    const int label = parse_field<int>(fields[1], path, line_no, 1);
    if (label < 0) throw InputError(path.string() + ":" + std::to_string(line_no) + ": negative label");
    ds.given_labels.push_back(label);
    max_label = std::max(max_label, label);
    if (has_clean) {
      const int c = parse_field<int>(fields[2], path, line_no, 2);
      if (c < 0) throw InputError(path.string() + ":" + std::to_string(line_no) + ": negative clean label");
      clean.push_back(c);
      max_label = std::max(max_label, c);
    }
    for (std::size_t j = 0; j < dim; ++j) {
      feats.push_back(parse_field<double>(fields[first_feature + j], path, line_no, first_feature + j));
    }
  }
  const std::size_t n = ds.ids.size();
  ds.features = Matrix(n, dim, std::move(feats));
  if (has_clean) ds.clean_labels = std::move(clean);
  ds.num_classes = std::max(num_classes_hint, max_label + 1);
  if (ds.num_classes < 1) ds.num_classes = 1;
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "id,label";
  if (ds.clean_labels) out << ",clean_label";
  for (std::size_t j = 0; j < ds.feature_dim(); ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.ids[i] << ',' << ds.given_labels[i];
    if (ds.clean_labels) out << ',' << (*ds.clean_labels)[i];
    for (double v : ds.features.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) throw InputError("write failed for " + path.string());
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const IdxFile img = read_idx(images, 3);
  const IdxFile lab = read_idx(labels, 1);
  if (img.dims[0] != lab.dims[0]) {
    throw InputError(images.string() + ": " + std::to_string(img.dims[0]) + " images but " + labels.string() +
                     " holds " + std::to_string(lab.dims[0]) + " labels");
  }
  const std::size_t n = img.dims[0];
  const std::size_t dim = std::size_t{img.dims[1]} * img.dims[2];
  Dataset ds;
  ds.features = Matrix(n, dim);
  auto dst = ds.features.data();
  for (std::size_t i = 0; i < img.bytes.size(); ++i) dst[i] = static_cast<double>(img.bytes[i]) / 255.0;
  ds.ids.resize(n);
  std::iota(ds.ids.begin(), ds.ids.end(), ExampleId{0});
  ds.given_labels.assign(lab.bytes.begin(), lab.bytes.end());
  int max_label = 0;
  for (int l : ds.given_labels) max_label = std::max(max_label, l);
  ds.num_classes = max_label + 1;
  return ds;
}

std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, const SplitSpec& split) {
  if (!(split.holdout_fraction >= 0.0 && split.holdout_fraction < 1.0)) {
    throw ConfigError("holdout_fraction must lie in [0, 1)");
  }
  const std::size_t n = ds.size();
  const auto n_hold = static_cast<std::size_t>(std::llround(split.holdout_fraction * static_cast<double>(n)));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(split.seed);
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<bool> in_holdout(n, false);
  for (std::size_t i = 0; i < n_hold; ++i) in_holdout[perm[i]] = true;
  std::vector<ExampleId> train_ids, hold_ids;
  for (std::size_t i = 0; i < n; ++i) (in_holdout[i] ? hold_ids : train_ids).push_back(ds.ids[i]);
  return {ds.subset(train_ids), ds.subset(hold_ids)};
}

}  // namespace latestop

#include "ecn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ecn::synth {

double NormalSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

SyntheticDataset generate_clusters(const ClusterSpec& spec) {
  if (spec.n_ids == 0 || spec.imgs_per_id < 2 || spec.dim == 0 || spec.n_cameras < 2) {
    throw Error(ErrorCode::BadParams, "need ids >= 1, imgs >= 2, dim >= 1 and cams >= 2");
  }
  if (!(spec.intra_std >= 0.0) || !(spec.inter_std >= 0.0) || !std::isfinite(spec.intra_std) ||
      !std::isfinite(spec.inter_std)) {
    throw Error(ErrorCode::BadParams, "standard deviations must be finite and non-negative");
  }

  SyntheticDataset out;
  auto& f = out.features;
  f.n_items = spec.n_ids * spec.imgs_per_id;
  f.dim = spec.dim;
  f.data.resize(f.n_items * f.dim);
  out.records.resize(f.n_items);

  NormalSource rng(spec.seed);
  std::vector<double> center(spec.dim);
  for (std::size_t id = 0; id < spec.n_ids; ++id) {
    for (double& c : center) c = spec.inter_std * rng.normal();
    for (std::size_t j = 0; j < spec.imgs_per_id; ++j) {
      const std::size_t item = id * spec.imgs_per_id + j;
      for (std::size_t d = 0; d < spec.dim; ++d) {
        f.data[item * spec.dim + d] = static_cast<float>(center[d] + spec.intra_std * rng.normal());
      }
      auto& r = out.records[item];
      r.item_index = static_cast<index_t>(item);
      r.person_id = static_cast<std::int64_t>(id) + 1;
      r.camera_id = static_cast<std::int64_t>(item % spec.n_cameras);
      r.role = j == 0 ? Role::Query : Role::Gallery;
    }
  }
  return out;
}

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix naive_sq_euclidean(const FeatureMatrix& f) {
  Matrix d(f.n_items, std::vector<double>(f.n_items, 0.0));
  for (std::size_t i = 0; i < f.n_items; ++i) {
    for (std::size_t j = 0; j < f.n_items; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < f.dim; ++k) {
        const double diff = static_cast<double>(f.data[i * f.dim + k]) - f.data[j * f.dim + k];
        s += diff * diff;
      }
      d[i][j] = s;
    }
  }
  return d;
}

std::vector<std::vector<std::size_t>> sorted_lists(const Matrix& d) {
  const std::size_t n = d.size();
  std::vector<std::vector<std::size_t>> lists(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& l = lists[i];
    for (std::size_t b = 0; b < n; ++b) l.push_back(b);
    std::sort(l.begin(), l.end(), [&](std::size_t a, std::size_t b) {
      if (a == i || b == i) return a == i && b != i;
      if (d[i][a] != d[i][b]) return d[i][a] < d[i][b];
      return a < b;
    });
  }
  return lists;
}

Matrix similarity_to_distance(const Matrix& sim) {
  double lo = sim[0][0];
  double hi = sim[0][0];
  for (const auto& row : sim) {
    for (const double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateSimilarity, "constant similarity");
  Matrix d = sim;
  for (auto& row : d) {
    for (double& v : row) v = 1.0 - (v - lo) / (hi - lo);
  }
  return d;
}

}  // namespace

DistanceMatrix oracle_ecn(const FeatureMatrix& features, const EcnParams& params,
                          const EvalRecords& records) {
  validate_feature_matrix(features);
  const std::size_t n = features.n_items;
  if (n > kOracleMaxItems) {
    throw Error(ErrorCode::TooLargeForOracle,
                std::to_string(n) + " items exceeds the oracle limit of " + std::to_string(kOracleMaxItems));
  }
  std::vector<std::size_t> queries;
  std::vector<std::size_t> gallery;
  for (const auto& r : records) {
    if (r.item_index < 0 || static_cast<std::size_t>(r.item_index) >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "record index " + std::to_string(r.item_index));
    }
    (r.role == Role::Query ? queries : gallery).push_back(static_cast<std::size_t>(r.item_index));
  }
  std::sort(queries.begin(), queries.end());
  std::sort(gallery.begin(), gallery.end());

  const Matrix dist = naive_sq_euclidean(features);
  const auto lists = sorted_lists(dist);

  // pos[i][b]: 1-based position of b in list i
  std::vector<std::vector<std::size_t>> pos(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < n; ++r) pos[i][lists[i][r]] = r + 1;
  }

  Matrix base = dist;
  if (params.method == Method::RankDistOnly || params.method == Method::EcnRankDist) {
    const auto k = static_cast<double>(params.k);
    Matrix sim(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
          const double wi = std::max(k + 1.0 - static_cast<double>(pos[i][b]), 0.0);
          const double wj = std::max(k + 1.0 - static_cast<double>(pos[j][b]), 0.0);
          s += wi * wj;
        }
        sim[i][j] = s;
      }
    }
    base = similarity_to_distance(sim);
  }

  DistanceMatrix out(queries.size(), gallery.size());
  if (params.method == Method::None || params.method == Method::RankDistOnly) {
    for (std::size_t a = 0; a < queries.size(); ++a) {
      for (std::size_t b = 0; b < gallery.size(); ++b) out(a, b) = base[queries[a]][gallery[b]];
    }
    return out;
  }

  validate_params(params, n);
  // N(i, M): top t neighbors (self excluded), then top q of each of them
  std::vector<std::vector<std::size_t>> expanded(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> first_level;
    for (std::size_t r = 1; r <= params.t; ++r) first_level.push_back(lists[i][r]);
    std::vector<std::size_t> multiset = first_level;
    for (const std::size_t nb : first_level) {
      for (std::size_t r = 1; r <= params.q; ++r) multiset.push_back(lists[nb][r]);
    }
    expanded[i] = multiset;
  }

  const std::size_t m = params.m();
  for (std::size_t a = 0; a < queries.size(); ++a) {
    const std::size_t p = queries[a];
    for (std::size_t b = 0; b < gallery.size(); ++b) {
      const std::size_t g = gallery[b];
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += base[expanded[p][j]][g] + base[expanded[g][j]][p];
      out(a, b) = s / (2.0 * static_cast<double>(m));
    }
  }
  return out;
}

}  // namespace ecn::synth

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <limits>
#include <optional>

#include "ecn/distance.hpp"
#include "ecn/eval.hpp"
#include "ecn/io.hpp"
#include "ecn/rerank.hpp"
#include "ecn/synth.hpp"

namespace py = pybind11;
using namespace ecn;

namespace {

using F32 = py::array_t<float, py::array::c_style | py::array::forcecast>;
using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using I64 = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;
using Bool = py::array_t<bool, py::array::c_style | py::array::forcecast>;

FeatureMatrix to_features(const F32& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "features must be 2-d");
  FeatureMatrix f;
  f.n_items = static_cast<std::size_t>(a.shape(0));
  f.dim = static_cast<std::size_t>(a.shape(1));
  f.data.assign(a.data(), a.data() + a.size());
  return f;
}

DistanceMatrix to_distance(const F64& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "distance matrix must be 2-d");
  DistanceMatrix d;
  d.rows = static_cast<std::size_t>(a.shape(0));
  d.cols = static_cast<std::size_t>(a.shape(1));
  d.data.assign(a.data(), a.data() + a.size());
  return d;
}

py::array_t<double> from_distance(const DistanceMatrix& d) {
  py::array_t<double> out({d.rows, d.cols});
  std::copy(d.data.begin(), d.data.end(), out.mutable_data());
  return out;
}

py::array_t<float> from_features(const FeatureMatrix& f) {
  py::array_t<float> out({f.n_items, f.dim});
  std::copy(f.data.begin(), f.data.end(), out.mutable_data());
  return out;
}

py::array_t<index_t> from_indices(const std::vector<index_t>& v, std::size_t rows, std::size_t cols) {
  py::array_t<index_t> out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<index_t> to_indices(const I64& a, const char* what, bool flatten = false) {
  if (!flatten && a.ndim() != 1) throw Error(ErrorCode::ShapeMismatch, std::string(what) + " must be 1-d");
  std::vector<index_t> v(static_cast<std::size_t>(a.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = a.data()[i];
    if (x < 0 || x > std::numeric_limits<index_t>::max()) {
      throw Error(ErrorCode::IndexOutOfRange, std::string(what) + " index " + std::to_string(x));
    }
    v[i] = static_cast<index_t>(x);
  }
  return v;
}

EvalRecords to_records(const Bool& is_query, const I64* person_ids, const I64* camera_ids) {
  const auto n = static_cast<std::size_t>(is_query.size());
  if ((person_ids && static_cast<std::size_t>(person_ids->size()) != n) ||
      (camera_ids && static_cast<std::size_t>(camera_ids->size()) != n)) {
    throw Error(ErrorCode::ShapeMismatch, "person_ids, camera_ids and is_query must have the same length");
  }
  EvalRecords r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i].item_index = static_cast<index_t>(i);
    r[i].person_id = person_ids ? person_ids->data()[i] : 0;
    r[i].camera_id = camera_ids ? camera_ids->data()[i] : 0;
    r[i].role = is_query.data()[i] ? Role::Query : Role::Gallery;
  }
  return r;
}

EcnParams make_params(const std::string& method, std::size_t t, std::size_t q, std::size_t k) {
  EcnParams p;
  p.t = t;
  p.q = q;
  p.k = k;
  p.method = parse_method(method);
  return p;
}

py::dict report_dict(const EvalReport& r) {
  py::dict cmc;
  for (const auto& [k, v] : r.cmc) cmc[py::int_(k)] = v;
  py::dict d;
  d["map"] = r.map;
  d["cmc"] = cmc;
  d["num_queries"] = r.num_queries;
  d["skipped_queries"] = r.skipped_queries;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ecn, m) {
  m.doc() = "Expanded cross neighborhood re-ranking";

  static py::exception<Error> ecn_error(m, "EcnError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = ecn_error;
      py::object inst = err(e.what());
      inst.attr("code") = static_cast<int>(e.code());
      inst.attr("code_name") = std::string(to_string(e.code()));
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  m.def("set_num_threads", &set_num_threads, py::arg("n"), "0 restores the OpenMP default.");
  m.def("num_threads", &num_threads);

  m.def(
      "pairwise_sq_euclidean",
      [](const F32& x) {
        auto f = to_features(x);
        py::gil_scoped_release release;
        auto d = pairwise_sq_euclidean(f);
        py::gil_scoped_acquire acquire;
        return from_distance(d);
      },
      py::arg("features"), "Squared euclidean distances between rows, shape (n, n).");
  m.def(
      "pairwise_cosine", [](const F32& x) { return from_distance(pairwise_cosine(to_features(x))); },
      py::arg("features"));

  m.def(
      "rank_lists",
      [](const F64& dist, std::optional<std::size_t> depth) {
        const auto d = to_distance(dist);
        const auto l = depth ? build_rank_lists(d, *depth) : build_rank_lists(d);
        return from_indices(l.order, l.n_items, l.depth);
      },
      py::arg("distances"), py::arg("depth") = py::none(),
      "Items ordered by ascending distance per row; self first, ties by index.");

  m.def(
      "expand_neighbors",
      [](const F64& dist, std::size_t t, std::size_t q) {
        const auto d = to_distance(dist);
        validate_distance_matrix(d, true);
        const auto nb = expand_neighbors(build_rank_lists(d, std::min(d.rows, std::max(t, q) + 1)), t, q);
        return from_indices(nb.neighbors, nb.n_items, nb.m);
      },
      py::arg("distances"), py::arg("t") = 3, py::arg("q") = 8, "Expanded neighbor multisets, shape (n, t + t*q).");

  m.def(
      "rank_list_similarity",
      [](const F64& dist, std::size_t k) {
        const auto d = to_distance(dist);
        validate_distance_matrix(d, true);
        const auto s = rank_list_similarity(build_rank_lists(d, std::min(k, d.rows)), k);
        py::array_t<double> out({s.n_items, s.n_items});
        std::copy(s.data.begin(), s.data.end(), out.mutable_data());
        return out;
      },
      py::arg("distances"), py::arg("k") = 25);

  m.def(
      "rank_dist",
      [](const F64& sim) {
        const auto s = to_distance(sim);
        if (!s.is_square()) throw Error(ErrorCode::ShapeMismatch, "similarity must be square");
        return from_distance(rank_dist(SimilarityMatrix{s.rows, s.data}));
      },
      py::arg("similarity"), "1 - minmax(similarity).");

  m.def(
      "ecn_distance",
      [](const F64& base, const I64& neighbors, const I64& queries, const I64& gallery) {
        const auto d = to_distance(base);
        if (neighbors.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "neighbors must be 2-d");
        ExpandedNeighborTable nb;
        nb.n_items = static_cast<std::size_t>(neighbors.shape(0));
        nb.m = static_cast<std::size_t>(neighbors.shape(1));
        nb.neighbors = to_indices(neighbors, "neighbor", true);
        const auto q = to_indices(queries, "query");
        const auto g = to_indices(gallery, "gallery");
        return from_distance(ecn_distance(d, nb, q, g));
      },
      py::arg("base"), py::arg("neighbors"), py::arg("queries"), py::arg("gallery"));

  m.def(
      "rerank",
      [](const py::array& x, const Bool& is_query, const std::string& method, std::size_t t, std::size_t q,
         std::size_t k, bool precomputed) {
        const auto records = to_records(is_query, nullptr, nullptr);
        const auto params = make_params(method, t, q, k);
        DistanceMatrix out;
        if (precomputed) {
          const auto d = to_distance(F64::ensure(x));
          py::gil_scoped_release release;
          out = rerank(d, params, records);
        } else {
          const auto f = to_features(F32::ensure(x));
          py::gil_scoped_release release;
          out = rerank(f, params, records);
        }
        return from_distance(out);
      },
      py::arg("x"), py::arg("is_query"), py::arg("method") = "ecn-rank", py::arg("t") = 3, py::arg("q") = 8,
      py::arg("k") = 25, py::arg("precomputed") = false,
      "Re-ranked query x gallery distances. `x` holds features, or a square distance matrix when "
      "precomputed=True.");

  m.def(
      "oracle_ecn",
      [](const F32& x, const Bool& is_query, const std::string& method, std::size_t t, std::size_t q, std::size_t k) {
        return from_distance(
            synth::oracle_ecn(to_features(x), make_params(method, t, q, k), to_records(is_query, nullptr, nullptr)));
      },
      py::arg("features"), py::arg("is_query"), py::arg("method") = "ecn-rank", py::arg("t") = 3, py::arg("q") = 8,
      py::arg("k") = 25, "Slow literal reference (at most 500 items).");

  m.def(
      "evaluate",
      [](const F64& dist, const I64& person_ids, const I64& camera_ids, const Bool& is_query,
         std::vector<std::size_t> ranks, std::vector<std::int64_t> distractor_ids) {
        EvalOptions options;
        options.ranks = std::move(ranks);
        options.distractor_ids = std::move(distractor_ids);
        return report_dict(evaluate(to_distance(dist), to_records(is_query, &person_ids, &camera_ids), options));
      },
      py::arg("distances"), py::arg("person_ids"), py::arg("camera_ids"), py::arg("is_query"),
      py::arg("ranks") = std::vector<std::size_t>{1, 5, 10, 50},
      py::arg("distractor_ids") = std::vector<std::int64_t>{-1, 0},
      "mAP and CMC of a query x gallery matrix; per-item labels in item order.");

  m.def(
      "generate_clusters",
      [](std::uint64_t seed, std::size_t n_ids, std::size_t imgs_per_id, std::size_t dim, double intra_std,
         double inter_std, std::size_t n_cameras) {
        synth::ClusterSpec spec{seed, n_ids, imgs_per_id, dim, intra_std, inter_std, n_cameras};
        const auto data = synth::generate_clusters(spec);
        const auto n = data.records.size();
        py::array_t<std::int64_t> pid(n), cam(n);
        py::array_t<bool> query(n);
        for (std::size_t i = 0; i < n; ++i) {
          pid.mutable_data()[i] = data.records[i].person_id;
          cam.mutable_data()[i] = data.records[i].camera_id;
          query.mutable_data()[i] = data.records[i].role == Role::Query;
        }
        return py::make_tuple(from_features(data.features), pid, cam, query);
      },
      py::arg("seed") = 0, py::arg("n_ids") = 50, py::arg("imgs_per_id") = 4, py::arg("dim") = 32,
      py::arg("intra_std") = 1.0, py::arg("inter_std") = 1.0, py::arg("n_cameras") = 2,
      "Returns (features, person_ids, camera_ids, is_query).");

  m.def(
      "read_features", [](const std::string& path) { return from_features(io::read_features(path)); },
      py::arg("path"));
  m.def(
      "write_features", [](const F32& x, const std::string& path) { io::write_features(to_features(x), path); },
      py::arg("features"), py::arg("path"));
  m.def(
      "read_distance", [](const std::string& path) { return from_distance(io::read_distance(path)); },
      py::arg("path"));
  m.def(
      "write_distance", [](const F64& d, const std::string& path) { io::write_distance(to_distance(d), path); },
      py::arg("distances"), py::arg("path"));
  m.def(
      "read_metadata",
      [](const std::string& path) {
        const auto records = io::read_metadata(path);
        const auto n = records.size();
        py::array_t<std::int64_t> pid(n), cam(n);
        py::array_t<bool> query(n);
        for (std::size_t i = 0; i < n; ++i) {
          pid.mutable_data()[i] = records[i].person_id;
          cam.mutable_data()[i] = records[i].camera_id;
          query.mutable_data()[i] = records[i].role == Role::Query;
        }
        return py::make_tuple(pid, cam, query);
      },
      py::arg("path"), "Returns (person_ids, camera_ids, is_query) in item order.");
  m.def(
      "write_metadata",
      [](const I64& person_ids, const I64& camera_ids, const Bool& is_query, const std::string& path) {
        io::write_metadata(to_records(is_query, &person_ids, &camera_ids), path);
      },
      py::arg("person_ids"), py::arg("camera_ids"), py::arg("is_query"), py::arg("path"));
}

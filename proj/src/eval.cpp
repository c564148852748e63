#include "ecn/eval.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "parallel.hpp"

namespace ecn {
namespace {

struct QueryResult {
  bool scored = false;
  double ap = 0.0;
  std::size_t first_hit = 0;  // 1-based
};

}  // namespace

double average_precision(const std::vector<bool>& ranked_relevance) {
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < ranked_relevance.size(); ++r) {
    if (!ranked_relevance[r]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

EvalReport evaluate(const DistanceMatrix& dist, const EvalRecords& records,
                    const EvalOptions& options) {
  std::vector<const EvalRecord*> queries;
  std::vector<const EvalRecord*> gallery;
  for (const auto& r : records) (r.role == Role::Query ? queries : gallery).push_back(&r);
  const auto by_index = [](const EvalRecord* a, const EvalRecord* b) {
    return a->item_index < b->item_index;
  };
  std::sort(queries.begin(), queries.end(), by_index);
  std::sort(gallery.begin(), gallery.end(), by_index);

  if (dist.rows != queries.size() || dist.cols != gallery.size() ||
      dist.data.size() != dist.rows * dist.cols) {
    throw Error(ErrorCode::ShapeMismatch,
                "distance matrix is " + std::to_string(dist.rows) + "x" + std::to_string(dist.cols) +
                    " but metadata has " + std::to_string(queries.size()) + " queries and " +
                    std::to_string(gallery.size()) + " gallery items");
  }
  for (const std::size_t k : options.ranks) {
    if (k == 0) throw Error(ErrorCode::InvalidParams, "CMC ranks are 1-based");
  }

  const auto is_distractor = [&](std::int64_t pid) {
    return std::find(options.distractor_ids.begin(), options.distractor_ids.end(), pid) !=
           options.distractor_ids.end();
  };

  std::vector<QueryResult> results(queries.size());
  detail::parallel_for(queries.size(), [&](std::size_t a) {
    const EvalRecord& q = *queries[a];
    if (is_distractor(q.person_id)) return;
    const auto row = dist.row(a);

    std::vector<std::size_t> kept;
    kept.reserve(gallery.size());
    for (std::size_t b = 0; b < gallery.size(); ++b) {
      const EvalRecord& g = *gallery[b];
      if (g.person_id == q.person_id && g.camera_id == q.camera_id) continue;
      kept.push_back(b);
    }
    std::sort(kept.begin(), kept.end(), [&](std::size_t x, std::size_t y) {
      return row[x] != row[y] ? row[x] < row[y] : x < y;
    });

    std::vector<bool> relevance(kept.size());
    for (std::size_t r = 0; r < kept.size(); ++r) {
      relevance[r] = gallery[kept[r]]->person_id == q.person_id;
    }
    const auto first = std::find(relevance.begin(), relevance.end(), true);
    if (first == relevance.end()) return;

    results[a].scored = true;
    results[a].ap = average_precision(relevance);
    results[a].first_hit = static_cast<std::size_t>(first - relevance.begin()) + 1;
  });

  EvalReport report;
  double ap_sum = 0.0;
  for (const auto& r : results) {
    if (!r.scored) continue;
    ++report.num_queries;
    ap_sum += r.ap;
  }
  report.skipped_queries = queries.size() - report.num_queries;
  if (report.num_queries == 0) {
    throw Error(ErrorCode::NoValidQueries, "no query has a matching gallery item after filtering");
  }
  const auto scored = static_cast<double>(report.num_queries);
  report.map = ap_sum / scored;
  for (const std::size_t k : options.ranks) {
    const auto within = std::count_if(results.begin(), results.end(), [k](const QueryResult& r) {
      return r.scored && r.first_hit <= k;
    });
    report.cmc[k] = static_cast<double>(within) / scored;
  }
  return report;
}

}  // namespace ecn

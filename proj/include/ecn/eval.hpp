#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ecn/core.hpp"

namespace ecn {

struct EvalOptions {
  /// CMC cut-offs to report.
  std::vector<std::size_t> ranks{1, 5, 10, 50};
  /// Gallery person ids that never count as matches but stay in the ranking
  /// as negatives (Market-1501 uses -1 for junk and 0 for distractors).
  /// Queries carrying one of these ids are skipped.
  std::vector<std::int64_t> distractor_ids{-1, 0};
};

struct EvalReport {
  double map = 0.0;
  std::map<std::size_t, double> cmc;
  std::size_t num_queries = 0;  ///< queries that were scored
  std::size_t skipped_queries = 0;
};

/// Single-query cross-camera evaluation of a query x gallery distance matrix.
///
/// Rows follow the query records and columns the gallery records, both in
/// ascending item order. For each query, gallery items sharing its person id
/// and camera id are dropped; the rest are ranked by ascending distance with
/// ties broken by column. AP is the mean precision at each relevant hit; CMC@k
/// is the fraction of scored queries whose first hit lies within the top k.
/// Queries without any relevant gallery item are skipped and counted.
EvalReport evaluate(const DistanceMatrix& dist, const EvalRecords& records,
                    const EvalOptions& options = {});

/// Average precision of one ranked relevance sequence (true = relevant).
/// Returns 0 when nothing is relevant.
double average_precision(const std::vector<bool>& ranked_relevance);

}  // namespace ecn

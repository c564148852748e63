#pragma once

#include <cstdint>
#include <random>

#include "ecn/core.hpp"

namespace ecn::synth {

/// Reproducible normal deviates.
///
/// Uniforms come from std::mt19937_64 (its constants are fixed by the C++
/// standard): u = (x >> 11) * 2^-53, in [0, 1). Normals use the Box-Muller
/// pair z0 = sqrt(-2 ln(1 - u1)) cos(2 pi u2), z1 = ... sin(2 pi u2), handing
/// out z0 then z1.
class NormalSource {
public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct ClusterSpec {
  std::uint64_t seed = 0;
  std::size_t n_ids = 50;
  std::size_t imgs_per_id = 4;
  std::size_t dim = 32;
  double intra_std = 1.0;
  double inter_std = 1.0;
  std::size_t n_cameras = 2;
};

struct SyntheticDataset {
  FeatureMatrix features;
  EvalRecords records;
};

/// Gaussian identity clusters.
///
/// Item `id * imgs_per_id + j` is image j of identity id (person_id = id + 1,
/// so the default distractor labels 0 and -1 never occur). For each identity
/// the center is drawn first (dim normals scaled by inter_std), then each of
/// its images adds dim normals scaled by intra_std. Cameras are assigned
/// round-robin over the item index; image 0 of every identity is the query,
/// and image 1 is a gallery item on a different camera.
SyntheticDataset generate_clusters(const ClusterSpec& spec);

/// Literal re-ranking reference for small inputs (n_items <= 500): naive
/// distance loops, fully sorted rank lists, explicit multisets and the
/// rank-list similarity summed over every item. Output is query x gallery in
/// ascending item order, for any `params.method`.
DistanceMatrix oracle_ecn(const FeatureMatrix& features, const EcnParams& params,
                          const EvalRecords& records);

inline constexpr std::size_t kOracleMaxItems = 500;

}  // namespace ecn::synth

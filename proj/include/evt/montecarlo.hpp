#ifndef EVT_MONTECARLO_HPP
#define EVT_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "evt/normalize.hpp"

namespace evt {

// (seed, stream_id) fully determines an output sequence. The generator is
// splitmix64 run in counter mode: draw i of a stream is a pure function of
// (seed, stream_id, i), which makes any index range computable by any worker
// with bitwise-identical results. See README for the exact derivation.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

struct EstimateWithCI {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n_samples)
  std::uint64_t n_samples = 0;
};

inline constexpr const char* kGeneratorName = "splitmix64-counter";
inline constexpr std::uint64_t kChunkSize = 1 << 16;

// Draw i of the stream, uniform on (0,1), endpoints excluded.
double uniform_at(const SeededStream& stream, std::uint64_t index);

// Inverse-transform samples x_i = Q(u_i). Deterministic in (seed, stream_id,
// count); `workers` only affects wall time, never values.
std::vector<double> sample(const Distribution& dist, const SeededStream& stream,
                           std::uint64_t count, int workers = 1);

// One uniform per sample: Q_base(u^{1/n}) then (x - b)/a. Identical in
// distribution to taking the max of n base draws.
std::vector<double> sample_normalized_max(const NormalizedMax& nm,
                                          const SeededStream& stream,
                                          std::uint64_t count, int workers = 1);

// Self-check path: literal max over n base draws (n uniforms per sample,
// sample i consuming indices [i*n, (i+1)*n)). Exercised by tests; the
// single-uniform path above is the production one.
std::vector<double> sample_normalized_max_by_maximum(const NormalizedMax& nm,
                                                     const SeededStream& stream,
                                                     std::uint64_t count);

// Mean and standard error of h over `count` samples. Chunked partial sums
// are merged in chunk order, so results are bitwise independent of worker
// count. A non-finite h value reports the smallest offending sample index.
EstimateWithCI estimate(const Distribution& dist, const RealFn& h,
                        const SeededStream& stream, std::uint64_t count,
                        int workers = 1);
EstimateWithCI estimate(const NormalizedMax& nm, const RealFn& h,
                        const SeededStream& stream, std::uint64_t count,
                        int workers = 1);

// Mean and standard error of already-materialized values.
EstimateWithCI summarize(const std::vector<double>& values);

}  // namespace evt

#endif  // EVT_MONTECARLO_HPP

#include "evt/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace evt {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// Stafford "mix13" finalizer (the splitmix64 output function).
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t stream_base(const SeededStream& s) {
  return mix64(s.seed + kGoldenGamma) ^
         mix64(s.stream_id * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
}

// Run chunk bodies over [0, count); chunk order of results is fixed, worker
// scheduling is not observable.
template <typename Body>
void for_each_chunk(std::uint64_t count, int workers, const Body& body) {
  const std::uint64_t n_chunks = (count + kChunkSize - 1) / kChunkSize;
  workers = std::max(1, workers);
  if (workers == 1 || n_chunks <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c)
      body(c, c * kChunkSize, std::min(count, (c + 1) * kChunkSize));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      body(c, c * kChunkSize, std::min(count, (c + 1) * kChunkSize));
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), n_chunks));
  pool.reserve(spawn);
  for (int i = 0; i < spawn; ++i) pool.emplace_back(run);
  for (auto& t : pool) t.join();
}

struct ChunkSums {
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  std::uint64_t bad_index = std::numeric_limits<std::uint64_t>::max();
  double bad_value = 0.0;
};

EstimateWithCI reduce_chunks(const std::vector<ChunkSums>& chunks,
                             std::uint64_t count) {
  // merge order is by chunk index regardless of which worker ran what
  long double sum = 0.0L, sum_sq = 0.0L;
  std::uint64_t bad = std::numeric_limits<std::uint64_t>::max();
  for (const ChunkSums& c : chunks) {
    sum += c.sum;
    sum_sq += c.sum_sq;
    bad = std::min(bad, c.bad_index);
  }
  if (bad != std::numeric_limits<std::uint64_t>::max()) {
    double bad_value = 0.0;
    for (const ChunkSums& c : chunks)
      if (c.bad_index == bad) bad_value = c.bad_value;
    throw evaluation_error(
        "estimate: h produced a non-finite value (" + std::to_string(bad_value) +
            ") at sample index " + std::to_string(bad),
        static_cast<double>(bad));
  }
  const long double n = static_cast<long double>(count);
  const long double mean = sum / n;
  const long double var = std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1.0L));
  return {static_cast<double>(mean),
          static_cast<double>(std::sqrt(var / n)), count};
}

template <typename Draw>
EstimateWithCI estimate_impl(const Draw& draw, const RealFn& h,
                             const SeededStream& stream, std::uint64_t count,
                             int workers) {
  if (count < 2) throw domain_error("estimate: count must be >= 2");
  const std::uint64_t n_chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkSums> chunks(n_chunks);
  for_each_chunk(count, workers,
                 [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                   ChunkSums& out = chunks[c];
                   for (std::uint64_t i = begin; i < end; ++i) {
                     const double y = h(draw(uniform_at(stream, i)));
                     if (!std::isfinite(y)) {
                       if (i < out.bad_index) {
                         out.bad_index = i;
                         out.bad_value = y;
                       }
                       return;
                     }
                     out.sum += y;
                     out.sum_sq += static_cast<long double>(y) * y;
                   }
                 });
  return reduce_chunks(chunks, count);
}

double draw_normalized(const NormalizedMax& nm, double u) {
  double x;
  if (nm.n == 1) {
    x = nm.base.quantile(u);  // keeps n = 1 bitwise equal to plain sampling
  } else {
    const double log_v = std::log(u) / static_cast<double>(nm.n);
    if (nm.base.quantile_survival) {
      const double s = -std::expm1(log_v);
      x = (s > 0.0 && s < 1.0) ? nm.base.quantile_survival(s)
                               : nm.base.quantile(std::exp(log_v));
    } else {
      x = nm.base.quantile(std::exp(log_v));
    }
  }
  return (x - nm.norming.b) / nm.norming.a;
}

}  // namespace

double uniform_at(const SeededStream& stream, std::uint64_t index) {
  const std::uint64_t bits = mix64(stream_base(stream) + (index + 1) * kGoldenGamma);
  // 53 random bits, offset to keep the draw strictly inside (0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

std::vector<double> sample(const Distribution& dist, const SeededStream& stream,
                           std::uint64_t count, int workers) {
  if (count == 0) throw domain_error("sample: count must be >= 1");
  std::vector<double> out(count);
  for_each_chunk(count, workers,
                 [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                   for (std::uint64_t i = begin; i < end; ++i)
                     out[i] = dist.quantile(uniform_at(stream, i));
                 });
  return out;
}

std::vector<double> sample_normalized_max(const NormalizedMax& nm,
                                          const SeededStream& stream,
                                          std::uint64_t count, int workers) {
  if (count == 0) throw domain_error("sample: count must be >= 1");
  std::vector<double> out(count);
  for_each_chunk(count, workers,
                 [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
                   for (std::uint64_t i = begin; i < end; ++i)
                     out[i] = draw_normalized(nm, uniform_at(stream, i));
                 });
  return out;
}

std::vector<double> sample_normalized_max_by_maximum(const NormalizedMax& nm,
                                                     const SeededStream& stream,
                                                     std::uint64_t count) {
  if (count == 0) throw domain_error("sample: count must be >= 1");
  std::vector<double> out(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    double best = -kInf;
    for (std::uint64_t j = 0; j < nm.n; ++j) {
      best = std::max(best,
                      nm.base.quantile(uniform_at(stream, i * nm.n + j)));
    }
    out[i] = (best - nm.norming.b) / nm.norming.a;
  }
  return out;
}

EstimateWithCI estimate(const Distribution& dist, const RealFn& h,
                        const SeededStream& stream, std::uint64_t count,
                        int workers) {
  return estimate_impl([&dist](double u) { return dist.quantile(u); }, h,
                       stream, count, workers);
}

EstimateWithCI estimate(const NormalizedMax& nm, const RealFn& h,
                        const SeededStream& stream, std::uint64_t count,
                        int workers) {
  return estimate_impl([&nm](double u) { return draw_normalized(nm, u); }, h,
                       stream, count, workers);
}

EstimateWithCI summarize(const std::vector<double>& values) {
  if (values.size() < 2) throw domain_error("summarize: need at least 2 values");
  long double sum = 0.0L, sum_sq = 0.0L;
  for (double v : values) {
    sum += v;
    sum_sq += static_cast<long double>(v) * v;
  }
  const long double n = static_cast<long double>(values.size());
  const long double mean = sum / n;
  const long double var = std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1.0L));
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n)),
          values.size()};
}

}  // namespace evt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gencs/generator.hpp"
#include "gencs/numerics.hpp"

namespace gencs {

enum class ConditionKind { WDC, RRIC };

std::string to_string(ConditionKind kind);

struct SampleDeviation {
  std::size_t index = 0;
  double deviation = 0.0;
};

/// Sampled estimate of a weight-distribution or range-restricted-isometry
/// constant. max_deviation is a lower bound on the supremum over all points,
/// never a certificate.
struct ConditionReport {
  ConditionKind kind = ConditionKind::WDC;
  int samples = 0;              // random draws requested
  double max_deviation = 0.0;
  std::size_t argmax_index = 0;
  std::vector<Vector> witness;  // (x, y) for WDC, (x1..x4) for RRIC
  std::uint64_t seed = 0;
  std::vector<SampleDeviation> deviations;  // one per evaluated (non-degenerate) sample
};

inline constexpr int kDefaultConditionSamples = 200;

/// || sum_i 1{w_i.x > 0} 1{w_i.y > 0} w_i w_i^T - Q_{x,y} || for one pair.
double wdc_pair_deviation(const Matrix& w, const Vector& x, const Vector& y);

/// Max of wdc_pair_deviation over the canonical pairs (e1,e1), (e1,-e1),
/// (e1,e2) (the last only when k >= 2) followed by num_samples pairs drawn
/// uniformly from the sphere. Canonical pairs occupy the first indices.
ConditionReport wdc_deviation(const Matrix& w, int num_samples, Rng& rng, unsigned threads = 1);

/// |<A(G1-G2), A(G3-G4)> - <G1-G2, G3-G4>| / (|G1-G2| |G3-G4|) for one tuple.
/// Returns a negative value if either difference has norm below 1e-12.
double rric_tuple_deviation(const Matrix& a, const GeneratorNetwork& net, const Vector& x1,
                            const Vector& x2, const Vector& x3, const Vector& x4);

/// Max over num_samples tuples of four i.i.d. sphere samples. Degenerate tuples
/// are skipped; throws DegenerateSamplingError if every tuple was degenerate.
ConditionReport rric_deviation(const Matrix& a, const GeneratorNetwork& net, int num_samples,
                               Rng& rng, unsigned threads = 1);

std::string summary_json(const ConditionReport& report);

}  // namespace gencs

// uncertainty.hpp
//
// Proportional interval (box) uncertainty on carrier prices: each price may
// deviate from its predicted value by at most a carrier-wide fraction. The
// electricity entries (ce, de) move on one axis and the hydrogen entries
// (cg, dg) on the other, so the box has two independent axes and four
// vertices.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "heatplan/model.hpp"

namespace heatplan {

struct UncertaintyBox {
  PriceVector nominal;
  double delta_electricity = 0.0;  // admissible fraction, >= 0
  double delta_hydrogen = 0.0;

  double delta_for(Technology t) const {
    return carrier_of(t) == Carrier::electricity ? delta_electricity
                                                 : delta_hydrogen;
  }
};

inline void validate(const UncertaintyBox& box) {
  validate(box.nominal);
  if (!std::isfinite(box.delta_electricity) || box.delta_electricity < 0 ||
      !std::isfinite(box.delta_hydrogen) || box.delta_hydrogen < 0) {
    throw std::invalid_argument("uncertainty deviations must be finite and nonnegative");
  }
}

namespace detail {

// Prices live in R+, so the lower endpoint is floored at zero when the
// deviation exceeds 100 %.
inline double lower_factor(double delta) {
  const double f = 1.0 - delta;
  return f > 0.0 ? f : 0.0;
}

}  // namespace detail

// True iff every entry lies inside its interval
// [max(0, nominal*(1-delta)), nominal*(1+delta)], with a small absolute slack
// so that boundary vertices test as contained.
inline bool contains(const UncertaintyBox& box, const PriceVector& prices,
                     double slack = 1e-12) {
  for (Technology t : kTechnologies) {
    const double delta = box.delta_for(t);
    const double lo = box.nominal[t] * detail::lower_factor(delta);
    const double hi = box.nominal[t] * (1.0 + delta);
    if (prices[t] < lo - slack || prices[t] > hi + slack) return false;
  }
  return true;
}

// Upper vertex of the box. Every plan's objective is a nonnegative
// combination of the price entries (coefficient X * H / conversion >= 0), so
// for any fixed assignment the maximization over the box is attained here;
// one deterministic solve at these prices therefore yields the min-max
// optimum.
inline PriceVector worst_case_prices(const UncertaintyBox& box) {
  PriceVector p;
  for (Technology t : kTechnologies) {
    p[t] = box.nominal[t] * (1.0 + box.delta_for(t));
  }
  return p;
}

// The four box vertices in a fixed order: bit 0 of the vertex index selects
// the high electricity endpoint, bit 1 the high hydrogen endpoint. Vertex 3
// equals worst_case_prices.
inline std::array<PriceVector, 4> box_vertices(const UncertaintyBox& box) {
  const double el_lo = detail::lower_factor(box.delta_electricity);
  const double el_hi = 1.0 + box.delta_electricity;
  const double h2_lo = detail::lower_factor(box.delta_hydrogen);
  const double h2_hi = 1.0 + box.delta_hydrogen;
  std::array<PriceVector, 4> vertices;
  for (int v = 0; v < 4; ++v) {
    const double f_el = (v & 1) ? el_hi : el_lo;
    const double f_h2 = (v & 2) ? h2_hi : h2_lo;
    for (Technology t : kTechnologies) {
      const double f = carrier_of(t) == Carrier::electricity ? f_el : f_h2;
      vertices[v][t] = box.nominal[t] * f;
    }
  }
  return vertices;
}

namespace detail {

// splitmix64: tiny counter-friendly generator, used so that sample i depends
// only on (seed, i) and never on evaluation order.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
  g.next();  // decorrelate adjacent indices
  return g;
}

}  // namespace detail

// n price vectors drawn uniformly along each carrier axis: one relative
// factor per axis, shared by the two technologies of that carrier. Output is
// bit-identical for identical (box, n, seed) and every sample satisfies
// contains().
inline std::vector<PriceVector> sample_prices(const UncertaintyBox& box,
                                              std::size_t n,
                                              std::uint64_t seed) {
  const double el_lo = detail::lower_factor(box.delta_electricity);
  const double el_span = (1.0 + box.delta_electricity) - el_lo;
  const double h2_lo = detail::lower_factor(box.delta_hydrogen);
  const double h2_span = (1.0 + box.delta_hydrogen) - h2_lo;
  std::vector<PriceVector> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto g = detail::stream_for(seed, i);
    const double f_el = el_lo + g.next_unit() * el_span;
    const double f_h2 = h2_lo + g.next_unit() * h2_span;
    PriceVector p;
    for (Technology t : kTechnologies) {
      const double f = carrier_of(t) == Carrier::electricity ? f_el : f_h2;
      p[t] = box.nominal[t] * f;
    }
    samples.push_back(p);
  }
  return samples;
}

}  // namespace heatplan

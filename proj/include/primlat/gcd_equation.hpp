#pragma once

// Primitive vectors, the shortest solution of <v, w> = 1, and the exact
// per-vector record.

#include "primlat/exact_core.hpp"
#include "primlat/reduction.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace primlat {

inline constexpr std::size_t kMinDimension = 2;
inline constexpr std::size_t kMaxDimension = 5;

enum class EnumerationMode {
  full,    // every primitive vector
  orbits,  // one representative 0 <= v_1 <= ... <= v_n per signed-permutation orbit
};

// A run of primitive vectors, consecutive in (|v|^2, lexicographic) order.
struct PrimitiveBlock {
  std::size_t n = 0;
  std::vector<std::int64_t> coords;   // size() * n entries
  std::vector<std::int64_t> norm_sq;
  std::vector<std::uint32_t> weight;  // orbit sizes; all 1 in full mode

  std::size_t size() const { return norm_sq.size(); }
  const std::int64_t* vec(std::size_t i) const { return coords.data() + i * n; }
};

// |v|^2 <= squared_radius(R) iff |v| <= R, for integer v.
std::int64_t squared_radius(double radius);

// Streams every primitive v with 0 < |v| <= radius in blocks. Throws
// std::invalid_argument("unsupported dimension") unless 2 <= n <= 5.
void enumerate_primitive(std::size_t n, double radius, EnumerationMode mode,
                         const std::function<void(const PrimitiveBlock&)>& sink);
std::vector<IntVec> enumerate_primitive(std::size_t n, double radius);

// Number of primitive vectors in the closed ball (orbit weights summed).
std::uint64_t count_primitive(std::size_t n, double radius);

// Signed-permutation orbit size of a vector with entries 0 <= v_1 <= ... <= v_n.
std::uint32_t orbit_size(std::span<const std::int64_t> sorted_abs);

// True when some entry is zero or two entries agree up to sign. Such vectors
// have extra symmetry and form a thin set.
bool on_symmetry_wall(std::span<const std::int64_t> v);

// One member of the signed-permutation orbit of sorted_abs, chosen by a
// generator keyed on (seed, sorted_abs). out has the same size.
void orbit_member(std::span<const std::int64_t> sorted_abs, std::uint64_t seed, std::span<std::int64_t> out);

// True iff v is off the symmetry walls and is the member orbit_member picks
// for its orbit: one independent record per generic orbit.
bool is_orbit_sample(std::span<const std::int64_t> v, std::uint64_t seed);

enum RecordFlags : unsigned {
  kUnitVector = 1u << 0,  // |v| = 1
  kCvpTie = 1u << 1,      // several shortest solutions; tie-break applied
};

// w_v: the shortest integer solution of <v, w> = 1. Among several, the
// lexicographically smallest. Throws std::domain_error if v is not primitive.
IntVec shortest_solution(const IntVec& v);
IntVec shortest_solution(const IntVec& v, const IntLattice& orthogonal, bool* tie);

struct GcdRecord {
  IntVec v;
  double norm_v = 0;
  RealVec direction;
  IntVec w;
  double norm_w = 0;
  RationalVec w_perp;
  Rational rho_sq;
  double rho = 0;
  double ratio = 0;
  double ratio_perp = 0;
  double ratio_naive = 0;
  RealMatrix shape_z;
  RealVec s;
  RealVec x;
  RationalVec x_exact;
  ReducedBasis reduced;
  unsigned flags = 0;
};

GcdRecord build_record(const IntVec& v);

// Exact checks of the record identities. Returns an empty string when all
// hold, else a description of the first failure.
std::string verify_record(const GcdRecord& rec);

// |w_v| / (|v| / 2); throws std::invalid_argument for n != 2.
double n2_normalized_ratio(const GcdRecord& rec);

}  // namespace primlat

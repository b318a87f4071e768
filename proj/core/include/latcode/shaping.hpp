#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latcode/lattice.hpp"

namespace latcode {

enum class DitherMode { None, Random, FixedBest };

// Subtractive dither, one or more m-blocks drawn over the fundamental
// parallelepiped of the shaping generator.
struct DitherVector {
  std::vector<double> d;
  DitherMode mode = DitherMode::None;
};

// Low-dimensional shaping lattice given by a lower-triangular generator
// Theta (columns are basis vectors). Structural requirements:
//   * theta_ii > 0,
//   * theta_ij / theta_jj is an integer for every i >= j,
//   * h * theta_ii is an integer for every diagonal h of the coding
//     lattice it is used with (checked at use time).
// These make h*Theta an integer matrix, so every point of h*Lambda has
// integer coordinates and the whole encode/reverse chain runs in exact
// integer arithmetic.
class ShapingLatticeSpec {
 public:
  // "hypercube:M", "hypercube:M:m", "E8:M" (M even), "BW16:M".
  // E8:M generates M times the unit-volume E8; BW16:M generates M times
  // the integral Barnes-Wall lattice (per-dimension volume M * 2^(3/4)).
  static ShapingLatticeSpec from_preset(std::string_view name);
  static ShapingLatticeSpec from_matrix(int m, std::vector<double> theta_col_major,
                                        LatticeKind family = LatticeKind::Generic,
                                        double family_scale = 1.0);

  int m() const { return m_; }
  LatticeKind family() const { return family_; }
  double family_scale() const { return family_scale_; }
  const std::string& preset_name() const { return preset_; }

  double theta(int row, int col) const {
    return theta_[static_cast<std::size_t>(col) * m_ + row];
  }
  double theta_diag(int i) const { return theta(i, i); }
  // W matrix: w_ij = theta_ij / theta_jj, integer lower-triangular with
  // unit diagonal.
  std::int64_t col_ratio(int row, int col) const {
    return ratio_[static_cast<std::size_t>(col) * m_ + row];
  }

  // h * theta_ii as an exact integer; throws if h*Theta is not integral.
  std::int64_t alphabet_size(int i, double h) const;
  void validate_diag(double h) const;

  double det() const;                    // det Theta
  double per_dim_volume(double h) const; // (h^m det Theta)^(1/m)
  double rate_bits_per_dim(double h) const;

  LatticeBasis basis(double h) const;    // h * Theta

  // Nearest point of h*Lambda(Theta) with exact integer coordinates.
  // Uses the family fast quantizer when available, else the exact
  // triangular search; membership of the result is verified exactly.
  std::vector<std::int64_t> quantize_int(std::span<const double> y, double h) const;

 private:
  int m_ = 0;
  LatticeKind family_ = LatticeKind::Generic;
  double family_scale_ = 1.0;
  std::vector<double> theta_;        // column-major
  std::vector<std::int64_t> ratio_;  // column-major W
  std::string preset_;
};

// h*Theta*f for f_i = b_i / (h*theta_ii); integer-valued, lands in the
// fundamental parallelepiped of h*Lambda. Independent of h.
std::vector<std::int64_t> map_to_parallelepiped(std::span<const std::int64_t> b, double h,
                                                const ShapingLatticeSpec& theta);

// Dither d = Theta*s with s_i uniform on [0,1) (equivalently Theta a with
// a_i uniform on [0, theta_ii) along the normalized columns); FixedBest is
// the tabulated optimal E8 dither scaled with the generator.
DitherVector make_dither(const ShapingLatticeSpec& theta, DitherMode mode, std::uint64_t seed,
                         int blocks = 1);

// Dithered Voronoi integers: c = h*Theta*f - Q_{h*Lambda}(h*Theta*f - h*d),
// so c - h*d lies in the fundamental Voronoi region of h*Lambda.
std::vector<std::int64_t> voronoi_encode(std::span<const std::int64_t> b, double h,
                                         const ShapingLatticeSpec& theta,
                                         std::span<const double> dither_block);

// Exact inverse of voronoi_encode on the undithered integers, by forward
// substitution through W followed by per-coordinate remainders.
std::vector<std::int64_t> voronoi_reverse(std::span<const std::int64_t> c, double h,
                                          const ShapingLatticeSpec& theta);

// The reverse recursion's intermediate values (t_i, integer parts, b_i);
// useful for tracing and tests.
struct ReverseTrace {
  std::vector<double> t;
  std::vector<std::int64_t> integer_part;
  std::vector<std::int64_t> b;
};
ReverseTrace voronoi_reverse_trace(std::span<const std::int64_t> c, double h,
                                   const ShapingLatticeSpec& theta);

// Uniform message block: b_i in [0, h*theta_ii).
std::vector<std::int64_t> random_message(const ShapingLatticeSpec& theta, double h,
                                         std::uint64_t seed, int blocks = 1);

}  // namespace latcode

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "latcode/errors.hpp"

namespace latcode {

enum class LatticeKind { IntegerZ, DCheckerboard, E8, BW16, Generic };

// A scaled copy of a well-known lattice family. `scale * base` where the
// base families are: Z^n, the checkerboard D_n (even coordinate sum), the
// unit-volume E8 = D8 u (D8 + 1/2), and the integral Barnes-Wall lattice
// BW16 = {x in Z^16 : x mod 2 in RM(1,4), sum(x) = 0 mod 4}.
struct NamedLattice {
  LatticeKind kind = LatticeKind::IntegerZ;
  int dimension = 1;
  double scale = 1.0;

  static NamedLattice integers(int n, double scale = 1.0);
  static NamedLattice checkerboard(int n, double scale = 1.0);
  static NamedLattice e8(double scale = 1.0);
  static NamedLattice bw16(double scale = 1.0);
};

// Square generator matrix, columns are basis vectors.
class LatticeBasis {
 public:
  LatticeBasis(int dimension, std::vector<double> generator_col_major,
               bool lower_triangular);

  int dimension() const { return n_; }
  bool lower_triangular() const { return lower_triangular_; }
  double entry(int row, int col) const { return gen_[static_cast<std::size_t>(col) * n_ + row]; }
  const std::vector<double>& data() const { return gen_; }
  double det() const;

  // y = G * s
  std::vector<double> apply(std::span<const double> s) const;

 private:
  int n_;
  std::vector<double> gen_;  // column-major
  bool lower_triangular_;
};

// Nearest lattice point in Euclidean norm. Ties on Voronoi boundaries
// resolve to the lexicographically smallest coordinate vector.
std::vector<double> quantize_nearest(std::span<const double> x, const NamedLattice& lattice);
void quantize_nearest(std::span<const double> x, const NamedLattice& lattice,
                      std::span<double> out);

// alpha * Q_{lattice}(x / alpha); alpha must be nonzero.
std::vector<double> quantize_scaled(std::span<const double> x, const NamedLattice& lattice,
                                    double alpha);

// x - Q_{lattice}(x); lands in the fundamental Voronoi region.
std::vector<double> mod_lattice(std::span<const double> x, const NamedLattice& lattice);

// Exact closest-vector search for a lower-triangular basis: depth-first
// enumeration with partial-distance pruning (Schnorr-Euchner order), same
// lexicographic tie rule. Intended for small dimensions.
std::vector<double> quantize_basis(std::span<const double> x, const LatticeBasis& basis);

// Lower-triangular generator of the lattice (columns as basis vectors),
// at the lattice's scale. Diagonals are positive.
LatticeBasis fundamental_basis(const NamedLattice& lattice);

struct LatticeMetrics {
  double volume = 0.0;          // |det G|, exact
  double second_moment = 0.0;   // per-dimension, Monte Carlo
  double nsm = 0.0;             // second_moment / volume^(2/n)
  double shaping_gain_db = 0.0; // 10 log10((1/12) / nsm)
  double second_moment_std_err = 0.0;
  double shaping_gain_std_err_db = 0.0;
  std::uint64_t samples = 0;
};

// Volume from the determinant; second moment by folding dithered
// parallelepiped points through mod_lattice. Deterministic per seed and
// independent of the thread count.
LatticeMetrics estimate_metrics(const NamedLattice& lattice, std::uint64_t samples,
                                std::uint64_t seed, int threads = 0);

// The 32 codewords of the (16,5) first-order Reed-Muller code as 0/1
// vectors; coset representatives of BW16 over 2*D16.
const std::vector<std::vector<int>>& rm16_codewords();

}  // namespace latcode

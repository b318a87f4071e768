#include "latcode/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "latcode/parallel.hpp"
#include "latcode/rng.hpp"
#include "latcode/stats.hpp"

namespace latcode {

namespace {

void check_dimension(const NamedLattice& lat, std::size_t got) {
  if (static_cast<std::size_t>(lat.dimension) != got)
    throw std::invalid_argument("lattice dimension " + std::to_string(lat.dimension) +
                                " does not match vector length " + std::to_string(got));
}

void check_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("input vector has non-finite entries");
}

// Nearest integer; exact halves round down (the lexicographic tie rule
// for independent coordinates).
inline double round_tie_down(double v) {
  double r = std::nearbyint(v);  // ties to even
  if (r - v == 0.5) r -= 1.0;
  return r;
}

inline bool lex_less(const double* a, const double* b, int n) {
  for (int i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// Quantize onto Z^n.
void quantize_zn_impl(const double* x, int n, double* out) {
  for (int i = 0; i < n; ++i) out[i] = round_tie_down(x[i]);
}

// Quantize onto D_n = {z in Z^n : sum z even}, lexicographic tie rule.
//
// Base point: per-coordinate nearest integers (halves down). If the
// coordinate sum is even the base is also the lex-smallest minimizer
// (every same-distance alternative replaces entries by larger ones).
// Otherwise exactly one coordinate must move to its second-nearest
// integer; all flips of minimal distance penalty are compared
// lexicographically.
void quantize_dn_impl(const double* x, int n, double* out) {
  long long parity = 0;
  for (int i = 0; i < n; ++i) {
    out[i] = round_tie_down(x[i]);
    parity += static_cast<long long>(out[i]);
  }
  if ((parity & 1LL) == 0) return;

  // delta_i = cost increase of flipping coordinate i to its second-nearest
  // integer (toward x; for e == 0 both directions cost 1 and the downward
  // flip is lex-preferred)
  double best_delta = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double e = x[i] - out[i];  // in (-1/2, 1/2]
    const double delta = 1.0 - 2.0 * std::abs(e);
    if (delta < best_delta) best_delta = delta;
  }

  // Among flips achieving best_delta pick the lex-smallest result: a
  // downward flip at the earliest coordinate beats everything, otherwise
  // the latest upward flip keeps early coordinates small.
  int best_idx = -1;
  double best_dir = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = x[i] - out[i];
    const double delta = 1.0 - 2.0 * std::abs(e);
    if (delta != best_delta) continue;
    const double dir = (e > 0.0) ? 1.0 : -1.0;
    if (best_idx < 0) {
      best_idx = i;
      best_dir = dir;
    } else if (dir < 0.0 && best_dir > 0.0) {
      best_idx = i;  // first downward flip wins over any upward one
      best_dir = dir;
    } else if (dir > 0.0 && best_dir > 0.0) {
      best_idx = i;  // ascending loop: keep the latest upward flip
    }
    // two downward candidates: keep the earlier index (already held)
  }
  out[best_idx] += best_dir;
}

// E8 as the union of D8 and D8 + (1/2,...,1/2).
void quantize_e8_impl(const double* x, double* out) {
  double a[8], b[8], shifted[8];
  quantize_dn_impl(x, 8, a);
  for (int i = 0; i < 8; ++i) shifted[i] = x[i] - 0.5;
  quantize_dn_impl(shifted, 8, b);
  for (int i = 0; i < 8; ++i) b[i] += 0.5;
  double da = 0.0, db = 0.0;
  for (int i = 0; i < 8; ++i) {
    da += (x[i] - a[i]) * (x[i] - a[i]);
    db += (x[i] - b[i]) * (x[i] - b[i]);
  }
  const double* best = a;
  if (db < da || (db == da && lex_less(b, a, 8))) best = b;
  std::memcpy(out, best, 8 * sizeof(double));
}

// BW16 via its 32 cosets c + 2*D16 over the RM(1,4) codewords.
void quantize_bw16_impl(const double* x, double* out) {
  const auto& cosets = rm16_codewords();
  double best[16];
  double best_dist = std::numeric_limits<double>::infinity();
  double y[16], q[16], p[16];
  for (const auto& c : cosets) {
    for (int i = 0; i < 16; ++i) y[i] = (x[i] - c[i]) * 0.5;
    quantize_dn_impl(y, 16, q);
    double dist = 0.0;
    for (int i = 0; i < 16; ++i) {
      p[i] = c[i] + 2.0 * q[i];
      dist += (x[i] - p[i]) * (x[i] - p[i]);
    }
    if (dist < best_dist || (dist == best_dist && lex_less(p, best, 16))) {
      best_dist = dist;
      std::memcpy(best, p, sizeof(best));
    }
  }
  std::memcpy(out, best, 16 * sizeof(double));
}

void quantize_unit(const double* x, int n, LatticeKind kind, double* out) {
  switch (kind) {
    case LatticeKind::IntegerZ: quantize_zn_impl(x, n, out); return;
    case LatticeKind::DCheckerboard: quantize_dn_impl(x, n, out); return;
    case LatticeKind::E8: quantize_e8_impl(x, out); return;
    case LatticeKind::BW16: quantize_bw16_impl(x, out); return;
    case LatticeKind::Generic:
      throw std::invalid_argument("generic lattices have no named quantizer; use quantize_basis");
  }
  throw std::invalid_argument("unknown lattice kind");
}

NamedLattice make_named(LatticeKind kind, int n, double scale, int required_dim) {
  if (scale <= 0.0) throw std::invalid_argument("lattice scale must be positive");
  if (required_dim > 0 && n != required_dim)
    throw std::invalid_argument("lattice family requires dimension " +
                                std::to_string(required_dim));
  if (n <= 0) throw std::invalid_argument("lattice dimension must be positive");
  NamedLattice lat;
  lat.kind = kind;
  lat.dimension = n;
  lat.scale = scale;
  return lat;
}

}  // namespace

NamedLattice NamedLattice::integers(int n, double scale) {
  return make_named(LatticeKind::IntegerZ, n, scale, 0);
}
NamedLattice NamedLattice::checkerboard(int n, double scale) {
  return make_named(LatticeKind::DCheckerboard, n, scale, 0);
}
NamedLattice NamedLattice::e8(double scale) { return make_named(LatticeKind::E8, 8, scale, 8); }
NamedLattice NamedLattice::bw16(double scale) {
  return make_named(LatticeKind::BW16, 16, scale, 16);
}

const std::vector<std::vector<int>>& rm16_codewords() {
  static const std::vector<std::vector<int>> words = [] {
    std::vector<std::vector<int>> w;
    w.reserve(32);
    for (int coeff = 0; coeff < 32; ++coeff) {
      std::vector<int> cw(16);
      for (int t = 0; t < 16; ++t) {
        int bit = coeff & 1;  // constant term
        for (int k = 0; k < 4; ++k)
          if ((coeff >> (k + 1)) & 1) bit ^= (t >> k) & 1;
        cw[t] = bit;
      }
      w.push_back(std::move(cw));
    }
    return w;
  }();
  return words;
}

LatticeBasis::LatticeBasis(int dimension, std::vector<double> generator_col_major,
                           bool lower_triangular)
    : n_(dimension), gen_(std::move(generator_col_major)), lower_triangular_(lower_triangular) {
  if (n_ <= 0) throw std::invalid_argument("basis dimension must be positive");
  if (gen_.size() != static_cast<std::size_t>(n_) * n_)
    throw std::invalid_argument("generator matrix size does not match dimension");
  if (lower_triangular_) {
    for (int col = 0; col < n_; ++col)
      for (int row = 0; row < col; ++row)
        if (entry(row, col) != 0.0)
          throw specification_error("basis flagged lower-triangular has nonzero above diagonal");
  }
  if (det() == 0.0 || !std::isfinite(det()))
    throw specification_error("generator matrix is singular");
}

double LatticeBasis::det() const {
  if (lower_triangular_) {
    double d = 1.0;
    for (int i = 0; i < n_; ++i) d *= entry(i, i);
    return d;
  }
  // Gaussian elimination with partial pivoting.
  std::vector<double> a = gen_;
  double d = 1.0;
  for (int col = 0; col < n_; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n_; ++row)
      if (std::abs(a[static_cast<std::size_t>(col) * n_ + row]) >
          std::abs(a[static_cast<std::size_t>(col) * n_ + pivot]))
        pivot = row;
    if (a[static_cast<std::size_t>(col) * n_ + pivot] == 0.0) return 0.0;
    if (pivot != col) {
      d = -d;
      for (int c = 0; c < n_; ++c)
        std::swap(a[static_cast<std::size_t>(c) * n_ + pivot],
                  a[static_cast<std::size_t>(c) * n_ + col]);
    }
    const double pv = a[static_cast<std::size_t>(col) * n_ + col];
    d *= pv;
    for (int row = col + 1; row < n_; ++row) {
      const double f = a[static_cast<std::size_t>(col) * n_ + row] / pv;
      if (f == 0.0) continue;
      for (int c = col; c < n_; ++c)
        a[static_cast<std::size_t>(c) * n_ + row] -= f * a[static_cast<std::size_t>(c) * n_ + col];
    }
  }
  return d;
}

std::vector<double> LatticeBasis::apply(std::span<const double> s) const {
  if (s.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("vector length does not match basis dimension");
  std::vector<double> y(n_, 0.0);
  for (int col = 0; col < n_; ++col) {
    const double sc = s[col];
    if (sc == 0.0) continue;
    for (int row = (lower_triangular_ ? col : 0); row < n_; ++row)
      y[row] += entry(row, col) * sc;
  }
  return y;
}

void quantize_nearest(std::span<const double> x, const NamedLattice& lattice,
                      std::span<double> out) {
  check_dimension(lattice, x.size());
  check_finite(x);
  if (out.size() != x.size()) throw std::invalid_argument("output span size mismatch");
  const int n = lattice.dimension;
  const double s = lattice.scale;
  if (s == 1.0) {
    quantize_unit(x.data(), n, lattice.kind, out.data());
    return;
  }
  std::vector<double> scaled(n);
  for (int i = 0; i < n; ++i) scaled[i] = x[i] / s;
  quantize_unit(scaled.data(), n, lattice.kind, out.data());
  for (int i = 0; i < n; ++i) out[i] *= s;
}

std::vector<double> quantize_nearest(std::span<const double> x, const NamedLattice& lattice) {
  std::vector<double> out(x.size());
  quantize_nearest(x, lattice, out);
  return out;
}

std::vector<double> quantize_scaled(std::span<const double> x, const NamedLattice& lattice,
                                    double alpha) {
  if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero");
  std::vector<double> scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = x[i] / alpha;
  std::vector<double> q = quantize_nearest(scaled, lattice);
  for (double& v : q) v *= alpha;
  return q;
}

std::vector<double> mod_lattice(std::span<const double> x, const NamedLattice& lattice) {
  std::vector<double> q = quantize_nearest(x, lattice);
  for (std::size_t i = 0; i < x.size(); ++i) q[i] = x[i] - q[i];
  return q;
}

std::vector<double> quantize_basis(std::span<const double> x, const LatticeBasis& basis) {
  if (!basis.lower_triangular())
    throw std::invalid_argument("quantize_basis requires a lower-triangular basis");
  const int n = basis.dimension();
  if (x.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("vector length does not match basis dimension");
  check_finite(x);

  // Depth-first search over integer coefficients. For a lower-triangular
  // column basis, coordinate d of G*z is fixed once z_0..z_d are chosen,
  // so partial squared distances bound the search. Per level the integer
  // candidates are visited in nondecreasing error order (two pointers
  // walking out from the real-valued minimizer), which makes "partial
  // exceeds the incumbent" an exact stop condition for the level.
  std::vector<double> best_point(n, 0.0);
  std::vector<long long> z(n, 0);
  double best_dist = std::numeric_limits<double>::infinity();
  bool have_best = false;

  struct Level {
    long long lo, hi;  // next candidates below/above the minimizer
    double partial;    // squared distance through the previous row
  };
  std::vector<Level> stack(n);
  // residual per level: x_i minus contributions of columns chosen so far
  std::vector<double> carried(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) carried[i] = x[i];

  auto begin_level = [&](int d, double partial) {
    const double res = carried[static_cast<std::size_t>(d) * n + d];
    const double diag = basis.entry(d, d);
    const long long lo = static_cast<long long>(std::floor(res / diag));
    stack[d].lo = lo;
    stack[d].hi = lo + 1;
    stack[d].partial = partial;
  };

  auto reconstruct = [&](std::vector<double>& pt) {
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int j = 0; j <= i; ++j) v += basis.entry(i, j) * static_cast<double>(z[j]);
      pt[i] = v;
    }
  };

  int depth = 0;
  begin_level(0, 0.0);
  std::vector<double> scratch(n);

  while (depth >= 0) {
    Level& lv = stack[depth];
    const double res = carried[static_cast<std::size_t>(depth) * n + depth];
    const double diag = basis.entry(depth, depth);

    const double err_lo = std::abs(res - static_cast<double>(lv.lo) * diag);
    const double err_hi = std::abs(res - static_cast<double>(lv.hi) * diag);
    long long k;
    double err;
    if (err_lo <= err_hi) {
      k = lv.lo--;
      err = err_lo;
    } else {
      k = lv.hi++;
      err = err_hi;
    }

    const double partial = lv.partial + err * err;
    if (have_best && partial > best_dist) {
      --depth;  // all remaining candidates on this level are farther
      continue;
    }

    z[depth] = k;
    if (depth == n - 1) {
      if (!have_best || partial < best_dist) {
        best_dist = partial;
        have_best = true;
        reconstruct(best_point);
      } else if (partial == best_dist) {
        reconstruct(scratch);
        if (lex_less(scratch.data(), best_point.data(), n)) best_point = scratch;
      }
      continue;
    }

    const int next = depth + 1;
    const double* cur = &carried[static_cast<std::size_t>(depth) * n];
    double* nxt = &carried[static_cast<std::size_t>(next) * n];
    for (int i = next; i < n; ++i)
      nxt[i] = cur[i] - basis.entry(i, depth) * static_cast<double>(k);
    begin_level(next, partial);
    depth = next;
  }

  return best_point;
}

LatticeBasis fundamental_basis(const NamedLattice& lattice) {
  const int n = lattice.dimension;
  const double s = lattice.scale;
  std::vector<double> g(static_cast<std::size_t>(n) * n, 0.0);
  auto at = [&](int row, int col) -> double& { return g[static_cast<std::size_t>(col) * n + row]; };
  switch (lattice.kind) {
    case LatticeKind::IntegerZ:
      for (int i = 0; i < n; ++i) at(i, i) = s;
      break;
    case LatticeKind::DCheckerboard:
      // columns e_j + e_n (j < n) and 2 e_n
      for (int j = 0; j + 1 < n; ++j) {
        at(j, j) = s;
        at(n - 1, j) = s;
      }
      at(n - 1, n - 1) = 2.0 * s;
      break;
    case LatticeKind::E8:
      // columns (1/2)*ones, e_j + e_8 (j = 2..7), 2 e_8
      for (int i = 0; i < 8; ++i) at(i, 0) = 0.5 * s;
      for (int j = 1; j < 7; ++j) {
        at(j, j) = s;
        at(7, j) = s;
      }
      at(7, 7) = 2.0 * s;
      break;
    case LatticeKind::BW16: {
      // pivot columns carry RM(1,4) codewords, the rest 2 e_j + 2 e_16,
      // and 4 e_16 in the last column
      const auto& words = rm16_codewords();
      // generator coefficients 1 (all-ones), t1, t2, t3, t4 lead at
      // columns 1, 2, 3, 5, 9
      const int pivots[5] = {0, 1, 2, 4, 8};
      const int coeffs[5] = {1, 2, 4, 8, 16};
      bool is_pivot[16] = {};
      for (int p = 0; p < 5; ++p) {
        is_pivot[pivots[p]] = true;
        const auto& cw = words[coeffs[p]];
        for (int i = 0; i < 16; ++i) at(i, pivots[p]) = s * cw[i];
      }
      for (int j = 0; j < 15; ++j) {
        if (is_pivot[j]) continue;
        at(j, j) = 2.0 * s;
        at(15, j) = 2.0 * s;
      }
      at(15, 15) = 4.0 * s;
      break;
    }
    case LatticeKind::Generic:
      throw std::invalid_argument("generic lattices carry their own basis");
  }
  return LatticeBasis(n, std::move(g), true);
}

LatticeMetrics estimate_metrics(const NamedLattice& lattice, std::uint64_t samples,
                                std::uint64_t seed, int threads) {
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  const int n = lattice.dimension;
  const LatticeBasis basis = fundamental_basis(lattice);

  LatticeMetrics m;
  m.volume = std::abs(basis.det());
  m.samples = samples;

  const std::uint64_t chunk = 4096;
  const std::uint64_t nchunks = (samples + chunk - 1) / chunk;
  std::vector<RunningMoments> partial(nchunks);

  parallel_chunks(samples, chunk, resolve_threads(threads),
                  [&](std::uint64_t ci, std::uint64_t begin, std::uint64_t end) {
                    RunningMoments acc;
                    std::vector<double> s(n), u(n), folded(n);
                    for (std::uint64_t t = begin; t < end; ++t) {
                      Rng rng(derive_seed(seed, t));
                      for (int i = 0; i < n; ++i) s[i] = rng.uniform();
                      u = basis.apply(s);
                      folded = mod_lattice(u, lattice);
                      double norm2 = 0.0;
                      for (int i = 0; i < n; ++i) norm2 += folded[i] * folded[i];
                      acc.add(norm2 / n);
                    }
                    partial[ci] = acc;
                  });

  RunningMoments total;
  for (const auto& p : partial) total.merge(p);

  m.second_moment = total.mean();
  m.second_moment_std_err = total.std_error();
  const double vol_pow = std::pow(m.volume, 2.0 / n);
  m.nsm = m.second_moment / vol_pow;
  m.shaping_gain_db = 10.0 * std::log10((1.0 / 12.0) / m.nsm);
  m.shaping_gain_std_err_db =
      (10.0 / std::log(10.0)) * (m.second_moment_std_err / m.second_moment);
  return m;
}

}  // namespace latcode

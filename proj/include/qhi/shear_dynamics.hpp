#pragma once

// Classical shear-weight recursions on N-th powers of the edge coordinates,
// trajectory evolution along an LR word, and the periodic-orbit solver whose
// solutions feed the invariant assembly.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <vector>

#include "qhi/errors.hpp"
#include "qhi/mcg_word.hpp"

namespace qhi {

using cplx = std::complex<double>;

enum class SurfaceKind { Torus1, Sphere4 };

inline constexpr double kDegenerateTol = 1e-10;  // distance to the poles 0, -1
inline constexpr double kNewtonTol = 1e-12;
inline constexpr double kDedupTol = 1e-8;

struct ShearWeights {
  cplx x1, x2;
  cplx hN = 1.0;  // h^N; the theorems fix it to 1

  cplx x3() const { return hN / (x1 * x2); }
};

namespace detail {

inline bool near_pole(cplx z) {
  return std::abs(z) < kDegenerateTol || std::abs(z + 1.0) < kDegenerateTol;
}

// Only x1, x2 can reach a denominator (steps divide by x1, x2, 1+x1, 1+x2;
// the flip factors involve x1^N and x2^N); x3 = hN/(x1 x2) needs no check.
inline void check_weights(const ShearWeights& w, int step) {
  if (near_pole(w.x1) || near_pole(w.x2))
    throw DegenerateWeight("shear coordinate at 0 or -1", step);
}

}  // namespace detail

// x1' = s*x1/(x2*(1+x1)^2) (equals s/(x1*x2*(1+1/x1)^2)), x2' = (1+x1)^2*x2,
// where s = hN for the torus and s = -1 for the sphere recursion.
inline ShearWeights step_R(const ShearWeights& w, SurfaceKind kind) {
  detail::check_weights(w, -1);
  const cplx s = (kind == SurfaceKind::Sphere4) ? cplx(-1.0) : w.hN;
  const cplx f = (1.0 + w.x1) * (1.0 + w.x1);
  ShearWeights out{s * w.x1 / (w.x2 * f), f * w.x2, w.hN};
  detail::check_weights(out, -1);
  return out;
}

inline ShearWeights step_L(const ShearWeights& w, SurfaceKind kind) {
  detail::check_weights(w, -1);
  const cplx s = (kind == SurfaceKind::Sphere4) ? cplx(-1.0) : w.hN;
  const cplx f = (1.0 + w.x2) * (1.0 + w.x2);
  ShearWeights out{w.x1 * w.x2 * w.x2 / f, s * f / (w.x1 * w.x2), w.hN};
  detail::check_weights(out, -1);
  return out;
}

inline std::vector<ShearWeights> evolve(const std::string& word,
                                        const ShearWeights& w0,
                                        SurfaceKind kind) {
  validate_word(word);
  std::vector<ShearWeights> traj{w0};
  traj.reserve(word.size() + 1);
  for (std::size_t i = 0; i < word.size(); ++i) {
    try {
      traj.push_back(word[i] == 'R' ? step_R(traj.back(), kind)
                                    : step_L(traj.back(), kind));
    } catch (const DegenerateWeight& e) {
      throw DegenerateWeight(std::string(e.what()) + " at step " +
                                 std::to_string(i),
                             static_cast<int>(i));
    }
  }
  return traj;
}

struct SeedGrid {
  int n_modulus = 10;
  int n_argument = 10;
  double mod_lo = 0.2, mod_hi = 5.0;

  // Honors QHI_SEED_GRID="nm,na" when set.
  static SeedGrid from_env() {
    SeedGrid g;
    if (const char* s = std::getenv("QHI_SEED_GRID")) {
      int nm = 0, na = 0;
      if (std::sscanf(s, "%d,%d", &nm, &na) == 2 && nm > 0 && na > 0) {
        g.n_modulus = nm;
        g.n_argument = na;
      }
    }
    return g;
  }
};

struct PeriodicSolution {
  ShearWeights w;
  double residual = 0.0;    // |evolve(word, w).last - w|
  double jac_min_sv = 0.0;  // smallest singular value of d(F)/dz at w
};

namespace detail {

// One pass of the word map together with its complex-analytic Jacobian
// (chain rule through the rational steps; exact, no differencing).
struct MapEval {
  cplx y1, y2;
  std::array<cplx, 4> J;  // row-major d(y1,y2)/d(x1,x2)
  bool ok;
};

inline MapEval word_map(const std::string& word, cplx x1, cplx x2, cplx hN,
                        SurfaceKind kind) {
  MapEval r{x1, x2, {1.0, 0.0, 0.0, 1.0}, true};
  for (char ch : word) {
    const cplx s = (kind == SurfaceKind::Sphere4) ? cplx(-1.0) : hN;
    cplx a = r.y1, b = r.y2;
    cplx y1, y2;
    std::array<cplx, 4> Js;
    if (ch == 'R') {
      const cplx f = (1.0 + a) * (1.0 + a);
      if (std::abs(f) == 0.0 || std::abs(b) == 0.0) { r.ok = false; return r; }
      y1 = s * a / (b * f);
      y2 = f * b;
      Js = {s * (1.0 - a) / (b * f * (1.0 + a)), -y1 / b,
            2.0 * (1.0 + a) * b, f};
    } else {
      const cplx f = (1.0 + b) * (1.0 + b);
      if (std::abs(f) == 0.0 || std::abs(a) == 0.0 || std::abs(b) == 0.0) {
        r.ok = false;
        return r;
      }
      y1 = a * b * b / f;
      y2 = s * f / (a * b);
      Js = {b * b / f, 2.0 * a * b / (f * (1.0 + b)),
            -y2 / a, s * (b - 1.0) * (1.0 + b) / (a * b * b)};
    }
    std::array<cplx, 4> Jn = {Js[0] * r.J[0] + Js[1] * r.J[2],
                              Js[0] * r.J[1] + Js[1] * r.J[3],
                              Js[2] * r.J[0] + Js[3] * r.J[2],
                              Js[2] * r.J[1] + Js[3] * r.J[3]};
    r.y1 = y1;
    r.y2 = y2;
    r.J = Jn;
    if (!std::isfinite(std::abs(r.y1)) || !std::isfinite(std::abs(r.y2))) {
      r.ok = false;
      return r;
    }
  }
  return r;
}

inline double min_singular_value_2x2(const std::array<cplx, 4>& J) {
  // Singular values of a 2x2 complex matrix from the eigenvalues of J*J^H.
  double a = std::norm(J[0]) + std::norm(J[1]);
  double d = std::norm(J[2]) + std::norm(J[3]);
  cplx b = J[0] * std::conj(J[2]) + J[1] * std::conj(J[3]);
  double tr = a + d;
  double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) / 4.0 + std::norm(b)));
  double lam_min = tr / 2.0 - disc;
  return std::sqrt(std::max(0.0, lam_min));
}

}  // namespace detail

// All fixed points of the word map found by damped multi-start Newton,
// deduplicated and sorted deterministically.  Solutions whose trajectory
// passes within kDegenerateTol of a pole are discarded.
inline std::vector<PeriodicSolution> solve_periodic(
    const std::string& word, SurfaceKind kind, cplx hN = 1.0,
    const SeedGrid& grid = SeedGrid::from_env()) {
  validate_word(word);
  if (!word_is_pa_admissible(word))
    throw NotPseudoAnosov("word must contain both R and L");

  std::vector<cplx> vals;
  for (int i = 0; i < grid.n_modulus; ++i) {
    double t = (grid.n_modulus == 1) ? 0.0
                                     : static_cast<double>(i) / (grid.n_modulus - 1);
    double m = std::exp(std::log(grid.mod_lo) +
                        t * (std::log(grid.mod_hi) - std::log(grid.mod_lo)));
    for (int jj = 0; jj < grid.n_argument; ++jj) {
      double arg = -M_PI + 2.0 * M_PI * (jj + 1) / grid.n_argument;
      vals.push_back(std::polar(m, arg));
    }
  }

  std::vector<PeriodicSolution> sols;
  auto try_start = [&](cplx z1, cplx z2) {
    for (int it = 0; it < 80; ++it) {
      auto ev = detail::word_map(word, z1, z2, hN, kind);
      if (!ev.ok) return;
      cplx F1 = ev.y1 - z1, F2 = ev.y2 - z2;
      double nf = std::hypot(std::abs(F1), std::abs(F2));
      if (nf < kNewtonTol) {
        // Reject trajectories through poles, then dedup.
        ShearWeights w{z1, z2, hN};
        try {
          (void)evolve(word, w, kind);
        } catch (const DegenerateWeight&) {
          return;
        }
        std::array<cplx, 4> JmI = {ev.J[0] - 1.0, ev.J[1], ev.J[2], ev.J[3] - 1.0};
        for (const auto& s : sols)
          if (std::abs(s.w.x1 - z1) + std::abs(s.w.x2 - z2) < kDedupTol) return;
        sols.push_back({w, nf, detail::min_singular_value_2x2(JmI)});
        return;
      }
      // Newton direction for F(z) = map(z) - z.
      cplx j0 = ev.J[0] - 1.0, j1 = ev.J[1], j2 = ev.J[2], j3 = ev.J[3] - 1.0;
      cplx det = j0 * j3 - j1 * j2;
      if (std::abs(det) < 1e-300) return;
      cplx d1 = (-F1 * j3 + F2 * j1) / det;
      cplx d2 = (-F2 * j0 + F1 * j2) / det;
      double lam = 1.0;
      bool moved = false;
      for (int back = 0; back < 30; ++back) {
        auto ev2 = detail::word_map(word, z1 + lam * d1, z2 + lam * d2, hN, kind);
        if (ev2.ok) {
          double nf2 = std::hypot(std::abs(ev2.y1 - (z1 + lam * d1)),
                                  std::abs(ev2.y2 - (z2 + lam * d2)));
          if (nf2 < nf) { moved = true; break; }
        }
        lam *= 0.5;
      }
      if (!moved) return;
      z1 += lam * d1;
      z2 += lam * d2;
    }
  };

  for (cplx z1 : vals)
    for (cplx z2 : vals) try_start(z1, z2);

  if (sols.empty()) throw NoSolutionFound("every Newton start diverged or degenerated");

  std::sort(sols.begin(), sols.end(), [](const PeriodicSolution& a,
                                         const PeriodicSolution& b) {
    auto key = [](const PeriodicSolution& s) {
      return std::array<double, 4>{s.w.x1.real(), s.w.x1.imag(), s.w.x2.real(),
                                   s.w.x2.imag()};
    };
    return key(a) < key(b);
  });
  return sols;
}

// The shear-bend datum of the complete hyperbolic structure, heuristically:
// all of x1, x2, x3 nonreal, preferring isolated fixed points (nonsingular
// Jacobian -- some words have whole curves of periodic weights) and positive
// imaginary part of x1, then a deterministic lexicographic order.
inline PeriodicSolution select_geometric(const std::vector<PeriodicSolution>& sols) {
  if (sols.empty()) throw NoGeometricCandidate("empty solution set");
  std::vector<PeriodicSolution> cands;
  for (const auto& s : sols) {
    bool nonreal = std::abs(s.w.x1.imag()) > kDegenerateTol &&
                   std::abs(s.w.x2.imag()) > kDegenerateTol &&
                   std::abs(s.w.x3().imag()) > kDegenerateTol;
    if (nonreal) cands.push_back(s);
  }
  if (cands.empty())
    throw NoGeometricCandidate("no solution with all coordinates nonreal");
  std::stable_sort(cands.begin(), cands.end(),
                   [](const PeriodicSolution& a, const PeriodicSolution& b) {
                     bool ia = a.jac_min_sv > 1e-6, ib = b.jac_min_sv > 1e-6;
                     if (ia != ib) return ia;
                     bool pa = a.w.x1.imag() > 0, pb = b.w.x1.imag() > 0;
                     if (pa != pb) return pa;
                     auto key = [](const PeriodicSolution& s) {
                       return std::array<double, 4>{s.w.x1.real(), s.w.x1.imag(),
                                                    s.w.x2.real(), s.w.x2.imag()};
                     };
                     return key(a) < key(b);
                   });
  return cands.front();
}

}  // namespace qhi

#pragma once

// Closed-form single-flip conjugating matrices for the once-punctured torus,
// assembly of the invariant C_phi as their ordered product along an LR word,
// and numerical certification against the defining conjugation identity.

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qhi/errors.hpp"
#include "qhi/shear_dynamics.hpp"
#include "qhi/weyl_rep.hpp"

namespace qhi {

// Per-step N-th roots (u_i, v_i) of the evolved weights, with the closing
// condition u_n = u_0, v_n = v_0 imposed on the chosen values themselves.
struct RootChoice {
  std::vector<cplx> u, v;
  cplx h = 1.0;
  std::vector<std::array<int, 2>> selectors;
};

namespace detail {

inline cplx principal_nth_root(cplx z, int N) {
  if (z == 0.0) throw InvalidParameter("cannot take a root of 0");
  return std::exp(std::log(z) / static_cast<double>(N));
}

inline cplx ipow(cplx z, long long e) {
  return std::pow(z, static_cast<double>(e));
}

// Weights that are real up to solver noise must land on the same branch of
// the principal root no matter which side of the axis the noise falls on
// (negative reals sit on the branch cut of log), so snap them first.
inline cplx snap_real(cplx z) {
  if (std::abs(z.imag()) < 1e-9 * std::abs(z)) return {z.real(), 0.0};
  return z;
}

}  // namespace detail

inline RootChoice choose_roots(const std::vector<ShearWeights>& traj,
                               const RootOfUnity& root,
                               std::vector<std::array<int, 2>> selectors = {}) {
  if (traj.size() < 2) throw InvalidParameter("trajectory too short");
  const auto& first = traj.front();
  const auto& last = traj.back();
  if (std::abs(first.x1 - last.x1) + std::abs(first.x2 - last.x2) > 1e-10)
    throw NonPeriodicTrajectory("trajectory does not close up");
  if (selectors.empty()) selectors.assign(traj.size(), {0, 0});
  if (selectors.size() != traj.size())
    throw InvalidParameter("need one selector pair per trajectory point");
  RootChoice rc;
  rc.h = detail::principal_nth_root(detail::snap_real(first.hN), root.N);
  rc.selectors = selectors;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    rc.u.push_back(
        detail::principal_nth_root(detail::snap_real(traj[i].x1), root.N) *
        root.q(selectors[i][0]));
    rc.v.push_back(
        detail::principal_nth_root(detail::snap_real(traj[i].x2), root.N) *
        root.q(selectors[i][1]));
  }
  rc.u.back() = rc.u.front();  // closing condition, imposed exactly
  rc.v.back() = rc.v.front();
  return rc;
}

// (C_R)_{ij} = q^{2(j-i)^2} (u'v'/(uh))^{j-i} (v'/v)^i
//              * prod_{a=1..i} 1/((1+q^{4a-3}u)(1+q^{4a-1}u)),  0-based i, j.
// The entries are N-periodic in i and j given the R-step power relations.
inline Mat matrix_C_R(const RootOfUnity& root, cplx u, cplx v, cplx up,
                      cplx vp, cplx h) {
  const int N = root.N;
  detail::require_nonsingular_power(u, N, "u");
  Mat C(N, N);
  cplx prod = 1.0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      long long d = j - i;
      C(i, j) = root.q(2 * d * d) * detail::ipow(up * vp / (u * h), d) *
                detail::ipow(vp / v, i) * prod;
    }
    // factor joining row i to row i+1
    prod /= (1.0 + root.q(4LL * (i + 1) - 3) * u) *
            (1.0 + root.q(4LL * (i + 1) - 1) * u);
  }
  return C;
}

// (Ctilde_L)_{ij} = q^{2(j-i)^2 + 2i^2} (u''v''/(vh))^{j-i} (uvv''/h)^i
//                   * prod_{a=1..i} 1/((1+q^{4a-3}v)(1+q^{4a-1}v));
// C_L = G * Ctilde_L with G_{ij} = q^{4ij}.
inline Mat matrix_Ctilde_L(const RootOfUnity& root, cplx u, cplx v, cplx upp,
                           cplx vpp, cplx h) {
  const int N = root.N;
  detail::require_nonsingular_power(v, N, "v");
  Mat C(N, N);
  cplx prod = 1.0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      long long d = j - i;
      C(i, j) = root.q(2 * d * d + 2LL * i * i) *
                detail::ipow(upp * vpp / (v * h), d) *
                detail::ipow(u * v * vpp / h, i) * prod;
    }
    prod /= (1.0 + root.q(4LL * (i + 1) - 3) * v) *
            (1.0 + root.q(4LL * (i + 1) - 1) * v);
  }
  return C;
}

inline Mat matrix_C_L(const RootOfUnity& root, cplx u, cplx v, cplx upp,
                      cplx vpp, cplx h) {
  return intertwiner_G(root) * matrix_Ctilde_L(root, u, v, upp, vpp, h);
}

// Max over the three generators of ||rho(flip(X)) C - C rho'(X)|| relative
// to the first term -- the defining identity of the conjugating matrix.
inline double verify_conjugation(const TorusRep& rep, char letter, const Mat& C,
                                 const TorusRep& rep_next) {
  auto A = apply_auto_torus(rep, letter);
  const Mat B[3] = {rep_next.U, rep_next.V, rep_next.W};
  double res = 0.0;
  for (int g = 0; g < 3; ++g) {
    Mat lhs = A[g] * C;
    res = std::max(res, (lhs - C * B[g]).norm() / lhs.norm());
  }
  return res;
}

struct SpectrumData {
  std::vector<cplx> ratios;     // lambda_i / lambda_1, sorted
  std::vector<cplx> char_poly;  // monic coefficients of det-normalized C
};

inline SpectrumData projective_invariants(const Mat& C) {
  const int N = static_cast<int>(C.rows());
  Eigen::JacobiSVD<Mat> svd(C);
  double smin = svd.singularValues()(N - 1);
  double smax = svd.singularValues()(0);
  if (smin <= 0.0 || smax / smin > 1e12)
    throw IllConditioned("invariant matrix is numerically singular");
  // The eigenvalue ratios are computed from the raw spectrum: dividing C by
  // det^{1/N} first would rotate every argument by a branch-dependent phase
  // (det is often a negative real, i.e. on the cut of log), perturbing the
  // argument sort and with it which eigenvalue serves as the denominator.
  Eigen::ComplexEigenSolver<Mat> es(C, /*computeEigenvectors=*/false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + N);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    // Moduli that agree in exact arithmetic come back ~1e-10 apart relative,
    // so the tie tolerance must sit well above eigensolver noise or the
    // fallback argument sort is never reached consistently.
    double ma = std::abs(a), mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-8 * (ma + mb)) return ma < mb;
    return std::arg(a) < std::arg(b);
  });
  SpectrumData out;
  for (const cplx& e : ev) out.ratios.push_back(e / ev.front());
  // monic characteristic polynomial from the det-normalized eigenvalues
  cplx det = C.determinant();
  cplx scale = detail::principal_nth_root(detail::snap_real(det), N);
  std::vector<cplx> coef{1.0};
  for (cplx e : ev) {
    e /= scale;
    coef.push_back(0.0);
    for (std::size_t i = coef.size() - 1; i > 0; --i)
      coef[i] = coef[i] - e * coef[i - 1];
  }
  out.char_poly = coef;
  return out;
}

struct InvariantReport {
  std::string word;
  SurfaceKind kind = SurfaceKind::Torus1;
  int N = 3, k = 1;
  std::vector<ShearWeights> weights;
  RootChoice roots;
  std::array<cplx, 4> p{1.0, 1.0, 1.0, 1.0};  // sphere central values (unused for torus)
  Mat C;
  SpectrumData spectrum;
  std::map<std::string, double> residuals;
  std::vector<double> per_step_residuals;
  bool geometric = true;
  bool negative_trace = false;
};

// C_phi = C_1 C_2 ... C_n with C_i the closed-form matrix of the i-th letter,
// each factor normalized to unit Frobenius norm.  Residuals: per-step
// conjugation, full-word conjugation, and the representation relations.
inline InvariantReport assemble_invariant(const std::string& word,
                                          const RootOfUnity& root,
                                          const std::vector<ShearWeights>& traj,
                                          const RootChoice& rc) {
  validate_word(word);
  if (traj.size() != word.size() + 1 || rc.u.size() != traj.size())
    throw InvalidParameter("trajectory/root choice length mismatch");
  const int N = root.N;

  InvariantReport rep;
  rep.word = word;
  rep.kind = SurfaceKind::Torus1;
  rep.N = N;
  rep.k = root.k;
  rep.weights = traj;
  rep.roots = rc;

  Mat C = Mat::Identity(N, N);
  double per_step_max = 0.0, relations_max = 0.0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    cplx u0 = rc.u[i], v0 = rc.v[i], u1 = rc.u[i + 1], v1 = rc.v[i + 1];
    Mat Ci = (word[i] == 'R')
                 ? matrix_C_R(root, u0, v0, u1, v1, rc.h)
                 : matrix_C_L(root, u0, v0, u1, v1, rc.h);
    Ci /= Ci.norm();
    TorusRep r0 = build_torus_rep(root, u0, v0, rc.h);
    TorusRep r1 = build_torus_rep(root, u1, v1, rc.h);
    relations_max = std::max(relations_max, torus_relation_residual(r0));
    double sres = verify_conjugation(r0, word[i], Ci, r1);
    rep.per_step_residuals.push_back(sres);
    per_step_max = std::max(per_step_max, sres);
    C = C * Ci;
  }

  // Full word: push the generators of the base representation through the
  // whole flip sequence and compare against conjugation by the product.
  TorusRep base = build_torus_rep(root, rc.u[0], rc.v[0], rc.h);
  std::array<Mat, 3> M{base.U, base.V, base.W};
  for (char ch : word) {
    TorusRep cur = base;
    cur.U = M[0]; cur.V = M[1]; cur.W = M[2];
    M = apply_auto_torus(cur, ch);
  }
  double full = 0.0;
  const Mat B[3] = {base.U, base.V, base.W};
  for (int g = 0; g < 3; ++g) {
    Mat lhs = M[g] * C;
    full = std::max(full, (lhs - C * B[g]).norm() / lhs.norm());
  }

  rep.C = C;
  rep.spectrum = projective_invariants(C);
  rep.residuals["relations"] = relations_max;
  rep.residuals["perStepMax"] = per_step_max;
  rep.residuals["fullWord"] = full;
  return rep;
}

}  // namespace qhi

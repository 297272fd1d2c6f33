#pragma once

// Four-punctured-sphere analog: closed-form single-flip matrices C*_R and
// C*_L = G* Ctilde*_L, assembly of the invariant along an LR word with the
// sign-twisted weight recursions, and conjugation certification.

#include <map>
#include <string>
#include <vector>

#include "qhi/errors.hpp"
#include "qhi/shear_dynamics.hpp"
#include "qhi/torus_invariant.hpp"
#include "qhi/weyl_rep.hpp"

namespace qhi {

// Central values for which the sign-twisted recursions close at the
// representation level: h = 1 and p_j = -1 (so p_j^N = -1 for odd N).
inline constexpr cplx kSphereH{1.0, 0.0};
inline constexpr cplx kSphereP{-1.0, 0.0};

// G*_{ij} = q^{2ij}.
inline Mat intertwiner_Gstar(const RootOfUnity& root) {
  Mat G(root.N, root.N);
  for (int i = 0; i < root.N; ++i)
    for (int j = 0; j < root.N; ++j) G(i, j) = root.q(2LL * i * j);
  return G;
}

// (C*_R)_{ij} = (v'/v)^j (q p2/(gamma u v u'))^d q^{-4jd - d(d+1)}
//               * prod_{b=1..j} 1/((1+q^{2b-1}u)(1+q^{2b-1} gamma u))
//               * prod_{a=1..d} 1/((1+q^{1-2j-2a}/u)(1+q^{1-2j-2a}/(gamma u)))
// with d = (i-j) mod N and gamma = p2 p3 / h.  The entries are N-periodic in
// both indices given the sign-twisted R-step power relations.
inline Mat matrix_Cstar_R(const RootOfUnity& root, cplx u, cplx v, cplx up,
                          cplx vp, cplx h = kSphereH, cplx p2 = kSphereP,
                          cplx p3 = kSphereP) {
  const int N = root.N;
  detail::require_nonsingular_power(u, N, "u");
  const cplx gamma = p2 * p3 / h;
  detail::require_nonsingular_power(gamma * u, N, "gamma*u");
  Mat C(N, N);
  for (int j = 0; j < N; ++j) {
    cplx col = detail::ipow(vp / v, j);
    for (int b = 1; b <= j; ++b)
      col /= (1.0 + root.q(2LL * b - 1) * u) *
             (1.0 + root.q(2LL * b - 1) * gamma * u);
    for (int i = 0; i < N; ++i) {
      long long d = ((i - j) % N + N) % N;
      cplx val = col * detail::ipow(root.q(1) * p2 / (gamma * u * v * up), d) *
                 root.q(-4LL * j * d - d * (d + 1));
      for (long long a = 1; a <= d; ++a)
        val /= (1.0 + root.q(1 - 2LL * j - 2 * a) / u) *
               (1.0 + root.q(1 - 2LL * j - 2 * a) / (gamma * u));
      C(i, j) = val;
    }
  }
  return C;
}

// (Ctilde*_L)_{ij} = q^{j^2} (u v v'/p1)^j (u/u')^d q^{-2jd}
//                    * prod_{b=1..j} 1/((1+q^{2b-1}v)(1+q^{2b-1} delta v))
//                    * prod_{a=1..d} 1/((1+q^{1-2j-2a}/v)(1+q^{1-2j-2a}/(delta v)))
// with d = (i-j) mod N and delta = h/(p1 p2).
inline Mat matrix_Ctilde_star_L(const RootOfUnity& root, cplx u, cplx v,
                                cplx up, cplx vp, cplx h = kSphereH,
                                cplx p1 = kSphereP, cplx p2 = kSphereP) {
  const int N = root.N;
  detail::require_nonsingular_power(v, N, "v");
  const cplx delta = h / (p1 * p2);
  detail::require_nonsingular_power(delta * v, N, "delta*v");
  Mat C(N, N);
  for (int j = 0; j < N; ++j) {
    cplx col = root.q(1LL * j * j) * detail::ipow(u * v * vp / p1, j);
    for (int b = 1; b <= j; ++b)
      col /= (1.0 + root.q(2LL * b - 1) * v) *
             (1.0 + root.q(2LL * b - 1) * delta * v);
    for (int i = 0; i < N; ++i) {
      long long d = ((i - j) % N + N) % N;
      cplx val = col * detail::ipow(u / up, d) * root.q(-2LL * j * d);
      for (long long a = 1; a <= d; ++a)
        val /= (1.0 + root.q(1 - 2LL * j - 2 * a) / v) *
               (1.0 + root.q(1 - 2LL * j - 2 * a) / (delta * v));
      C(i, j) = val;
    }
  }
  return C;
}

inline Mat matrix_Cstar_L(const RootOfUnity& root, cplx u, cplx v, cplx up,
                          cplx vp, cplx h = kSphereH, cplx p1 = kSphereP,
                          cplx p2 = kSphereP) {
  return intertwiner_Gstar(root) * matrix_Ctilde_star_L(root, u, v, up, vp, h, p1, p2);
}

inline double verify_conjugation_sphere(const SphereRep& rep, char letter,
                                        const Mat& C, const SphereRep& rep_next) {
  auto A = apply_auto_sphere(rep, letter);
  double res = 0.0;
  for (int g = 0; g < 6; ++g) {
    Mat lhs = A[g] * C;
    res = std::max(res, (lhs - C * rep_next.X[g]).norm() / lhs.norm());
  }
  return res;
}

inline InvariantReport assemble_sphere_invariant(
    const std::string& word, const RootOfUnity& root,
    const std::vector<ShearWeights>& traj, const RootChoice& rc) {
  validate_word(word);
  if (traj.size() != word.size() + 1 || rc.u.size() != traj.size())
    throw InvalidParameter("trajectory/root choice length mismatch");
  const int N = root.N;
  const cplx h = kSphereH, p = kSphereP;

  InvariantReport rep;
  rep.word = word;
  rep.kind = SurfaceKind::Sphere4;
  rep.N = N;
  rep.k = root.k;
  rep.weights = traj;
  rep.roots = rc;
  rep.p = {p, p, p, p};

  Mat C = Mat::Identity(N, N);
  double per_step_max = 0.0, relations_max = 0.0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    cplx u0 = rc.u[i], v0 = rc.v[i], u1 = rc.u[i + 1], v1 = rc.v[i + 1];
    Mat Ci = (word[i] == 'R')
                 ? matrix_Cstar_R(root, u0, v0, u1, v1, h, p, p)
                 : matrix_Cstar_L(root, u0, v0, u1, v1, h, p, p);
    Ci /= Ci.norm();
    SphereRep r0 = build_sphere_rep(root, u0, v0, h, p, p, p, p);
    SphereRep r1 = build_sphere_rep(root, u1, v1, h, p, p, p, p);
    relations_max = std::max(
        relations_max, detail::sphere_central_residual(root, r0.X, h, r0.p));
    double sres = verify_conjugation_sphere(r0, word[i], Ci, r1);
    rep.per_step_residuals.push_back(sres);
    per_step_max = std::max(per_step_max, sres);
    C = C * Ci;
  }

  SphereRep base = build_sphere_rep(root, rc.u[0], rc.v[0], h, p, p, p, p);
  std::array<Mat, 6> M = base.X;
  for (char ch : word) {
    SphereRep cur = base;
    cur.X = M;
    M = apply_auto_sphere(cur, ch);
  }
  double full = 0.0;
  for (int g = 0; g < 6; ++g) {
    Mat lhs = M[g] * C;
    full = std::max(full, (lhs - C * base.X[g]).norm() / lhs.norm());
  }

  rep.C = C;
  rep.spectrum = projective_invariants(C);
  rep.residuals["relations"] = relations_max;
  rep.residuals["perStepMax"] = per_step_max;
  rep.residuals["fullWord"] = full;
  return rep;
}

}  // namespace qhi

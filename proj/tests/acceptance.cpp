// Acceptance gate: one test case per numbered criterion.  Each case computes
// a single boolean, prints "[criterion N] PASS/FAIL" with the measured
// quantities, and then asserts it, so the summary reads as a checklist.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <complex>
#include <cstdio>
#include <random>

#include "qhi/report.hpp"

using namespace qhi;

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

std::mt19937 rng(903311);

cplx rand_scalar(double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> mod(lo, hi), arg(-3.0, 3.0);
  return std::polar(mod(rng), arg(rng));
}

int rand_sel(int N) { return std::uniform_int_distribution<int>(0, N - 1)(rng); }

// Draw a parameter whose N-th power stays away from -1 (the flip factors are
// singular there and the bounds below assume well-conditioned inputs).
cplx rand_param(int N) {
  for (;;) {
    cplx z = rand_scalar();
    if (std::abs(std::pow(z, N) + 1.0) > 0.1) return z;
  }
}

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof(b), "%.3e", x);
  return b;
}

void announce(int n, bool ok, const std::string& detail) {
  std::printf("[criterion %d] %s: %s\n", n, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

struct TorusStep {
  cplx u, v, h, up, vp;
};

TorusStep torus_draw(const RootOfUnity& root, char letter) {
  int N = root.N;
  cplx u = rand_param(N), v = rand_param(N), h = rand_scalar();
  ShearWeights w{std::pow(u, N), std::pow(v, N), std::pow(h, N)};
  ShearWeights wn = (letter == 'R') ? step_R(w, SurfaceKind::Torus1)
                                    : step_L(w, SurfaceKind::Torus1);
  cplx up = qhi::detail::principal_nth_root(wn.x1, N) * root.q(rand_sel(N));
  cplx vp = qhi::detail::principal_nth_root(wn.x2, N) * root.q(rand_sel(N));
  return {u, v, h, up, vp};
}

struct SphereStep {
  cplx u, v, up, vp;
};

SphereStep sphere_draw(const RootOfUnity& root, char letter) {
  int N = root.N;
  cplx u = rand_param(N), v = rand_param(N);
  ShearWeights w{std::pow(u, N), std::pow(v, N), 1.0};
  ShearWeights wn = (letter == 'R') ? step_R(w, SurfaceKind::Sphere4)
                                    : step_L(w, SurfaceKind::Sphere4);
  cplx up = qhi::detail::principal_nth_root(wn.x1, N) * root.q(rand_sel(N));
  cplx vp = qhi::detail::principal_nth_root(wn.x2, N) * root.q(rand_sel(N));
  return {u, v, up, vp};
}

SphereRep sphere_rep(const RootOfUnity& root, cplx u, cplx v) {
  return build_sphere_rep(root, u, v, kSphereH, kSphereP, kSphereP, kSphereP,
                          kSphereP);
}

// Projective spectra of the invariant for a rotation of `word`, computed from
// the pushed weights traj[r] so every rotation lives on the same orbit.
std::vector<cplx> rotated_spectrum(const std::string& word, std::size_t r,
                                   const std::vector<ShearWeights>& traj,
                                   const RootOfUnity& root, SurfaceKind kind) {
  std::string rot = word.substr(r) + word.substr(0, r);
  auto traj2 = evolve(rot, traj[r], kind);
  auto rc = choose_roots(traj2, root);
  auto rep = (kind == SurfaceKind::Torus1)
                 ? assemble_invariant(rot, root, traj2, rc)
                 : assemble_sphere_invariant(rot, root, traj2, rc);
  return rep.spectrum.ratios;
}

}  // namespace

TEST_CASE("criterion 1: representation relations hold to 1e-11") {
  auto t0 = clock_t_::now();
  double worst = 0.0;
  for (int N : {3, 5, 7}) {
    RootOfUnity root(N);
    for (int t = 0; t < 20; ++t) {
      auto rep = build_torus_rep(root, rand_scalar(), rand_scalar(), rand_scalar());
      worst = std::max(worst, torus_relation_residual(rep));
      auto srep = sphere_rep(root, rand_scalar(), rand_scalar());
      worst = std::max(worst, qhi::detail::sphere_central_residual(
                                  root, srep.X, srep.h, srep.p));
    }
  }
  double secs = seconds_since(t0);
  bool ok = worst <= 1e-11 && secs < 5.0;
  announce(1, ok, "max relation residual " + fmt(worst) + ", " +
                      fmt(secs) + " s");
  REQUIRE(ok);
}

TEST_CASE("criterion 2: single-step conjugation identities hold to 1e-10") {
  auto t0 = clock_t_::now();
  double worst = 0.0;
  for (int N : {3, 5, 7}) {
    RootOfUnity root(N);
    for (char letter : {'R', 'L'}) {
      for (int t = 0; t < 10; ++t) {
        auto d = torus_draw(root, letter);
        Mat C = (letter == 'R')
                    ? matrix_C_R(root, d.u, d.v, d.up, d.vp, d.h)
                    : matrix_C_L(root, d.u, d.v, d.up, d.vp, d.h);
        auto r0 = build_torus_rep(root, d.u, d.v, d.h);
        auto r1 = build_torus_rep(root, d.up, d.vp, d.h);
        worst = std::max(worst, verify_conjugation(r0, letter, C, r1));
      }
    }
  }
  double secs = seconds_since(t0);
  bool ok = worst <= 1e-10 && secs < 10.0;
  announce(2, ok, "max single-step residual " + fmt(worst) + ", " +
                      fmt(secs) + " s");
  REQUIRE(ok);
}

TEST_CASE("criterion 3: closed forms match the entry recursions to 1e-12") {
  double worst = 0.0;
  for (int N : {3, 5, 7}) {
    RootOfUnity root(N);
    auto d = torus_draw(root, 'R');
    Mat C = matrix_C_R(root, d.u, d.v, d.up, d.vp, d.h);
    for (int i = 1; i < N; ++i)
      for (int j = 1; j < N; ++j) {
        cplx row = (d.vp / d.v) / ((1.0 + root.q(4LL * i - 3) * d.u) *
                                   (1.0 + root.q(4LL * i - 1) * d.u));
        worst = std::max(worst,
                         std::abs(C(i, j) / C(i - 1, j - 1) - row) / std::abs(row));
        cplx col = root.q(4LL * (j - 1) - 4LL * i) * d.up * d.vp /
                   (d.u * root.q(-2) * d.h);
        worst = std::max(worst,
                         std::abs(C(i, j) / C(i, j - 1) - col) / std::abs(col));
      }
    auto dl = torus_draw(root, 'L');
    Mat Ct = matrix_Ctilde_L(root, dl.u, dl.v, dl.up, dl.vp, dl.h);
    for (int i = 1; i < N; ++i)
      for (int j = 1; j < N; ++j) {
        cplx row = root.q(4LL * i - 2) * (dl.u * dl.v * dl.vp / dl.h) /
                   ((1.0 + root.q(4LL * i - 3) * dl.v) *
                    (1.0 + root.q(4LL * i - 1) * dl.v));
        worst = std::max(
            worst, std::abs(Ct(i, j) / Ct(i - 1, j - 1) - row) / std::abs(row));
      }
  }
  bool ok = worst <= 1e-12;
  announce(3, ok, "max recursion deviation " + fmt(worst));
  REQUIRE(ok);
}

TEST_CASE("criterion 4: N-th powers of flip images follow the classical steps") {
  double worst = 0.0;
  for (int N : {3, 5}) {
    RootOfUnity root(N);
    for (int t = 0; t < 5; ++t) {
      cplx u = rand_param(N), v = rand_param(N), h = rand_scalar();
      auto rep = build_torus_rep(root, u, v, h);
      ShearWeights w{std::pow(u, N), std::pow(v, N), std::pow(h, N)};
      for (char letter : {'R', 'L'}) {
        auto img = apply_auto_torus(rep, letter);
        ShearWeights wn = (letter == 'R') ? step_R(w, SurfaceKind::Torus1)
                                          : step_L(w, SurfaceKind::Torus1);
        Mat P0 = qhi::detail::mat_pow(img[0], N);
        Mat P1 = qhi::detail::mat_pow(img[1], N);
        worst = std::max(
            worst, (P0 - wn.x1 * Mat::Identity(N, N)).norm() / P0.norm());
        worst = std::max(
            worst, (P1 - wn.x2 * Mat::Identity(N, N)).norm() / P1.norm());
      }
    }
  }
  bool ok = worst <= 1e-9;
  announce(4, ok, "max classical-shadow residual " + fmt(worst));
  REQUIRE(ok);
}

TEST_CASE("criterion 5: periodic solver finds the RL set and closes length 8") {
  auto t0 = clock_t_::now();
  const cplx omega = std::polar(1.0, 2.0 * M_PI / 3.0);
  auto sols = solve_periodic("RL", SurfaceKind::Torus1);
  auto has = [&](cplx a, cplx b) {
    for (const auto& s : sols)
      if (std::abs(s.w.x1 - a) + std::abs(s.w.x2 - b) < 1e-8 &&
          s.residual <= 1e-12)
        return true;
    return false;
  };
  bool ok = has(omega, omega) && has(std::conj(omega), std::conj(omega)) &&
            has(omega, 1.0) && has(std::conj(omega), 1.0);

  auto sols8 = solve_periodic("RRLRLLRL", SurfaceKind::Torus1);
  ok = ok && !sols8.empty();
  double worst = 0.0;
  for (const auto& s : sols8) {
    auto traj = evolve("RRLRLLRL", s.w, SurfaceKind::Torus1);
    worst = std::max(worst, std::abs(traj.back().x1 - s.w.x1) +
                                std::abs(traj.back().x2 - s.w.x2));
  }
  ok = ok && worst <= 1e-10;
  double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  announce(5, ok, "RL set found, length-8 closure " + fmt(worst) +
                      ", " + fmt(secs) + " s");
  REQUIRE(ok);
}

TEST_CASE("criterion 6: full-word certification on the torus word battery") {
  double worst = 0.0;
  bool ok = true;
  for (const std::string word : {"RL", "RRL", "RRLL", "RLRLLL"}) {
    for (int N : {3, 5}) {
      RunConfig cfg;
      cfg.word = word;
      cfg.N = N;
      auto r = run_pipeline(cfg);
      worst = std::max(worst, r.residuals.at("fullWord"));
      ok = ok && r.residuals.at("fullWord") <= 1e-8;
    }
  }
  announce(6, ok, "max full-word residual " + fmt(worst));
  REQUIRE(ok);
}

TEST_CASE("criterion 7: projective spectra are cyclic-rotation invariants") {
  double worst = 0.0;
  RootOfUnity root(3);
  for (const std::string word : {"RRL", "RRLL", "RLRLLL"}) {
    auto sols = solve_periodic(word, SurfaceKind::Torus1);
    auto g = select_geometric(sols);
    auto traj = evolve(word, g.w, SurfaceKind::Torus1);
    auto base = rotated_spectrum(word, 0, traj, root, SurfaceKind::Torus1);
    for (std::size_t r = 1; r < word.size(); ++r) {
      auto spec = rotated_spectrum(word, r, traj, root, SurfaceKind::Torus1);
      worst = std::max(worst, spectrum_distance(base, spec));
    }
  }
  bool ok = worst <= 1e-6;
  announce(7, ok, "max spectrum deviation over rotations " + fmt(worst));
  REQUIRE(ok);
}

TEST_CASE("criterion 8: sphere analogs of the step, shadow, word and rotation checks") {
  bool ok = true;
  // (a) single-step conjugation
  double step_worst = 0.0;
  for (int N : {3, 5, 7}) {
    RootOfUnity root(N);
    for (char letter : {'R', 'L'}) {
      for (int t = 0; t < 5; ++t) {
        auto d = sphere_draw(root, letter);
        Mat C = (letter == 'R') ? matrix_Cstar_R(root, d.u, d.v, d.up, d.vp)
                                : matrix_Cstar_L(root, d.u, d.v, d.up, d.vp);
        auto r0 = sphere_rep(root, d.u, d.v);
        auto r1 = sphere_rep(root, d.up, d.vp);
        step_worst = std::max(step_worst,
                              verify_conjugation_sphere(r0, letter, C, r1));
      }
    }
  }
  ok = ok && step_worst <= 1e-10;

  // (b) sign-twisted classical shadow
  double shadow_worst = 0.0;
  for (int N : {3, 5}) {
    RootOfUnity root(N);
    cplx u = rand_param(N), v = rand_param(N);
    auto rep = sphere_rep(root, u, v);
    ShearWeights w{std::pow(u, N), std::pow(v, N), 1.0};
    for (char letter : {'R', 'L'}) {
      auto img = apply_auto_sphere(rep, letter);
      ShearWeights wn = (letter == 'R') ? step_R(w, SurfaceKind::Sphere4)
                                        : step_L(w, SurfaceKind::Sphere4);
      Mat P0 = qhi::detail::mat_pow(img[0], N);
      Mat P1 = qhi::detail::mat_pow(img[1], N);
      shadow_worst = std::max(
          shadow_worst, (P0 - wn.x1 * Mat::Identity(N, N)).norm() / P0.norm());
      shadow_worst = std::max(
          shadow_worst, (P1 - wn.x2 * Mat::Identity(N, N)).norm() / P1.norm());
    }
  }
  ok = ok && shadow_worst <= 1e-9;

  // (c) full-word battery
  double word_worst = 0.0;
  for (const std::string word : {"RL", "RRL", "RRLL", "RLRLLL"}) {
    for (int N : {3, 5}) {
      RunConfig cfg;
      cfg.surface = SurfaceKind::Sphere4;
      cfg.word = word;
      cfg.N = N;
      auto r = run_pipeline(cfg);
      word_worst = std::max(word_worst, r.residuals.at("fullWord"));
    }
  }
  ok = ok && word_worst <= 1e-8;

  // (d) rotation invariance of the spectra
  double rot_worst = 0.0;
  {
    RootOfUnity root(3);
    for (const std::string word : {"RRL", "RRLL"}) {
      auto sols = solve_periodic(word, SurfaceKind::Sphere4);
      auto traj = evolve(word, sols.front().w, SurfaceKind::Sphere4);
      auto base = rotated_spectrum(word, 0, traj, root, SurfaceKind::Sphere4);
      for (std::size_t r = 1; r < word.size(); ++r) {
        auto spec = rotated_spectrum(word, r, traj, root, SurfaceKind::Sphere4);
        rot_worst = std::max(rot_worst, spectrum_distance(base, spec));
      }
    }
  }
  ok = ok && rot_worst <= 1e-6;

  announce(8, ok, "step " + fmt(step_worst) + ", shadow " +
                      fmt(shadow_worst) + ", word " +
                      fmt(word_worst) + ", rotation " +
                      fmt(rot_worst));
  REQUIRE(ok);
}

TEST_CASE("criterion 9: decompose is exact for every admissible word up to length 10") {
  bool ok = true;
  long checked = 0;
  for (int n = 2; n <= 10 && ok; ++n) {
    for (unsigned bits = 0; bits < (1u << n) && ok; ++bits) {
      std::string w;
      for (int i = 0; i < n; ++i) w += (bits >> i & 1) ? 'L' : 'R';
      if (!word_is_pa_admissible(w)) continue;
      ++checked;
      if (decompose(word_to_matrix(w)) != cyclic_normalize(w)) ok = false;
    }
  }
  announce(9, ok, std::to_string(checked) + " words round-tripped exactly");
  REQUIRE(ok);
}

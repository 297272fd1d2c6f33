#pragma once

// Report serialization (versioned JSON schema "qhi/1", CSV sweeps) and the
// end-to-end pipeline: decompose -> solve -> choose roots -> assemble -> verify.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhi/errors.hpp"
#include "qhi/mcg_word.hpp"
#include "qhi/shear_dynamics.hpp"
#include "qhi/sphere_invariant.hpp"
#include "qhi/torus_invariant.hpp"
#include "qhi/weyl_rep.hpp"

namespace qhi {

using json = nlohmann::ordered_json;

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline Mat matrix_from_json(const json& j) {
  const int n = static_cast<int>(j.size());
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) m(i, jj) = complex_from_json(j.at(i).at(jj));
  return m;
}

struct Tolerances {
  double newton = 1e-12;
  double per_step = 1e-8;
  double full_word = 1e-8;
};

struct RunConfig {
  SurfaceKind surface = SurfaceKind::Torus1;
  int N = 3;
  int k = 1;
  std::string word;                       // either this...
  std::optional<IntMatrix2x2> matrix;     // ...or this
  std::vector<std::array<int, 2>> selectors;
  std::optional<ShearWeights> manual_weights;
  Tolerances tol;
  SeedGrid grid = SeedGrid::from_env();
};

inline json report_to_json(const InvariantReport& r, const Tolerances& tol) {
  json j;
  j["schema"] = "qhi/1";
  j["surface"] = (r.kind == SurfaceKind::Torus1) ? "torus" : "sphere";
  j["word"] = r.word;
  j["N"] = r.N;
  j["k"] = r.k;
  j["geometric"] = r.geometric;
  j["negativeTrace"] = r.negative_trace;
  json weights = json::array();
  for (const auto& w : r.weights)
    weights.push_back({{"x1", complex_to_json(w.x1)},
                       {"x2", complex_to_json(w.x2)},
                       {"x3", complex_to_json(w.x3())},
                       {"hN", complex_to_json(w.hN)}});
  j["weights"] = weights;
  json roots;
  json sel = json::array();
  for (const auto& s : r.roots.selectors) sel.push_back({s[0], s[1]});
  roots["selectors"] = sel;
  json us = json::array(), vs = json::array();
  for (const auto& z : r.roots.u) us.push_back(complex_to_json(z));
  for (const auto& z : r.roots.v) vs.push_back(complex_to_json(z));
  roots["u"] = us;
  roots["v"] = vs;
  roots["h"] = complex_to_json(r.roots.h);
  j["roots"] = roots;
  if (r.kind == SurfaceKind::Sphere4) {
    json p = json::array();
    for (const auto& z : r.p) p.push_back(complex_to_json(z));
    j["p"] = p;
  }
  j["C"] = matrix_to_json(r.C);
  json ratios = json::array();
  for (const auto& z : r.spectrum.ratios) ratios.push_back(complex_to_json(z));
  j["spectrumRatios"] = ratios;
  json cp = json::array();
  for (const auto& z : r.spectrum.char_poly) cp.push_back(complex_to_json(z));
  j["charPoly"] = cp;
  json res;
  for (const auto& [name, value] : r.residuals) res[name] = value;
  json per = json::array();
  for (double v : r.per_step_residuals) per.push_back(v);
  res["perStep"] = per;
  j["residuals"] = res;
  j["thresholds"] = {{"newton", tol.newton},
                     {"perStep", tol.per_step},
                     {"fullWord", tol.full_word}};
  return j;
}

namespace detail {

inline std::vector<std::array<int, 2>> rotate_selectors(
    const std::vector<std::array<int, 2>>& sel, std::size_t r) {
  // Selector i belongs to trajectory point i (word length n, n+1 points);
  // rotating the word by r shifts the interior points cyclically.
  std::size_t n = sel.size() - 1;
  std::vector<std::array<int, 2>> out(sel.size());
  for (std::size_t i = 0; i <= n; ++i) out[i] = sel[(i + r) % n];
  return out;
}

}  // namespace detail

// Multiset distance between two projective spectra (sorted eigenvalue ratios).
inline double spectrum_distance(const std::vector<cplx>& a,
                                const std::vector<cplx>& b) {
  if (a.size() != b.size()) return 1e300;
  auto key = [](const std::vector<cplx>& v) {
    std::vector<cplx> s = v;
    std::sort(s.begin(), s.end(), [](cplx x, cplx y) {
      if (std::abs(x.real() - y.real()) > 1e-9) return x.real() < y.real();
      return x.imag() < y.imag();
    });
    return s;
  };
  auto sa = key(a), sb = key(b);
  double d = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i)
    d = std::max(d, std::abs(sa[i] - sb[i]));
  return d;
}

// Full pipeline for one configuration.  The sphere pipeline runs with the
// sign-twisted recursions and central values h = 1, p_j = -1; when no
// all-nonreal solution exists (the sphere words tested have only real
// periodic weights) it falls back to the canonical first solution and
// records geometric = false.
inline InvariantReport run_pipeline(const RunConfig& cfg) {
  RootOfUnity root(cfg.N, cfg.k);
  std::string word = cfg.word;
  bool negative_trace = false;
  if (cfg.matrix) {
    long long t = cfg.matrix->trace();
    if (t >= -2 && t <= 2) throw NotPseudoAnosov("matrix trace in [-2,2]");
    negative_trace = t < -2;
    word = decompose(*cfg.matrix);
  }
  validate_word(word);
  if (!word_is_pa_admissible(word))
    throw NotPseudoAnosov("word " + word + " is not pseudo-Anosov");

  bool geometric = true;
  ShearWeights w0;
  if (cfg.manual_weights) {
    w0 = *cfg.manual_weights;
    geometric = false;  // caller-supplied, not certified geometric
  } else {
    auto sols = solve_periodic(word, cfg.surface, 1.0, cfg.grid);
    try {
      w0 = select_geometric(sols).w;
    } catch (const NoGeometricCandidate&) {
      w0 = sols.front().w;
      geometric = false;
    }
  }

  auto traj = evolve(word, w0, cfg.surface);
  auto rc = choose_roots(traj, root, cfg.selectors);
  InvariantReport rep = (cfg.surface == SurfaceKind::Torus1)
                            ? assemble_invariant(word, root, traj, rc)
                            : assemble_sphere_invariant(word, root, traj, rc);
  rep.geometric = geometric;
  rep.negative_trace = negative_trace;

  // Cross-check the projective spectrum against the rotated word, feeding it
  // the pushed weights so both runs live on the same periodic orbit.
  if (word.size() > 1) {
    std::string rot = word.substr(1) + word.substr(0, 1);
    auto traj2 = evolve(rot, traj[1], cfg.surface);
    auto rc2 = choose_roots(traj2, root,
                            detail::rotate_selectors(rc.selectors, 1));
    InvariantReport rep2 = (cfg.surface == SurfaceKind::Torus1)
                               ? assemble_invariant(rot, root, traj2, rc2)
                               : assemble_sphere_invariant(rot, root, traj2, rc2);
    rep.residuals["cyclicCheck"] =
        spectrum_distance(rep.spectrum.ratios, rep2.spectrum.ratios);
  } else {
    rep.residuals["cyclicCheck"] = 0.0;
  }
  return rep;
}

inline bool report_passes(const InvariantReport& r, const Tolerances& tol) {
  return r.residuals.at("perStepMax") <= tol.per_step &&
         r.residuals.at("fullWord") <= tol.full_word;
}

// Re-check a stored report: rebuild the representations from the recorded
// roots and re-verify the full-word conjugation identity for the stored C.
inline double verify_stored_report(const json& j) {
  const std::string surface = j.at("surface").get<std::string>();
  RootOfUnity root(j.at("N").get<int>(), j.at("k").get<int>());
  const std::string word = j.at("word").get<std::string>();
  Mat C = matrix_from_json(j.at("C"));
  std::vector<cplx> us, vs;
  for (const auto& e : j.at("roots").at("u")) us.push_back(complex_from_json(e));
  for (const auto& e : j.at("roots").at("v")) vs.push_back(complex_from_json(e));
  cplx h = complex_from_json(j.at("roots").at("h"));
  double full = 0.0;
  if (surface == "torus") {
    TorusRep base = build_torus_rep(root, us[0], vs[0], h);
    std::array<Mat, 3> M{base.U, base.V, base.W};
    for (char ch : word) {
      TorusRep cur = base;
      cur.U = M[0]; cur.V = M[1]; cur.W = M[2];
      M = apply_auto_torus(cur, ch);
    }
    const Mat B[3] = {base.U, base.V, base.W};
    for (int g = 0; g < 3; ++g) {
      Mat lhs = M[g] * C;
      full = std::max(full, (lhs - C * B[g]).norm() / lhs.norm());
    }
  } else {
    const cplx p = kSphereP;
    SphereRep base = build_sphere_rep(root, us[0], vs[0], h, p, p, p, p);
    std::array<Mat, 6> M = base.X;
    for (char ch : word) {
      SphereRep cur = base;
      cur.X = M;
      M = apply_auto_sphere(cur, ch);
    }
    for (int g = 0; g < 6; ++g) {
      Mat lhs = M[g] * C;
      full = std::max(full, (lhs - C * base.X[g]).norm() / lhs.norm());
    }
  }
  return full;
}

struct SweepSpec {
  SurfaceKind surface = SurfaceKind::Torus1;
  std::vector<int> Ns{3};
  std::vector<int> ks{1};
  std::vector<std::string> words;
  bool all_selectors = false;  // sweep the N x N selector grid for point 0
};

// One CSV row per configuration; failures land in the error column and the
// sweep keeps going.  Row order follows the (surface, word, N, k, selector)
// iteration order, never completion order.
inline std::string tabulate(const SweepSpec& sweep) {
  std::ostringstream csv;
  csv << "surface,word,N,k,sel_u0,sel_v0,relations,perStepMax,fullWord,"
         "cyclicCheck,spectrumRatios,error\n";
  for (const auto& word : sweep.words) {
    for (int N : sweep.Ns) {
      for (int k : sweep.ks) {
        std::vector<std::array<int, 2>> sel0{{0, 0}};
        std::vector<std::vector<std::array<int, 2>>> selector_sets;
        if (sweep.all_selectors) {
          for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
              std::vector<std::array<int, 2>> s(word.size() + 1, {0, 0});
              s[0] = {a, b};
              s[word.size()] = {a, b};
              selector_sets.push_back(s);
            }
        } else {
          selector_sets.push_back({});
        }
        for (const auto& sel : selector_sets) {
          csv << ((sweep.surface == SurfaceKind::Torus1) ? "torus" : "sphere")
              << ',' << word << ',' << N << ',' << k << ','
              << (sel.empty() ? 0 : sel[0][0]) << ','
              << (sel.empty() ? 0 : sel[0][1]) << ',';
          try {
            RunConfig cfg;
            cfg.surface = sweep.surface;
            cfg.N = N;
            cfg.k = k;
            cfg.word = word;
            cfg.selectors = sel;
            InvariantReport r = run_pipeline(cfg);
            csv << r.residuals.at("relations") << ','
                << r.residuals.at("perStepMax") << ','
                << r.residuals.at("fullWord") << ','
                << r.residuals.at("cyclicCheck") << ',';
            csv << '"';
            for (std::size_t i = 0; i < r.spectrum.ratios.size(); ++i) {
              if (i) csv << ';';
              csv << r.spectrum.ratios[i].real() << '+'
                  << r.spectrum.ratios[i].imag() << 'i';
            }
            csv << "\",\n";
          } catch (const std::exception& e) {
            csv << ",,,,," << '"' << e.what() << '"' << '\n';
          }
        }
      }
    }
  }
  return csv.str();
}

}  // namespace qhi

// Command-line front end: parse a word or SL(2,Z) matrix, run the full
// pipeline (decompose -> solve -> choose roots -> assemble -> verify), and
// emit machine-readable reports (JSON per run, CSV for sweeps).
//
// Exit codes: 0 = all residuals below thresholds, 1 = residual exceeded,
// 2 = pipeline/usage error (with a structured JSON error object on stdout).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhi/report.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::vector<std::array<int, 2>> parse_selectors(const std::string& s) {
  std::vector<std::array<int, 2>> out;
  std::stringstream ss(s);
  std::string pair;
  while (std::getline(ss, pair, ';')) {
    int a = 0, b = 0;
    if (std::sscanf(pair.c_str(), "%d,%d", &a, &b) != 2)
      throw qhi::InvalidParameter("bad selector pair: " + pair);
    out.push_back({a, b});
  }
  return out;
}

int emit_error(const std::string& stage, const std::string& type,
               const std::string& message) {
  qhi::json err;
  err["schema"] = "qhi/1";
  err["error"] = {{"stage", stage}, {"type", type}, {"message", message}};
  std::cout << err.dump(2) << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum hyperbolic invariants of pseudo-Anosov classes"};

  std::string surface = "torus";
  std::string word, matrix_csv, selectors_str, weights_str;
  std::string out_path, verify_path, csv_path;
  std::string n_list, k_list, words_list;
  int N = 3, k = 1;
  bool tab = false, all_selectors = false;
  double tol_full = 1e-8, tol_step = 1e-8;

  app.add_option("--surface", surface, "torus | sphere")
      ->check(CLI::IsMember({"torus", "sphere"}));
  app.add_option("--word", word, "LR word, e.g. RRLL");
  app.add_option("--matrix", matrix_csv, "SL(2,Z) entries a,b,c,d row-major");
  app.add_option("--N", N, "odd dimension of the representation");
  app.add_option("--k", k, "root-of-unity exponent, gcd(k,N)=1");
  app.add_option("--selectors", selectors_str,
                 "per-step root selectors 'a0,b0;a1,b1;...'");
  app.add_option("--weights", weights_str,
                 "manual periodic weights 're1,im1,re2,im2' (skips the solver)");
  app.add_option("--out", out_path, "write the JSON report here (default stdout)");
  app.add_option("--verify-only", verify_path, "re-check a stored JSON report");
  app.add_option("--tol-full", tol_full, "full-word residual threshold");
  app.add_option("--tol-step", tol_step, "per-step residual threshold");
  app.add_flag("--tabulate", tab, "run a sweep and emit CSV");
  app.add_option("--N-list", n_list, "sweep dimensions, e.g. 3,5,7");
  app.add_option("--k-list", k_list, "sweep root exponents");
  app.add_option("--words", words_list, "sweep words, comma separated");
  app.add_flag("--all-selectors", all_selectors,
               "sweep the full NxN selector grid at the base point");
  app.add_option("--csv", csv_path, "write the sweep CSV here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    qhi::SurfaceKind kind = (surface == "torus") ? qhi::SurfaceKind::Torus1
                                                 : qhi::SurfaceKind::Sphere4;

    if (!verify_path.empty()) {
      std::ifstream in(verify_path);
      if (!in) return emit_error("verify", "IOError", "cannot open " + verify_path);
      qhi::json stored = qhi::json::parse(in);
      double full = qhi::verify_stored_report(stored);
      double thr = stored.at("thresholds").at("fullWord").get<double>();
      qhi::json result;
      result["schema"] = "qhi/1";
      result["verified"] = (full <= thr);
      result["fullWordResidual"] = full;
      result["threshold"] = thr;
      std::cout << result.dump(2) << "\n";
      return full <= thr ? 0 : 1;
    }

    if (tab) {
      qhi::SweepSpec sweep;
      sweep.surface = kind;
      if (!n_list.empty()) sweep.Ns = parse_int_list(n_list);
      if (!k_list.empty()) sweep.ks = parse_int_list(k_list);
      std::stringstream ss(words_list.empty() ? word : words_list);
      std::string tok;
      while (std::getline(ss, tok, ',')) sweep.words.push_back(tok);
      sweep.all_selectors = all_selectors;
      std::string csv = qhi::tabulate(sweep);
      if (csv_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(csv_path) << csv;
      }
      return 0;
    }

    if (word.empty() && matrix_csv.empty())
      return emit_error("parse", "InvalidParameter", "need --word or --matrix");

    qhi::RunConfig cfg;
    cfg.surface = kind;
    cfg.N = N;
    cfg.k = k;
    cfg.word = word;
    cfg.tol.full_word = tol_full;
    cfg.tol.per_step = tol_step;
    if (!matrix_csv.empty()) {
      auto e = parse_int_list(matrix_csv);
      if (e.size() != 4)
        return emit_error("parse", "InvalidParameter", "--matrix needs a,b,c,d");
      cfg.matrix = qhi::IntMatrix2x2(e[0], e[1], e[2], e[3]);
    }
    if (!selectors_str.empty()) cfg.selectors = parse_selectors(selectors_str);
    if (!weights_str.empty()) {
      std::stringstream ss(weights_str);
      std::vector<double> vals;
      std::string tok2;
      while (std::getline(ss, tok2, ',')) vals.push_back(std::stod(tok2));
      if (vals.size() != 4)
        return emit_error("parse", "InvalidParameter",
                          "--weights needs re1,im1,re2,im2");
      cfg.manual_weights = qhi::ShearWeights{{vals[0], vals[1]}, {vals[2], vals[3]}, 1.0};
    }

    qhi::InvariantReport rep = qhi::run_pipeline(cfg);
    qhi::json j = qhi::report_to_json(rep, cfg.tol);
    if (out_path.empty()) {
      std::cout << j.dump(2) << "\n";
    } else {
      std::ofstream(out_path) << j.dump(2) << "\n";
    }
    return qhi::report_passes(rep, cfg.tol) ? 0 : 1;
  } catch (const qhi::NotPseudoAnosov& e) {
    return emit_error("decompose", "NotPseudoAnosov", e.what());
  } catch (const qhi::DegenerateWeight& e) {
    return emit_error("evolve", "DegenerateWeight", e.what());
  } catch (const qhi::NoSolutionFound& e) {
    return emit_error("solve", "NoSolutionFound", e.what());
  } catch (const qhi::SingularFactor& e) {
    return emit_error("assemble", "SingularFactor", e.what());
  } catch (const qhi::InconsistentCentrals& e) {
    return emit_error("assemble", "InconsistentCentrals", e.what());
  } catch (const qhi::IllConditioned& e) {
    return emit_error("spectrum", "IllConditioned", e.what());
  } catch (const qhi::Error& e) {
    return emit_error("pipeline", "Error", e.what());
  } catch (const std::exception& e) {
    return emit_error("internal", "Exception", e.what());
  }
}

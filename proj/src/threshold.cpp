#include "qpsa/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "qpsa/dense.hpp"
#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

WeightedGraph::WeightedGraph(int n, MatrixXd weights) : n_(n), w_(std::move(weights)) {
  if (w_.rows() != n || w_.cols() != n)
    throw InputError("weight matrix has wrong dimension");
  if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InputError("weight matrix must be symmetric");
  if (w_.diagonal().cwiseAbs().maxCoeff() > 1e-12)
    throw InputError("weight matrix must have zero diagonal");
  deg_ = w_.cwiseAbs().rowwise().sum();
  l1_ = deg_.sum();
}

WeightedGraph WeightedGraph::from_edges(
    int n, const std::vector<std::array<double, 3>>& edges) {
  MatrixXd w = MatrixXd::Zero(n, n);
  for (const auto& e : edges) {
    int u = int(e[0]), v = int(e[1]);
    if (u < 0 || v < 0 || u >= n || v >= n || u == v)
      throw InputError("bad edge endpoints");
    w(u, v) += e[2];
    w(v, u) += e[2];
  }
  return WeightedGraph(n, std::move(w));
}

WeightedGraph WeightedGraph::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad graph JSON: ") + e.what());
  }
  try {
    int n = doc.at("n").get<int>();
    std::vector<std::array<double, 3>> edges;
    for (const auto& je : doc.at("edges")) {
      if (je.size() < 2) throw InputError("edge needs [u, v] or [u, v, w]");
      double w = je.size() > 2 ? je[2].get<double>() : 1.0;
      edges.push_back({je[0].get<double>(), je[1].get<double>(), w});
    }
    return from_edges(n, edges);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad graph JSON: ") + e.what());
  }
}

WeightedGraph WeightedGraph::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

double ThresholdProfile::t_of(double delta) const {
  double t = 0.0;
  for (double lam : eigenvalues)
    if (std::abs(lam) >= delta) t += lam * lam;
  return t;
}

ThresholdProfile threshold_rank(const WeightedGraph& g, double delta) {
  ThresholdProfile profile;
  for (int u = 0; u < g.n(); ++u)
    if (g.degrees()(u) > 0) profile.kept_vertices.push_back(u);
  const int m = int(profile.kept_vertices.size());
  if (m == 0) {
    profile.eigenvalues = VectorXd::Zero(0);
    return profile;
  }
  MatrixXd jd(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      int u = profile.kept_vertices[i], v = profile.kept_vertices[j];
      jd(i, j) = g.weights()(u, v) /
                 std::sqrt(g.degrees()(u) * g.degrees()(v));
    }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(jd, Eigen::EigenvaluesOnly);
  profile.eigenvalues = es.eigenvalues();
  if (profile.eigenvalues.size() &&
      (profile.eigenvalues.minCoeff() < -1.0 - 1e-9 ||
       profile.eigenvalues.maxCoeff() > 1.0 + 1e-9))
    throw std::runtime_error("normalized spectrum escaped [-1, 1]");
  (void)delta;
  return profile;
}

namespace {

void subtract_degree_piece(MatrixXd& m, const VectorXd& deg,
                           const DegreeCutPiece& p) {
  if (p.s == p.t) {
    for (int u : p.s)
      for (int v : p.s) m(u, v) -= p.coeff * deg(u) * deg(v);
    return;
  }
  for (int u : p.s)
    for (int v : p.t) {
      m(u, v) -= p.coeff * deg(u) * deg(v);
      m(v, u) -= p.coeff * deg(v) * deg(u);
    }
}

double offdiag_inf_one(const MatrixXd& m, bool* exact, std::uint64_t seed) {
  MatrixXd w = m;
  w.diagonal().setZero();
  if (w.rows() <= kInfOneExactCap) {
    *exact = true;
    return inf_one_norm_exact(w);
  }
  (void)seed;
  *exact = false;
  return inf_one_norm_upper(w);
}

// Cut selection for the degree-weighted extraction: maximize the projection
// progress wsum^2 / <P, P>_{D^-1} rather than the raw box sum, so that exact
// degree-cut inputs are recovered in one piece. Exhaustive for n <= 20.
struct DegreeCut {
  double wsum = 0.0;
  double score = 0.0;
  std::vector<int> s, t;
};

DegreeCut degree_cut_find(const MatrixXd& w, const VectorXd& deg,
                          std::uint64_t seed) {
  const int n = int(w.rows());
  DegreeCut best;
  auto score_of = [&](const std::vector<int>& s, const std::vector<int>& t,
                      double wsum) {
    if (s.empty() || t.empty()) return 0.0;
    double ds = 0, dt = 0, dinter = 0;
    for (int u : s) ds += deg(u);
    for (int v : t) dt += deg(v);
    std::vector<int> inter;
    std::set_intersection(s.begin(), s.end(), t.begin(), t.end(),
                          std::back_inserter(inter));
    for (int u : inter) dinter += deg(u);
    const double denom = (s == t) ? ds * ds : ds * dt + dinter * dinter;
    if (denom < 1e-30) return 0.0;
    return wsum * wsum / denom;
  };

  if (n <= kCutNormExactCap) {
    VectorXd colsum = VectorXd::Zero(n);
    std::uint64_t smask = 0;
    const std::uint64_t total = std::uint64_t(1) << n;
    for (std::uint64_t step = 0;; ++step) {
      for (double sign : {+1.0, -1.0}) {
        double wsum = 0.0;
        std::vector<int> t;
        for (int j = 0; j < n; ++j) {
          double c = sign * colsum(j);
          if (c > 1e-14) {
            t.push_back(j);
            wsum += c;
          }
        }
        if (!t.empty() && smask) {
          std::vector<int> s;
          for (int i = 0; i < n; ++i)
            if (smask & (std::uint64_t(1) << i)) s.push_back(i);
          double sc = score_of(s, t, wsum);
          if (sc > best.score + 1e-15 ||
              (sc > best.score - 1e-15 &&
               (s.size() < best.s.size() ||
                (s.size() == best.s.size() && s < best.s)))) {
            best.score = sc;
            best.wsum = sign * wsum;
            best.s = std::move(s);
            best.t = std::move(t);
          }
        }
      }
      if (step + 1 == total) break;
      const int flip = int([](std::uint64_t x) {
        int c = 0;
        while (!(x & 1)) {
          x >>= 1;
          ++c;
        }
        return c;
      }(step + 1));
      const std::uint64_t bit = std::uint64_t(1) << flip;
      if (smask & bit)
        colsum -= w.row(flip);
      else
        colsum += w.row(flip);
      smask ^= bit;
    }
  } else {
    CutResult cr = cut_norm_heuristic(w, 32, seed);
    best.s = cr.s;
    best.t = cr.t;
    double wsum = 0.0;
    for (int u : cr.s)
      for (int v : cr.t) wsum += w(u, v);
    best.wsum = wsum;
    best.score = score_of(best.s, best.t, wsum);
  }
  return best;
}

}  // namespace

DegreeCutDecomposition threshold_cut_decompose(const WeightedGraph& g,
                                               double eps,
                                               std::uint64_t seed) {
  if (eps <= 0) throw InputError("eps must be positive");
  const int n = g.n();
  DegreeCutDecomposition out;
  out.n = n;
  out.target = eps * g.weight_l1();

  // Spectral truncation of J_D at eps/2, mapped back by D^{1/2} . D^{1/2}.
  ThresholdProfile profile = threshold_rank(g, eps / 2.0);
  const auto& kept = profile.kept_vertices;
  const int m = int(kept.size());
  MatrixXd low_rank = MatrixXd::Zero(n, n);
  double t_rank = 0.0;
  if (m > 0) {
    MatrixXd jd(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        jd(i, j) = g.weights()(kept[i], kept[j]) /
                   std::sqrt(g.degrees()(kept[i]) * g.degrees()(kept[j]));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(jd);
    MatrixXd proj = MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      double lam = es.eigenvalues()(i);
      if (std::abs(lam) >= eps / 2.0) {
        proj += lam * es.eigenvectors().col(i) *
                es.eigenvectors().col(i).transpose();
        t_rank += lam * lam;
      }
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        low_rank(kept[i], kept[j]) =
            proj(i, j) * std::sqrt(g.degrees()(kept[i]) * g.degrees()(kept[j]));
  }

  const int width_cap = int(
      std::ceil(kWidthCapConstant * std::max(1.0, t_rank) / (eps * eps)));
  MatrixXd work = low_rank;       // extraction target
  out.residual = g.weights();     // reported residual J - sum(pieces)

  for (int iter = 0;; ++iter) {
    bool exact = false;
    out.residual_inf_one =
        offdiag_inf_one(out.residual, &exact, split_seed(seed, 500 + iter));
    out.residual_exact = exact;
    if (out.residual_inf_one <= out.target + 1e-12) {
      out.target_met = true;
      break;
    }
    if (iter >= width_cap) {
      out.target_met = false;
      break;
    }
    DegreeCut cut = degree_cut_find(work, g.degrees(), split_seed(seed, iter));
    if (std::abs(cut.wsum) < 1e-12 * std::max(1.0, g.weight_l1()) ||
        cut.s.empty() || cut.t.empty()) {
      out.target_met = false;
      break;
    }
    DegreeCutPiece piece;
    piece.s = cut.s;
    piece.t = cut.t;
    double dsum_s = 0.0, dsum_t = 0.0, dsum_inter = 0.0;
    for (int u : cut.s) dsum_s += g.degrees()(u);
    for (int v : cut.t) dsum_t += g.degrees()(v);
    std::vector<int> inter;
    std::set_intersection(cut.s.begin(), cut.s.end(), cut.t.begin(),
                          cut.t.end(), std::back_inserter(inter));
    for (int u : inter) dsum_inter += g.degrees()(u);
    if (piece.s == piece.t) {
      piece.coeff = cut.wsum / (dsum_s * dsum_s);
    } else {
      piece.coeff = cut.wsum / (dsum_s * dsum_t + dsum_inter * dsum_inter);
    }
    subtract_degree_piece(work, g.degrees(), piece);
    subtract_degree_piece(out.residual, g.degrees(), piece);
    out.pieces.push_back(std::move(piece));
  }
  return out;
}

QmcReport qmc_estimate(const WeightedGraph& g, double eps, std::uint64_t seed,
                       const EstimateOptions& opts) {
  if (g.weights().minCoeff() < 0)
    throw InputError("qmc_estimate requires non-negative edge weights");
  const int n = g.n();
  QmcReport report{.witness = ProductState(n, 2)};

  std::vector<std::array<double, 3>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (g.weights()(u, v) != 0.0)
        edges.push_back({double(u), double(v), g.weights()(u, v)});
  if (edges.empty()) return report;  // empty graph: estimate 0

  LocalHamiltonian h = qmc_hamiltonian(n, edges);
  PauliDecomposition pd = pauli_decompose(h);
  const double total_weight = 0.5 * g.weight_l1();  // sum of w_e
  const double neg_constant = -0.5 * total_weight;  // constant of -H

  ThresholdProfile profile = threshold_rank(g, eps / 2.0);
  const double t = std::max(profile.t_of(eps / 2.0), 1e-9);
  report.threshold_rank_t = t;
  const double delta = kQmcPitchConstant * std::pow(eps, 3) / std::pow(t, 1.5);
  const double pitch = delta * g.weight_l1();
  report.pitch = pitch;

  DegreeCutDecomposition dcd = threshold_cut_decompose(g, eps, seed);

  // Build the minimization model for -H: -H contributes
  // +(1/4) sum_a sum_{u != v} w_uv alpha^a_u alpha^a_v.
  std::vector<GuessModel::ExplicitPiece> pieces;
  double diag_budget = 0.0;
  for (const auto& p : dcd.pieces) {
    std::vector<int> inter;
    std::set_intersection(p.s.begin(), p.s.end(), p.t.begin(), p.t.end(),
                          std::back_inserter(inter));
    double d2_inter = 0.0;
    for (int u : inter) d2_inter += g.degrees()(u) * g.degrees()(u);
    const bool symmetric_single = (p.s == p.t);
    const double model_coeff =
        symmetric_single ? 0.25 * p.coeff : 0.5 * p.coeff;
    for (int a = 1; a <= 3; ++a) {
      GuessModel::ExplicitPiece ep;
      ep.coeff = model_coeff;
      ep.sides.emplace_back(p.s, a);
      ep.sides.emplace_back(p.t, a);
      pieces.push_back(std::move(ep));
    }
    diag_budget += 3.0 * std::abs(model_coeff) * d2_inter;
  }

  std::vector<double> degrees(n);
  for (int u = 0; u < n; ++u) degrees[u] = g.degrees()(u);

  bool fell_back = false;
  double best = 0.0;
  bool have = false;
  VectorXd best_witness;
  GuessModel model(n, 2, neg_constant, pieces, degrees, pitch,
                   g.weight_l1());
  FeasOptions fopts;
  fopts.inner_radius = kInnerRadiusConstant * delta;
  std::int64_t feasible = 0;
  try {
    model.enumerate(opts.enum_cap, [&](const std::vector<double>& values) {
      ConstraintSet cs = model.constraints_for(values);
      FeasibilityResult feas = check_feasible(cs, fopts);
      if (feas.status != FeasStatus::kFeasible) return;
      ++feasible;
      double value = model.estimate_value(values);
      if (!have || value < best - 1e-15) {
        have = true;
        best = value;
        best_witness = feas.witness;
      }
    });
  } catch (const EnumerationCapError&) {
    std::cerr << "qmc_estimate: enumeration cap exceeded, falling back to the "
                 "direct maximizer\n";
    fell_back = true;
  }
  report.feasible_guesses = feasible;

  if (fell_back || !have) {
    // Direct maximization: minimize the negated polynomial.
    PauliDecomposition neg;
    {
      LocalHamiltonian hneg = [&] {
        std::vector<LocalTerm> ts;
        for (const auto& t : h.terms()) ts.push_back({t.support, -t.matrix});
        return LocalHamiltonian(n, 2, 2, std::move(ts));
      }();
      neg = pauli_decompose(hneg);
    }
    auto [value, state] = gs_direct(neg, opts.direct_restarts,
                                    opts.direct_iters, seed);
    report.used_direct_fallback = true;
    report.estimate = -value;
    report.witness = state;
    report.witness_value = product_energy(pd, state);
    bool exact = false;
    report.budget = offdiag_inf_one(dcd.residual, &exact, seed) * 0.75 +
                    diag_budget;
    return report;
  }

  report.estimate = -best;
  report.witness = expand_witness(model.atlas(), best_witness, 2);
  report.witness_value = product_energy(pd, report.witness);

  // Budget: residual regularity + repeated-index correction + grid chain.
  double grid_budget = 0.0;
  for (const auto& ep : pieces)
    grid_budget +=
        std::abs(ep.coeff) * (2.0 * pitch * g.weight_l1() + pitch * pitch);
  report.budget = 0.75 * dcd.residual_inf_one + diag_budget + grid_budget;
  return report;
}

}  // namespace qpsa

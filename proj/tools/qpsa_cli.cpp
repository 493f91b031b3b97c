#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpsa/dense.hpp"
#include "qpsa/eb_map.hpp"
#include "qpsa/errors.hpp"
#include "qpsa/estimators.hpp"
#include "qpsa/ham_cut.hpp"
#include "qpsa/sparse.hpp"
#include "qpsa/subsample.hpp"
#include "qpsa/threshold.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

json budget_json(const qpsa::BudgetBreakdown& b) {
  return json{{"regularity", b.regularity}, {"diagonal", b.diagonal},
              {"grid", b.grid},             {"thermal", b.thermal},
              {"product_gap", b.product_gap}, {"total", b.total()}};
}

struct Emitter {
  std::string out_path;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  int emit(json doc) {
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    doc["wall_time_ms"] = ms;
    if (out_path.empty()) {
      std::cout << doc.dump(2) << "\n";
    } else {
      std::ofstream out(out_path);
      if (!out) throw qpsa::InputError("cannot write output: " + out_path);
      out << doc.dump(2) << "\n";
    }
    return 0;
  }
};

json base_doc(const std::string& command, std::uint64_t seed, int threads) {
  json doc;
  doc["command"] = command;
  doc["version"] = kVersion;
  doc["seed"] = seed;
  doc["threads"] = threads;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"product-state approximations for local Hamiltonians"};
  app.require_subcommand(1);

  std::string input, graph_input, out_path;
  std::uint64_t seed = 1;
  double eps = 0.5, gamma = 0.25, beta = 1.0;
  int q = 4, trials = 20, l = 2, kparam = 4, rparam = 5;
  int threads = int(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  std::string solver = "exact", family = "complete";
  int n = 6, rows = 3, cols = 3;
  bool direct_fallback = false;

  app.add_option("--threads", threads, "worker threads (1 = fully serial)")
      ->check(CLI::PositiveNumber);

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input)
      cmd->add_option("input", input, "instance JSON file")->required();
    cmd->add_option("--out", out_path, "write the result JSON to a file");
    cmd->add_option("--seed", seed, "64-bit RNG seed");
    return cmd;
  };

  auto* c_decompose = add_common(app.add_subcommand(
      "decompose", "Pauli-basis decomposition summary"), true);
  auto* c_cutdecomp = add_common(app.add_subcommand(
      "cutdecomp", "Hamiltonian cut decomposition (JSON export)"), true);
  c_cutdecomp->add_option("--eps", eps, "regularity accuracy");
  auto* c_gs_exact = add_common(app.add_subcommand(
      "gs-exact", "exact ground energy (dense oracle)"), true);
  auto* c_gs_direct = add_common(app.add_subcommand(
      "gs-direct", "projected-gradient product-state minimum"), true);
  c_gs_direct->add_option("--restarts", trials, "random restarts");
  auto* c_gs_est = add_common(app.add_subcommand(
      "gs-estimate", "relaxation ground-energy estimate"), true);
  c_gs_est->add_option("--eps", eps, "regularity accuracy");
  c_gs_est->add_option("--gamma", gamma, "guess grid pitch (fraction of n)");
  c_gs_est->add_flag("--direct-fallback", direct_fallback,
                     "fall back to gs-direct when enumeration is too large");
  auto* c_fe_exact = add_common(app.add_subcommand(
      "fe-exact", "exact free energy (dense oracle)"), true);
  c_fe_exact->add_option("--beta", beta, "inverse temperature")->required();
  auto* c_fe_est = add_common(app.add_subcommand(
      "fe-estimate", "max-entropy free-energy estimate"), true);
  c_fe_est->add_option("--beta", beta, "inverse temperature")->required();
  c_fe_est->add_option("--eps", eps, "regularity accuracy");
  c_fe_est->add_option("--gamma", gamma, "guess grid pitch");
  c_fe_est->add_flag("--direct-fallback", direct_fallback,
                     "fall back to the direct minimizer");
  auto* c_qmc = app.add_subcommand("qmc", "Quantum Max-Cut estimate");
  c_qmc->add_option("graph", graph_input, "graph JSON file")->required();
  c_qmc->add_option("--out", out_path, "write the result JSON to a file");
  c_qmc->add_option("--seed", seed, "64-bit RNG seed");
  c_qmc->add_option("--eps", eps, "accuracy parameter");
  auto* c_trank = app.add_subcommand("threshold-rank",
                                     "threshold-rank profile of a graph");
  c_trank->add_option("graph", graph_input, "graph JSON file")->required();
  c_trank->add_option("--out", out_path, "write the result JSON to a file");
  c_trank->add_option("--delta", gamma, "threshold delta")->required();
  auto* c_vsc = add_common(app.add_subcommand(
      "vsc", "vertex-sample-complexity experiment"), true);
  c_vsc->add_option("--q", q, "sample size")->required();
  c_vsc->add_option("--trials", trials, "number of trials");
  c_vsc->add_option("--solver", solver, "exact | direct | relaxation");
  c_vsc->add_option("--eps", eps, "relaxation accuracy");
  c_vsc->add_option("--gamma", gamma, "relaxation grid pitch");
  auto* c_sgs = add_common(app.add_subcommand(
      "sparse-gs", "sparse divide-and-conquer ground energy"), true);
  c_sgs->add_option("--kparam", kparam, "Baker layering parameter");
  c_sgs->add_option("--r", rparam, "cluster size cap");
  auto* c_sfe = add_common(app.add_subcommand(
      "sparse-fe", "sparse divide-and-conquer free energy"), true);
  c_sfe->add_option("--kparam", kparam, "Baker layering parameter");
  c_sfe->add_option("--r", rparam, "cluster size cap");
  c_sfe->add_option("--beta", beta, "inverse temperature")->required();
  auto* c_eb = add_common(app.add_subcommand(
      "eb-experiment", "entanglement-breaking channel experiment"), true);
  c_eb->add_option("--l", l, "maximum measured-set size");
  c_eb->add_option("--trials", trials, "number of sampled configurations");
  auto* c_gen = app.add_subcommand("gen", "instance generators");
  c_gen->add_option("--family", family,
                    "complete | grid | planarish | qmc-complete | qmc-cycle");
  c_gen->add_option("--n", n, "qudit count (complete / qmc families)");
  c_gen->add_option("--rows", rows, "grid rows");
  c_gen->add_option("--cols", cols, "grid cols");
  c_gen->add_option("--seed", seed, "64-bit RNG seed");
  c_gen->add_option("--out", out_path, "write the instance to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  Emitter emitter;
  emitter.out_path = out_path;

  try {
    if (*c_decompose) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      auto pd = qpsa::pauli_decompose(h);
      json doc = base_doc("decompose", seed, threads);
      doc["n"] = h.n();
      doc["d"] = h.d();
      doc["k"] = h.k();
      doc["terms"] = h.term_count();
      doc["constant"] = pd.constant();
      doc["strength_l1"] = h.strength_l1();
      doc["strength_frobenius"] = h.strength_frobenius();
      json colors = json::array();
      if (h.k() == 2) {
        for (const auto& [key, mat] : pd.pair_matrices())
          colors.push_back(json{{"color", {key.first, key.second}},
                                {"frobenius", mat.norm()}});
      } else {
        for (const auto& t : pd.tensors())
          colors.push_back(
              json{{"color", t.colors}, {"frobenius", t.frobenius()}});
      }
      doc["colors"] = std::move(colors);
      return emitter.emit(doc);
    }
    if (*c_cutdecomp) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      auto hcd = qpsa::ham_cut_decompose(h, eps, seed);
      json doc = base_doc("cutdecomp", seed, threads);
      doc["eps"] = eps;
      doc["decomposition"] = json::parse(hcd.to_json_text());
      return emitter.emit(doc);
    }
    if (*c_gs_exact) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      auto [energy, state] = qpsa::exact_ground(h);
      json doc = base_doc("gs-exact", seed, threads);
      doc["energy"] = energy;
      return emitter.emit(doc);
    }
    if (*c_gs_direct) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      auto pd = qpsa::pauli_decompose(h);
      auto [value, state] = qpsa::gs_direct(pd, trials, 400, seed);
      json doc = base_doc("gs-direct", seed, threads);
      doc["value"] = value;
      doc["restarts"] = trials;
      return emitter.emit(doc);
    }
    if (*c_gs_est) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      qpsa::EstimateOptions opts;
      opts.allow_direct_fallback = direct_fallback;
      auto rep = qpsa::gs_estimate(h, eps, gamma, seed, opts);
      json doc = base_doc("gs-estimate", seed, threads);
      doc["eps"] = eps;
      doc["gamma"] = gamma;
      doc["v_hat"] = rep.v_hat;
      doc["witness_energy"] = rep.witness_energy;
      doc["feasible_guesses"] = rep.feasible_guesses;
      doc["total_guesses"] = rep.total_guesses;
      doc["used_direct_fallback"] = rep.used_direct_fallback;
      doc["budget"] = budget_json(rep.budget);
      return emitter.emit(doc);
    }
    if (*c_fe_exact) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      json doc = base_doc("fe-exact", seed, threads);
      doc["beta"] = beta;
      doc["free_energy"] = qpsa::exact_free_energy(h, beta);
      return emitter.emit(doc);
    }
    if (*c_fe_est) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      qpsa::EstimateOptions opts;
      opts.allow_direct_fallback = direct_fallback;
      auto rep = qpsa::fe_estimate(h, beta, eps, gamma, seed, opts);
      json doc = base_doc("fe-estimate", seed, threads);
      doc["beta"] = beta;
      doc["eps"] = eps;
      doc["gamma"] = gamma;
      doc["f_hat"] = rep.f_hat;
      doc["witness_free_energy"] = rep.witness_free_energy;
      doc["feasible_guesses"] = rep.feasible_guesses;
      doc["used_direct_fallback"] = rep.used_direct_fallback;
      doc["budget"] = budget_json(rep.budget);
      return emitter.emit(doc);
    }
    if (*c_qmc) {
      auto g = qpsa::WeightedGraph::from_json_file(graph_input);
      qpsa::EstimateOptions opts;
      auto rep = qpsa::qmc_estimate(g, eps, seed, opts);
      json doc = base_doc("qmc", seed, threads);
      doc["eps"] = eps;
      doc["estimate"] = rep.estimate;
      doc["witness_value"] = rep.witness_value;
      doc["budget"] = rep.budget;
      doc["threshold_rank"] = rep.threshold_rank_t;
      doc["pitch"] = rep.pitch;
      doc["feasible_guesses"] = rep.feasible_guesses;
      doc["used_direct_fallback"] = rep.used_direct_fallback;
      return emitter.emit(doc);
    }
    if (*c_trank) {
      auto g = qpsa::WeightedGraph::from_json_file(graph_input);
      auto profile = qpsa::threshold_rank(g, gamma);
      json doc = base_doc("threshold-rank", seed, threads);
      doc["delta"] = gamma;
      doc["t"] = profile.t_of(gamma);
      std::vector<double> evs(profile.eigenvalues.data(),
                              profile.eigenvalues.data() +
                                  profile.eigenvalues.size());
      doc["eigenvalues"] = evs;
      return emitter.emit(doc);
    }
    if (*c_vsc) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      qpsa::VscSolver sol = qpsa::VscSolver::kExact;
      if (solver == "direct")
        sol = qpsa::VscSolver::kDirect;
      else if (solver == "relaxation")
        sol = qpsa::VscSolver::kRelaxation;
      else if (solver != "exact")
        throw qpsa::InputError("unknown solver: " + solver);
      qpsa::VscOptions opts;
      opts.eps = eps;
      opts.gamma = gamma;
      opts.threads = threads;
      auto rep = qpsa::vsc_experiment(h, q, trials, sol, seed, opts);
      json doc = base_doc("vsc", seed, threads);
      doc["q"] = rep.q;
      doc["trials"] = rep.trials;
      doc["estimates"] = rep.estimates;
      doc["reference"] = rep.reference;
      doc["mean"] = rep.mean;
      doc["sd"] = rep.sd;
      doc["max_dev"] = rep.max_dev;
      if (!rep.sampled_residual_cuts.empty())
        doc["sampled_residual_cuts"] = rep.sampled_residual_cuts;
      return emitter.emit(doc);
    }
    if (*c_sgs || *c_sfe) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      auto rep = *c_sgs ? qpsa::sparse_gs(h, kparam, rparam, seed)
                        : qpsa::sparse_fe(h, kparam, rparam, beta, seed);
      json doc = base_doc(*c_sgs ? "sparse-gs" : "sparse-fe", seed, threads);
      doc["kparam"] = kparam;
      doc["r"] = rparam;
      if (*c_sfe) doc["beta"] = beta;
      doc["value"] = rep.solve.value;
      doc["state_value"] = rep.solve.state_value;
      doc["weyl_budget"] = rep.solve.weyl_budget;
      doc["td_width"] = rep.td_width;
      doc["clusters"] = rep.partition.clusters;
      doc["removed_vertices"] = rep.partition.removed_vertices;
      json removed_edges = json::array();
      for (auto [u, v] : rep.partition.removed_edges)
        removed_edges.push_back({u, v});
      doc["removed_edges"] = std::move(removed_edges);
      return emitter.emit(doc);
    }
    if (*c_eb) {
      auto h = qpsa::LocalHamiltonian::from_json_file(input);
      auto [energy, ground] = qpsa::exact_ground(h);
      auto rep = qpsa::eb_experiment(h, ground, l, trials, seed);
      json doc = base_doc("eb-experiment", seed, threads);
      doc["l"] = rep.l;
      doc["trials"] = rep.trials;
      doc["energy_rho"] = rep.energy_rho;
      doc["entropy_rho"] = rep.entropy_rho;
      doc["mean_abs_diff"] = rep.mean_abs_diff;
      doc["abs_mean_diff"] = rep.abs_mean_diff;
      doc["explicit_bound"] = rep.explicit_bound;
      doc["min_entropy_margin"] = rep.min_entropy_margin;
      return emitter.emit(doc);
    }
    if (*c_gen) {
      json doc;
      if (family == "complete") {
        doc = json::parse(qpsa::gen_complete_random(n, seed).to_json_text());
      } else if (family == "grid") {
        doc = json::parse(qpsa::gen_grid_heisenberg(rows, cols).to_json_text());
      } else if (family == "planarish") {
        doc = json::parse(
            qpsa::gen_planarish_random(rows, cols, seed).to_json_text());
      } else if (family == "qmc-complete") {
        json edges = json::array();
        for (int u = 0; u < n; ++u)
          for (int v = u + 1; v < n; ++v) edges.push_back({u, v, 1.0});
        doc = json{{"n", n}, {"edges", std::move(edges)}};
      } else if (family == "qmc-cycle") {
        json edges = json::array();
        for (int u = 0; u < n; ++u) edges.push_back({u, (u + 1) % n, 1.0});
        doc = json{{"n", n}, {"edges", std::move(edges)}};
      } else {
        throw qpsa::InputError("unknown family: " + family);
      }
      if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
      } else {
        std::ofstream out(out_path);
        if (!out) throw qpsa::InputError("cannot write output: " + out_path);
        out << doc.dump(2) << "\n";
      }
      return 0;
    }
    std::cerr << "unknown command\n";
    return 1;
  } catch (const qpsa::SizeLimitError& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 3;
  } catch (const qpsa::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

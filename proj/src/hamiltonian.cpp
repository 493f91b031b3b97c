#include "qpsa/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

namespace {

constexpr double kHermTol = 1e-10;

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

void check_term(const LocalTerm& t, int n, int d, int k) {
  if (int(t.support.size()) != k)
    throw InputError("term support size != k");
  for (size_t i = 0; i < t.support.size(); ++i) {
    if (t.support[i] < 0 || t.support[i] >= n)
      throw InputError("term support index out of range");
    if (i > 0 && t.support[i] <= t.support[i - 1])
      throw InputError("term support must be strictly increasing");
  }
  const std::int64_t dim = ipow(d, k);
  if (t.matrix.rows() != dim || t.matrix.cols() != dim)
    throw InputError("term matrix dimension != d^k");
  if ((t.matrix - t.matrix.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
    throw InputError("term matrix is not Hermitian within 1e-10");
}

}  // namespace

double LocalTerm::spectral_norm() const {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(matrix,
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

LocalHamiltonian::LocalHamiltonian(int n, int d, int k,
                                   std::vector<LocalTerm> terms)
    : n_(n), d_(d), k_(k) {
  if (n < 1) throw InputError("n must be positive");
  if (!PauliBasis::is_power_of_two(d))
    throw InputError("unsupported local dimension " + std::to_string(d) +
                     ": must be a power of 2");
  if (k < 1) throw InputError("k must be >= 1");
  // Merge duplicate supports by matrix addition.
  std::map<std::vector<int>, LocalTerm> merged;
  for (auto& t : terms) {
    check_term(t, n, d, k);
    auto it = merged.find(t.support);
    if (it == merged.end())
      merged.emplace(t.support, std::move(t));
    else
      it->second.matrix += t.matrix;
  }
  for (auto& [support, t] : merged) {
    double norm = t.spectral_norm();
    if (norm < 1e-14) continue;  // zero-norm terms dropped
    term_norms_.push_back(norm);
    strength_l1_ += norm;
    strength_frob_ += norm * norm;
    terms_.push_back(std::move(t));
  }
  strength_frob_ = std::sqrt(strength_frob_);
}

MatrixXd LocalHamiltonian::strength_matrix() const {
  if (k_ != 2) throw InputError("strength_matrix requires a 2-local instance");
  MatrixXd j = MatrixXd::Zero(n_, n_);
  for (size_t e = 0; e < terms_.size(); ++e) {
    int u = terms_[e].support[0], v = terms_[e].support[1];
    j(u, v) = j(v, u) = term_norms_[e];
  }
  return j;
}

LocalHamiltonian LocalHamiltonian::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad instance JSON: ") + e.what());
  }
  try {
    int n = doc.at("n").get<int>();
    int d = doc.at("d").get<int>();
    int k = doc.at("k").get<int>();
    std::vector<LocalTerm> terms;
    for (const auto& jt : doc.at("terms")) {
      LocalTerm t;
      t.support = jt.at("support").get<std::vector<int>>();
      const auto& re = jt.at("matrix_re");
      const auto* im = jt.contains("matrix_im") ? &jt.at("matrix_im") : nullptr;
      size_t dim = re.size();
      t.matrix.resize(dim, dim);
      for (size_t r = 0; r < dim; ++r) {
        if (re[r].size() != dim) throw InputError("matrix_re is not square");
        for (size_t c = 0; c < dim; ++c) {
          double x = re[r][c].get<double>();
          double y = im ? (*im)[r][c].get<double>() : 0.0;
          t.matrix(r, c) = cplx(x, y);
        }
      }
      terms.push_back(std::move(t));
    }
    return LocalHamiltonian(n, d, k, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad instance JSON: ") + e.what());
  }
}

LocalHamiltonian LocalHamiltonian::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string LocalHamiltonian::to_json_text() const {
  nlohmann::ordered_json doc;
  doc["n"] = n_;
  doc["d"] = d_;
  doc["k"] = k_;
  doc["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : terms_) {
    nlohmann::ordered_json jt;
    jt["support"] = t.support;
    std::vector<std::vector<double>> re(t.matrix.rows()),
        im(t.matrix.rows());
    for (Eigen::Index r = 0; r < t.matrix.rows(); ++r) {
      re[r].resize(t.matrix.cols());
      im[r].resize(t.matrix.cols());
      for (Eigen::Index c = 0; c < t.matrix.cols(); ++c) {
        re[r][c] = t.matrix(r, c).real();
        im[r][c] = t.matrix(r, c).imag();
      }
    }
    jt["matrix_re"] = re;
    jt["matrix_im"] = im;
    doc["terms"].push_back(std::move(jt));
  }
  return doc.dump(2);
}

void LocalHamiltonian::to_json_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write instance file: " + path);
  out << to_json_text() << "\n";
}

namespace {

// Random Hermitian d^k x d^k matrix with ||.||_inf normalized to 1.
MatrixXcd random_term_matrix(int dim, Rng& rng) {
  MatrixXcd m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      m(r, c) = cplx(rng.next_gaussian(), rng.next_gaussian());
  MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (norm > 1e-12) h /= norm;
  return h;
}

MatrixXcd heisenberg_term() {
  MatrixXcd xx(4, 4), yy(4, 4), zz(4, 4);
  xx << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  yy << 0, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0;
  zz << 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1;
  return (xx + yy + zz) / 3.0;
}

}  // namespace

LocalHamiltonian gen_complete_random(int n, std::uint64_t seed) {
  Rng rng(split_seed(seed, "complete"));
  std::vector<LocalTerm> terms;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      terms.push_back({{u, v}, random_term_matrix(4, rng)});
  return LocalHamiltonian(n, 2, 2, std::move(terms));
}

LocalHamiltonian gen_from_edges(int n,
                                const std::vector<std::pair<int, int>>& edges) {
  std::vector<LocalTerm> terms;
  MatrixXcd h = heisenberg_term();
  for (auto [u, v] : edges) {
    if (u > v) std::swap(u, v);
    terms.push_back({{u, v}, h});
  }
  return LocalHamiltonian(n, 2, 2, std::move(terms));
}

LocalHamiltonian gen_grid_heisenberg(int rows, int cols) {
  std::vector<std::pair<int, int>> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  return gen_from_edges(rows * cols, edges);
}

LocalHamiltonian gen_planarish_random(int rows, int cols, std::uint64_t seed) {
  Rng rng(split_seed(seed, "planarish"));
  std::vector<std::pair<int, int>> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols && rng.next_double() < 0.9)
        edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows && rng.next_double() < 0.9)
        edges.emplace_back(id(r, c), id(r + 1, c));
      // One diagonal per cell keeps the graph planar.
      if (c + 1 < cols && r + 1 < rows) {
        if (rng.next_double() < 0.5)
          edges.emplace_back(id(r, c), id(r + 1, c + 1));
        else
          edges.emplace_back(id(r, c + 1), id(r + 1, c));
      }
    }
  int n = rows * cols;
  std::vector<LocalTerm> terms;
  for (auto [u, v] : edges) {
    LocalTerm t;
    t.support = {std::min(u, v), std::max(u, v)};
    t.matrix = random_term_matrix(4, rng);
    terms.push_back(std::move(t));
  }
  return LocalHamiltonian(n, 2, 2, std::move(terms));
}

LocalHamiltonian qmc_hamiltonian(
    int n, const std::vector<std::array<double, 3>>& edges) {
  MatrixXcd xx(4, 4), yy(4, 4), zz(4, 4);
  xx << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  yy << 0, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0;
  zz << 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1;
  MatrixXcd base = 0.5 * (MatrixXcd::Identity(4, 4) - xx - yy - zz);
  std::vector<LocalTerm> terms;
  for (const auto& e : edges) {
    int u = int(e[0]), v = int(e[1]);
    double w = e[2];
    if (w < 0) throw InputError("QMC requires non-negative edge weights");
    if (u == v) throw InputError("QMC edge with equal endpoints");
    if (u > v) std::swap(u, v);
    LocalTerm t;
    t.support = {u, v};
    t.matrix = w * base;
    terms.push_back(std::move(t));
  }
  return LocalHamiltonian(n, 2, 2, std::move(terms));
}

}  // namespace qpsa

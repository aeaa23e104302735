#include "pairfield/multipair.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <queue>

#include "pairfield/linalg.hpp"

namespace pairfield {

namespace {

constexpr int kMaxOrder = 8;
constexpr double kPruningFlagRatio = 1e-3;

/// Advances `idx` (ascending, values < n) to the next k-combination.
bool next_combination(std::vector<int> &idx, int n)
{
  int const k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

double binomial(int n, int k)
{
  if (k < 0 || k > n)
    return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

Complex det_buffer(std::array<Complex, kMaxOrder * kMaxOrder> &a, int n)
{
  auto at = [&a](int r, int c) -> Complex & { return a[static_cast<std::size_t>(r * kMaxOrder + c)]; };
  Complex det{1.0, 0.0};
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::norm(at(col, col));
    for (int r = col + 1; r < n; ++r) {
      double const v = std::norm(at(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0)
      return {0.0, 0.0};
    if (pivot != col) {
      for (int c = col; c < n; ++c)
        std::swap(at(pivot, c), at(col, c));
      det = -det;
    }
    Complex const p = at(col, col);
    det *= p;
    Complex const inv = std::conj(p) / best;
    for (int r = col + 1; r < n; ++r) {
      Complex const f = at(r, col) * inv;
      for (int c = col + 1; c < n; ++c)
        at(r, c) -= f * at(col, c);
    }
  }
  return det;
}

Complex submatrix_determinant(MatrixXc const &omega, std::vector<int> const &rows, std::vector<int> const &cols)
{
  std::array<Complex, kMaxOrder * kMaxOrder> a;
  int const n = static_cast<int>(rows.size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      a[static_cast<std::size_t>(r * kMaxOrder + c)] = omega(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
  return det_buffer(a, n);
}

/// Visits det(omega[rows, T]) for every ascending column subset T of size
/// rows.size() drawn from `columns`, by depth-first Gaussian elimination with
/// partial pivoting. Subsets sharing a prefix share the elimination work, and
/// a column that is zero on the remaining rows prunes its whole subtree (all
/// those determinants vanish).
class ColumnWalker
{
public:
  ColumnWalker(int order, std::size_t columns)
      : order_(order), width_(static_cast<int>(columns)),
        levels_(static_cast<std::size_t>(order + 1), std::vector<Complex>(static_cast<std::size_t>(order) * columns)),
        chosen_(static_cast<std::size_t>(order))
  {
  }

  template <typename Visit>
  void run(MatrixXc const &omega, std::vector<int> const &rows, std::vector<int> const &columns, Visit &&visit)
  {
    auto &top = levels_[0];
    for (int r = 0; r < order_; ++r)
      for (int c = 0; c < width_; ++c)
        top[static_cast<std::size_t>(r * width_ + c)] =
            omega(rows[static_cast<std::size_t>(r)], columns[static_cast<std::size_t>(c)]);
    descend(0, 0, Complex(1.0, 0.0), visit);
  }

private:
  template <typename Visit>
  void descend(int depth, int first, Complex det, Visit &visit)
  {
    int const left = order_ - depth;
    if (left == 0) {
      visit(det, chosen_);
      return;
    }
    auto const &m = levels_[static_cast<std::size_t>(depth)];
    auto &child = levels_[static_cast<std::size_t>(depth + 1)];
    auto at = [this](std::vector<Complex> const &buf, int r, int c) {
      return buf[static_cast<std::size_t>(r * width_ + c)];
    };
    for (int j = first; j <= width_ - left; ++j) {
      int pivot = 0;
      double best = std::norm(at(m, 0, j));
      for (int r = 1; r < left; ++r) {
        double const v = std::norm(at(m, r, j));
        if (v > best) {
          best = v;
          pivot = r;
        }
      }
      if (best == 0.0)
        continue;
      Complex const p = at(m, pivot, j);
      Complex const inv = std::conj(p) / best;
      // Row `pivot` swaps with row 0; the remaining rows are eliminated.
      int out = 0;
      for (int r = 1; r < left; ++r, ++out) {
        int const src = r == pivot ? 0 : r;
        Complex const f = at(m, src, j) * inv;
        for (int c = j + 1; c < width_; ++c)
          child[static_cast<std::size_t>(out * width_ + c)] = at(m, src, c) - f * at(m, pivot, c);
      }
      chosen_[static_cast<std::size_t>(depth)] = j;
      descend(depth + 1, j + 1, pivot == 0 ? det * p : -det * p, visit);
    }
  }

  int order_;
  int width_;
  std::vector<std::vector<Complex>> levels_;
  std::vector<int> chosen_;
};

struct ByProbability
{
  bool operator()(MultiPairAmplitude const &a, MultiPairAmplitude const &b) const
  {
    return std::norm(a.amplitude) > std::norm(b.amplitude);
  }
};

SectorReport enumerate(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v, ModeBasis const &basis,
                       NumericsParams const &numerics, std::size_t top_k, bool with_observables)
{
  MatrixXc const &w = omega.omega;
  int const n_max = numerics.n_sector_max;
  double const threshold = numerics.prune_threshold;
  Eigen::MatrixXd const weight = w.cwiseAbs2();
  double const vacuum = std::norm(c_v.c_v);

  SectorReport report;
  report.vacuum_probability = vacuum;
  for (Index r = 0; r < w.rows(); ++r)
    if (w.cols() > 0 && weight.row(r).maxCoeff() >= threshold)
      report.retained_electrons.push_back(static_cast<int>(r));
  for (Index c = 0; c < w.cols(); ++c)
    if (w.rows() > 0 && weight.col(c).maxCoeff() >= threshold)
      report.retained_positrons.push_back(static_cast<int>(c));
  for (Index r = 0; r < w.rows(); ++r)
    for (Index c = 0; c < w.cols(); ++c)
      if (weight(r, c) >= threshold && weight(r, c) > 0)
        report.retained_pairs.push_back({static_cast<int>(r), static_cast<int>(c), vacuum * weight(r, c)});
  std::stable_sort(report.retained_pairs.begin(), report.retained_pairs.end(),
                   [](SinglePair const &a, SinglePair const &b) { return a.probability > b.probability; });

  int const ne = static_cast<int>(report.retained_electrons.size());
  int const np = static_cast<int>(report.retained_positrons.size());
  double budget = 0;
  for (int n = 1; n <= n_max; ++n)
    budget += binomial(ne, n) * binomial(np, n);
  if (budget > numerics.enumeration_budget) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "sector enumeration needs %.3g subset pairs (budget %.3g)", budget,
                  numerics.enumeration_budget);
    throw ValidationError("multipair", {std::string(buf) +
                                        "; raise numerics.prune_threshold or lower numerics.n_sector_max"});
  }
  report.enumerated_states = budget;

  auto const &plus = basis.plus_indices();
  auto const &minus = basis.minus_indices();
  std::vector<double> e_spin(static_cast<std::size_t>(w.rows()), 0.0), e_hel(e_spin.size(), 0.0);
  std::vector<double> p_spin(static_cast<std::size_t>(w.cols()), 0.0), p_hel(p_spin.size(), 0.0);
  if (with_observables) {
    for (Index r = 0; r < w.rows(); ++r) {
      e_spin[static_cast<std::size_t>(r)] = particle_spin_z(basis[plus[static_cast<std::size_t>(r)]]);
      e_hel[static_cast<std::size_t>(r)] = particle_helicity(basis[plus[static_cast<std::size_t>(r)]]);
    }
    for (Index c = 0; c < w.cols(); ++c) {
      p_spin[static_cast<std::size_t>(c)] = particle_spin_z(basis[minus[static_cast<std::size_t>(c)]]);
      p_hel[static_cast<std::size_t>(c)] = particle_helicity(basis[minus[static_cast<std::size_t>(c)]]);
    }
  }

  auto const exact = exact_sector_probabilities(omega, c_v, static_cast<int>(std::min<Index>(w.rows(), w.cols())));
  auto exact_at = [&](int n) { return n < static_cast<int>(exact.size()) ? exact[static_cast<std::size_t>(n)] : 0.0; };

  report.sectors.resize(static_cast<std::size_t>(n_max + 1));
  report.top_states.resize(static_cast<std::size_t>(n_max + 1));
  report.sectors[0].pairs = 0;
  report.sectors[0].probability = vacuum;
  report.sectors[0].exact_probability = vacuum;

  for (int n = 1; n <= n_max; ++n) {
    SectorEntry &entry = report.sectors[static_cast<std::size_t>(n)];
    entry.pairs = n;
    entry.exact_probability = exact_at(n);
    std::priority_queue<MultiPairAmplitude, std::vector<MultiPairAmplitude>, ByProbability> top;
    double sum = 0, s_plus = 0, s_minus = 0, h_plus = 0, h_minus = 0;
    if (n <= ne && n <= np) {
      std::vector<int> ei(static_cast<std::size_t>(n));
      std::vector<int> rows(ei.size()), cols(ei.size());
      ColumnWalker walker(n, report.retained_positrons.size());
      std::iota(ei.begin(), ei.end(), 0);
      do {
        double es = 0, eh = 0;
        for (int i = 0; i < n; ++i) {
          int const r = report.retained_electrons[static_cast<std::size_t>(ei[static_cast<std::size_t>(i)])];
          rows[static_cast<std::size_t>(i)] = r;
          es += e_spin[static_cast<std::size_t>(r)];
          eh += e_hel[static_cast<std::size_t>(r)];
        }
        walker.run(w, rows, report.retained_positrons, [&](Complex det, std::vector<int> const &chosen) {
          double const prob = vacuum * std::norm(det);
          double ps = 0, ph = 0;
          for (int i = 0; i < n; ++i) {
            int const c = report.retained_positrons[static_cast<std::size_t>(chosen[static_cast<std::size_t>(i)])];
            cols[static_cast<std::size_t>(i)] = c;
            ps += p_spin[static_cast<std::size_t>(c)];
            ph += p_hel[static_cast<std::size_t>(c)];
          }
          sum += prob;
          s_plus += prob * es;
          s_minus += prob * ps;
          h_plus += prob * eh;
          h_minus += prob * ph;
          if (top_k > 0 && (top.size() < top_k || prob > std::norm(top.top().amplitude))) {
            top.push({rows, cols, c_v.c_v * det, false});
            if (top.size() > top_k)
              top.pop();
          }
        });
      } while (next_combination(ei, ne));
    }
    entry.probability = sum;
    entry.pruned_mass = std::max(0.0, entry.exact_probability - sum);
    entry.pruning_flag = entry.pruned_mass > kPruningFlagRatio * entry.exact_probability + 1e-14;
    if (with_observables && sum > 0) {
      entry.spin_plus = s_plus / sum;
      entry.spin_minus = s_minus / sum;
      entry.helicity_plus = h_plus / sum;
      entry.helicity_minus = h_minus / sum;
    }
    auto &states = report.top_states[static_cast<std::size_t>(n)];
    while (!top.empty()) {
      states.push_back(top.top());
      top.pop();
    }
    std::reverse(states.begin(), states.end());
  }

  double tail = 0;
  for (std::size_t n = static_cast<std::size_t>(n_max) + 1; n < exact.size(); ++n)
    tail += exact[n];
  report.tail_mass = tail;
  report.discarded_mass = tail;
  for (auto const &s : report.sectors)
    report.discarded_mass += s.pruned_mass;
  return report;
}

} // namespace

PairAmplitudeMatrix pair_amplitudes(GBlocks const &g, double cond_cap)
{
  if (g.g_mm.rows() != g.g_mm.cols() || g.g_pm.cols() != g.g_mm.rows())
    throw Error("multipair", "G-block dimensions do not match");
  Eigen::PartialPivLU<MatrixXc> lu(g.g_mm);
  double const rcond = lu.rcond();
  double const cond = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond <= cond_cap)) {
    throw NumericalError("multipair", "G-- is ill-conditioned (cond ~ " + std::to_string(cond) +
                                          "); increase n_cut or reduce the field strength");
  }
  PairAmplitudeMatrix out;
  // omega G-- = -G+-
  out.omega = -g.g_pm * lu.inverse();
  out.cond_mm = cond;
  return out;
}

VacuumAmplitude vacuum_amplitude(GBlocks const &g)
{
  Eigen::PartialPivLU<MatrixXc> lu(g.g_mm);
  MatrixXc const &lu_mat = lu.matrixLU();
  double log_abs = 0;
  Complex phase = static_cast<double>(lu.permutationP().determinant());
  for (Index i = 0; i < lu_mat.rows(); ++i) {
    Complex const d = lu_mat(i, i);
    double const a = std::abs(d);
    if (a == 0.0)
      return {Complex(0.0, 0.0), -std::numeric_limits<double>::infinity()};
    log_abs += std::log(a);
    phase *= d / a;
  }
  return {std::exp(log_abs) * phase, log_abs};
}

Complex small_determinant(MatrixXc const &m)
{
  if (m.rows() != m.cols() || m.rows() > kMaxOrder)
    throw Error("multipair", "small_determinant: square matrix of order <= 8 expected");
  std::vector<int> idx(static_cast<std::size_t>(m.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  return submatrix_determinant(m, idx, idx);
}

MultiPairAmplitude multi_pair_amplitude(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v,
                                        std::span<int const> electrons, std::span<int const> positrons)
{
  if (electrons.size() != positrons.size())
    throw ValidationError("multipair", {"electron and positron label counts differ"});
  if (electrons.size() > static_cast<std::size_t>(kMaxOrder))
    throw ValidationError("multipair", {"at most 8 pairs supported"});
  for (int e : electrons)
    if (e < 0 || e >= omega.omega.rows())
      throw ValidationError("multipair", {"electron label " + std::to_string(e) + " out of range"});
  for (int p : positrons)
    if (p < 0 || p >= omega.omega.cols())
      throw ValidationError("multipair", {"positron label " + std::to_string(p) + " out of range"});

  MultiPairAmplitude out;
  out.electrons.assign(electrons.begin(), electrons.end());
  out.positrons.assign(positrons.begin(), positrons.end());
  int const sign = permutation_sign(out.electrons) * permutation_sign(out.positrons);
  std::sort(out.electrons.begin(), out.electrons.end());
  std::sort(out.positrons.begin(), out.positrons.end());
  if (sign == 0) {
    out.pauli_excluded = true;
    out.amplitude = Complex(0.0, 0.0);
    return out;
  }
  Complex const det = out.electrons.empty() ? Complex(1.0, 0.0)
                                            : submatrix_determinant(omega.omega, out.electrons, out.positrons);
  out.amplitude = static_cast<double>(sign) * c_v.c_v * det;
  return out;
}

std::vector<double> exact_sector_probabilities(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v,
                                               int n_max)
{
  std::vector<double> e(static_cast<std::size_t>(std::max(n_max, 0) + 1), 0.0);
  e[0] = 1.0;
  if (omega.omega.size() > 0) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> eig(omega.omega.adjoint() * omega.omega, Eigen::EigenvaluesOnly);
    for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
      double const lambda = std::max(0.0, eig.eigenvalues()(i));
      for (std::size_t k = e.size() - 1; k >= 1; --k)
        e[k] += lambda * e[k - 1];
    }
  }
  double const vacuum = std::norm(c_v.c_v);
  for (double &x : e)
    x *= vacuum;
  return e;
}

SectorReport sector_probabilities(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v,
                                  ModeBasis const &basis, NumericsParams const &numerics, std::size_t top_k)
{
  return enumerate(omega, c_v, basis, numerics, top_k, false);
}

SectorReport sector_observables(PairAmplitudeMatrix const &omega, VacuumAmplitude const &c_v,
                                ModeBasis const &basis, NumericsParams const &numerics, std::size_t top_k)
{
  return enumerate(omega, c_v, basis, numerics, top_k, true);
}

std::string describe(ModeLabel const &label)
{
  std::string s = "n=" + std::string(label.n > 0 ? "+" : "") + std::to_string(label.n);
  s += label.spin == Spin::up ? ":up" : ":down";
  return s;
}

} // namespace pairfield

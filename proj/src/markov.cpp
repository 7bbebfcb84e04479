#include "rluroth/markov.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace rluroth {

namespace {

template <class T>
T as(const BigRational& q) {
  if constexpr (std::is_same_v<T, double>)
    return q.get_d();
  else
    return q;
}

std::size_t point_index(const std::vector<BigRational>& points, const BigRational& x) {
  auto it = std::lower_bound(points.begin(), points.end(), x);
  if (it == points.end() || *it != x) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - points.begin());
}

BigRational interval_max(const BigRational& a, const BigRational& b) { return a < b ? b : a; }
BigRational interval_min(const BigRational& a, const BigRational& b) { return a < b ? a : b; }

}  // namespace

MarkovPartition markov_points(const BigRational& c, std::size_t cap) {
  if (c <= 0 || c > BigRational(1, 2))
    throw DomainError("markov_points: c must lie in (0, 1/2], got " + to_fraction_string(c));
  const CutGeometry geo(c);
  const std::int64_t top = geo.max_digit();

  std::set<BigRational> critical{c, BigRational(1)};
  auto add_critical = [&](const BigRational& q) {
    if (q >= c && q <= 1) critical.insert(q);
  };
  for (std::int64_t n = 2; n <= top; ++n) {
    add_critical(geo.lower(n).exact);
    add_critical(geo.plus(n).exact);
    add_critical(geo.minus(n - 1).exact);
  }

  std::set<BigRational> orbit;
  std::deque<BigRational> queue;
  auto visit = [&](const BigRational& q) {
    if (orbit.insert(q).second) {
      if (orbit.size() + critical.size() > cap)
        throw CapExceeded("Markov point closure exceeded " + std::to_string(cap) + " points");
      queue.push_back(q);
    }
  };
  visit(c);
  visit(BigRational(1) - c);
  while (!queue.empty()) {
    const BigRational q = queue.front();
    queue.pop_front();
    for (int bit = 0; bit < 2; ++bit) visit(branch_map(bit, geo, q));
  }

  MarkovPartition part;
  part.c = c;
  std::set<BigRational> all = critical;
  all.insert(orbit.begin(), orbit.end());
  part.points.assign(all.begin(), all.end());
  for (const auto& q : part.points)
    part.origin.push_back(critical.count(q) ? PointOrigin::Critical : PointOrigin::Orbit);

  // Every zone boundary is a point, so the zone is constant on each open cell.
  part.images.resize(part.cells());
  for (std::size_t i = 0; i < part.cells(); ++i) {
    const BigRational& a = part.points[i];
    const BigRational& b = part.points[i + 1];
    const Location where = geo.locate(BigRational((a + b) / 2));
    for (int bit = 0; bit < 2; ++bit) {
      CellImage img;
      img.digit = where.digit;
      img.branch = branch_for(where.zone, bit);
      img.slope = digit_weight(where.digit);
      BigRational fa = apply_branch(img.branch, where.digit, a);
      BigRational fb = apply_branch(img.branch, where.digit, b);
      if (fb < fa) std::swap(fa, fb);
      img.first = point_index(part.points, fa);
      img.last = point_index(part.points, fb);
      if (img.first == static_cast<std::size_t>(-1) || img.last == static_cast<std::size_t>(-1))
        throw NotMarkov("image of [" + to_fraction_string(a) + ", " + to_fraction_string(b) +
                        "] under branch " + std::to_string(bit) + " is not a union of cells");
      part.images[i][bit] = std::move(img);
    }
  }
  return part;
}

template <class T>
DenseMatrix<T> transfer_matrix(const MarkovPartition& partition, const T& p) {
  const auto n = static_cast<Eigen::Index>(partition.cells());
  DenseMatrix<T> m = DenseMatrix<T>::Constant(n, n, T(0));
  const T weights[2] = {p, T(1) - p};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int bit = 0; bit < 2; ++bit) {
      const CellImage& img = partition.images[i][bit];
      const T w = weights[bit] / as<T>(BigRational(img.slope));
      for (std::size_t j = img.first; j < img.last; ++j) m(static_cast<Eigen::Index>(j), i) += w;
    }
  }
  return m;
}

template DenseMatrix<BigRational> transfer_matrix(const MarkovPartition&, const BigRational&);
template DenseMatrix<double> transfer_matrix(const MarkovPartition&, const double&);

// ---------------------------------------------------------------------------

template <class T>
T PiecewiseConstantDensity<T>::operator()(const BigRational& x) const {
  if (x < breakpoints.front() || x > breakpoints.back()) return T(0);
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  std::size_t i = static_cast<std::size_t>(it - breakpoints.begin());
  i = std::min(i, values.size());
  return values[i - 1];
}

template <class T>
T PiecewiseConstantDensity<T>::mass(const BigRational& a, const BigRational& b) const {
  T total(0);
  if (!(a < b)) return total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const BigRational lo = interval_max(a, breakpoints[i]);
    const BigRational hi = interval_min(b, breakpoints[i + 1]);
    if (lo < hi) total += values[i] * as<T>(BigRational(hi - lo));
  }
  return total;
}

template <class T>
PiecewiseConstantDensity<T> PiecewiseConstantDensity<T>::merged(double tolerance) const {
  PiecewiseConstantDensity out;
  out.c = c;
  out.breakpoints.push_back(breakpoints.front());
  for (std::size_t i = 0; i < values.size(); ++i) {
    bool same = false;
    if (!out.values.empty()) {
      if constexpr (std::is_same_v<T, double>)
        same = std::abs(out.values.back() - values[i]) <= tolerance;
      else
        same = out.values.back() == values[i];
    }
    if (same) {
      out.breakpoints.back() = breakpoints[i + 1];
    } else {
      out.values.push_back(values[i]);
      out.breakpoints.push_back(breakpoints[i + 1]);
    }
  }
  return out;
}

template struct PiecewiseConstantDensity<BigRational>;
template struct PiecewiseConstantDensity<double>;

namespace {

/// Nullspace of a square exact matrix by reduction to row echelon form.
std::vector<DenseVector<BigRational>> exact_kernel(DenseMatrix<BigRational> a) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  std::vector<Eigen::Index> pivot_cols;
  Eigen::Index r = 0;
  for (Eigen::Index col = 0; col < cols && r < rows; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < rows; ++i)
      if (a(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    a.row(r).swap(a.row(piv));
    const BigRational inv = BigRational(1) / a(r, col);
    for (Eigen::Index k = col; k < cols; ++k) a(r, k) *= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || a(i, col) == 0) continue;
      const BigRational f = a(i, col);
      for (Eigen::Index k = col; k < cols; ++k) a(i, k) -= f * a(r, k);
    }
    pivot_cols.push_back(col);
    ++r;
  }
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (auto pc : pivot_cols) is_pivot[static_cast<std::size_t>(pc)] = true;
  std::vector<DenseVector<BigRational>> basis;
  for (Eigen::Index free = 0; free < cols; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    DenseVector<BigRational> v = DenseVector<BigRational>::Constant(cols, BigRational(0));
    v(free) = 1;
    for (std::size_t k = 0; k < pivot_cols.size(); ++k)
      v(pivot_cols[k]) = -a(static_cast<Eigen::Index>(k), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
PiecewiseConstantDensity<T> normalised(const MarkovPartition& partition,
                                       const DenseVector<T>& v) {
  T total(0);
  for (std::size_t i = 0; i < partition.cells(); ++i)
    total += v(static_cast<Eigen::Index>(i)) * as<T>(partition.length(i));
  if (total == T(0)) throw NonUniqueFixedPoint("fixed point has zero mass");
  PiecewiseConstantDensity<T> out;
  out.c = partition.c;
  out.breakpoints = partition.points;
  for (std::size_t i = 0; i < partition.cells(); ++i)
    out.values.push_back(v(static_cast<Eigen::Index>(i)) / total);
  return out;
}

}  // namespace

PiecewiseConstantDensity<BigRational> stationary_density(const MarkovPartition& partition,
                                                         const BigRational& p) {
  if (p <= 0 || p >= 1) throw DomainError("stationary density requires 0 < p < 1");
  DenseMatrix<BigRational> a = transfer_matrix(partition, p);
  for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, i) -= 1;
  const auto kernel = exact_kernel(std::move(a));
  if (kernel.size() != 1)
    throw NonUniqueFixedPoint("fixed-point space has dimension " + std::to_string(kernel.size()));
  return normalised<BigRational>(partition, kernel.front());
}

PiecewiseConstantDensity<BigRational> stationary_density(const BigRational& c,
                                                         const BigRational& p) {
  return stationary_density(markov_points(c), p).merged();
}

PiecewiseConstantDensity<double> stationary_density_real(const MarkovPartition& partition,
                                                         double p, double tolerance) {
  if (!(p > 0 && p < 1)) throw DomainError("stationary density requires 0 < p < 1");
  const DenseMatrix<double> m = transfer_matrix(partition, p);
  DenseMatrix<double> a = m - DenseMatrix<double>::Identity(m.rows(), m.cols());
  Eigen::FullPivLU<DenseMatrix<double>> lu(a);
  lu.setThreshold(1e-10);
  const DenseMatrix<double> kernel = lu.kernel();
  if (kernel.cols() != 1)
    throw NonUniqueFixedPoint("fixed-point space has dimension " + std::to_string(kernel.cols()));
  auto density = normalised<double>(partition, kernel.col(0));
  DenseVector<double> v = DenseVector<double>::Map(density.values.data(),
                                                   static_cast<Eigen::Index>(density.values.size()));
  const double residual = (m * v - v).cwiseAbs().maxCoeff();
  if (residual > tolerance)
    throw NonUniqueFixedPoint("binary64 fixed point residual " + std::to_string(residual) +
                              " exceeds tolerance");
  return density;
}

PiecewiseConstantDensity<double> stationary_density_real(const BigRational& c, double p,
                                                         double tolerance) {
  return stationary_density_real(markov_points(c), p, tolerance).merged(tolerance);
}

// ---------------------------------------------------------------------------

template <class T>
std::vector<T> stationarity_residual(const PiecewiseConstantDensity<T>& density, const T& p,
                                     const std::vector<BigRational>& cells) {
  const CutGeometry geo(density.c);
  if (geo.unbounded()) throw DomainError("stationarity residual requires c > 0");
  const std::int64_t top = geo.max_digit();
  const T weights[2] = {p, T(1) - p};

  std::vector<T> out;
  for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
    const BigRational& a = cells[k];
    const BigRational& b = cells[k + 1];
    T rhs(0);
    for (std::int64_t n = 2; n <= top; ++n) {
      const BigRational w(digit_weight(n));
      const BigRational z = geo.lower(n).exact;
      const BigRational zp = geo.plus(n).exact;
      const BigRational zm = geo.minus(n - 1).exact;
      const BigRational z_prev = geo.lower(n - 1).exact;
      // Preimages of [a, b] under the two affine branches of digit n.
      const BigRational bn(n);
      const BigRational lur_lo = (a + bn - 1) / w, lur_hi = (b + bn - 1) / w;
      const BigRational alt_lo = (bn - b) / w, alt_hi = (bn - a) / w;
      // Where each map uses which branch: T_0 takes T_A on [z, z^+) and T_L
      // after; T_1 takes T_A up to z_{n-1}^- and T_L after.
      const BigRational switch_at[2] = {zp, zm};
      for (int bit = 0; bit < 2; ++bit) {
        const BigRational& s = switch_at[bit];
        T part = density.mass(interval_max(z, alt_lo), interval_min(s, alt_hi));
        part += density.mass(interval_max(s, lur_lo), interval_min(z_prev, lur_hi));
        rhs += weights[bit] * part;
      }
    }
    out.push_back(density.mass(a, b) - rhs);
  }
  return out;
}

template std::vector<BigRational> stationarity_residual(
    const PiecewiseConstantDensity<BigRational>&, const BigRational&,
    const std::vector<BigRational>&);
template std::vector<double> stationarity_residual(const PiecewiseConstantDensity<double>&,
                                                   const double&,
                                                   const std::vector<BigRational>&);

template <class T>
DigitFrequencies<T> digit_frequencies(const PiecewiseConstantDensity<T>& density, const T& p) {
  const CutGeometry geo(density.c);
  if (geo.unbounded()) throw DomainError("digit frequencies require c > 0");
  DigitFrequencies<T> out;
  for (std::int64_t d = 2; d <= geo.max_digit(); ++d) {
    const BigRational z = geo.lower(d).exact;
    const BigRational z_prev = geo.lower(d - 1).exact;
    const BigRational zp = geo.plus(d).exact;
    const BigRational zm = geo.minus(d - 1).exact;
    const T in_switch = density.mass(zp, zm);
    out.digit[d] = density.mass(z, z_prev);
    out.signed_digit[SignDigit{0, d}] = p * in_switch + density.mass(zm, z_prev);
    out.signed_digit[SignDigit{1, d}] = (T(1) - p) * in_switch + density.mass(z, zp);
  }
  return out;
}

template DigitFrequencies<BigRational> digit_frequencies(
    const PiecewiseConstantDensity<BigRational>&, const BigRational&);
template DigitFrequencies<double> digit_frequencies(const PiecewiseConstantDensity<double>&,
                                                    const double&);

template <class T>
double lyapunov_exact(const PiecewiseConstantDensity<T>& density) {
  const CutGeometry geo(density.c);
  if (geo.unbounded()) throw DomainError("lyapunov_exact requires c > 0");
  double total = 0.0;
  for (std::int64_t d = 2; d <= geo.max_digit(); ++d) {
    const T pi = density.mass(geo.lower(d).exact, geo.lower(d - 1).exact);
    const double dd = static_cast<double>(d);
    total += to_double(pi) * std::log(dd * (dd - 1.0));
  }
  return total;
}

template double lyapunov_exact(const PiecewiseConstantDensity<BigRational>&);
template double lyapunov_exact(const PiecewiseConstantDensity<double>&);

double lyapunov_exact(const BigRational& c, const BigRational& p) {
  return lyapunov_exact(stationary_density(c, p));
}

}  // namespace rluroth

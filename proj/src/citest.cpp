#include "mvpc/citest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvpc {

namespace {

constexpr int kMinRowsBeyondZ = 10;   // valid test needs n_eff >= |z| + 10
constexpr double kPivotTol = 1e-12;

}  // namespace

bool partial_correlation(std::vector<double>& corr, int k, double* out) {
  if (k == 2) {
    *out = corr[1];
    return true;
  }
  // Gauss-Jordan inversion with partial pivoting; k is small (2 + |z|).
  std::vector<double> inv(static_cast<size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) inv[static_cast<size_t>(i) * k + i] = 1.0;
  auto a = [&](std::vector<double>& m, int i, int j) -> double& {
    return m[static_cast<size_t>(i) * k + j];
  };
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int r = col + 1; r < k; ++r)
      if (std::fabs(a(corr, r, col)) > std::fabs(a(corr, pivot, col))) pivot = r;
    if (std::fabs(a(corr, pivot, col)) < kPivotTol) return false;
    if (pivot != col)
      for (int j = 0; j < k; ++j) {
        std::swap(a(corr, pivot, j), a(corr, col, j));
        std::swap(a(inv, pivot, j), a(inv, col, j));
      }
    double scale = 1.0 / a(corr, col, col);
    for (int j = 0; j < k; ++j) {
      a(corr, col, j) *= scale;
      a(inv, col, j) *= scale;
    }
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      double f = a(corr, r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < k; ++j) {
        a(corr, r, j) -= f * a(corr, col, j);
        a(inv, r, j) -= f * a(inv, col, j);
      }
    }
  }
  double d00 = a(inv, 0, 0), d11 = a(inv, 1, 1);
  if (!(d00 > 0.0) || !(d11 > 0.0)) return false;
  *out = -a(inv, 0, 1) / std::sqrt(d00 * d11);
  return true;
}

double fisher_z_p_value(double statistic) {
  // 2 * (1 - Phi(|t|)) written through erfc for tail accuracy.
  return std::erfc(std::fabs(statistic) / std::sqrt(2.0));
}

CiResult ci_test(std::span<const ColumnRef> cols, int n, int z_count, double alpha,
                 const double* row_weights, const int* row_subset,
                 int subset_count) {
  const int k = static_cast<int>(cols.size());
  if (k != z_count + 2) throw std::invalid_argument("column count must be |z| + 2");
  if (k > 16) throw std::invalid_argument("conditioning set too large (max 14)");

  const ColumnRef* cr = cols.data();
  // Masks actually present, gathered once.
  const unsigned char* masks[16];
  int mask_count = 0;
  for (int j = 0; j < k; ++j)
    if (cr[j].mask) masks[mask_count++] = cr[j].mask;

  const int scan_n = row_subset ? subset_count : n;

  double sw = 0.0, sww = 0.0;
  double sums[16] = {0};
  for (int t = 0; t < scan_n; ++t) {
    const int r = row_subset ? row_subset[t] : t;
    bool keep = true;
    for (int m = 0; m < mask_count; ++m)
      if (masks[m][r]) {
        keep = false;
        break;
      }
    if (!keep) continue;
    const double w = row_weights ? row_weights[r] : 1.0;
    sw += w;
    sww += w * w;
    for (int j = 0; j < k; ++j) sums[j] += w * cr[j].values[r];
  }

  CiResult res;
  const double n_eff = sww > 0.0 ? sw * sw / sww : 0.0;
  res.effective_n = static_cast<long long>(std::llround(n_eff));
  if (!(n_eff >= z_count + kMinRowsBeyondZ)) return res;  // degenerate

  double means[16];
  for (int j = 0; j < k; ++j) means[j] = sums[j] / sw;

  double moments[16 * 16] = {0};
  for (int t = 0; t < scan_n; ++t) {
    const int r = row_subset ? row_subset[t] : t;
    bool keep = true;
    for (int m = 0; m < mask_count; ++m)
      if (masks[m][r]) {
        keep = false;
        break;
      }
    if (!keep) continue;
    const double w = row_weights ? row_weights[r] : 1.0;
    double dvals[16];
    for (int j = 0; j < k; ++j) dvals[j] = cr[j].values[r] - means[j];
    for (int i = 0; i < k; ++i) {
      const double wi = w * dvals[i];
      for (int j = i; j < k; ++j) moments[i * 16 + j] += wi * dvals[j];
    }
  }

  std::vector<double> corr(static_cast<size_t>(k) * k, 1.0);
  for (int i = 0; i < k; ++i) {
    if (!(moments[i * 16 + i] > 0.0)) return res;  // constant column: degenerate
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      double c = moments[i * 16 + j] /
                 std::sqrt(moments[i * 16 + i] * moments[j * 16 + j]);
      corr[static_cast<size_t>(i) * k + j] = c;
      corr[static_cast<size_t>(j) * k + i] = c;
    }

  double r = 0.0;
  if (!partial_correlation(corr, k, &r)) return res;  // singular: degenerate
  r = std::clamp(r, -1.0, 1.0);

  res.degenerate = false;
  res.statistic = std::sqrt(n_eff - z_count - 3.0) * std::atanh(r);
  res.p_value = fisher_z_p_value(res.statistic);
  res.independent = res.p_value > alpha;
  return res;
}

namespace {

std::vector<ColumnRef> query_columns(const Dataset& d, const CiQuery& q) {
  std::vector<ColumnRef> cols;
  cols.reserve(q.z.size() + 2);
  cols.push_back({d.column_data(q.x), d.column_mask(q.x)});
  cols.push_back({d.column_data(q.y), d.column_mask(q.y)});
  for (int zc : q.z) cols.push_back({d.column_data(zc), d.column_mask(zc)});
  return cols;
}

}  // namespace

CiResult fisher_z(const Dataset& d, const CiQuery& q) {
  auto cols = query_columns(d, q);
  return ci_test(cols, d.rows(), static_cast<int>(q.z.size()), q.alpha);
}

CiResult fisher_z(const DataView& v, const CiQuery& q) {
  // The view's rows are already restricted to full observations of its
  // columns, so masks are not consulted again.
  auto in_view = [&](int col) {
    return std::find(v.cols.begin(), v.cols.end(), col) != v.cols.end();
  };
  if (!in_view(q.x) || !in_view(q.y))
    throw std::invalid_argument("query variable not part of the view");
  for (int zc : q.z)
    if (!in_view(zc)) throw std::invalid_argument("query variable not part of the view");

  std::vector<ColumnRef> cols;
  cols.reserve(q.z.size() + 2);
  cols.push_back({v.data->column_data(q.x), nullptr});
  cols.push_back({v.data->column_data(q.y), nullptr});
  for (int zc : q.z) cols.push_back({v.data->column_data(zc), nullptr});
  return ci_test(cols, v.data->rows(), static_cast<int>(q.z.size()), q.alpha,
                 nullptr, v.rows.data(), v.row_count());
}

CiResult weighted_fisher_z(const Dataset& d, const CiQuery& q,
                           std::span<const double> row_weights) {
  if (static_cast<int>(row_weights.size()) != d.rows())
    throw std::invalid_argument("one weight per dataset row required");
  for (double w : row_weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("weights must be finite and non-negative");
  auto cols = query_columns(d, q);
  return ci_test(cols, d.rows(), static_cast<int>(q.z.size()), q.alpha,
                 row_weights.data());
}

// --- kernel density ratio -----------------------------------------------------

namespace {

struct KdeModel {
  const std::vector<std::vector<double>>* dims;
  std::vector<double> inv_h;
  double norm;  // 1 / (n * (2*pi)^(d/2) * prod h_j)
};

KdeModel fit_kde(const std::vector<std::vector<double>>& dims) {
  const int d = static_cast<int>(dims.size());
  const size_t n = dims[0].size();
  KdeModel m;
  m.dims = &dims;
  m.inv_h.resize(d);
  double prod_h = 1.0;
  for (int j = 0; j < d; ++j) {
    double mean = 0.0;
    for (double v : dims[j]) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : dims[j]) ss += (v - mean) * (v - mean);
    double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    double h = sd * std::pow(4.0 / ((d + 2.0) * static_cast<double>(n)),
                             1.0 / (d + 4.0));
    if (!(h > 0.0)) h = 1e-6;  // constant sample dimension
    m.inv_h[j] = 1.0 / h;
    prod_h *= h;
  }
  m.norm = 1.0 / (static_cast<double>(n) *
                  std::pow(2.0 * 3.14159265358979323846, d / 2.0) * prod_h);
  return m;
}

double kde_at(const KdeModel& m, const std::vector<std::vector<double>>& eval,
              size_t point) {
  const int d = static_cast<int>(m.dims->size());
  const size_t n = (*m.dims)[0].size();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double q = 0.0;
    for (int j = 0; j < d; ++j) {
      double t = (eval[j][point] - (*m.dims)[j][i]) * m.inv_h[j];
      q += t * t;
    }
    if (q < 80.0) acc += std::exp(-0.5 * q);  // beyond that the kernel is ~0
  }
  return acc * m.norm;
}

}  // namespace

std::vector<double> kde_density_ratio(const std::vector<std::vector<double>>& numer,
                                      const std::vector<std::vector<double>>& denom,
                                      const std::vector<std::vector<double>>& eval,
                                      double clamp_eps) {
  const size_t d = numer.size();
  if (d == 0 || denom.size() != d || eval.size() != d)
    throw std::invalid_argument("density ratio needs matching dimensions");
  if (numer[0].empty() || denom[0].empty())
    throw std::invalid_argument("density ratio needs non-empty samples");
  for (size_t j = 1; j < d; ++j)
    if (numer[j].size() != numer[0].size() || denom[j].size() != denom[0].size() ||
        eval[j].size() != eval[0].size())
      throw std::invalid_argument("ragged sample in density ratio");
  if (!(clamp_eps > 0.0) || clamp_eps >= 1.0)
    throw std::invalid_argument("clamp epsilon must lie in (0, 1)");

  // Sphere multivariate input first: axis-aligned product kernels smear any
  // thin correlated ridge, and a linear change of coordinates multiplies
  // both densities by the same Jacobian, which cancels in the ratio — so
  // whitening costs nothing in the estimand and buys a kernel shape that
  // matches the data. The transform comes from the pooled sample covariance
  // (Cholesky), skipped in one dimension where a scale factor cancels anyway
  // and skipped when the covariance is too degenerate to factor.
  const std::vector<std::vector<double>>* pn = &numer;
  const std::vector<std::vector<double>>* pd = &denom;
  const std::vector<std::vector<double>>* pe = &eval;
  std::vector<std::vector<double>> wn, wd, we;
  if (d >= 2) {
    const double nn = static_cast<double>(numer[0].size());
    const double nd = static_cast<double>(denom[0].size());
    std::vector<double> mean(d, 0.0);
    for (size_t j = 0; j < d; ++j) {
      for (double v : numer[j]) mean[j] += v;
      for (double v : denom[j]) mean[j] += v;
      mean[j] /= nn + nd;
    }
    std::vector<double> cov(d * d, 0.0);
    for (size_t a = 0; a < d; ++a)
      for (size_t b = a; b < d; ++b) {
        double s = 0.0;
        for (size_t i = 0; i < numer[0].size(); ++i)
          s += (numer[a][i] - mean[a]) * (numer[b][i] - mean[b]);
        for (size_t i = 0; i < denom[0].size(); ++i)
          s += (denom[a][i] - mean[a]) * (denom[b][i] - mean[b]);
        cov[a * d + b] = cov[b * d + a] = s / (nn + nd - 1.0);
      }
    // Lower-triangular Cholesky; bail out to raw coordinates on failure.
    std::vector<double> chol(d * d, 0.0);
    bool ok = true;
    for (size_t a = 0; a < d && ok; ++a) {
      for (size_t b = 0; b <= a && ok; ++b) {
        double s = cov[a * d + b];
        for (size_t k = 0; k < b; ++k) s -= chol[a * d + k] * chol[b * d + k];
        if (a == b) {
          ok = s > 1e-12 * (1.0 + std::fabs(cov[a * d + a]));
          if (ok) chol[a * d + a] = std::sqrt(s);
        } else {
          chol[a * d + b] = s / chol[b * d + b];
        }
      }
    }
    if (ok) {
      auto whiten = [&](const std::vector<std::vector<double>>& in,
                        std::vector<std::vector<double>>& out_dims) {
        const size_t m = in[0].size();
        out_dims.assign(d, std::vector<double>(m));
        std::vector<double> u(d);
        for (size_t i = 0; i < m; ++i) {
          for (size_t a = 0; a < d; ++a) {  // forward-substitute L u = v - mean
            double s = in[a][i] - mean[a];
            for (size_t k = 0; k < a; ++k) s -= chol[a * d + k] * u[k];
            u[a] = s / chol[a * d + a];
          }
          for (size_t a = 0; a < d; ++a) out_dims[a][i] = u[a];
        }
      };
      whiten(numer, wn);
      whiten(denom, wd);
      whiten(eval, we);
      pn = &wn;
      pd = &wd;
      pe = &we;
    }
  }

  KdeModel mn = fit_kde(*pn);
  KdeModel md = fit_kde(*pd);
  // A ratio of two kernel estimates is only stable when both use the same
  // smoothing: mismatched bandwidths make the narrower estimate decay faster
  // at the support's edge and the ratio spike there for no data reason. Take
  // the wider bandwidth per dimension for both sides.
  for (size_t j = 0; j < d; ++j) {
    double shared = std::min(mn.inv_h[j], md.inv_h[j]);  // inverse: min = wider
    mn.norm *= shared / mn.inv_h[j];
    md.norm *= shared / md.inv_h[j];
    mn.inv_h[j] = shared;
    md.inv_h[j] = shared;
  }

  std::vector<double> out(eval[0].size());
  for (size_t i = 0; i < out.size(); ++i) {
    double fn = kde_at(mn, *pe, i);
    double fd = kde_at(md, *pe, i);
    double ratio;
    if (fn <= 0.0 && fd <= 0.0)
      ratio = 1.0;  // far outside both samples: no information
    else if (fd <= 0.0)
      ratio = 1.0 / clamp_eps;
    else
      ratio = fn / fd;
    out[i] = std::clamp(ratio, clamp_eps, 1.0 / clamp_eps);
  }
  return out;
}

}  // namespace mvpc

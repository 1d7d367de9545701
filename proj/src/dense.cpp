#include "cdme/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace cdme {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: dimension mismatch");
  }
  DenseMatrix c(a.rows(), b.cols());
  const int n = a.rows(), k_dim = a.cols(), m = b.cols();
  for (int i = 0; i < n; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (int k = 0; k < k_dim; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (int j = 0; j < m; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != static_cast<int>(x.size())) {
    throw std::invalid_argument("matvec: dimension mismatch");
  }
  std::vector<double> y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

double norm_one(const DenseMatrix& a) {
  double best = 0.0;
  for (int j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

LuFactors lu_factor(DenseMatrix a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("lu_factor: matrix must be square");
  }
  const int n = a.rows();
  LuFactors f{std::move(a), std::vector<int>(n)};
  DenseMatrix& m = f.lu;
  for (int i = 0; i < n; ++i) f.perm[i] = i;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(m(col, col));
    for (int i = col + 1; i < n; ++i) {
      const double v = std::abs(m(i, col));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best == 0.0) {
      throw std::runtime_error("lu_factor: singular matrix");
    }
    if (pivot != col) {
      std::swap(f.perm[col], f.perm[pivot]);
      for (int j = 0; j < n; ++j) std::swap(m(col, j), m(pivot, j));
    }
    const double inv = 1.0 / m(col, col);
    for (int i = col + 1; i < n; ++i) {
      const double l = m(i, col) * inv;
      m(i, col) = l;
      if (l == 0.0) continue;
      const double* src = m.row(col);
      double* dst = m.row(i);
      for (int j = col + 1; j < n; ++j) dst[j] -= l * src[j];
    }
  }
  return f;
}

std::vector<double> lu_solve(const LuFactors& f, std::span<const double> b) {
  const int n = f.lu.rows();
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    const double* row = f.lu.row(i);
    for (int j = 0; j < i; ++j) s -= row[j] * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    const double* row = f.lu.row(i);
    for (int j = i + 1; j < n; ++j) s -= row[j] * x[j];
    x[i] = s / row[i];
  }
  return x;
}

void lu_solve_inplace(const LuFactors& f, DenseMatrix& b) {
  const int n = f.lu.rows();
  const int m = b.cols();
  DenseMatrix out(n, m);
  for (int i = 0; i < n; ++i) {
    const double* src = b.row(f.perm[i]);
    double* dst = out.row(i);
    for (int j = 0; j < m; ++j) dst[j] = src[j];
  }
  // forward substitution
  for (int i = 0; i < n; ++i) {
    const double* lrow = f.lu.row(i);
    double* oi = out.row(i);
    for (int k = 0; k < i; ++k) {
      const double l = lrow[k];
      if (l == 0.0) continue;
      const double* ok = out.row(k);
      for (int j = 0; j < m; ++j) oi[j] -= l * ok[j];
    }
  }
  // back substitution
  for (int i = n - 1; i >= 0; --i) {
    const double* urow = f.lu.row(i);
    double* oi = out.row(i);
    for (int k = i + 1; k < n; ++k) {
      const double u = urow[k];
      if (u == 0.0) continue;
      const double* ok = out.row(k);
      for (int j = 0; j < m; ++j) oi[j] -= u * ok[j];
    }
    const double piv = urow[i];
    for (int j = 0; j < m; ++j) oi[j] /= piv;
  }
  b = std::move(out);
}

DenseMatrix expm(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("expm: matrix must be square");
  }
  const int n = a.rows();

  // Pade(13) coefficients and the associated scaling threshold.
  static const double b[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
  const double theta13 = 5.371920351148152;

  DenseMatrix scaled = a;
  const double eta = norm_one(a);
  int squarings = 0;
  if (eta > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(eta / theta13)));
    scaled *= std::ldexp(1.0, -squarings);
  }

  const DenseMatrix a2 = matmul(scaled, scaled);
  const DenseMatrix a4 = matmul(a2, a2);
  const DenseMatrix a6 = matmul(a2, a4);
  const DenseMatrix eye = DenseMatrix::identity(n);

  auto combine = [&](double c6, double c4, double c2) {
    DenseMatrix r = a6;
    r *= c6;
    DenseMatrix t = a4;
    t *= c4;
    r += t;
    t = a2;
    t *= c2;
    r += t;
    return r;
  };

  DenseMatrix u_inner = combine(b[13], b[11], b[9]);
  DenseMatrix u = matmul(a6, u_inner);
  {
    DenseMatrix t = combine(b[7], b[5], b[3]);
    u += t;
    t = eye;
    t *= b[1];
    u += t;
  }
  u = matmul(scaled, u);

  DenseMatrix v_inner = combine(b[12], b[10], b[8]);
  DenseMatrix v = matmul(a6, v_inner);
  {
    DenseMatrix t = combine(b[6], b[4], b[2]);
    v += t;
    t = eye;
    t *= b[0];
    v += t;
  }

  // r = (V - U)^{-1} (V + U)
  DenseMatrix vm = v;
  {
    DenseMatrix neg = u;
    neg *= -1.0;
    vm += neg;
  }
  DenseMatrix vp = v;
  vp += u;
  const LuFactors f = lu_factor(std::move(vm));
  lu_solve_inplace(f, vp);

  for (int s = 0; s < squarings; ++s) vp = matmul(vp, vp);
  return vp;
}

}  // namespace cdme

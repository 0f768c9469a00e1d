#pragma once

#include <unsupported/Eigen/FFT>

#include <vector>

#include "bohmflow/wave_field.hpp"

namespace bohmflow {

enum class Direction { forward, inverse };

/// Unitary DFT on a 1D/2D grid:
///   forward:  psi_hat[k] = N^{-1/2} sum_j psi[j] exp(-2 pi i j k / N)
///   inverse:  psi[j]     = N^{-1/2} sum_k psi_hat[k] exp(+2 pi i j k / N)
/// With this normalization sum |psi|^2 = sum |psi_hat|^2 (both times dx^d).
///
/// Holds cached FFT plans; an instance must not be shared between threads.
template <class Real>
class SpectralTransform {
 public:
  using Complex = std::complex<Real>;
  using Values = ComplexArray<Real>;

  explicit SpectralTransform(const BasicGrid<Real>& grid) : grid_(grid) {
    fft_.SetFlag(Eigen::FFT<Real>::Unscaled);
    scale_ = Real(1) / std::sqrt(static_cast<Real>(grid_.size()));
  }

  const BasicGrid<Real>& grid() const { return grid_; }

  Values forward(const Values& in) { return apply(in, Direction::forward); }
  Values inverse(const Values& in) { return apply(in, Direction::inverse); }

  Values apply(const Values& in, Direction dir) {
    if (in.size() != grid_.size()) throw GridMismatch("spectral transform: size mismatch");
    Values out(in.size());
    if (grid_.dimension() == 1) {
      run(out.data(), in.data(), grid_.axis(0).n, dir);
    } else {
      const Index nx = grid_.axis(0).n;
      const Index ny = grid_.axis(1).n;
      Values rows(in.size());
      for (Index i = 0; i < nx; ++i) {
        run(rows.data() + i * ny, in.data() + i * ny, ny, dir);
      }
      column_in_.resize(static_cast<std::size_t>(nx));
      column_out_.resize(static_cast<std::size_t>(nx));
      for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) column_in_[static_cast<std::size_t>(i)] = rows[i * ny + j];
        run(column_out_.data(), column_in_.data(), nx, dir);
        for (Index i = 0; i < nx; ++i) out[i * ny + j] = column_out_[static_cast<std::size_t>(i)];
      }
    }
    out *= scale_;
    return out;
  }

 private:
  void run(Complex* dst, const Complex* src, Index n, Direction dir) {
    if (dir == Direction::forward) {
      fft_.fwd(dst, src, n);
    } else {
      fft_.inv(dst, src, n);
    }
  }

  BasicGrid<Real> grid_;
  Eigen::FFT<Real> fft_;
  Real scale_{};
  std::vector<Complex> column_in_;
  std::vector<Complex> column_out_;
};

template <class Real>
ComplexArray<Real> spectral_transform(const BasicWaveField<Real>& field, Direction dir) {
  SpectralTransform<Real> t(field.grid());
  return t.apply(field.values(), dir);
}

namespace detail {

/// i*k along `axis`, with the Nyquist bin of even-length axes zeroed so that
/// odd derivatives of real data stay real.
template <class Real>
ComplexArray<Real> derivative_symbol(const BasicGrid<Real>& g, int axis) {
  const auto& ax = g.axis(axis);
  ComplexArray<Real> sym(g.size());
  for (Index p = 0; p < g.size(); ++p) {
    const Index j = g.axis_index(p, axis);
    const bool nyquist = (ax.n % 2 == 0) && j == ax.n / 2;
    sym[p] = nyquist ? std::complex<Real>(0) : std::complex<Real>(0, ax.wavenumber(j));
  }
  return sym;
}

}  // namespace detail

/// First and second spectral derivatives of one field, sharing a single
/// forward transform.
template <class Real>
struct SpectralDerivatives {
  std::vector<ComplexArray<Real>> gradient;  // one entry per axis
  ComplexArray<Real> laplacian;
};

template <class Real>
SpectralDerivatives<Real> spectral_derivatives(SpectralTransform<Real>& t,
                                               const ComplexArray<Real>& values,
                                               bool with_laplacian = true) {
  const auto& g = t.grid();
  const ComplexArray<Real> spec = t.forward(values);
  SpectralDerivatives<Real> out;
  for (int a = 0; a < g.dimension(); ++a) {
    out.gradient.push_back(t.inverse(spec * detail::derivative_symbol(g, a)));
  }
  if (with_laplacian) {
    out.laplacian = t.inverse(spec * (-g.wavenumber_sq()).template cast<std::complex<Real>>());
  }
  return out;
}

template <class Real>
ComplexArray<Real> gradient(const BasicWaveField<Real>& field, int axis) {
  SpectralTransform<Real> t(field.grid());
  return t.inverse(t.forward(field.values()) * detail::derivative_symbol(field.grid(), axis));
}

template <class Real>
ComplexArray<Real> laplacian(const BasicWaveField<Real>& field) {
  SpectralTransform<Real> t(field.grid());
  const ComplexArray<Real> symbol = (-field.grid().wavenumber_sq()).template cast<std::complex<Real>>();
  return t.inverse(t.forward(field.values()) * symbol);
}

/// Spectral derivative of real samples along `axis`.
template <class Real>
RealArray<Real> real_derivative(SpectralTransform<Real>& t, const RealArray<Real>& f, int axis) {
  const ComplexArray<Real> c = f.template cast<std::complex<Real>>();
  return t.inverse(t.forward(c) * detail::derivative_symbol(t.grid(), axis)).real();
}

/// Spectral divergence of a vector field stored one column per axis.
template <class Real>
RealArray<Real> divergence(const BasicGrid<Real>& g, const VectorFieldArray<Real>& v) {
  if (v.rows() != g.size() || v.cols() != g.dimension()) {
    throw GridMismatch("divergence: vector field shape does not match grid");
  }
  SpectralTransform<Real> t(g);
  RealArray<Real> out = RealArray<Real>::Zero(g.size());
  for (int a = 0; a < g.dimension(); ++a) out += real_derivative<Real>(t, v.col(a), a);
  return out;
}

}  // namespace bohmflow

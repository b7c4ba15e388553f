#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "hagerlab/fourier_symbol.hpp"

namespace hagerlab {

/// Dense complex matrix, row-major, with a logical index offset so the
/// discretized operator can be addressed by Fourier indices j,k in [-N, N].
/// Plain square matrices use offset 0.
class ComplexDenseMatrix {
 public:
  explicit ComplexDenseMatrix(int dim, int offset = 0)
      : dim_(dim), offset_(offset), data_(static_cast<size_t>(dim) * dim) {}

  int dim() const { return dim_; }
  int offset() const { return offset_; }

  Complex& at(int j, int k) {
    return data_[static_cast<size_t>(j + offset_) * dim_ + (k + offset_)];
  }
  const Complex& at(int j, int k) const {
    return data_[static_cast<size_t>(j + offset_) * dim_ + (k + offset_)];
  }

  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }

  double frobenius_norm() const;

  /// (lower, upper) bandwidth in storage indices; (0,0) for diagonal.
  std::pair<int, int> bandwidth() const;

 private:
  int dim_;
  int offset_;
  std::vector<Complex> data_;
};

/// Fourier-space discretization H[j,k] = h j [j=k] + g_{j-k}, j,k in [-N,N].
/// Throws TruncationTooSmall for N below the symbol order.
ComplexDenseMatrix assemble_operator(const FourierSymbol& symbol, double h, int n_trunc);

/// Deterministic stream of standard complex Gaussians N_C(0,1) with
/// E|alpha|^2 = 1: Box-Muller over raw mt19937_64 output, so the sequence is
/// bit-identical across platforms for a fixed seed.
class GaussianStream {
 public:
  explicit GaussianStream(uint64_t seed) : rng_(seed) {}

  Complex next();

  /// Splitmix64-mixed seed for trial substream t; decorrelates trials while
  /// keeping them reproducible and order-independent.
  static uint64_t substream_seed(uint64_t seed, uint64_t t);

 private:
  std::mt19937_64 rng_;
};

/// dim x dim matrix of independent N_C(0,1) entries drawn from the stream.
ComplexDenseMatrix sample_gaussian(int dim, GaussianStream& stream);

/// All eigenvalues with multiplicity (dense non-Hermitian solve: balancing,
/// Hessenberg reduction, shifted QR).  Triangular inputs return their
/// diagonal exactly.  Throws NoConvergence on QR failure, naming how many
/// eigenvalues did converge.
std::vector<Complex> eigenvalues(const ComplexDenseMatrix& a);

/// ln |det A| via LU; the independent oracle for eigenvalue products.
double log_abs_det(const ComplexDenseMatrix& a);

struct SingularTriplet {
  double sigma;
  std::vector<Complex> right;
  std::vector<Complex> left;
  bool at_noise_floor;
};

/// The `count` smallest singular values of (A - z I), ascending.  Uses the
/// bidiagonal/banded reduction when the matrix is banded, the full SVD
/// otherwise; values below 1e-14 * ||A|| are reported as computed (callers
/// consult the triplet flag or their own floor).
std::vector<double> smallest_singular_values(const ComplexDenseMatrix& a, Complex z,
                                             int count);

/// As above but with unit left/right singular vectors; full SVD for
/// dim <= 2049, shifted inverse iteration on the normal equations beyond.
std::vector<SingularTriplet> smallest_singular_triplets(const ComplexDenseMatrix& a,
                                                        Complex z, int count);

}  // namespace hagerlab

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hagerlab/dense_matrix.hpp"
#include "oracles.hpp"

using namespace hagerlab;
using std::numbers::pi;

namespace {

FourierSymbol exp_minus_ix() { return FourierSymbol({{-1, {1.0, 0.0}}}); }

ComplexDenseMatrix random_matrix(int dim, uint64_t seed) {
  GaussianStream stream(seed);
  return sample_gaussian(dim, stream);
}

std::vector<Complex> sorted_by_real(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

// Gaussian elimination with partial pivoting; test-local solver used as the
// independent oracle for sigma_min = 1/||A^-1||.
struct GESolver {
  int n;
  std::vector<Complex> lu;
  std::vector<int> piv;

  explicit GESolver(const ComplexDenseMatrix& a)
      : n(a.dim()), lu(a.data(), a.data() + static_cast<size_t>(a.dim()) * a.dim()),
        piv(a.dim()) {
    for (int c = 0; c < n; ++c) {
      int best = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(lu[r * n + c]) > std::abs(lu[best * n + c])) best = r;
      piv[c] = best;
      if (best != c)
        for (int k = 0; k < n; ++k) std::swap(lu[c * n + k], lu[best * n + k]);
      for (int r = c + 1; r < n; ++r) {
        const Complex f = lu[r * n + c] / lu[c * n + c];
        lu[r * n + c] = f;
        for (int k = c + 1; k < n; ++k) lu[r * n + k] -= f * lu[c * n + k];
      }
    }
  }

  std::vector<Complex> solve(std::vector<Complex> b, bool adjoint) const {
    // The pivot sweeps must run separately from the substitutions: the
    // stored L carries the fully permuted rows.
    if (!adjoint) {
      for (int c = 0; c < n; ++c)
        if (piv[c] != c) std::swap(b[c], b[piv[c]]);
      for (int c = 0; c < n; ++c)
        for (int r = c + 1; r < n; ++r) b[r] -= lu[r * n + c] * b[c];
      for (int r = n - 1; r >= 0; --r) {
        for (int k = r + 1; k < n; ++k) b[r] -= lu[r * n + k] * b[k];
        b[r] /= lu[r * n + r];
      }
    } else {
      // Solve A^H x = b via (PA = LU) => A^H = U^H L^H P.
      for (int r = 0; r < n; ++r) {
        for (int k = 0; k < r; ++k) b[r] -= std::conj(lu[k * n + r]) * b[k];
        b[r] /= std::conj(lu[r * n + r]);
      }
      for (int r = n - 1; r >= 0; --r)
        for (int k = r + 1; k < n; ++k) b[r] -= std::conj(lu[k * n + r]) * b[k];
      for (int r = n - 1; r >= 0; --r)
        if (piv[r] != r) std::swap(b[r], b[piv[r]]);
    }
    return b;
  }
};

double vec_norm(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const Complex& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("operator assembly in Fourier space") {
  const FourierSymbol g = exp_minus_ix();
  const ComplexDenseMatrix h3 = assemble_operator(g, 0.5, 1);
  REQUIRE(h3.dim() == 3);
  CHECK(h3.at(-1, -1) == Complex(-0.5, 0.0));
  CHECK(h3.at(0, 0) == Complex(0.0, 0.0));
  CHECK(h3.at(1, 1) == Complex(0.5, 0.0));
  CHECK(h3.at(-1, 0) == Complex(1.0, 0.0));
  CHECK(h3.at(0, 1) == Complex(1.0, 0.0));
  CHECK(h3.at(0, -1) == Complex(0.0, 0.0));
  CHECK(h3.at(1, -1) == Complex(0.0, 0.0));

  // Flat symbol: diagonal h*j.
  const FourierSymbol zero({{0, {0.0, 0.0}}});
  const ComplexDenseMatrix d = assemble_operator(zero, 0.25, 2);
  for (int j = -2; j <= 2; ++j) CHECK(d.at(j, j) == Complex(0.25 * j, 0.0));

  CHECK_THROWS_WITH_AS((void)assemble_operator(g, 0.5, 0),
                       doctest::Contains("TruncationTooSmall"), Error);
}

TEST_CASE("unperturbed spectrum is exactly h Z") {
  const FourierSymbol g = exp_minus_ix();
  const int n = 40;
  const double h = 0.05;
  const ComplexDenseMatrix op = assemble_operator(g, h, n);
  const std::vector<Complex> eigs = sorted_by_real(eigenvalues(op));
  REQUIRE(static_cast<int>(eigs.size()) == 2 * n + 1);
  for (int j = -n; j <= n; ++j) CHECK(eigs[j + n] == Complex(h * j, 0.0));
}

TEST_CASE("gaussian sampler: determinism and moments") {
  GaussianStream s1(42), s2(42);
  const ComplexDenseMatrix a = sample_gaussian(16, s1);
  const ComplexDenseMatrix b = sample_gaussian(16, s2);
  for (int i = 0; i < 16; ++i)
    for (int k = 0; k < 16; ++k) CHECK(a.at(i, k) == b.at(i, k));

  GaussianStream s3(7);
  const int n = 1000;  // 1e6 variates
  const ComplexDenseMatrix m = sample_gaussian(n, s3);
  double sum_sq = 0.0;
  Complex sum(0.0, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      sum_sq += std::norm(m.at(i, k));
      sum += m.at(i, k);
    }
  const double total = static_cast<double>(n) * n;
  CHECK(sum_sq / total > 0.995);
  CHECK(sum_sq / total < 1.005);
  CHECK(std::abs(sum.real() / total) < 0.005);
  CHECK(std::abs(sum.imag() / total) < 0.005);

  CHECK(GaussianStream::substream_seed(1, 0) != GaussianStream::substream_seed(1, 1));
  CHECK(GaussianStream::substream_seed(1, 0) != GaussianStream::substream_seed(2, 0));
}

TEST_CASE("gaussian sampler: chi-square on |alpha|^2 (exponential bins)") {
  GaussianStream s(123);
  const int n = 1000;
  const ComplexDenseMatrix m = sample_gaussian(n, s);
  constexpr int kBins = 64;
  std::vector<double> observed(kBins, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double u = 1.0 - std::exp(-std::norm(m.at(i, k)));  // uniform on [0,1)
      int bin = static_cast<int>(u * kBins);
      bin = std::clamp(bin, 0, kBins - 1);
      observed[bin] += 1.0;
    }
  const double expected = static_cast<double>(n) * n / kBins;
  double stat = 0.0;
  for (double o : observed) stat += (o - expected) * (o - expected) / expected;
  // chi2 quantile at 1 - 1e-6 with 63 degrees of freedom.
  CHECK(stat < 131.3697020515818);
}

TEST_CASE("eigenvalues: triangular, companion, similarity, trace and det") {
  // Upper-triangular input returns the diagonal exactly.
  ComplexDenseMatrix tri(5);
  GaussianStream s(9);
  for (int i = 0; i < 5; ++i)
    for (int k = i; k < 5; ++k) tri.at(i, k) = s.next();
  const std::vector<Complex> te = sorted_by_real(eigenvalues(tri));
  std::vector<Complex> diag;
  for (int i = 0; i < 5; ++i) diag.push_back(tri.at(i, i));
  diag = sorted_by_real(diag);
  for (int i = 0; i < 5; ++i) CHECK(te[i] == diag[i]);

  // Companion matrix of z^3 - 1: the cube roots of unity.
  ComplexDenseMatrix comp(3);
  comp.at(0, 2) = 1.0;
  comp.at(1, 0) = 1.0;
  comp.at(2, 1) = 1.0;
  std::vector<Complex> roots = eigenvalues(comp);
  std::sort(roots.begin(), roots.end(),
            [](Complex a, Complex b) { return std::arg(a) < std::arg(b); });
  const std::vector<Complex> expect = {std::polar(1.0, -2 * pi / 3), Complex(1.0, 0.0),
                                       std::polar(1.0, 2 * pi / 3)};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(roots[i] - expect[i]) <= 1e-12);

  // Similarity invariance under a random permutation.
  const int n = 12;
  const ComplexDenseMatrix a = random_matrix(n, 31);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  ComplexDenseMatrix pap(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) pap.at(perm[i], perm[k]) = a.at(i, k);
  const auto ea = sorted_by_real(eigenvalues(a));
  const auto ep = sorted_by_real(eigenvalues(pap));
  for (int i = 0; i < n; ++i) CHECK(std::abs(ea[i] - ep[i]) <= 1e-10);

  // Trace and determinant identities at dim 64.
  const int big = 64;
  const ComplexDenseMatrix b = random_matrix(big, 77);
  const auto eb = eigenvalues(b);
  Complex tr_eig(0.0, 0.0), tr(0.0, 0.0);
  double log_prod = 0.0;
  for (const Complex& l : eb) {
    tr_eig += l;
    log_prod += std::log(std::abs(l));
  }
  for (int i = 0; i < big; ++i) tr += b.at(i, i);
  CHECK(std::abs(tr_eig - tr) <= 1e-9 * big * b.frobenius_norm());
  CHECK(log_prod == doctest::Approx(log_abs_det(b)).epsilon(1e-6));
}

TEST_CASE("smallest singular triplets: diagonal, exact kernel, products") {
  ComplexDenseMatrix d2(2);
  d2.at(0, 0) = 3.0;
  d2.at(1, 1) = 1e-5;
  const auto t = smallest_singular_triplets(d2, Complex(0.0, 0.0), 2);
  CHECK(t[0].sigma == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(t[1].sigma == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(!t[0].at_noise_floor);

  // z on the spectrum of the triangular operator: exact singularity.
  const FourierSymbol g = exp_minus_ix();
  const ComplexDenseMatrix op = assemble_operator(g, 0.05, 100);
  const auto sing = smallest_singular_triplets(op, Complex(0.05 * 17, 0.0), 1);
  CHECK(sing[0].sigma <= 1e-13 * op.frobenius_norm());
  CHECK(sing[0].at_noise_floor);

  // Product of all singular values equals |det|.
  const ComplexDenseMatrix r8 = random_matrix(8, 21);
  const auto sv = smallest_singular_values(r8, Complex(0.0, 0.0), 8);
  double log_prod = 0.0;
  for (double sigma : sv) log_prod += std::log(sigma);
  CHECK(log_prod == doctest::Approx(log_abs_det(r8)).epsilon(1e-8));
}

TEST_CASE("singular triplets satisfy A r = sigma l with unit vectors") {
  const int n = 30;
  const ComplexDenseMatrix a = random_matrix(n, 55);
  const Complex z(0.3, -0.2);
  const auto trip = smallest_singular_triplets(a, z, 2);
  CHECK(trip[0].sigma <= trip[1].sigma);
  for (const SingularTriplet& t : trip) {
    CHECK(std::abs(vec_norm(t.right) - 1.0) <= 1e-12);
    CHECK(std::abs(vec_norm(t.left) - 1.0) <= 1e-12);
    std::vector<Complex> av(n, Complex(0.0, 0.0));
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) av[i] += a.at(i, k) * t.right[k];
      av[i] -= z * t.right[i];
      av[i] -= t.sigma * t.left[i];
    }
    CHECK(vec_norm(av) <= 1e-8 * a.frobenius_norm());
  }
}

TEST_CASE("sigma_min equals the reciprocal resolvent norm (power-iteration oracle)") {
  const int n = 40;
  ComplexDenseMatrix a = random_matrix(n, 3);
  const Complex z(0.1, 0.2);
  const double sigma0 = smallest_singular_values(a, z, 1)[0];

  ComplexDenseMatrix shifted = a;
  for (int i = 0; i < n; ++i) shifted.at(i, i) -= z;
  const GESolver solver(shifted);
  GaussianStream s(11);
  std::vector<Complex> v(n);
  for (Complex& x : v) x = s.next();
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const double nv = vec_norm(v);
    for (Complex& x : v) x /= nv;
    v = solver.solve(solver.solve(v, true), false);  // (B^H B)^{-1} v
    lambda = vec_norm(v);
  }
  CHECK(sigma0 == doctest::Approx(1.0 / std::sqrt(lambda)).epsilon(1e-6));
}

TEST_CASE("banded and bidiagonal fast paths agree with the dense SVD") {
  // Upper-bidiagonal operator (g = e^{-ix}).
  const FourierSymbol g = exp_minus_ix();
  const ComplexDenseMatrix op = assemble_operator(g, 0.05, 150);
  const Complex z(0.3, 0.2);
  const auto fast = smallest_singular_values(op, z, 2);
  const auto dense = smallest_singular_triplets(op, z, 2);
  CHECK(fast[0] == doctest::Approx(dense[0].sigma).epsilon(1e-10));
  CHECK(fast[1] == doctest::Approx(dense[1].sigma).epsilon(1e-10));

  // General banded symbol exercising the band reduction.
  const FourierSymbol g3({{-1, {1.0, 0.0}}, {2, {0.2, 0.1}}, {0, {0.05, 0.0}}});
  const ComplexDenseMatrix op3 = assemble_operator(g3, 0.05, 140);
  const auto fast3 = smallest_singular_values(op3, z, 2);
  const auto dense3 = smallest_singular_triplets(op3, z, 2);
  CHECK(fast3[0] == doctest::Approx(dense3[0].sigma).epsilon(1e-9));
  CHECK(fast3[1] == doctest::Approx(dense3[1].sigma).epsilon(1e-9));
}

TEST_CASE("inverse iteration above the full-SVD cutoff" * doctest::skip(false)) {
  const FourierSymbol g = exp_minus_ix();
  const ComplexDenseMatrix op = assemble_operator(g, 2e-3, 1025);  // dim 2051
  REQUIRE(op.dim() > 2049);
  // Near the strip edge, where S/h stays small enough for sigma_0 to be
  // representable at this h.
  const Complex z(0.2, 0.95);
  const auto values = smallest_singular_values(op, z, 2);  // bidiagonal route
  const auto trip = smallest_singular_triplets(op, z, 2);  // inverse iteration
  CHECK(trip[0].sigma == doctest::Approx(values[0]).epsilon(1e-6));
  CHECK(trip[1].sigma == doctest::Approx(values[1]).epsilon(1e-6));
  const int n = op.dim();
  std::vector<Complex> av(n, Complex(0.0, 0.0));
  for (int i = 0; i < n; ++i) {
    const int row = i - op.offset();
    // banded: only k = i-1 (diagonal) and superdiagonal contribute
    for (int k = std::max(0, i - 1); k <= std::min(n - 1, i + 1); ++k)
      av[i] += op.at(row, k - op.offset()) * trip[0].right[k];
    av[i] -= z * trip[0].right[i];
    av[i] -= trip[0].sigma * trip[0].left[i];
  }
  CHECK(vec_norm(av) <= 1e-8 * op.frobenius_norm());
}

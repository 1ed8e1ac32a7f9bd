#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "osic/detectors.hpp"
#include "test_support.hpp"

using namespace osic;
using osic::test::max_abs_diff;
using osic::test::random_matrix;
using osic::test::random_vector;

namespace {

ComplexVector random_symbols(std::size_t n, const Constellation& c, std::mt19937_64& gen) {
  ComplexVector x(n);
  for (auto& s : x) s = c.point(gen() % c.size());
  return x;
}

// Straight-line 2x2 inverse, independent of the library's Gauss-Jordan.
ComplexMatrix inverse_2x2(const ComplexMatrix& a) {
  const Complex det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return ComplexMatrix(2, 2, {a(1, 1) / det, -a(0, 1) / det, -a(1, 0) / det, a(0, 0) / det});
}

}  // namespace

TEST_CASE("nulling_matrix") {
  const SnrSpec snr = SnrSpec::from_noise_var(0.5);

  SUBCASE("identity channel") {
    const ComplexMatrix eye = ComplexMatrix::identity(2);
    const NullingResult zf = nulling_matrix(eye, NullingCore::Zf, snr);
    CHECK(zf.g == eye);
    CHECK(zf.order_metric == std::vector<double>{1.0, 1.0});
    const NullingResult mmse = nulling_matrix(eye, NullingCore::Mmse, SnrSpec::from_noise_var(1.0));
    CHECK(max_abs_diff(mmse.g, 0.5 * eye) < 1e-15);
    CHECK(mmse.order_metric == std::vector<double>{0.5, 0.5});
  }

  SUBCASE("ZF on a tall channel is the pseudo-inverse") {
    std::mt19937_64 gen(20);
    const ComplexMatrix h = random_matrix(6, 4, gen);
    const NullingResult r = nulling_matrix(h, NullingCore::Zf, snr);
    CHECK(max_abs_diff(matmul(r.g, h), ComplexMatrix::identity(4)) < 1e-10);
    const auto norms = row_norms(r.g);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r.order_metric[i] == doctest::Approx(norms[i]));
  }

  SUBCASE("MMSE on a diagonal channel") {
    const ComplexMatrix h(2, 2, {2.0, 0.0, 0.0, 1.0});
    const NullingResult r = nulling_matrix(h, NullingCore::Mmse, snr);
    // D = diag(1/4.5, 1/1.5), G = D h^H.
    CHECK(r.order_metric[0] == doctest::Approx(1.0 / 4.5));
    CHECK(r.order_metric[1] == doctest::Approx(1.0 / 1.5));
    CHECK(std::abs(r.g(0, 0) - 2.0 / 4.5) < 1e-14);
    CHECK(std::abs(r.g(1, 1) - 1.0 / 1.5) < 1e-14);
    CHECK(std::abs(r.g(0, 1)) < 1e-15);
  }

  SUBCASE("MMSE against a 2x2 closed form") {
    std::mt19937_64 gen(21);
    for (int t = 0; t < 100; ++t) {
      const ComplexMatrix h = random_matrix(2, 2, gen);
      const ComplexMatrix d = inverse_2x2(gram(h) + ComplexMatrix(2, 2, {0.5, 0.0, 0.0, 0.5}));
      const NullingResult r = nulling_matrix(h, NullingCore::Mmse, snr);
      CHECK(max_abs_diff(r.g, matmul(d, hermitian(h))) < 1e-9);
      CHECK(r.order_metric[0] == doctest::Approx(d(0, 0).real()));
    }
  }

  SUBCASE("MMSE approaches ZF as noise vanishes") {
    std::mt19937_64 gen(22);
    const ComplexMatrix h = random_matrix(4, 4, gen);
    const auto mmse = nulling_matrix(h, NullingCore::Mmse, SnrSpec::from_noise_var(1e-12));
    const auto zf = nulling_matrix(h, NullingCore::Zf, snr);
    CHECK(max_abs_diff(mmse.g, zf.g) < 1e-6);
  }

  SUBCASE("ZF ordering is invariant to scaling the channel") {
    std::mt19937_64 gen(23);
    const ComplexMatrix h = random_matrix(5, 5, gen);
    const auto a = nulling_matrix(h, NullingCore::Zf, snr);
    const auto b = nulling_matrix(Complex(3.7, -1.2) * h, NullingCore::Zf, snr);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(b.order_metric[i] == doctest::Approx(a.order_metric[i] / std::abs(Complex(3.7, -1.2))));
    }
  }
}

TEST_CASE("linear_detect") {
  const auto& c = Constellation::qpsk();
  std::mt19937_64 gen(24);
  const SnrSpec snr = SnrSpec::from_noise_var(0.1);
  for (int t = 0; t < 200; ++t) {
    const ComplexMatrix h = random_matrix(2, 2, gen);
    const ComplexVector y = random_vector(2, gen);
    for (auto core : {NullingCore::Zf, NullingCore::Mmse}) {
      ComplexMatrix g = inverse_2x2(h);
      if (core == NullingCore::Mmse) {
        g = matmul(inverse_2x2(gram(h) + ComplexMatrix(2, 2, {0.1, 0.0, 0.0, 0.1})), hermitian(h));
      }
      const ComplexVector z{g(0, 0) * y[0] + g(0, 1) * y[1], g(1, 0) * y[0] + g(1, 1) * y[1]};
      const ComplexVector got = linear_detect(h, y, core, snr, c);
      // Skip draws that land within rounding of a decision boundary.
      if (std::min({std::abs(z[0].real()), std::abs(z[0].imag()), std::abs(z[1].real()),
                    std::abs(z[1].imag())}) < 1e-9) {
        continue;
      }
      CHECK(got[0] == slice(z[0], c));
      CHECK(got[1] == slice(z[1], c));
    }
  }
}

TEST_CASE("vblast_detect") {
  const auto& qam = Constellation::qam16();

  SUBCASE("zero iterations equals the linear detector") {
    std::mt19937_64 gen(25);
    for (int t = 0; t < 1000; ++t) {
      const ComplexMatrix h = random_matrix(4, 4, gen);
      const ComplexVector y = random_vector(4, gen);
      const SnrSpec snr = SnrSpec::from_noise_var(0.2);
      for (auto core : {NullingCore::Zf, NullingCore::Mmse}) {
        const auto trace = vblast_detect(h, y, {core, 0}, snr, qam);
        CHECK(trace.order.empty());
        CHECK(trace.symbols == linear_detect(h, y, core, snr, qam));
      }
    }
  }

  SUBCASE("noiseless full V-BLAST is exact and follows the post-deflation order") {
    std::mt19937_64 gen(26);
    const SnrSpec snr = SnrSpec::from_noise_var(1e-15);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 2 + t % 7;
      const ComplexMatrix h = random_matrix(n, n, gen);
      const ComplexVector x = random_symbols(n, qam, gen);
      const ComplexVector y = matvec(h, x);
      for (auto core : {NullingCore::Zf, NullingCore::Mmse}) {
        for (int iters = 0; iters < static_cast<int>(n); ++iters) {
          const auto trace = vblast_detect(h, y, {core, iters}, snr, qam);
          CHECK(trace.symbols == x);
          CHECK(trace.order.size() == static_cast<std::size_t>(iters));
        }
        // Oracle for the order: at each step pick the smallest diag((H^H H)^-1)
        // of the remaining columns.
        const auto trace = vblast_detect(h, y, {core, static_cast<int>(n) - 1}, snr, qam);
        std::vector<std::size_t> left(n);
        std::iota(left.begin(), left.end(), 0);
        for (std::size_t step = 0; step + 1 < n; ++step) {
          ComplexMatrix sub(n, left.size());
          for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t k = 0; k < left.size(); ++k) sub(r, k) = h(r, left[k]);
          }
          const ComplexMatrix d = inverse(gram(sub));
          std::size_t best = 0;
          for (std::size_t k = 1; k < left.size(); ++k) {
            if (d(k, k).real() < d(best, best).real()) best = k;
          }
          CHECK(trace.order[step] == left[best]);
          left.erase(left.begin() + static_cast<std::ptrdiff_t>(best));
        }
        std::vector<std::size_t> seen = trace.order;
        std::sort(seen.begin(), seen.end());
        CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
      }
    }
  }

  SUBCASE("strongest stream first on a diagonal channel") {
    const ComplexMatrix h(2, 2, {2.0, 0.0, 0.0, 1.0});
    const ComplexVector x{qam.point(3), qam.point(12)};
    const auto trace =
        vblast_detect(h, matvec(h, x), {NullingCore::Zf, 1}, SnrSpec::from_noise_var(0.1), qam);
    REQUIRE(trace.order.size() == 1);
    CHECK(trace.order[0] == 0);
    CHECK(std::abs(trace.nulled[0] - x[0]) < 1e-12);
    CHECK(trace.symbols == x);
    CHECK(trace.labels == std::vector<std::size_t>{3, 12});
  }

  SUBCASE("2x2 single cancellation against a straight-line oracle") {
    std::mt19937_64 gen(30);
    const auto& qpsk = Constellation::qpsk();
    const SnrSpec snr = SnrSpec::from_noise_var(0.1);
    int checked = 0;
    for (int t = 0; t < 500; ++t) {
      const ComplexMatrix h = random_matrix(2, 2, gen);
      const ComplexVector x = random_symbols(2, qpsk, gen);
      ComplexVector y = matvec(h, x);
      const ComplexVector n = random_vector(2, gen);
      for (int r = 0; r < 2; ++r) y[r] += std::sqrt(0.1) * n[r];
      for (auto core : {NullingCore::Zf, NullingCore::Mmse}) {
        const double reg = core == NullingCore::Mmse ? 0.1 : 0.0;
        const ComplexMatrix d = inverse_2x2(gram(h) + ComplexMatrix(2, 2, {reg, 0.0, 0.0, reg}));
        const ComplexMatrix g = matmul(d, hermitian(h));
        const std::size_t first = d(1, 1).real() < d(0, 0).real() ? 1 : 0;
        const std::size_t second = 1 - first;
        const Complex z1 = g(first, 0) * y[0] + g(first, 1) * y[1];
        const Complex s1 = slice(z1, qpsk);
        const Complex r0 = y[0] - h(0, first) * s1;
        const Complex r1 = y[1] - h(1, first) * s1;
        const Complex a0 = h(0, second);
        const Complex a1 = h(1, second);
        const Complex z2 = (std::conj(a0) * r0 + std::conj(a1) * r1) / (std::norm(a0) + std::norm(a1) + reg);
        if (std::min({std::abs(z1.real()), std::abs(z1.imag()), std::abs(z2.real()),
                      std::abs(z2.imag())}) < 1e-9) {
          continue;
        }
        const auto trace = vblast_detect(h, y, {core, 1}, snr, qpsk);
        REQUIRE(trace.order.size() == 1);
        CHECK(trace.order[0] == first);
        CHECK(trace.symbols[first] == s1);
        CHECK(trace.symbols[second] == slice(z2, qpsk));
        ++checked;
      }
    }
    CHECK(checked > 900);
  }

  SUBCASE("ZF detection is invariant to a common scaling of h and y") {
    std::mt19937_64 gen(31);
    const SnrSpec snr = SnrSpec::from_noise_var(0.05);
    const Complex k(-0.4, 2.3);
    for (int t = 0; t < 300; ++t) {
      const ComplexMatrix h = random_matrix(4, 4, gen);
      const ComplexVector y = random_vector(4, gen);
      ComplexVector ky = y;
      for (auto& v : ky) v *= k;
      const auto a = vblast_detect(h, y, {NullingCore::Zf, 3}, snr, qam);
      const auto b = vblast_detect(k * h, ky, {NullingCore::Zf, 3}, snr, qam);
      CHECK(a.order == b.order);
      CHECK(a.labels == b.labels);
    }
  }

  SUBCASE("step-wise interface matches the one-shot detector") {
    std::mt19937_64 gen(27);
    const ComplexMatrix h = random_matrix(5, 5, gen);
    const ComplexVector y = random_vector(5, gen);
    const SnrSpec snr = SnrSpec::from_noise_var(0.05);
    OsicDetection d(h, y, NullingCore::Mmse, snr, qam);
    d.iterate();
    d.iterate();
    CHECK(d.remaining() == 3);
    CHECK(d.iterations_done() == 2);
    const auto stepped = std::move(d).finish();
    const auto oneshot = vblast_detect(h, y, {NullingCore::Mmse, 2}, snr, qam);
    CHECK(stepped.order == oneshot.order);
    CHECK(stepped.symbols == oneshot.symbols);
  }

  SUBCASE("argument validation") {
    const ComplexMatrix h = ComplexMatrix::identity(3);
    const ComplexVector y(3);
    const SnrSpec snr = SnrSpec::from_noise_var(0.1);
    CHECK_THROWS_AS(vblast_detect(h, y, {NullingCore::Zf, 3}, snr, qam), InvalidArgumentError);
    CHECK_THROWS_AS(vblast_detect(h, y, {NullingCore::Zf, -1}, snr, qam), InvalidArgumentError);
    CHECK_THROWS_AS(vblast_detect(h, ComplexVector(2), {NullingCore::Zf, 1}, snr, qam),
                    DimensionError);
  }
}

TEST_CASE("ml_detect") {
  const auto& qpsk = Constellation::qpsk();

  SUBCASE("agrees with a nested-loop search") {
    std::mt19937_64 gen(28);
    for (int t = 0; t < 200; ++t) {
      const ComplexMatrix h = random_matrix(2, 2, gen);
      const ComplexVector y = random_vector(2, gen);
      double best = std::numeric_limits<double>::infinity();
      ComplexVector arg;
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
          const ComplexVector x{qpsk.point(i), qpsk.point(j)};
          const ComplexVector hx = matvec(h, x);
          const double d = std::norm(y[0] - hx[0]) + std::norm(y[1] - hx[1]);
          if (d < best) {
            best = d;
            arg = x;
          }
        }
      }
      CHECK(ml_detect(h, y, qpsk) == arg);
    }
  }

  SUBCASE("ties resolve to the lowest candidate index") {
    // Stream 1 is invisible, so every label for it ties; stream 0 is most significant.
    const ComplexMatrix h(2, 2, {1.0, 0.0, 0.0, 0.0});
    const ComplexVector y{qpsk.point(2), 0.0};
    const ComplexVector got = ml_detect(h, y, qpsk);
    CHECK(got[0] == qpsk.point(2));
    CHECK(got[1] == qpsk.point(0));
  }

  SUBCASE("noiseless exactness") {
    std::mt19937_64 gen(29);
    const auto& qam = Constellation::qam16();
    const ComplexMatrix h = random_matrix(3, 3, gen);
    const ComplexVector x = random_symbols(3, qam, gen);
    CHECK(ml_detect(h, matvec(h, x), qam) == x);
  }

  CHECK_THROWS_AS(ml_detect(ComplexMatrix::identity(5), ComplexVector(5), Constellation::qam16()),
                  InvalidArgumentError);
}

TEST_CASE("core names") {
  CHECK(parse_core("zf") == NullingCore::Zf);
  CHECK(to_string(NullingCore::Mmse) == "mmse");
  CHECK_THROWS_AS(parse_core("ls"), InvalidArgumentError);
}

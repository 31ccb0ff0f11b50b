#include <doctest.h>

#include <cmath>

#include "ionlink/linalg.hpp"
#include "ionlink/rng.hpp"
#include "oracles.hpp"

using namespace ionlink;

TEST_SUITE("qcore") {

TEST_CASE("matrix invariants and equality tolerance") {
  ComplexMatrix a = ComplexMatrix::identity(2);
  ComplexMatrix b = ComplexMatrix::identity(2);
  b.at(0, 0) += cd(5e-13, 0);
  CHECK(a.approx_equal(b));
  b.at(0, 0) += cd(1e-11, 0);
  CHECK_FALSE(a.approx_equal(b));
  CHECK_THROWS_AS(ComplexMatrix(2, std::vector<cd>(3)), ValidationError);
}

TEST_CASE("eigh on Pauli Z and identity") {
  EighResult z = eigh(pauli_matrix(Pauli::Z));
  CHECK(z.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(z.eigenvectors.at(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(z.eigenvectors.at(1, 1)) == doctest::Approx(1.0));

  EighResult id = eigh(ComplexMatrix::identity(4));
  for (double v : id.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh of a Bell projector") {
  const PureState phi = bell_state(BellLabel::phi_plus);
  EighResult e = eigh(phi.projector());
  CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(e.eigenvalues[i]) < 1e-10);
  // top eigenvector equals |Phi+> up to phase: |<v|phi>| = 1
  cd ov = 0.0;
  for (int i = 0; i < 4; ++i) ov += std::conj(e.eigenvectors.at(i, 0)) * phi[i];
  CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eigh reconstruction on random Hermitian inputs up to dim 16") {
  Rng rng(11);
  for (int dim : {2, 3, 4, 8, 16}) {
    for (int rep = 0; rep < 5; ++rep) {
      const ComplexMatrix m = oracle::random_hermitian(rng, dim);
      EighResult e = eigh(m);
      for (size_t i = 1; i < e.eigenvalues.size(); ++i)
        CHECK(e.eigenvalues[i - 1] >= e.eigenvalues[i]);
      // V Lambda V^dag == m
      ComplexMatrix rec(dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          cd s = 0.0;
          for (int k = 0; k < dim; ++k)
            s += e.eigenvectors.at(i, k) * e.eigenvalues[static_cast<size_t>(k)] *
                 std::conj(e.eigenvectors.at(j, k));
          rec.at(i, j) = s;
        }
      CHECK((rec - m).max_abs() < 1e-9);
      // orthonormal columns
      ComplexMatrix vv = e.eigenvectors.adjoint() * e.eigenvectors;
      CHECK((vv - ComplexMatrix::identity(dim)).max_abs() < 1e-10);
    }
  }
}

TEST_CASE("eigh rejects non-Hermitian input") {
  ComplexMatrix m(2);
  m.at(0, 1) = cd(1, 0);
  CHECK_THROWS_AS(eigh(m), ValidationError);
}

TEST_CASE("tensor basics and hand-expanded entry") {
  CHECK(tensor(pauli_matrix(Pauli::I), pauli_matrix(Pauli::I))
            .approx_equal(ComplexMatrix::identity(4)));
  ComplexMatrix zz = tensor(pauli_matrix(Pauli::Z), pauli_matrix(Pauli::Z));
  CHECK(zz.at(0, 0) == cd(1));
  CHECK(zz.at(1, 1) == cd(-1));
  CHECK(zz.at(2, 2) == cd(-1));
  CHECK(zz.at(3, 3) == cd(1));
  // X (x) Y at (0, 3): X(0,1) * Y(0,1) = 1 * (-i)
  ComplexMatrix xy = tensor(pauli_matrix(Pauli::X), pauli_matrix(Pauli::Y));
  CHECK(xy.at(0, 3) == cd(0, -1));
}

TEST_CASE("tensor matches the index-expansion oracle and trace multiplies") {
  Rng rng(13);
  const ComplexMatrix a = oracle::random_hermitian(rng, 2);
  const ComplexMatrix b = oracle::random_hermitian(rng, 4);
  const ComplexMatrix t = tensor(a, b);
  CHECK(t.approx_equal(oracle::kron(a, b), 1e-12));
  CHECK(t.trace().real() == doctest::Approx((a.trace() * b.trace()).real()).epsilon(1e-10));
  // associativity up to reshaping
  const ComplexMatrix c = oracle::random_hermitian(rng, 2);
  CHECK(tensor(tensor(a, b), c).approx_equal(tensor(a, tensor(b, c)), 1e-10));
}

TEST_CASE("partial trace of Bell and product states") {
  const DensityMatrix bell = DensityMatrix::from_pure(bell_state(BellLabel::phi_plus));
  const DensityMatrix left = partial_trace(bell, {0}, {2, 2});
  CHECK(left.matrix().approx_equal(ComplexMatrix::identity(2) * cd(0.5), 1e-12));

  Rng rng(17);
  const DensityMatrix ra = oracle::random_state(rng, 2);
  const DensityMatrix rb = oracle::random_state(rng, 2);
  const DensityMatrix prod = DensityMatrix(tensor(ra.matrix(), rb.matrix()));
  CHECK(partial_trace(prod, {0}, {2, 2}).matrix().approx_equal(ra.matrix(), 1e-10));
  CHECK(partial_trace(prod, {1}, {2, 2}).matrix().approx_equal(rb.matrix(), 1e-10));

  const DensityMatrix r4 = oracle::random_state(rng, 4);
  CHECK(partial_trace(r4, {0}, {2, 2}).matrix().trace().real() ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(partial_trace(r4, {0}, {2, 3}), ValidationError);
}

TEST_CASE("matrix_sqrt_psd") {
  CHECK(matrix_sqrt_psd(ComplexMatrix::identity(3)).approx_equal(ComplexMatrix::identity(3)));
  ComplexMatrix d(2);
  d.at(0, 0) = 4.0;
  d.at(1, 1) = 9.0;
  ComplexMatrix s = matrix_sqrt_psd(d);
  CHECK(s.at(0, 0).real() == doctest::Approx(2.0));
  CHECK(s.at(1, 1).real() == doctest::Approx(3.0));

  Rng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    const DensityMatrix r = oracle::random_state(rng, 4);
    const ComplexMatrix rt = matrix_sqrt_psd(r.matrix());
    CHECK((rt * rt - r.matrix()).max_abs() < 1e-8);
    CHECK(rt.is_hermitian());
  }

  ComplexMatrix neg(2);
  neg.at(0, 0) = -1e-6;
  neg.at(1, 1) = 1.0;
  CHECK_THROWS_AS(matrix_sqrt_psd(neg), ValidationError);
}

TEST_CASE("expectation values") {
  const ComplexMatrix zz = tensor(pauli_matrix(Pauli::Z), pauli_matrix(Pauli::Z));
  const ComplexMatrix xx = tensor(pauli_matrix(Pauli::X), pauli_matrix(Pauli::X));
  CHECK(expectation(DensityMatrix::maximally_mixed(4), zz) == doctest::Approx(0.0));
  CHECK(expectation(DensityMatrix::from_pure(bell_state(BellLabel::phi_plus)), xx) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(expectation(DensityMatrix::from_pure(bell_state(BellLabel::psi_minus)), zz) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("expectation rejects operators with an imaginary trace residue") {
  ComplexMatrix op(2);
  op.at(0, 1) = cd(0, 1);  // non-Hermitian
  PureState plus(2, {cd(1.0 / std::sqrt(2.0)), cd(1.0 / std::sqrt(2.0))});
  CHECK_THROWS_AS(expectation(DensityMatrix::from_pure(plus), op), NumericalError);
}

TEST_CASE("density matrix validation") {
  ComplexMatrix bad_trace = ComplexMatrix::identity(2);
  CHECK_THROWS_AS(DensityMatrix{bad_trace}, ValidationError);

  ComplexMatrix not_psd(2);
  not_psd.at(0, 0) = 1.5;
  not_psd.at(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{not_psd}, ValidationError);

  ComplexMatrix not_herm = ComplexMatrix::identity(2) * cd(0.5);
  not_herm.at(0, 1) = cd(0, 1e-3);
  CHECK_THROWS_AS(DensityMatrix{not_herm}, ValidationError);

  // tiny negative eigenvalues are repairable
  ComplexMatrix near(2);
  near.at(0, 0) = 1.0 + 5e-10;
  near.at(1, 1) = -5e-10;
  const DensityMatrix fixed = DensityMatrix::repaired(near);
  CHECK(fixed.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partial trace over both factors preserves total trace") {
  Rng rng(23);
  const DensityMatrix r = oracle::random_state(rng, 4);
  const DensityMatrix a = partial_trace(r, {0}, {2, 2});
  const DensityMatrix b = partial_trace(r, {1}, {2, 2});
  CHECK(a.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(b.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("density matrix text round trip") {
  Rng rng(29);
  const DensityMatrix r = oracle::random_state(rng, 4);
  const std::string text = density_to_text(r);
  const DensityMatrix back = density_from_text(text);
  CHECK(back.matrix().approx_equal(r.matrix(), 1e-12));
  CHECK_THROWS_AS(matrix_from_text("0,0,1.0\n"), ValidationError);
  CHECK_THROWS_AS(matrix_from_text("0,0,1,0\n1,1,1,0\n"), ValidationError);  // missing entries
}

TEST_CASE("rng determinism and substreams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng s1 = Rng::substream(7, 1), s2 = Rng::substream(7, 2);
  CHECK(s1.next_u64() != s2.next_u64());

  Rng g(5);
  std::vector<long long> counts = g.multinomial(10000, {1.0, 1.0, 2.0});
  CHECK(counts[0] + counts[1] + counts[2] == 10000);
  CHECK(counts[2] > counts[0]);
}

}  // TEST_SUITE

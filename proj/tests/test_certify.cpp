#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "random_frameworks.hpp"
#include "unirigid/certify.hpp"

using namespace unirigid;

namespace {

const ToleranceConfig cfg;

SymMatrix stress_of(const Framework& fw) {
  const PsdStressSearch s = find_psd_stress(fw, cfg, 1);
  if (s.status != SearchStatus::Found) throw std::runtime_error("fixture has no PSD stress");
  return s.stress->omega;
}

const Certificate& find(const Report& r, PropertyKind kind, const char* pair = nullptr) {
  for (const auto& c : r.certificates) {
    if (c.property.kind != kind) continue;
    if (pair && (!c.property.pair || c.property.pair->label() != pair)) continue;
    return c;
  }
  throw std::runtime_error("certificate missing");
}

const Certificate& farkas(const Report& r) { return r.certificates.back(); }

/// Independent residual of sum y_ij V^T E^ij Z.
double affine_residual(const Framework& fw, const Vector& y) {
  const int n = fw.vertex_count();
  Matrix e = Matrix::Zero(n, n);
  const auto& missing = fw.graph().missing_edges();
  for (std::size_t k = 0; k < missing.size(); ++k) {
    e(missing[k].i, missing[k].j) = e(missing[k].j, missing[k].i) = y(static_cast<Index>(k));
  }
  Matrix pe(n, fw.dimension() + 1);
  pe << fw.config(), Vector::Ones(n);
  const Matrix z = Eigen::FullPivLU<Matrix>(pe.transpose()).kernel();
  return max_abs(build_V(n).transpose() * e * z);
}

/// SAP read directly: the only symmetric X supported on missing pairs with
/// Omega X = 0 is X = 0. Returns the dimension of that solution space.
int sap_nullity(const Framework& fw, const SymMatrix& omega) {
  const int n = fw.vertex_count();
  const auto& missing = fw.graph().missing_edges();
  Matrix a(n * n, static_cast<Index>(missing.size()));
  for (std::size_t k = 0; k < missing.size(); ++k) {
    Matrix x = Matrix::Zero(n, n);
    x(missing[k].i, missing[k].j) = x(missing[k].j, missing[k].i) = 1.0;
    const Matrix ox = omega.matrix() * x;
    a.col(static_cast<Index>(k)) = Eigen::Map<const Vector>(ox.data(), ox.size());
  }
  return static_cast<int>(missing.size()) - numerical_rank(a, cfg);
}

/// Transversality read as a subspace intersection in symmetric-matrix space:
/// dim( span{E^ij} ∩ {X : X W = 0} ) with W spanning col(Omega).
int transversal_defect(const Framework& fw, const SymMatrix& omega) {
  const int n = fw.vertex_count();
  const Matrix w = colspace_basis(omega.matrix(), cfg);
  const Matrix wc = complement_basis(w, cfg);
  std::vector<Vector> a_cols;
  for (const auto& p : fw.graph().missing_edges()) a_cols.push_back(svec(unit_pair(n, p)));
  std::vector<Vector> b_cols;
  for (Index i = 0; i < wc.cols(); ++i) {
    for (Index j = i; j < wc.cols(); ++j) {
      const Matrix s = wc.col(i) * wc.col(j).transpose() + wc.col(j) * wc.col(i).transpose();
      b_cols.push_back(svec(s));
    }
  }
  auto stack = [&](const std::vector<Vector>& cols) {
    Matrix m(sym_dim(n), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) m.col(static_cast<Index>(k)) = cols[k];
    return m;
  };
  const Matrix a = stack(a_cols);
  const Matrix b = stack(b_cols);
  Matrix ab(a.rows(), a.cols() + b.cols());
  ab << a, b;
  return numerical_rank(a, cfg) + numerical_rank(b, cfg) - numerical_rank(ab, cfg);
}

}  // namespace

TEST(LinkedCheck, F1Pairs) {
  const Framework fw = fixtures::f1();
  const SymMatrix om = stress_of(fw);
  EXPECT_EQ(linked_check(fw, om, VertexPair::one_based(1, 5), cfg).verdict, Verdict::Certified);
  EXPECT_EQ(linked_check(fw, om, VertexPair::one_based(3, 4), cfg).verdict, Verdict::Certified);
  const Certificate c45 = linked_check(fw, om, VertexPair::one_based(4, 5), cfg);
  EXPECT_EQ(c45.verdict, Verdict::Unknown);
  const auto& y = std::get<MotionWitness>(c45.witness).y;
  EXPECT_NEAR(y(2), 1.0, 1e-12);
}

TEST(LinkedCheck, F2bPair) {
  const Framework fw = fixtures::f2b();
  EXPECT_EQ(linked_check(fw, stress_of(fw), VertexPair::one_based(2, 5), cfg).verdict, Verdict::Certified);
}

TEST(LinkedCheck, RejectsBadStress) {
  const Framework fw = fixtures::f1();
  const SymMatrix om = stress_of(fw);
  EXPECT_THROW(linked_check(fw, SymMatrix::identity(5), VertexPair::one_based(1, 5), cfg), InvalidInput);
  EXPECT_THROW(linked_check(fw, -1.0 * om, VertexPair::one_based(1, 5), cfg), InvalidInput);
  EXPECT_THROW(linked_check(fw, SymMatrix::zero(5), VertexPair::one_based(1, 5), cfg), InvalidInput);
  EXPECT_THROW(linked_check(fw, om, VertexPair::one_based(1, 2), cfg), InvalidInput);
}

TEST(RigidityCheck, Fixtures) {
  EXPECT_EQ(rigidity_check(fixtures::f2a(), stress_of(fixtures::f2a()), cfg).verdict, Verdict::Certified);
  EXPECT_EQ(rigidity_check(fixtures::f4(), stress_of(fixtures::f4()), cfg).verdict, Verdict::Certified);

  const Certificate b = rigidity_check(fixtures::f2b(), stress_of(fixtures::f2b()), cfg);
  EXPECT_EQ(b.verdict, Verdict::Unknown);
  const auto& w = std::get<MotionWitness>(b.witness);
  // y = (y14, y25, y34)
  EXPECT_NEAR(w.y(0), 1.0, 1e-12);
  EXPECT_NEAR(w.y(1), 0.0, 1e-8);
  EXPECT_NEAR(w.y(2), -1.0, 1e-8);
  EXPECT_LE(w.residual, 1e-8);
}

TEST(AffineMotionCheck, Fixtures) {
  const Framework f3 = fixtures::f3();
  const Certificate c3 = affine_motion_check(f3, cfg);
  ASSERT_EQ(c3.verdict, Verdict::Refuted);
  const Vector& y = std::get<MotionWitness>(c3.witness).y;
  EXPECT_NEAR(y(0), -y(1), 1e-10);
  EXPECT_LE(affine_residual(f3, y), 1e-7 * y.norm());

  EXPECT_EQ(affine_motion_check(fixtures::f4(), cfg).verdict, Verdict::Certified);
  EXPECT_EQ(affine_motion_check(fixtures::f2a(), cfg).verdict, Verdict::Certified);
}

TEST(ClassicCheck, Fixtures) {
  EXPECT_EQ(classic_check(fixtures::f4(), cfg, 1).verdict, Verdict::Certified);
  const Certificate a = classic_check(fixtures::f2a(), cfg, 1);
  EXPECT_EQ(a.verdict, Verdict::Unknown);
  EXPECT_NE(a.note.find("rank 1 <"), std::string::npos);
  EXPECT_EQ(classic_check(fixtures::f3(), cfg, 1).verdict, Verdict::Unknown);
}

TEST(DimensionalRigidity, Fixtures) {
  EXPECT_EQ(dimensional_rigidity_check(fixtures::f4(), cfg, 1).verdict, Verdict::Certified);
  EXPECT_EQ(dimensional_rigidity_check(fixtures::f2a(), cfg, 1).verdict, Verdict::Certified);

  const Framework f1 = fixtures::f1();
  const Certificate c = dimensional_rigidity_check(f1, cfg, 1);
  ASSERT_EQ(c.verdict, Verdict::Refuted);
  const auto& w = std::get<FrameworkWitness>(c.witness);
  EXPECT_EQ(w.dimension, 3);
  EXPECT_LE(max_edge_violation(f1, w.configuration), 1e-8);
  const Framework folded(f1.graph(), w.configuration);
  EXPECT_TRUE(verify_stress(folded, stress_of(f1), cfg).valid);
}

TEST(Farkas, Fixtures) {
  const Framework f3 = fixtures::f3();
  const Certificate c3 = farkas_dichotomy(f3, cfg, 1);
  EXPECT_EQ(c3.property.kind, PropertyKind::FarkasStatement1);
  EXPECT_EQ(c3.verdict, Verdict::Certified);
  const auto& w = std::get<FrameworkWitness>(c3.witness);
  EXPECT_EQ(w.dimension, 3);
  EXPECT_LE(max_edge_violation(f3, w.configuration), 1e-8);

  EXPECT_EQ(farkas_dichotomy(fixtures::f1(), cfg, 1).property.kind, PropertyKind::FarkasStatement2);
  EXPECT_EQ(farkas_dichotomy(fixtures::f4(), cfg, 1).property.kind, PropertyKind::FarkasStatement2);
}

TEST(SubspaceCheck, F1Samples) {
  const Framework fw = fixtures::f1();
  const SymMatrix om = stress_of(fw);
  const CayleySpectrahedron sp = build_spectrahedron(fw, cfg);
  const auto samples = sample_spectrahedron(sp, cfg, 3, 30);
  int free45 = 0;
  for (const auto& y : samples) {
    EXPECT_NEAR(y(0), 0.0, 1e-6);  // y15
    EXPECT_NEAR(y(1), 0.0, 1e-6);  // y34
    if (std::abs(y(2)) > 1e-3) ++free45;
  }
  EXPECT_GT(free45, 10);
  const SubspaceReport rep = subspace_check(fw, om, samples, cfg);
  EXPECT_TRUE(rep.all_ok);
  EXPECT_TRUE(rep.dims_equal);
}

TEST(SubspaceCheck, TrivialAndVacuousCases) {
  const Framework f2a = fixtures::f2a();
  const SymMatrix om = stress_of(f2a);
  const CayleySpectrahedron sp = build_spectrahedron(f2a, cfg);
  const auto samples = sample_spectrahedron(sp, cfg, 1, 10);
  for (const auto& y : samples) EXPECT_LE(y.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(subspace_check(f2a, om, samples, cfg).all_ok);
  EXPECT_TRUE(subspace_check(fixtures::f4(), stress_of(fixtures::f4()), {Vector::Zero(1)}, cfg).all_ok);
}

TEST(Analyze, FixtureReports) {
  const Report r1 = analyze(fixtures::f1(), cfg, 1);
  EXPECT_EQ(find(r1, PropertyKind::UniversallyLinked, "1,5").verdict, Verdict::Certified);
  EXPECT_EQ(find(r1, PropertyKind::UniversallyLinked, "3,4").verdict, Verdict::Certified);
  EXPECT_EQ(find(r1, PropertyKind::UniversallyLinked, "4,5").verdict, Verdict::Unknown);
  EXPECT_EQ(find(r1, PropertyKind::UniversallyRigid).verdict, Verdict::Unknown);

  const Report r2 = analyze(fixtures::f2a(), cfg, 1);
  EXPECT_EQ(find(r2, PropertyKind::UniversallyRigid).verdict, Verdict::Certified);

  const Report r3 = analyze(fixtures::f3(), cfg, 1);
  EXPECT_EQ(r3.search.status, SearchStatus::None);
  EXPECT_EQ(farkas(r3).property.kind, PropertyKind::FarkasStatement1);
  EXPECT_EQ(find(r3, PropertyKind::NoAffineMotion).verdict, Verdict::Refuted);
}

TEST(Analyze, ElapsedOnlyWhenTiming) {
  for (const auto& c : analyze(fixtures::f4(), cfg, 1).certificates) EXPECT_FALSE(c.elapsed_ms.has_value());
  for (const auto& c : analyze(fixtures::f4(), cfg, 1, true).certificates) EXPECT_TRUE(c.elapsed_ms.has_value());
}

// Properties over fixtures and seeded random frameworks.

TEST(CertifyProperties, MonotonicityRigidImpliesLinked) {
  std::mt19937_64 rng(301);
  int rigid = 0;
  for (int k = 0; k < 100; ++k) {
    const Framework fw = fixtures::random_framework(rng).fw;
    const PsdStressSearch s = find_psd_stress(fw, cfg, 1);
    if (s.status != SearchStatus::Found) continue;
    if (rigidity_check(fw, s.stress->omega, cfg).verdict != Verdict::Certified) continue;
    ++rigid;
    for (const auto& p : fw.graph().missing_edges()) {
      EXPECT_EQ(linked_check(fw, s.stress->omega, p, cfg).verdict, Verdict::Certified);
    }
  }
  EXPECT_GE(rigid, 10);
}

TEST(CertifyProperties, RigidityEqualsSapEqualsTransversality) {
  std::mt19937_64 rng(302);
  int checked = 0;
  for (int k = 0; k < 120; ++k) {
    const Framework fw = fixtures::random_framework(rng).fw;
    const PsdStressSearch s = find_psd_stress(fw, cfg, 1);
    if (s.status != SearchStatus::Found) continue;
    ++checked;
    const bool certified = rigidity_check(fw, s.stress->omega, cfg).verdict == Verdict::Certified;
    EXPECT_EQ(certified, sap_nullity(fw, s.stress->omega) == 0);
    EXPECT_EQ(certified, transversal_defect(fw, s.stress->omega) == 0);
  }
  EXPECT_GE(checked, 50);
}

TEST(CertifyProperties, RigidityMatchesAffineAtFullRank) {
  std::vector<Framework> frameworks{fixtures::f1(), fixtures::f2a(), fixtures::f2b(), fixtures::f3(), fixtures::f4()};
  std::mt19937_64 rng(303);
  for (int k = 0; k < 50; ++k) frameworks.push_back(fixtures::random_framework(rng).fw);
  int applicable = 0;
  for (const auto& fw : frameworks) {
    const PsdStressSearch s = find_psd_stress(fw, cfg, 1);
    if (s.status != SearchStatus::Found || s.stress->rank != fw.vertex_count() - fw.dimension() - 1) continue;
    ++applicable;
    const bool rigid = rigidity_check(fw, s.stress->omega, cfg).verdict == Verdict::Certified;
    const bool no_motion = affine_motion_check(fw, cfg).verdict == Verdict::Certified;
    EXPECT_EQ(rigid, no_motion);
    EXPECT_NO_THROW(classic_check(fw, s, cfg));
  }
  EXPECT_GE(applicable, 10);
}

TEST(CertifyProperties, AffineMotionWitnessesVerify) {
  // Grids with axis-parallel edges only, under a random linear map: the edge
  // directions lie on a conic at infinity, so affine motions exist.
  std::mt19937_64 rng(304);
  std::normal_distribution<double> normal;
  int refuted = 0;
  for (int k = 0; k < 100; ++k) {
    const int cols = 2 + static_cast<int>(rng() % 2);
    const int rows = 2;
    const int n = cols * rows;
    std::vector<double> xs(cols);
    std::vector<double> ys(rows);
    for (auto& x : xs) x = normal(rng);
    for (auto& y : ys) y = normal(rng);
    Matrix p(n, 2);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) p.row(i * cols + j) << xs[j], ys[i];
    Matrix a(2, 2);
    for (Index i = 0; i < 4; ++i) a.data()[i] = normal(rng);
    p = p * a.transpose();
    std::vector<VertexPair> edges;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j + 1 < cols; ++j) edges.push_back({i * cols + j, i * cols + j + 1});
    for (int j = 0; j < cols; ++j) edges.push_back({j, cols + j});
    const Framework fw(Graph(n, edges), p);
    const Certificate c = affine_motion_check(fw, cfg);
    EXPECT_EQ(c.verdict, Verdict::Refuted);
    if (c.verdict != Verdict::Refuted) continue;
    ++refuted;
    const Vector& y = std::get<MotionWitness>(c.witness).y;
    EXPECT_LE(affine_residual(fw, y), 1e-7 * y.norm());
  }
  EXPECT_EQ(refuted, 100);
}

TEST(CertifyProperties, SubspaceContainmentAndNullDimensions) {
  std::mt19937_64 rng(305);
  int checked = 0;
  for (int k = 0; k < 150 && checked < 100; ++k) {
    const Framework fw = fixtures::random_framework(rng).fw;
    const PsdStressSearch s = find_psd_stress(fw, cfg, 1);
    if (s.status != SearchStatus::Found) continue;
    ++checked;
    const CayleySpectrahedron sp = build_spectrahedron(fw, cfg);
    const SubspaceReport rep =
        subspace_check(fw, s.stress->omega, sample_spectrahedron(sp, cfg, static_cast<std::uint64_t>(k), 6), cfg);
    EXPECT_TRUE(rep.all_ok);
    EXPECT_TRUE(rep.dims_equal) << rep.null_dim_plain << " vs " << rep.null_dim_with_v;
  }
  EXPECT_GE(checked, 60);
}

TEST(CertifyProperties, StressTransfersToEquivalentFrameworks) {
  std::mt19937_64 rng(306);
  int transferred = 0;
  for (int k = 0; k < 150 && transferred < 100; ++k) {
    const Framework fw = fixtures::random_framework(rng).fw;
    const PsdStressSearch s = find_psd_stress(fw, cfg, 1);
    if (s.status != SearchStatus::Found) continue;
    const CayleySpectrahedron sp = build_spectrahedron(fw, cfg);
    for (const auto& y : sample_spectrahedron(sp, cfg, static_cast<std::uint64_t>(k), 4)) {
      if (!membership(sp, y, cfg).member) continue;
      const Framework eq = equivalent_framework(sp, fw, y, cfg);
      EXPECT_TRUE(verify_stress(eq, s.stress->omega, cfg).valid) << verify_stress(eq, s.stress->omega, cfg).violation;
      ++transferred;
    }
  }
  EXPECT_GE(transferred, 100);
}

TEST(CertifyProperties, FarkasExclusivity) {
  std::vector<Framework> frameworks{fixtures::f1(), fixtures::f2a(), fixtures::f2b(), fixtures::f3(), fixtures::f4()};
  std::mt19937_64 rng(307);
  for (int k = 0; k < 25; ++k) frameworks.push_back(fixtures::random_framework(rng, 7).fw);
  for (const auto& fw : frameworks) {
    const PsdStressSearch s = find_psd_stress(fw, cfg, 1);
    const CayleySpectrahedron sp = build_spectrahedron(fw, cfg);
    const MaxRankPoint m = max_rank_point(sp, cfg, 1);
    const bool stmt1 = m.rank == fw.vertex_count() - 1;
    const bool stmt2 = s.status == SearchStatus::Found;
    EXPECT_NE(stmt1, stmt2);
    const Certificate c = farkas_dichotomy(fw, s, sp, cfg, 1);
    EXPECT_EQ(c.verdict, Verdict::Certified);
    if (c.property.kind == PropertyKind::FarkasStatement1) {
      const auto& w = std::get<FrameworkWitness>(c.witness);
      EXPECT_EQ(w.dimension, fw.vertex_count() - 1);
      EXPECT_LE(max_edge_violation(fw, w.configuration), 1e-8 * std::max(1.0, max_abs(edm_of(fw).matrix())));
    }
  }
}

#include "molcert/conformers.hpp"
#include "molcert/error.hpp"
#include "molcert/geometry.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace molcert;

namespace {

constexpr double kDeg = kPi / 180.0;

std::vector<double> degrees(std::initializer_list<double> d) {
  std::vector<double> out;
  for (double x : d) out.push_back(x * kDeg);
  return out;
}

double angle_at(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::acos((a - b).normalized().dot((c - b).normalized()));
}

double wrap(double a) { return std::remainder(a, 2.0 * kPi); }

Structure pair_of_carbons(double d, bool bonded) {
  Structure s;
  s.atoms.push_back(fixture::carbon(1, Vec3::Zero()));
  s.atoms.push_back(fixture::carbon(2, Vec3(d, 0, 0)));
  for (auto& a : s.atoms) a.vdw_radius = 1.7;
  if (bonded) set_bonds(s, {{0, 1}});
  return s;
}

}  // namespace

TEST(Perturb, ZeroNormalsLeaveInputUnchanged) {
  const auto s = fixture::random_structure(12, 5);
  const std::vector<Vec3> z(s.size(), Vec3::Zero());
  const auto c = perturb_cartesian(s, z);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(c.positions[i], s.atoms[i].position);
}

TEST(Perturb, IsotropicUnitSigma) {
  Structure s;
  s.atoms.push_back(fixture::carbon(1, Vec3(1, 2, 3), 8 * kPi * kPi));
  const std::vector<Vec3> z{Vec3(1, 0, 0)};
  const auto c = perturb_cartesian(s, z);
  EXPECT_NEAR((c.positions[0] - Vec3(2, 2, 3)).norm(), 0.0, 1e-12);
}

TEST(Perturb, AnisotropicSigmaPerAxis) {
  Structure s;
  s.atoms.push_back(fixture::carbon(1, Vec3::Zero(), 50.0));
  s.atoms[0].b_aniso = Vec3(8 * kPi * kPi, 16 * kPi * kPi, 0.0);
  const std::vector<Vec3> z{Vec3(1, 1, 1)};
  const auto c = perturb_cartesian(s, z);
  EXPECT_NEAR(c.positions[0].x(), 1.0, 1e-12);
  EXPECT_NEAR(c.positions[0].y(), std::sqrt(2.0), 1e-12);
  EXPECT_EQ(c.positions[0].z(), 0.0);
}

TEST(Perturb, RowCountChecked) {
  const auto s = fixture::random_structure(3, 1);
  EXPECT_THROW(perturb_cartesian(s, std::vector<Vec3>(2, Vec3::Zero())), DomainError);
}

TEST(TorsionGraph, ChainDetectionAndMeasuredDihedrals) {
  const auto dih = degrees({180, 60, -60, 150});
  const auto s = fixture::zigzag_chain(7, dih);
  const auto g = TorsionGraph::detect(s);
  // Seven atoms in a line: bonds 1-2 .. 4-5 rotate, terminal bonds do not.
  ASSERT_EQ(g.size(), 4u);
  const auto measured = g.angles(s.positions());
  for (std::size_t k = 0; k < dih.size(); ++k) EXPECT_NEAR(wrap(measured[k] - dih[k]), 0.0, 1e-9);
  for (const auto& d : g.dihedrals()) {
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_FALSE(std::binary_search(d.downstream.begin(), d.downstream.end(), d.atoms[i]));
    }
    EXPECT_TRUE(std::binary_search(d.downstream.begin(), d.downstream.end(), d.atoms[3]));
  }
}

TEST(TorsionGraph, CurrentAnglesAreIdentity) {
  const auto s = fixture::zigzag_chain(9, degrees({180, 60, -60, 180, 70, -170}));
  const auto g = TorsionGraph::detect(s);
  const auto c = apply_torsions(g, g.angles(s.positions()));
  EXPECT_LT(rmsd(c.positions, s.positions()), 1e-6);
}

TEST(TorsionGraph, HalfTurnMatchesClosedFormRotation) {
  const auto s = fixture::zigzag_chain(4, degrees({0}));
  const auto g = TorsionGraph::detect(s);
  ASSERT_EQ(g.size(), 1u);
  const auto p = s.positions();
  const auto c = apply_torsions(g, std::vector<double>{kPi});
  // Half turn of d about the b-c axis: keep the axial part, negate the rest.
  const Vec3 axis = (p[2] - p[1]).normalized();
  const Vec3 v = p[3] - p[2];
  const Vec3 expected = p[2] + 2.0 * axis.dot(v) * axis - v;
  EXPECT_LT((c.positions[3] - expected).norm(), 1e-9);
  // The cis atom moves into the plane of the first three atoms, on the far side.
  const Vec3 normal = (p[0] - p[1]).cross(p[2] - p[1]).normalized();
  EXPECT_NEAR(normal.dot(c.positions[3] - p[1]), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(g.angles(c.positions)[0]), kPi, 1e-9);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(c.positions[i], p[i]);
}

TEST(TorsionGraph, ReverseOrderUndoesRotations) {
  const auto s = fixture::zigzag_chain(6, degrees({180, 60, -60}));
  const auto g = TorsionGraph::detect(s);
  const auto start = g.angles(s.positions());
  const auto moved = apply_torsions(g, degrees({100, -20, 45}));
  const auto back = apply_torsions(g, start, moved.positions);
  EXPECT_LT(rmsd(back.positions, s.positions()), 1e-6);
}

TEST(TorsionGraph, PreservesBondLengthsAndAngles) {
  const auto s = fixture::zigzag_chain(12, degrees({180, 60, -60, 180, 180, 60, 180, -60, 180}));
  const auto g = TorsionGraph::detect(s);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  const auto p = s.positions();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(g.size());
    for (auto& x : a) x = u(rng);
    const auto c = apply_torsions(g, a);
    const auto& q = c.positions;
    for (const auto& b : s.bonds) EXPECT_NEAR((q[b.i] - q[b.j]).norm(), (p[b.i] - p[b.j]).norm(), 1e-6);
    for (std::size_t i = 0; i + 2 < p.size(); ++i) {
      EXPECT_NEAR(angle_at(q[i], q[i + 1], q[i + 2]), angle_at(p[i], p[i + 1], p[i + 2]), 1e-6);
    }
    const auto got = g.angles(q);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(wrap(got[k] - a[k]), 0.0, 1e-9);
  }
}

TEST(TorsionGraph, RejectsRingBondsAndOutOfRangeAngles) {
  Structure ring;
  for (int k = 0; k < 6; ++k) {
    ring.atoms.push_back(fixture::carbon(k + 1, Vec3(1.4 * std::cos(k * kPi / 3), 1.4 * std::sin(k * kPi / 3), 0)));
  }
  std::vector<Bond> bonds;
  for (std::size_t k = 0; k < 6; ++k) bonds.push_back({k, (k + 1) % 6});
  set_bonds(ring, bonds);
  EXPECT_EQ(TorsionGraph::detect(ring).size(), 0u);
  Dihedral d;
  d.atoms = {0, 1, 2, 3};
  EXPECT_THROW(TorsionGraph::from_dihedrals(ring, {d}), DomainError);

  const auto s = fixture::zigzag_chain(5, degrees({180, 60}));
  auto g = TorsionGraph::detect(s);
  g.set_windows(g.angles(s.positions()), 0.3);
  EXPECT_NO_THROW(apply_torsions(g, std::vector<double>{kPi - 0.1, 60 * kDeg + 0.2}));
  EXPECT_THROW(apply_torsions(g, std::vector<double>{kPi - 0.5, 60 * kDeg}), DomainError);
  EXPECT_THROW(apply_torsions(g, std::vector<double>{kPi}), DomainError);
}

TEST(TorsionGraph, WindowsWrapAroundPi) {
  const auto s = fixture::zigzag_chain(4, degrees({180}));
  auto g = TorsionGraph::detect(s);
  g.set_windows(std::vector<double>{kPi}, 0.3);
  EXPECT_TRUE(g.in_range(0, -kPi + 0.2));
  EXPECT_TRUE(g.in_range(0, kPi - 0.2));
  EXPECT_FALSE(g.in_range(0, 0.0));
  const auto c = apply_torsions(g, std::vector<double>{-kPi + 0.2});
  EXPECT_NEAR(wrap(g.angles(c.positions)[0] - (-kPi + 0.2)), 0.0, 1e-9);
}

TEST(TorsionGraph, JsonOverride) {
  const auto s = fixture::zigzag_chain(6, degrees({180, 60, -60}));
  const nlohmann::json j = {{"dihedrals", {{{"atoms", {0, 1, 2, 3}}, {"lower", -1.0}, {"upper", 1.0}}}}};
  const auto g = TorsionGraph::from_json(s, j);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_DOUBLE_EQ(g.dihedrals()[0].lower, -1.0);
  EXPECT_DOUBLE_EQ(g.dihedrals()[0].upper, 1.0);
  const nlohmann::json bad = {{"dihedrals", {{{"atoms", {0, 1, 3, 4}}}}}};
  EXPECT_THROW(TorsionGraph::from_json(s, bad), DomainError);
}

TEST(ClashFilter, BondedPairIsExempt) {
  const auto s = pair_of_carbons(1.0, true);
  Conformer c;
  c.positions = s.positions();
  EXPECT_TRUE(clash_filter(c, s, 0.6).accepted);
}

TEST(ClashFilter, NonBondedOverlapRejectedWithReason) {
  const auto s = pair_of_carbons(1.0, false);
  Conformer c;
  c.positions = s.positions();
  const auto r = clash_filter(c, s, Exclusions(2, {}), 0.6);
  EXPECT_FALSE(r.accepted);
  ASSERT_TRUE(r.rejection_reason);
  EXPECT_NE(r.rejection_reason->find("atoms 1 (C) and 2 (C)"), std::string::npos);
  EXPECT_NE(r.rejection_reason->find("2.040"), std::string::npos);
}

TEST(ClashFilter, SeparatedAtomsAccepted) {
  const auto s = pair_of_carbons(2.1, false);
  Conformer c;
  c.positions = s.positions();
  EXPECT_TRUE(clash_filter(c, s, Exclusions(2, {}), 0.6).accepted);
  EXPECT_THROW(clash_filter(c, s, Exclusions(2, {}), 0.0), DomainError);
  EXPECT_THROW(clash_filter(c, s, Exclusions(2, {}), 1.5), DomainError);
}

TEST(ClashFilter, OneThreeNeighboursExempt) {
  Structure s;
  s.atoms.push_back(fixture::carbon(1, Vec3(0, 0, 0)));
  s.atoms.push_back(fixture::carbon(2, Vec3(1.5, 0, 0)));
  s.atoms.push_back(fixture::carbon(3, Vec3(1.5, 1.5, 0)));
  for (auto& a : s.atoms) a.vdw_radius = 1.7;
  set_bonds(s, {{0, 1}, {1, 2}});
  Conformer c;
  c.positions = s.positions();
  EXPECT_TRUE(clash_filter(c, s, 0.6).accepted);
}

TEST(Rmsd, ClosedForms) {
  const std::vector<Vec3> a{Vec3::Zero()};
  const std::vector<Vec3> b{Vec3(2, 0, 0)};
  EXPECT_EQ(rmsd(a, a), 0.0);
  EXPECT_DOUBLE_EQ(rmsd(a, b), 2.0);
  const std::vector<Vec3> c{Vec3::Zero(), Vec3::Zero()};
  const std::vector<Vec3> d{Vec3::Zero(), Vec3(0, 2, 0)};
  EXPECT_DOUBLE_EQ(rmsd(c, d), std::sqrt(2.0));
  EXPECT_THROW(rmsd(a, c), DomainError);
}

TEST(Rmsd, PseudometricOnRandomTriples) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  auto random_positions = [&] {
    std::vector<Vec3> p(10);
    for (auto& v : p) v = Vec3(g(rng), g(rng), g(rng));
    return p;
  };
  for (int t = 0; t < 50; ++t) {
    const auto x = random_positions(), y = random_positions(), z = random_positions();
    EXPECT_DOUBLE_EQ(rmsd(x, y), rmsd(y, x));
    EXPECT_LE(rmsd(x, z), rmsd(x, y) + rmsd(y, z) + 1e-12);
  }
}

TEST(Rmsd, SuperposedRemovesRigidMotion) {
  const auto s = fixture::random_structure(15, 8);
  std::mt19937_64 rng(8);
  const auto p = s.positions();
  const auto q = fixture::transform(p, fixture::random_rotation(rng), Vec3(3, -2, 7));
  EXPECT_LT(rmsd_superposed(p, q), 1e-9);
  EXPECT_GT(rmsd(p, q), 1.0);
  EXPECT_LE(rmsd_superposed(p, fixture::random_structure(15, 9).positions()),
            rmsd(p, fixture::random_structure(15, 9).positions()) + 1e-12);
}

TEST(Rmsd, MatrixSymmetricWithZeroDiagonal) {
  const auto s = fixture::random_structure(8, 3);
  SamplingOptions opt;
  opt.samples = 6;
  opt.clash_factor = 0.1;
  const auto e = sample_cartesian(s, opt);
  const auto n = e.accepted_count();
  const auto m = rmsd_matrix(e);
  ASSERT_EQ(m.size(), n * n);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(m[i * n + i], 0.0);
    for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(m[i * n + j], m[j * n + i]);
  }
}

TEST(Circular, IdenticalAnglesHaveZeroSpread) {
  const std::vector<double> a(5, 1.2);
  const auto c = circular_spread(a);
  EXPECT_NEAR(c.circular_std, 0.0, 1e-7);
  EXPECT_FALSE(c.maximal);
}

TEST(Circular, AntipodalIsMaximal) {
  const std::vector<double> a{-kPi / 2, kPi / 2, -kPi / 2, kPi / 2};
  const auto c = circular_spread(a);
  EXPECT_TRUE(c.maximal);
  EXPECT_TRUE(std::isinf(c.circular_std));
}

TEST(Circular, SmallJitterMatchesLinearStd) {
  const std::vector<double> a{2.0 - 0.01, 2.0 + 0.01, 2.0 - 0.01, 2.0 + 0.01};
  EXPECT_NEAR(circular_spread(a).circular_std, 0.01, 0.0005);
  // Wrapping at +-pi does not inflate the spread.
  const std::vector<double> b{kPi - 0.01, -kPi + 0.01};
  EXPECT_NEAR(circular_spread(b).circular_std, 0.01, 0.0005);
  EXPECT_THROW(circular_spread(std::vector<double>{1.0}), DomainError);
}

TEST(MotionModes, IdenticalConformersHaveZeroVariance) {
  Ensemble e;
  const auto s = fixture::random_structure(3, 2);
  for (int k = 0; k < 5; ++k) e.conformers.push_back(Conformer{s.positions(), 0, true, {}});
  for (const auto& m : atom_motion_modes(e)) EXPECT_EQ(m.variances, Vec3::Zero());
}

TEST(MotionModes, SingleAxisDisplacement) {
  Ensemble e;
  for (double x : {-2.0, 2.0, -2.0, 2.0}) e.conformers.push_back(Conformer{{Vec3(1 + x, 5, -3)}, 0, true, {}});
  const auto m = atom_motion_modes(e);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m[0].variances[0], 4.0, 1e-12);
  EXPECT_NEAR(m[0].variances[1], 0.0, 1e-12);
  EXPECT_NEAR(m[0].variances[2], 0.0, 1e-12);
  EXPECT_NEAR(std::abs(m[0].directions.col(0).x()), 1.0, 1e-12);
  EXPECT_THROW(atom_motion_modes(Ensemble{Structure{}, {e.conformers[0]}}), DomainError);
}

TEST(MotionModes, IsotropicSamplesAndReconstruction) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  Ensemble e;
  for (int k = 0; k < 1000; ++k) e.conformers.push_back(Conformer{{Vec3(g(rng), g(rng), g(rng))}, 0, true, {}});
  const auto m = atom_motion_modes(e).at(0);
  EXPECT_GE(m.variances[0], m.variances[1]);
  EXPECT_GE(m.variances[1], m.variances[2]);
  EXPECT_LT(m.variances[0] / m.variances[2], 1.2);
  EXPECT_LT((m.directions.transpose() * m.directions - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  const Mat3 rebuilt = m.directions * m.variances.asDiagonal() * m.directions.transpose();
  EXPECT_LT((rebuilt - m.covariance).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Ensembles, SameSeedIsBitwiseReproducibleAcrossWorkers) {
  const auto s = fixture::random_structure(10, 6);
  SamplingOptions opt;
  opt.samples = 40;
  opt.seed = 17;
  const auto a = sample_cartesian(s, opt);
  opt.workers = 4;
  const auto b = sample_cartesian(s, opt);
  ASSERT_EQ(a.conformers.size(), b.conformers.size());
  for (std::size_t k = 0; k < a.conformers.size(); ++k) {
    EXPECT_EQ(a.conformers[k].positions, b.conformers[k].positions);
    EXPECT_EQ(a.conformers[k].accepted, b.conformers[k].accepted);
    EXPECT_EQ(a.conformers[k].sample_index, k);
  }
  opt.seed = 18;
  EXPECT_NE(sample_cartesian(s, opt).conformers[3].positions, a.conformers[3].positions);
}

TEST(Ensembles, TorsionSamplesStayInWindows) {
  const auto dih = degrees({180, 60, -60, 180});
  const auto s = fixture::zigzag_chain(7, dih);
  auto g = TorsionGraph::detect(s);
  g.set_windows(g.angles(s.positions()), 0.3);
  SamplingOptions opt;
  opt.samples = 64;
  opt.workers = 3;
  const auto e = sample_torsions(s, g, opt);
  EXPECT_GT(e.accepted_count(), 0u);
  for (const auto& c : e.conformers) {
    const auto a = g.angles(c.positions);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_TRUE(g.in_range(k, a[k]));
  }
  opt.sequence = SequenceKind::kPseudoRandom;
  const auto r = sample_torsions(s, g, opt);
  EXPECT_NE(r.conformers[1].positions, e.conformers[1].positions);
}

TEST(Ensembles, PerturbedSubsetKeepsOtherAtomsFixed) {
  const auto s = fixture::random_structure(6, 11);
  SamplingOptions opt;
  opt.samples = 5;
  const std::vector<std::size_t> moving{1, 4};
  const auto e = sample_cartesian(s, opt, moving);
  for (const auto& c : e.conformers) {
    for (std::size_t i : {0, 2, 3, 5}) EXPECT_EQ(c.positions[i], s.atoms[i].position);
    EXPECT_NE(c.positions[1], s.atoms[1].position);
  }
}

#include <doctest.h>

#include "eozip/dieudonne.hpp"

using namespace eozip;

namespace {

Mat<WittElem> mat2(const WittRingPtr& r, std::vector<std::vector<std::int64_t>> rows,
                   unsigned prec) {
  const unsigned n = static_cast<unsigned>(rows.size());
  const unsigned c = static_cast<unsigned>(rows[0].size());
  Mat<WittElem> m(n, c, WittElem::zero(r, prec));
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < c; ++j)
      m.at(i, j) = WittElem::from_int(r, rows[i][j], prec);
  return m;
}

}  // namespace

TEST_CASE("validation: ordinary passes, broken relations are named") {
  auto r = make_witt_ring(3, 1, 2);
  auto gl2 = make_group(GroupKind::GL, 2, {1, 0});
  auto sample = WittElem::zero(r, 2);

  auto ord = dm_standard(DmKind::Ordinary, gl2, sample);
  CHECK(dm_validate(ord).ok);

  DieudonneModule<WittElem> bad{gl2, mat2(r, {{1, 0}, {0, 1}}, 2),
                                mat2(r, {{1, 0}, {0, 1}}, 2),
                                mat2(r, {{1}, {0}}, 2)};
  auto rep = dm_validate(bad);
  CHECK_FALSE(rep.ok);
  CHECK(rep.first() == "F V = p id fails");

  // F = diag(p,1) with hodge e2: the kernel of Fbar is spanned by e1
  DieudonneModule<WittElem> mismatched{gl2, mat2(r, {{3, 0}, {0, 1}}, 2),
                                       mat2(r, {{1, 0}, {0, 3}}, 2),
                                       mat2(r, {{0}, {1}}, 2)};
  auto rep2 = dm_validate(mismatched);
  CHECK_FALSE(rep2.ok);
  CHECK(rep2.first().find("Ker(Fbar)") != std::string::npos);
}

TEST_CASE("module of a group element") {
  auto r = make_witt_ring(3, 1, 2);
  auto gl2 = make_group(GroupKind::GL, 2, {1, 0});
  auto sample = WittElem::zero(r, 2);

  auto id = GroupElem<WittElem>::identity(gl2, sample);
  auto d = dm_from_group_element(id);
  CHECK(d.frob == mat2(r, {{3, 0}, {0, 1}}, 2));
  CHECK(d.versch == mat2(r, {{1, 0}, {0, 3}}, 2));
  CHECK(dm_validate(d).ok);

  GroupElem<WittElem> w(gl2, mat2(r, {{0, 1}, {1, 0}}, 2));
  auto dw = dm_from_group_element(w);
  CHECK(dw.frob == mat2(r, {{0, 1}, {3, 0}}, 2));
  CHECK(dm_validate(dw).ok);

  auto gsp = make_group(GroupKind::GSp, 4, {1, 1, 0, 0});
  ScalarSampler<WittElem> s{r, 2};
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    auto g = random_group_elem(gsp, s, rng);
    CHECK(dm_validate(dm_from_group_element(g)).ok);
  }
}

TEST_CASE("standard fixtures") {
  auto r = make_witt_ring(3, 1, 2);
  auto gl2 = make_group(GroupKind::GL, 2, {1, 0});
  auto sample = WittElem::zero(r, 2);

  auto ord = dm_standard(DmKind::Ordinary, gl2, sample);
  CHECK(ord.frob == mat2(r, {{3, 0}, {0, 1}}, 2));

  auto ss = dm_standard(DmKind::Supersingular, gl2, sample);
  CHECK(ss.frob == mat2(r, {{0, 3}, {1, 0}}, 2));
  CHECK(ss.versch == ss.frob);
  CHECK(ss.hodge == mat2(r, {{0}, {1}}, 2));
  CHECK(dm_validate(ss).ok);

  auto gsp = make_group(GroupKind::GSp, 4, {1, 1, 0, 0});
  auto ord4 = dm_standard(DmKind::Ordinary, gsp, sample);
  Mat<WittElem> want = Mat<WittElem>::identity(4, sample);
  want.at(0, 0) = WittElem::from_int(r, 3, 2);
  want.at(1, 1) = WittElem::from_int(r, 3, 2);
  CHECK(ord4.frob == want);
  CHECK(dm_validate(ord4).ok);

  auto ss4 = dm_standard(DmKind::Supersingular, gsp, sample);
  CHECK(dm_validate(ss4).ok);

  auto gl3 = make_group(GroupKind::GL, 3, {1, 0, 0});
  CHECK_THROWS_AS(dm_standard(DmKind::Supersingular, gl3, sample),
                  UnsupportedShape);
}

TEST_CASE("random modules: seed-stable, validating, distinct") {
  auto r = make_witt_ring(2, 2, 2);
  auto gl3 = make_group(GroupKind::GL, 3, {1, 1, 0});
  ScalarSampler<WittElem> s{r, 2};

  auto a = dm_random(gl3, s, 7);
  auto b = dm_random(gl3, s, 7);
  CHECK(a.frob == b.frob);
  CHECK(a.versch == b.versch);

  auto c = dm_random(gl3, s, 8);
  CHECK_FALSE(a.frob == c.frob);

  for (std::uint64_t seed = 0; seed < 1000; ++seed)
    CHECK(dm_validate(dm_random(gl3, s, seed)).ok);
}

TEST_CASE("normal decompositions") {
  auto r = make_witt_ring(3, 1, 2);
  auto gl2 = make_group(GroupKind::GL, 2, {1, 0});
  auto sample = WittElem::zero(r, 2);

  auto ord = dm_standard(DmKind::Ordinary, gl2, sample);
  auto nd = normal_decomposition(ord);
  CHECK(nd.complement == mat2(r, {{0}, {1}}, 2));

  auto ss = dm_standard(DmKind::Supersingular, gl2, sample);
  auto nd2 = normal_decomposition(ss);
  CHECK(nd2.complement == mat2(r, {{1}, {0}}, 2));

  // beta-induced complement equals beta's weight-0 columns
  GroupElem<WittElem> w(gl2, mat2(r, {{0, 1}, {1, 0}}, 2));
  auto nd3 = normal_decomposition(ss, w);
  CHECK(nd3.complement == mat2(r, {{1}, {0}}, 2));

  DieudonneModule<WittElem> degenerate{gl2, ord.frob, ord.versch,
                                       mat2(r, {{3}, {3}}, 2)};
  CHECK_THROWS_AS(normal_decomposition(degenerate), NotADirectSummand);
}

TEST_CASE("partially divided Frobenius factorization") {
  auto r = make_witt_ring(3, 1, 2);
  auto gl2 = make_group(GroupKind::GL, 2, {1, 0});
  auto sample = WittElem::zero(r, 2);

  auto ord = dm_standard(DmKind::Ordinary, gl2, sample);
  auto gf = gamma_factorization(ord, normal_decomposition(ord));
  CHECK(is_identity(gf.gamma));
  CHECK(gf.f_part == mat2(r, {{3, 0}, {0, 1}}, 2));

  auto ss = dm_standard(DmKind::Supersingular, gl2, sample);
  auto gf2 = gamma_factorization(ss, normal_decomposition(ss));
  CHECK(gf2.gamma == mat2(r, {{0, 1}, {1, 0}}, 1));
  CHECK(gf2.f_part == mat2(r, {{1, 0}, {0, 3}}, 2));

  // gamma f = F at reduced precision, det gamma a unit, across configs
  Rng seeds(99);
  for (auto [p, f, n] : {std::tuple<std::uint64_t, unsigned, unsigned>{2, 1, 2},
                         {2, 2, 3},
                         {3, 1, 3},
                         {5, 1, 2}}) {
    auto ring = make_witt_ring(p, f, n);
    for (auto spec : {make_group(GroupKind::GL, 2, {1, 0}),
                      make_group(GroupKind::GL, 3, {1, 1, 0}),
                      make_group(GroupKind::GSp, 4, {1, 1, 0, 0})}) {
      ScalarSampler<WittElem> s{ring, n};
      for (int k = 0; k < 30; ++k) {
        auto d = dm_random(spec, s, seeds.next());
        auto gfk = gamma_factorization(d, normal_decomposition(d));
        CHECK(is_unit(det(gfk.gamma)));
        CHECK(gfk.gamma * reduce_to_precision_mat(gfk.f_part, n - 1) ==
              reduce_to_precision_mat(d.frob, n - 1));
      }
    }
  }

  // precision bookkeeping
  DieudonneModule<WittElem> shallow{gl2, reduce_to_precision_mat(ord.frob, 1),
                                    reduce_to_precision_mat(ord.versch, 1),
                                    reduce_to_precision_mat(ord.hodge, 1)};
  CHECK_THROWS_AS(gamma_factorization(shallow, normal_decomposition(shallow)),
                  PrecisionExhausted);
}

TEST_CASE("F-zip of a module") {
  auto r = make_witt_ring(3, 1, 2);
  auto gl2 = make_group(GroupKind::GL, 2, {1, 0});
  auto sample = WittElem::zero(r, 2);

  auto ord = dm_standard(DmKind::Ordinary, gl2, sample);
  auto fz = fzip_of(ord);
  // conjugate filtration = column span of Fbar = span(e2)
  CHECK(fz.conjugate == mat2(r, {{0}, {1}}, 1));

  auto ss = dm_standard(DmKind::Supersingular, gl2, sample);
  auto fz2 = fzip_of(ss);
  CHECK(fz2.conjugate == mat2(r, {{0}, {1}}, 1));
  CHECK(fz2.conjugate == reduce_mod_p_mat(ss.hodge));  // conjugate = Hodge

  // rank: dim M0 = m - d on random modules
  Rng seeds(1234);
  auto gsp = make_group(GroupKind::GSp, 4, {1, 1, 0, 0});
  ScalarSampler<WittElem> s{r, 2};
  for (int k = 0; k < 100; ++k) {
    Rng rng(seeds.next());
    auto g = random_group_elem(gsp, s, rng);
    auto d = dm_from_group_element(g);
    auto z = fzip_of(d);
    CHECK(z.conjugate.cols() == 2);  // dim of the conjugate filtration = m - d
    // the conjugate filtration is the span of g's weight-0 columns mod p
    Mat<WittElem> gbar = reduce_mod_p_mat(g.mat());
    Mat<WittElem> zcols(4, 2, WittElem::zero(r, 1));
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned i = 0; i < 4; ++i) zcols.at(i, j) = gbar.at(i, 2 + j);
    for (unsigned j = 0; j < 2; ++j)
      CHECK(in_span(z.conjugate, zcols.column(j)));
  }

  DieudonneModule<WittElem> broken{gl2, mat2(r, {{1, 0}, {0, 1}}, 2),
                                   mat2(r, {{3, 0}, {0, 3}}, 2),
                                   mat2(r, {{1}, {0}}, 2)};
  CHECK_THROWS_AS(fzip_of(broken), ExactnessFailure);
}

TEST_CASE("zip isomorphism data: delta invertible on each summand") {
  Rng seeds(555);
  for (auto [p, f] : {std::pair<std::uint64_t, unsigned>{2, 1}, {3, 1}, {2, 2}}) {
    auto r = make_witt_ring(p, f, 2);
    for (auto spec : {make_group(GroupKind::GL, 2, {1, 0}),
                      make_group(GroupKind::GSp, 4, {1, 1, 0, 0})}) {
      ScalarSampler<WittElem> s{r, 2};
      for (int k = 0; k < 30; ++k) {
        auto d = dm_random(spec, s, seeds.next());
        auto z = fzip_of(d);
        const unsigned m = d.rank(), dd = d.hodge.cols();
        // first summand: [Vbar]^{-1} carries sigma(hodge) to a complement
        // of the conjugate filtration
        Mat<WittElem> hs = frobenius_mat(z.hodge_bar);
        Mat<WittElem> images(m, dd + z.conjugate.cols(), WittElem::zero(r, 1));
        for (unsigned j = 0; j < dd; ++j) {
          auto y = z.delta_hodge_part(hs.column(j));
          // it really is a Vbar-preimage
          std::vector<WittElem> back(m, WittElem::zero(r, 1));
          for (unsigned i = 0; i < m; ++i)
            for (unsigned c = 0; c < m; ++c)
              back[i] = back[i] + z.vbar.at(i, c) * y[c];
          for (unsigned i = 0; i < m; ++i) CHECK(back[i] == hs.column(j)[i]);
          for (unsigned i = 0; i < m; ++i) images.at(i, j) = y[i];
        }
        for (unsigned j = 0; j < z.conjugate.cols(); ++j)
          for (unsigned i = 0; i < m; ++i)
            images.at(i, dd + j) = z.conjugate.at(i, j);
        CHECK(rank_of(images) == m);  // classes independent mod conjugate

        // second summand: Fbar carries a complement of sigma(hodge)
        // isomorphically onto the conjugate filtration
        auto nd = normal_decomposition(d);
        Mat<WittElem> comp_sigma =
            frobenius_mat(reduce_mod_p_mat(nd.complement));
        Mat<WittElem> f_images(m, comp_sigma.cols(), WittElem::zero(r, 1));
        for (unsigned j = 0; j < comp_sigma.cols(); ++j) {
          auto v = z.delta_complement_part(comp_sigma.column(j));
          CHECK(in_span(z.conjugate, v));
          for (unsigned i = 0; i < m; ++i) f_images.at(i, j) = v[i];
        }
        CHECK(rank_of(f_images) == m - dd);
      }
    }
  }
}

#include "doctest.h"
#include "fewlab/geometry.hpp"
#include "fewlab/lp.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace fewlab;

namespace {

MatrixXd cols(std::initializer_list<std::initializer_list<double>> pts) {
  const auto d = static_cast<Eigen::Index>(pts.begin()->size());
  MatrixXd m(d, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index j = 0;
  for (const auto& p : pts) {
    Eigen::Index i = 0;
    for (double x : p) m(i++, j) = x;
    ++j;
  }
  return m;
}

std::set<std::vector<double>> as_set(const MatrixXd& m) {
  std::set<std::vector<double>> s;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    s.insert(std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows()));
  return s;
}

Polytope unit_square() {
  return hull_vertices(Support(cols({{0, 0}, {1, 0}, {0, 1}, {1, 1}})));
}

// Membership of y in the inner normal cone at vertex v, by definition.
bool in_normal_cone(const Polytope& p, int v, const VectorXd& y) {
  for (Eigen::Index j = 0; j < p.num_vertices(); ++j)
    if ((p.vertices.col(j) - p.vertices.col(v)).dot(y) < -1e-9) return false;
  return true;
}

Support random_support(std::mt19937_64& rng, int d, int t, int box) {
  std::uniform_int_distribution<int> u(0, box);
  for (;;) {
    MatrixXd m(d, t);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
    try {
      return Support(m);
    } catch (const std::invalid_argument&) {
    }
  }
}

}  // namespace

TEST_CASE("support validation") {
  CHECK_THROWS(Support(MatrixXd(2, 0)));
  CHECK_THROWS(Support(cols({{0, 1}, {0, 1}})));
  CHECK(Support(cols({{0, 1}, {2, 3}})).exact());
  CHECK_FALSE(Support(cols({{0.5}, {1.0}})).exact());
}

TEST_CASE("hull_vertices examples") {
  SUBCASE("interval endpoints") {
    auto p = hull_vertices(Support(cols({{0}, {3}})));
    CHECK(as_set(p.vertices) == as_set(cols({{0}, {3}})));
    CHECK(p.affine_dim == 1);
  }
  SUBCASE("interior point dropped (floating input)") {
    auto p = hull_vertices(
        Support(cols({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}})));
    CHECK(p.num_vertices() == 4);
    CHECK(as_set(p.vertices) == as_set(cols({{0, 0}, {1, 0}, {0, 1}, {1, 1}})));
    CHECK(p.affine_dim == 2);
  }
  SUBCASE("collinear midpoint") {
    auto p = hull_vertices(Support(cols({{0, 0}, {1, 1}, {2, 2}})));
    CHECK(as_set(p.vertices) == as_set(cols({{0, 0}, {2, 2}})));
    CHECK(p.affine_dim == 1);
  }
  SUBCASE("singleton") {
    auto p = hull_vertices(Support(cols({{3, 4}})));
    CHECK(p.num_vertices() == 1);
    CHECK(p.affine_dim == 0);
  }
  SUBCASE("exact rational input") {
    Matrix<Rational> m(1, 3);
    m << Rational(0), Rational(1, 3), Rational(2, 3);
    auto p = hull_vertices(Support::from_rational(m));
    CHECK(p.num_vertices() == 2);
  }
}

TEST_CASE("hull_vertices is idempotent") {
  std::mt19937_64 rng(7);
  for (int r = 0; r < 30; ++r) {
    auto s = random_support(rng, 2 + r % 2, 8, 5);
    auto p = hull_vertices(s);
    auto q = hull_vertices(Support(p.vertices));
    CHECK(as_set(p.vertices) == as_set(q.vertices));
  }
}

TEST_CASE("minkowski decomposition examples") {
  SUBCASE("two unit segments give a square") {
    std::vector<Polytope> ps = {hull_vertices(Support(cols({{0, 0}, {1, 0}}))),
                                hull_vertices(Support(cols({{0, 0}, {0, 1}})))};
    auto dec = minkowski_vertex_decomposition(ps);
    CHECK(dec.size() == 4);
    for (const auto& e : dec.entries) {
      VectorXd s = ps[0].vertices.col(e.parts[0]) + ps[1].vertices.col(e.parts[1]);
      CHECK((s - e.vertex).norm() == 0.0);
    }
    CHECK(dec.sum().affine_dim == 2);
  }
  SUBCASE("P + P is 2P with diagonal decompositions") {
    std::vector<Polytope> ps = {unit_square(), unit_square()};
    auto dec = minkowski_vertex_decomposition(ps);
    CHECK(dec.size() == 4);
    for (const auto& e : dec.entries) CHECK(e.parts[0] == e.parts[1]);
  }
  SUBCASE("interval sum") {
    std::vector<Polytope> ps = {hull_vertices(Support(cols({{0}, {1}}))),
                                hull_vertices(Support(cols({{0}, {2}})))};
    auto dec = minkowski_vertex_decomposition(ps);
    CHECK(as_set(dec.sum().vertices) == as_set(cols({{0}, {3}})));
  }
  SUBCASE("parallel edges are not strict") {
    // Two horizontal segments: only the endpoint pairs (0,0) and (1,1)
    // survive.
    std::vector<Polytope> ps = {hull_vertices(Support(cols({{0, 0}, {1, 0}}))),
                                hull_vertices(Support(cols({{0, 0}, {1, 0}})))};
    auto dec = minkowski_vertex_decomposition(ps);
    CHECK(dec.size() == 2);
    CHECK(dec.sum().affine_dim == 1);
  }
}

TEST_CASE("minkowski decomposition properties on random instances") {
  std::mt19937_64 rng(11);
  for (int r = 0; r < 25; ++r) {
    const int d = 2 + r % 2;
    std::vector<Polytope> ps;
    std::size_t bound = 1;
    for (int i = 0; i < d; ++i) {
      ps.push_back(hull_vertices(random_support(rng, d, 3 + r % 3, 4)));
      bound *= static_cast<std::size_t>(ps.back().num_vertices());
    }
    auto dec = minkowski_vertex_decomposition(ps);
    CHECK(dec.size() <= bound);

    // Injectivity and the sum law.
    std::set<std::vector<int>> parts;
    for (const auto& e : dec.entries) {
      parts.insert(e.parts);
      VectorXd s = VectorXd::Zero(d);
      for (int i = 0; i < d; ++i) s += ps[i].vertices.col(e.parts[i]);
      CHECK((s - e.vertex).norm() < 1e-12);
    }
    CHECK(parts.size() == dec.size());

    // The listed vertices are exactly the extreme points of the sum.
    MatrixXd all(d, static_cast<Eigen::Index>(bound));
    Eigen::Index c = 0;
    std::vector<int> idx(d, 0);
    for (;;) {
      VectorXd s = VectorXd::Zero(d);
      for (int i = 0; i < d; ++i) s += ps[i].vertices.col(idx[i]);
      all.col(c++) = s;
      int i = 0;
      while (i < d && ++idx[i] == ps[i].num_vertices()) idx[i++] = 0;
      if (i == d) break;
    }
    std::set<std::vector<double>> uniq = as_set(all);
    MatrixXd um(d, static_cast<Eigen::Index>(uniq.size()));
    c = 0;
    for (const auto& v : uniq) um.col(c++) = Eigen::Map<const VectorXd>(v.data(), d);
    CHECK(as_set(hull_vertices(Support(um)).vertices) ==
          as_set(dec.sum().vertices));

    // Normal cone of the sum equals the intersection of summand cones.
    const Polytope P = dec.sum();
    std::normal_distribution<double> g;
    for (std::size_t k = 0; k < dec.size(); ++k) {
      for (int probe = 0; probe < 50; ++probe) {
        VectorXd y(d);
        for (int i = 0; i < d; ++i) y(i) = g(rng);
        bool lhs = in_normal_cone(P, static_cast<int>(k), y);
        bool rhs = true;
        for (int i = 0; i < d; ++i)
          rhs = rhs && in_normal_cone(ps[i], dec.entries[k].parts[i], y);
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("normal_cone examples") {
  const Polytope sq = unit_square();
  SUBCASE("origin corner is the first orthant") {
    VectorXd v = VectorXd::Zero(2);
    Cone c = normal_cone(sq, v);
    CHECK(c.generators.cols() == 2);
    CHECK(cone_contains(c, VectorXd::Unit(2, 0)));
    CHECK(cone_contains(c, VectorXd::Unit(2, 1)));
    CHECK_FALSE(cone_contains(c, -VectorXd::Unit(2, 0)));
    CHECK_FALSE(cone_contains(c, -VectorXd::Unit(2, 1)));
  }
  SUBCASE("corner (1,0) is generated by -e1 and e2") {
    VectorXd v(2);
    v << 1, 0;
    Cone c = normal_cone(sq, v);
    REQUIRE(c.generators.cols() == 2);
    VectorXd a(2), b(2);
    a << -1, 0;
    b << 0, 1;
    auto has = [&](const VectorXd& g) {
      for (Eigen::Index j = 0; j < 2; ++j)
        if ((c.generators.col(j).normalized() - g).norm() < 1e-12) return true;
      return false;
    };
    CHECK(has(a));
    CHECK(has(b));
  }
  SUBCASE("segment gives a half-plane") {
    auto seg = hull_vertices(Support(cols({{0, 0}, {1, 0}})));
    Cone c = normal_cone(seg, VectorXd::Zero(2));
    VectorXd up(2), down(2), right(2), left(2);
    up << 0, 1;
    down << 0, -1;
    right << 1, 0.3;
    left << -1, 0;
    CHECK(cone_contains(c, up));
    CHECK(cone_contains(c, down));
    CHECK(cone_contains(c, right));
    CHECK_FALSE(cone_contains(c, left));
  }
  SUBCASE("non-vertex rejected") {
    VectorXd v(2);
    v << 0.5, 0.5;
    CHECK_THROWS_AS(normal_cone(sq, v), std::invalid_argument);
  }
}

TEST_CASE("normal cone generators satisfy the defining inequalities") {
  std::mt19937_64 rng(5);
  for (int r = 0; r < 20; ++r) {
    const int d = 2 + r % 2;
    auto p = hull_vertices(random_support(rng, d, 7, 6));
    for (int v = 0; v < p.num_vertices(); ++v) {
      Cone c = normal_cone(p, v);
      for (Eigen::Index j = 0; j < c.generators.cols(); ++j)
        CHECK(in_normal_cone(p, v, c.generators.col(j)));
      // A random direction lies in the cone iff it satisfies the inequalities.
      std::normal_distribution<double> g;
      for (int probe = 0; probe < 20; ++probe) {
        VectorXd y(d);
        for (int i = 0; i < d; ++i) y(i) = g(rng);
        CHECK(cone_contains(c, y, 1e-9) == in_normal_cone(p, v, y));
      }
    }
  }
}

TEST_CASE("fan_cover_check") {
  std::vector<Polytope> square = {unit_square()};
  CHECK(fan_cover_check(std::span<const Polytope>(square), 2000));

  std::mt19937_64 rng(3);
  std::vector<Polytope> ps = {hull_vertices(random_support(rng, 2, 6, 6)),
                              hull_vertices(random_support(rng, 2, 5, 6))};
  if (minkowski_vertex_decomposition(ps).sum().affine_dim == 2)
    CHECK(fan_cover_check(ps, 10000, 9));

  std::vector<Polytope> seg = {hull_vertices(Support(cols({{0, 0}, {1, 0}})))};
  CHECK_THROWS_AS(fan_cover_check(seg), DegenerateFanError);
}

TEST_CASE("filtered exact vertex test agrees with the rational simplex") {
  std::mt19937_64 rng(21);
  for (int r = 0; r < 40; ++r) {
    const int d = 1 + r % 3;
    auto s = random_support(rng, d, 9, d == 1 ? 12 : 3);
    REQUIRE(s.exact());
    auto p = hull_vertices(s);
    std::set<int> kept(p.source_index.begin(), p.source_index.end());
    const auto& pts = s.exact_points();
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      Matrix<Rational> others(d, s.size() - 1);
      Eigen::Index c = 0;
      for (Eigen::Index k = 0; k < s.size(); ++k)
        if (k != j) others.col(c++) = pts.col(k);
      const bool vertex = lp::separation_slack<Rational>(
                              others, Vector<Rational>(pts.col(j))) > 0;
      CHECK(vertex == (kept.count(static_cast<int>(j)) == 1));
    }
  }
}

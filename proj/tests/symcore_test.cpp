#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "radialscope/symcore.hpp"

namespace rs = radialscope;
using rs::SymExpr;

namespace {

const std::vector<std::string> kXXi = {"x", "xi"};

double eval_at(const SymExpr& e, const std::vector<std::string>& names, std::vector<double> values) {
  return rs::evaluate(e, names, values);
}

// Random polynomial of bounded degree in the given variables.
SymExpr random_polynomial(const std::vector<std::string>& vars, std::mt19937_64& rng, int terms = 5) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> power(0, 2);
  SymExpr total = 0.0;
  for (int t = 0; t < terms; ++t) {
    SymExpr term = coef(rng);
    for (const auto& v : vars) term = term * pow(SymExpr::variable(v), SymExpr(double(power(rng))));
    total += term;
  }
  return total;
}

}  // namespace

TEST(Parse, ProductOfVariables) {
  const SymExpr e = rs::parse("x*xi", kXXi);
  ASSERT_EQ(e.kind(), rs::NodeKind::product);
  EXPECT_EQ(e.children()[0].name(), "x");
  EXPECT_EQ(e.children()[1].name(), "xi");
}

TEST(Parse, QuotientTree) {
  const SymExpr e = rs::parse("x2*xi2 + x1*xi1^2/xi2", rs::ChartSpec::standard(2));
  ASSERT_EQ(e.kind(), rs::NodeKind::sum);
  EXPECT_EQ(e.children()[1].kind(), rs::NodeKind::quotient);
  EXPECT_NEAR(eval_at(e, {"x1", "x2", "xi1", "xi2"}, {2, 3, 5, 7}), 3 * 7 + 2 * 25.0 / 7, 1e-12);
}

TEST(Parse, SyntaxErrorCarriesOffset) {
  try {
    rs::parse("x*(", kXXi);
    FAIL() << "expected a parse error";
  } catch (const rs::ParseError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
}

TEST(Parse, UnknownIdentifier) {
  EXPECT_THROW(rs::parse("x + y", kXXi), rs::UnknownIdentifier);
  EXPECT_THROW(rs::parse("foo(x)", kXXi), rs::UnknownIdentifier);
  EXPECT_THROW(rs::parse("x )", kXXi), rs::ParseError);
}

TEST(Parse, Precedence) {
  const std::vector<std::string> v = {"a", "b", "c"};
  auto at = [&](const char* text) { return eval_at(rs::parse(text, v), v, {2, 3, 5}); };
  EXPECT_DOUBLE_EQ(at("a + b*c"), 17);
  EXPECT_DOUBLE_EQ(at("-a^2"), -4);
  EXPECT_DOUBLE_EQ(at("a^b^2"), std::pow(2.0, 9.0));
  EXPECT_DOUBLE_EQ(at("a - b - c"), -6);
  EXPECT_DOUBLE_EQ(at("a/b/c"), 2.0 / 15.0);
  EXPECT_DOUBLE_EQ(at("2^-1"), 0.5);
  EXPECT_DOUBLE_EQ(at("1.5e1 + exp(0)"), 16);
}

TEST(Parse, PrintRoundTripIsStable) {
  const std::vector<std::string> v = {"x", "y", "z"};
  for (const char* text : {"x*(y + z)", "-(x - y)^2/z", "x - (y - z)", "exp(-x^2)*sin(y)/(1 + z^2)",
                           "x^(y + 1)", "(-x)^2", "x/(y*z)", "x - -2", "0.1*x + 1e-7*y"}) {
    const SymExpr e = rs::parse(text, v);
    const std::string once = e.to_string();
    const std::string twice = rs::parse(once, v).to_string();
    EXPECT_EQ(once, twice) << text;
    const SymExpr back = rs::parse(once, v);
    EXPECT_NEAR(eval_at(e, v, {0.3, 1.7, 2.2}), eval_at(back, v, {0.3, 1.7, 2.2}), 1e-12) << text;
  }
}

TEST(Differentiate, Basic) {
  const SymExpr x = SymExpr::variable("x");
  const SymExpr xi = SymExpr::variable("xi");
  EXPECT_TRUE(rs::differentiate(x * xi, "x").same(xi));
  const SymExpr d = rs::differentiate(square(xi), "xi");
  EXPECT_DOUBLE_EQ(eval_at(d, kXXi, {0, 3}), 6);
  EXPECT_TRUE(rs::differentiate(x * xi, "z").is_constant(0.0));
}

TEST(Differentiate, AgreesWithCentralDifferences) {
  const std::vector<std::string> v = {"x", "y"};
  const SymExpr e = rs::parse("exp(-x^2)*sin(3*y) + x^3/(2 + y^2) + log(2 + cos(x*y)) + tanh(x - y) + sqrt(3 + x)", v);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-4;
  for (const auto& var : v) {
    const SymExpr d = rs::differentiate(e, var);
    const std::size_t k = var == "x" ? 0 : 1;
    for (int i = 0; i < 100; ++i) {
      std::vector<double> p = {u(rng), u(rng)};
      auto plus = p, minus = p;
      plus[k] += h;
      minus[k] -= h;
      const double fd = (eval_at(e, v, plus) - eval_at(e, v, minus)) / (2 * h);
      EXPECT_NEAR(eval_at(d, v, p), fd, 50 * h * h);
    }
  }
}

TEST(Differentiate, SharedSubtreesStayShared) {
  SymExpr e = SymExpr::variable("x");
  for (int i = 0; i < 30; ++i) e = e * e + 1.0;  // tree size 2^30, DAG size ~ 90
  const SymExpr d = rs::differentiate(e, "x");
  EXPECT_LT(rs::node_count(d), 2000u);
}

TEST(HamiltonField, Definitions) {
  const auto chart1 = rs::ChartSpec::standard(1);
  const auto hp = rs::hamilton_field(rs::parse("x*xi", chart1), chart1);
  EXPECT_EQ(hp["x"].to_string(), "x");
  EXPECT_EQ(hp["xi"].to_string(), "-xi");
  const auto hq = rs::hamilton_field(rs::parse("xi^2", chart1), chart1);
  EXPECT_EQ(hq["x"].to_string(), "2*xi");
  EXPECT_TRUE(hq["xi"].is_constant(0.0));

  const auto chart2 = rs::ChartSpec::standard(2);
  const auto h2 = rs::hamilton_field(rs::parse("x2*xi2", chart2), chart2);
  EXPECT_TRUE(h2["x1"].is_constant(0.0));
  EXPECT_EQ(h2["x2"].to_string(), "x2");
  EXPECT_TRUE(h2["xi1"].is_constant(0.0));
  EXPECT_EQ(h2["xi2"].to_string(), "-xi2");
}

TEST(HamiltonField, RequiresCanonicalChart) {
  const rs::ChartSpec bad({"x", "y"}, {"xi"});
  EXPECT_THROW(rs::hamilton_field(SymExpr::variable("x"), bad), rs::NotCanonical);
  EXPECT_THROW(rs::poisson_bracket(SymExpr::variable("x"), SymExpr::variable("y"), bad), rs::NotCanonical);
}

TEST(HamiltonField, AnnihilatesItsGenerator) {
  const auto chart = rs::ChartSpec::standard(2);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const SymExpr p = random_polynomial(chart.coordinates(), rng);
    const SymExpr hpp = rs::hamilton_field(p, chart).apply(p);
    EXPECT_TRUE(rs::equal_on_samples(hpp, 0.0, rs::default_box(chart), 50, trial).equal);
  }
}

TEST(PoissonBracket, Examples) {
  const auto chart = rs::ChartSpec::standard(1);
  const SymExpr x = SymExpr::variable("x");
  const SymExpr xi = SymExpr::variable("xi");
  EXPECT_DOUBLE_EQ(eval_at(rs::poisson_bracket(xi, x, chart), kXXi, {0.3, 0.7}), 1.0);
  EXPECT_TRUE(rs::poisson_bracket(x * xi, x * xi, chart).is_constant(0.0) ||
              rs::equal_on_samples(rs::poisson_bracket(x * xi, x * xi, chart), 0.0, rs::default_box(chart)).equal);
  // {x xi, x} = d(x xi)/dxi * dx/dx = x.
  EXPECT_TRUE(rs::equal_on_samples(rs::poisson_bracket(x * xi, x, chart), x, rs::default_box(chart)).equal);
}

TEST(PoissonBracket, AntisymmetryAndJacobi) {
  const auto chart = rs::ChartSpec::standard(2);
  const auto box = rs::default_box(chart);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const SymExpr a = random_polynomial(chart.coordinates(), rng, 4);
    const SymExpr b = random_polynomial(chart.coordinates(), rng, 4);
    const SymExpr c = random_polynomial(chart.coordinates(), rng, 4);
    auto br = [&](const SymExpr& u, const SymExpr& v) { return rs::poisson_bracket(u, v, chart); };
    EXPECT_TRUE(rs::equal_on_samples(br(a, b), -br(b, a), box, 100, trial).equal);
    const SymExpr jacobi = br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b));
    const auto cmp = rs::equal_on_samples(jacobi, 0.0, box, 100, trial, 1e-9);
    EXPECT_TRUE(cmp.equal) << cmp.max_residual;
  }
}

TEST(Homogeneity, Degrees) {
  const auto c1 = rs::ChartSpec::standard(1);
  const auto c2 = rs::ChartSpec::standard(2);
  EXPECT_EQ(rs::homogeneity_degree(rs::parse("x*xi", c1), c1), 1.0);
  EXPECT_EQ(rs::homogeneity_degree(rs::parse("xi1^2/xi2", c2), c2), 1.0);
  EXPECT_FALSE(rs::homogeneity_degree(rs::parse("x + xi", c1), c1).has_value());
  EXPECT_EQ(rs::homogeneity_degree(rs::parse("sqrt(xi1^2 + xi2^2)", c2), c2), 1.0);
  EXPECT_EQ(rs::homogeneity_degree(rs::parse("x1^3", c2), c2), 0.0);
  EXPECT_EQ(rs::homogeneity_degree(SymExpr(0.0), c2), 0.0);
}

TEST(Homogeneity, HamiltonDerivativeOfFiberScale) {
  const auto chart = rs::ChartSpec::standard(2);
  for (const char* text : {"x2*xi2", "x2*xi2^2 + x1*xi1^2", "x2*xi2^3 + xi1^2*xi2 + x1*x2*xi1^3"}) {
    const SymExpr p = rs::parse(text, chart);
    const double m = *rs::homogeneity_degree(p, chart);
    const SymExpr hz = rs::hamilton_field(p, chart).apply(SymExpr::variable("xi2"));
    EXPECT_EQ(rs::homogeneity_degree(hz, chart), m) << text;
  }
}

TEST(EqualOnSamples, Examples) {
  const auto chart = rs::ChartSpec::standard(1);
  const SymExpr a = rs::parse("(x + xi)^2", chart);
  const SymExpr b = rs::parse("x^2 + 2*x*xi + xi^2", chart);
  const auto same = rs::equal_on_samples(a, b, rs::default_box(chart));
  EXPECT_TRUE(same.equal);
  EXPECT_LT(same.max_residual, 1e-12);

  rs::SampleBox box;
  box.add("x", -1, 1).add("xi", 1, 2);
  const auto diff = rs::equal_on_samples(rs::parse("x*xi", chart), rs::parse("x*xi + 1e-6*xi", chart), box);
  EXPECT_FALSE(diff.equal);
  EXPECT_GT(diff.max_residual, 5e-7);
  EXPECT_LT(diff.max_residual, 2.1e-6);
}

TEST(EqualOnSamples, DeterministicAndReportsBadPoints) {
  const auto chart = rs::ChartSpec::standard(1);
  const auto box = rs::default_box(chart);
  const SymExpr a = rs::parse("sin(x*xi)", chart);
  const auto r1 = rs::equal_on_samples(a, a + 1e-3 * SymExpr::variable("x"), box, 30, 9);
  const auto r2 = rs::equal_on_samples(a, a + 1e-3 * SymExpr::variable("x"), box, 30, 9);
  EXPECT_EQ(r1.max_residual, r2.max_residual);
  EXPECT_EQ(r1.worst_point, r2.worst_point);

  rs::SampleBox neg;
  neg.add("x", -2, -1).add("xi", 1, 2);
  try {
    rs::equal_on_samples(rs::parse("log(x)", chart), 0.0, neg, 5, 1);
    FAIL() << "expected an evaluation error";
  } catch (const rs::EvaluationError& e) {
    ASSERT_EQ(e.point().size(), 2u);
    EXPECT_LT(e.point()[0], -1.0 + 1e-15);
  }
}

TEST(Compile, MissingVariableIsRejected) {
  EXPECT_THROW(rs::CompiledExpr(SymExpr::variable("q"), {"x"}), rs::InvalidParameters);
}

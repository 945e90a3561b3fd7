#include "swsym/algebra.hpp"
#include "swsym/calculus.hpp"
#include "swsym/vectorfield.hpp"

#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

using namespace swsym;

namespace {

const std::string kFixtures = SWSYM_FIXTURE_DIR;

std::vector<std::string> labels(const std::string& stem, int n) {
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
    return out;
}

LieAlgebra general_algebra() {
    return structure_constants(labels("X", 3), catalog_general());
}

LieAlgebra equator_algebra() {
    return structure_constants(labels("Y", 5), catalog_equator());
}

LieAlgebra pole_algebra() {
    return structure_constants(
        labels("Z", 9), catalog_pole_corrected(Expr::parameter("Omega")));
}

}  // namespace

TEST_CASE("translation catalog is abelian") {
    LieAlgebra alg = general_algebra();
    CHECK(alg.dim() == 3);
    CHECK(is_abelian(alg));
    check_antisymmetry(alg);
    check_jacobi(alg);
}

TEST_CASE("equatorial structure constants") {
    LieAlgebra alg = equator_algebra();
    CHECK(alg.structure(0, 3, 0) == Expr(1));  // [Y1,Y4] = Y1
    CHECK(alg.structure(0, 4, 2) == Expr(1));  // [Y1,Y5] = Y3
    CHECK(alg.structure(1, 3, 1) == Expr(1));  // [Y2,Y4] = Y2
    CHECK(alg.structure(2, 3, 2) == Expr(1));  // [Y3,Y4] = Y3
    CHECK(alg.structure(4, 0, 2) == Expr(-1)); // [Y5,Y1] = -Y3
    int nonzero = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k)
                if (!alg.structure(i, j, k).is_zero()) ++nonzero;
    CHECK(nonzero == 8);
    CHECK(!is_abelian(alg));
    check_antisymmetry(alg);
    check_jacobi(alg);
}

TEST_CASE("polar structure constants carry rotation-parameter coefficients") {
    const Expr omega = Expr::parameter("Omega");
    LieAlgebra alg = pole_algebra();
    // [Z1,Z6] = -2*Omega*Z7
    CHECK(alg.structure(0, 5, 6) == Expr(-2) * omega);
    // [Z1,Z7] = 2*Omega*Z6 (not Z8)
    CHECK(alg.structure(0, 6, 5) == Expr(2) * omega);
    CHECK(alg.structure(0, 6, 7).is_zero());
    // [Z2,Z8] = -Omega*Z7
    CHECK(alg.structure(1, 7, 6) == -omega);
    // [Z3,Z8] = +Omega*Z6
    CHECK(alg.structure(2, 7, 5) == omega);
    // [Z5,Z8] = 0 and [Z5,Z9] = 0
    for (int k = 0; k < 9; ++k) {
        CHECK(alg.structure(4, 7, k).is_zero());
        CHECK(alg.structure(4, 8, k).is_zero());
    }
    // [Z8,Z9] = -2*Omega*Z1 - 2*Omega^2*Z5
    CHECK(alg.structure(7, 8, 0) == Expr(-2) * omega);
    CHECK(alg.structure(7, 8, 4) == Expr(-2) * omega.pow(2));
    // [Z4,Z6] = -Z6, [Z5,Z6] = Z7, [Z5,Z7] = -Z6
    CHECK(alg.structure(3, 5, 5) == Expr(-1));
    CHECK(alg.structure(4, 5, 6) == Expr(1));
    CHECK(alg.structure(4, 6, 5) == Expr(-1));
    check_antisymmetry(alg);
    check_jacobi(alg);
}

TEST_CASE("commutator outside the span raises a closure error") {
    auto ys = catalog_equator();
    // [Y1, Y5] = Y3, which is not in the span of {Y1, Y5}.
    CHECK_THROWS_AS(structure_constants({"Y1", "Y5"}, {ys[0], ys[4]}),
                    ClosureError);
    // {Y1, Y4} closes: [Y1, Y4] = Y1.
    LieAlgebra sub = structure_constants({"Y1", "Y4"}, {ys[0], ys[3]});
    CHECK(sub.structure(0, 1, 0) == Expr(1));
}

TEST_CASE("adjoint matrix of the dilation scales translations exponentially") {
    LieAlgebra alg = equator_algebra();
    Eigen::MatrixXd m = adjoint_numeric(alg, 3, 0.5, 1.0);
    CHECK(std::fabs(m(0, 0) - 1.6487212707001282) < 1e-10);
    CHECK(std::fabs(m(1, 1) - 1.6487212707001282) < 1e-10);
    CHECK(std::fabs(m(3, 3) - 1.0) < 1e-12);
    // Ad(e^{eps Y5}) Y1 = Y1 + eps*Y3.
    Eigen::MatrixXd m5 = adjoint_numeric(alg, 4, 0.7, 1.0);
    CHECK(std::fabs(m5(0, 0) - 1.0) < 1e-12);
    CHECK(std::fabs(m5(2, 0) - 0.7) < 1e-12);
    // Inverse flow composes to the identity.
    for (int i = 0; i < 5; ++i) {
        Eigen::MatrixXd round = adjoint_numeric(alg, i, 0.3, 1.0) *
                                adjoint_numeric(alg, i, -0.3, 1.0);
        CHECK((round - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("adjoint maps are algebra automorphisms numerically") {
    LieAlgebra alg = pole_algebra();
    const double omega = 0.75;
    const int n = alg.dim();
    auto bracket_vec = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
        const std::map<std::string, double> bind = {{"Omega", omega}};
        for (int i = 0; i < n; ++i) {
            if (a(i) == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                if (b(j) == 0.0) continue;
                for (int k = 0; k < n; ++k) {
                    const Expr& c = alg.structure(i, j, k);
                    if (!c.is_zero()) {
                        out(k) += a(i) * b(j) * eval_numeric(c, bind);
                    }
                }
            }
        }
        return out;
    };
    double worst = 0.0;
    for (int gen = 0; gen < n; ++gen) {
        Eigen::MatrixXd ad = adjoint_numeric(alg, gen, 0.2, omega);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                Eigen::VectorXd ei = Eigen::VectorXd::Zero(n);
                Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
                ei(i) = 1.0;
                ej(j) = 1.0;
                Eigen::VectorXd lhs = ad * bracket_vec(ei, ej);
                Eigen::VectorXd rhs = bracket_vec(ad * ei, ad * ej);
                worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
            }
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("commutator reference tables: abelian and equatorial match fully") {
    LieAlgebra gen_alg = general_algebra();
    TableReport rg = commutator_compare(
        gen_alg, load_table_fixture(kFixtures + "/tables/commutator_general.json"));
    CHECK(rg.matched == 9);
    CHECK(rg.mismatched == 0);
    CHECK(rg.unparseable == 0);

    LieAlgebra eq_alg = equator_algebra();
    TableReport re = commutator_compare(
        eq_alg, load_table_fixture(kFixtures + "/tables/commutator_equator.json"));
    CHECK(re.matched == 25);
    CHECK(re.mismatched == 0);
}

TEST_CASE("commutator reference table for the polar catalog has 28 bad cells") {
    LieAlgebra alg = pole_algebra();
    TableReport rep = commutator_compare(
        alg, load_table_fixture(kFixtures + "/tables/commutator_pole.json"));
    CHECK(rep.cells.size() == 81);
    CHECK(rep.matched == 53);
    CHECK(rep.mismatched == 28);
    CHECK(rep.unparseable == 0);
    auto cell = [&](const std::string& r, const std::string& c) -> const TableCell& {
        for (const auto& cl : rep.cells) {
            if (cl.row == r && cl.col == c) return cl;
        }
        throw std::runtime_error("cell not found");
    };
    CHECK(!cell("Z1", "Z7").match);  // listed 2*Omega*Z8, derived 2*Omega*Z6
    CHECK(!cell("Z5", "Z8").match);  // listed -2*Omega*Z8, derived 0
    CHECK(!cell("Z8", "Z9").match);  // wrong sign and Omega^2 weight
    CHECK(cell("Z1", "Z6").match);
    CHECK(cell("Z8", "Z1").match);
    CHECK(cell("Z5", "Z8").detail.find("derived 0") != std::string::npos);
    const std::string text = table_report_text(rep);
    CHECK(text.find("mismatched 28") != std::string::npos);
    CHECK(text.find("!2*Omega*Z8") != std::string::npos);
}

TEST_CASE("adjoint reference tables for abelian and equatorial catalogs") {
    LieAlgebra gen_alg = general_algebra();
    TableReport rg = adjoint_compare(
        gen_alg, load_table_fixture(kFixtures + "/tables/adjoint_general.json"),
        {0.1, 0.5, 1.0}, {1.0}, 1e-10);
    CHECK(rg.matched == 9);
    CHECK(rg.mismatched == 0);

    LieAlgebra eq_alg = equator_algebra();
    TableReport re = adjoint_compare(
        eq_alg, load_table_fixture(kFixtures + "/tables/adjoint_equator.json"),
        {0.1, 0.5, 1.0}, {1.0}, 1e-10);
    CHECK(re.matched == 25);
    CHECK(re.mismatched == 0);
    CHECK(re.unparseable == 0);
}

TEST_CASE("adjoint reference tables for the polar catalog have 32 bad cells") {
    LieAlgebra alg = pole_algebra();
    const std::vector<double> eps = {0.1, 0.3};
    const std::vector<double> omegas = {0.5, 1.0};
    TableReport r1 = adjoint_compare(
        alg, load_table_fixture(kFixtures + "/tables/adjoint_pole_part1.json"),
        eps, omegas, 1e-9);
    TableReport r2 = adjoint_compare(
        alg, load_table_fixture(kFixtures + "/tables/adjoint_pole_part2.json"),
        eps, omegas, 1e-9);
    CHECK(r1.cells.size() == 45);
    CHECK(r2.cells.size() == 36);
    CHECK(r1.unparseable == 0);
    CHECK(r2.unparseable == 0);
    CHECK(r1.mismatched == 14);
    CHECK(r2.mismatched == 18);
    CHECK(r1.matched + r2.matched == 81 - 32);

    auto cell = [](const TableReport& rep, const std::string& r,
                   const std::string& c) -> const TableCell& {
        for (const auto& cl : rep.cells) {
            if (cl.row == r && cl.col == c) return cl;
        }
        throw std::runtime_error("cell not found");
    };
    // Sign typo independent of the defective generators: listed Z5 - eps*Z3,
    // derived Z5 + eps*Z3.
    CHECK(!cell(r1, "Z2", "Z5").match);
    CHECK(cell(r1, "Z3", "Z5").row == "Z3");
    CHECK(!cell(r1, "Z3", "Z5").match);
    CHECK(cell(r1, "Z1", "Z1").match);
    CHECK(cell(r1, "Z5", "Z2").row == "Z5");
    CHECK(cell(r2, "Z1", "Z6").match);
    CHECK(!cell(r2, "Z8", "Z9").match);
    CHECK(cell(r2, "Z8", "Z9").detail.find("coefficient of") !=
          std::string::npos);
}

TEST_CASE("unparseable reference entries are marked, not fatal") {
    LieAlgebra alg = general_algebra();
    FixtureTable fix;
    fix.title = "sample";
    fix.basis = {"X1", "X2", "X3"};
    fix.cells = {{"X1", "X1", "X1"}, {"X1", "X2", "@@bad@@"}};
    TableReport rep = adjoint_compare(alg, fix, {0.1}, {1.0}, 1e-9);
    CHECK(rep.matched == 1);
    CHECK(rep.unparseable == 1);
    CHECK(!rep.cells[1].parseable);
    const std::string text = table_report_text(rep);
    CHECK(text.find("?@@bad@@") != std::string::npos);
}

TEST_CASE("missing reference table raises a fixture error") {
    CHECK_THROWS_AS(load_table_fixture(kFixtures + "/tables/no_such_table.json"),
                    FixtureError);
}

TEST_CASE("representative screen: abelian list is not refuted") {
    LieAlgebra alg = general_algebra();
    OptimalSystemFixture fix =
        load_optimal_fixture(kFixtures + "/optimal_system/general.json");
    CHECK(fix.families.size() == 7);
    ScreenReport rep = optimal_system_screen(alg, fix, 1.0);
    CHECK(rep.findings.empty());
    CHECK(rep.pairs_examined == 42);
    CHECK(rep.not_refuted.size() == 42);
}

TEST_CASE("representative screen: equatorial list has six redundancies") {
    LieAlgebra alg = equator_algebra();
    OptimalSystemFixture fix =
        load_optimal_fixture(kFixtures + "/optimal_system/equator.json");
    CHECK(fix.families.size() == 12);  // the repeated family is kept once
    ScreenReport rep = optimal_system_screen(alg, fix, 1.0);
    REQUIRE(rep.findings.size() == 6);
    CHECK(rep.pairs_examined == 132);
    CHECK(rep.not_refuted.size() == 126);

    auto expect = [&](int idx, const std::string& src, const std::string& tgt,
                      const std::string& gen, double eps) {
        const ScreenFinding& f = rep.findings[idx];
        CHECK(f.source_family == src);
        CHECK(f.target_family == tgt);
        REQUIRE(f.maps.size() == 1);
        CHECK(f.maps[0].first == gen);
        CHECK(f.maps[0].second == doctest::Approx(eps));
        CHECK(f.lambda == doctest::Approx(1.0));
    };
    expect(0, "Y1", "Y1+a3*Y3", "Y5", 1.0);
    expect(1, "Y4", "Y1+a4*Y4", "Y1", -1.0);
    expect(2, "Y1+a2*Y2", "Y1+a2*Y2+a3*Y3", "Y5", 1.0);
    expect(3, "Y1+a3*Y3", "Y1", "Y5", -1.0);
    expect(4, "Y1+a4*Y4", "Y4", "Y1", 1.0);
    expect(5, "Y1+a2*Y2+a3*Y3", "Y1+a2*Y2", "Y5", -1.0);
    CHECK(rep.findings[0].target_instance.at("a3") == doctest::Approx(1.0));
    CHECK(rep.findings[3].source_instance.at("a3") == doctest::Approx(1.0));
    CHECK(rep.findings[5].source_instance.at("a2") == doctest::Approx(1.0));
}

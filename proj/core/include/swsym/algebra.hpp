#pragma once

#include "swsym/expr.hpp"
#include "swsym/vectorfield.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace swsym {

// Commutator of two catalog generators falls outside the span of the catalog.
class ClosureError : public ExprError {
  public:
    using ExprError::ExprError;
};

// A reference-table or catalog file is missing or malformed.
class FixtureError : public ExprError {
  public:
    using ExprError::ExprError;
};

// Finite-dimensional Lie algebra presented by a generator catalog together
// with its structure constants: [e_i, e_j] = sum_k c[i][j][k] * e_k.
// Structure constants are exact expressions in the model parameters.
struct LieAlgebra {
    std::vector<std::string> basis;
    std::vector<VectorField> gens;
    std::vector<std::vector<std::vector<Expr>>> c;
    std::string name;

    int dim() const { return static_cast<int>(basis.size()); }
    const Expr& structure(int i, int j, int k) const { return c.at(i).at(j).at(k); }

    // sum_k C^k_{ij} * label_k with each basis label bound as a parameter symbol.
    Expr bracket_in_basis(int i, int j) const;
};

// Decompose every pairwise commutator of `gens` over the span of `gens`,
// allowing coefficients polynomial in the rotation parameter (degree <= 2)
// whenever that parameter appears in the catalog. The decomposition is exact
// (rational Gaussian elimination); a commutator outside the span raises
// ClosureError naming the offending pair.
LieAlgebra structure_constants(const std::vector<std::string>& labels,
                               const std::vector<VectorField>& gens);

// Invariant checks; throw ExprError with a diagnostic on violation.
void check_antisymmetry(const LieAlgebra& alg);
void check_jacobi(const LieAlgebra& alg);
bool is_abelian(const LieAlgebra& alg);

// Matrix of ad_{e_i} on the basis: (ad_i)_{k,j} = C^k_{ij}, evaluated at a
// numeric value of the rotation parameter.
Eigen::MatrixXd ad_matrix(const LieAlgebra& alg, int i, double omega_value);

// Matrix of Ad(exp(eps * e_i)) = exp(-eps * ad_{e_i}) acting on the basis;
// column j holds the basis coefficients of the image of e_j.
Eigen::MatrixXd adjoint_numeric(const LieAlgebra& alg, int i, double eps,
                                double omega_value);

// One machine-readable reference table: ordered (row, col, entry-text) cells.
struct FixtureTable {
    std::string title;
    std::string kind;  // "commutator" or "adjoint"
    std::vector<std::string> basis;
    struct Cell {
        std::string row, col, entry;
    };
    std::vector<Cell> cells;
    std::vector<std::string> notes;
};

FixtureTable load_table_fixture(const std::string& path);

// Per-cell verdict of a computed-vs-reference comparison. The computed value
// is the ground truth; `detail` explains any discrepancy.
struct TableCell {
    std::string row, col;
    std::string table_text;
    std::string computed_text;
    bool parseable = true;
    bool match = false;
    std::string detail;
};

struct TableReport {
    std::string title;
    std::vector<std::string> basis;
    std::vector<TableCell> cells;
    int matched = 0;
    int mismatched = 0;
    int unparseable = 0;
};

// Exact symbolic comparison of the derived commutator table against a
// reference table whose entries are linear combinations of basis labels.
TableReport commutator_compare(const LieAlgebra& alg, const FixtureTable& fix);

// Numeric comparison of the derived adjoint representation against a
// reference table, sampled over (eps, omega) pairs. Reference entries are
// parsed as expressions in `eps`, the rotation parameter, and the basis
// labels; basis coefficients are extracted by one-hot label evaluation.
TableReport adjoint_compare(const LieAlgebra& alg, const FixtureTable& fix,
                            const std::vector<double>& eps_samples,
                            const std::vector<double>& omega_samples,
                            double tol = 1e-9);

// Human-readable aligned rendering of a table report.
std::string table_report_text(const TableReport& rep);

// One-parameter subalgebra family from a representative list: basis
// coefficients as expressions in named free constants.
struct RepFamily {
    std::string name;
    std::map<std::string, Expr> coeffs;
    std::vector<std::string> constants;
};

struct OptimalSystemFixture {
    std::string algebra;
    std::vector<RepFamily> families;
    std::vector<std::string> notes;
};

OptimalSystemFixture load_optimal_fixture(const std::string& path);

// A sampled adjoint map carrying one representative onto another family's
// representative (up to scale); such a finding contradicts the claimed
// pairwise inequivalence of the list.
struct ScreenFinding {
    std::string source_family;
    std::string target_family;
    std::map<std::string, double> source_instance;
    std::map<std::string, double> target_instance;
    std::vector<std::pair<std::string, double>> maps;  // applied left to right
    double lambda = 0.0;
};

struct ScreenReport {
    std::vector<ScreenFinding> findings;
    std::vector<std::pair<std::string, std::string>> not_refuted;
    int pairs_examined = 0;
    std::vector<double> grid;
    std::vector<double> instance_values;
};

// Necessary-condition screen over a claimed one-dimensional optimal system:
// instantiate each family's free constants over `instance_values`, then for
// every ordered pair of distinct families search compositions of at most two
// single-generator adjoint maps (eps drawn from `grid`) for a scalar multiple
// of a target instance. First witness per family pair is recorded; absence of
// a finding means "not refuted at sampled depth", never proof of optimality.
ScreenReport optimal_system_screen(
    const LieAlgebra& alg, const OptimalSystemFixture& fix, double omega_value,
    const std::vector<double>& grid = {-1.0, -0.5, -0.25, -0.1, 0.1, 0.25, 0.5,
                                       1.0},
    const std::vector<double>& instance_values = {1.0, 2.0},
    double tol = 1e-9);

}  // namespace swsym

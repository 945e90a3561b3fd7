#include "swsym/algebra.hpp"

#include "swsym/calculus.hpp"
#include "swsym/lie.hpp"
#include "swsym/parse.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace swsym {

namespace {

constexpr const char* kRotationParam = "Omega";

const std::vector<std::pair<bool, char>> kSlots = {
    {true, 't'}, {true, 'x'}, {true, 'y'},
    {false, 'u'}, {false, 'v'}, {false, 'h'}};

Expr slot_expr(const VectorField& vf, int slot) {
    const auto& [is_xi, key] = kSlots.at(slot);
    return is_xi ? vf.xi_at(key) : vf.eta_at(key);
}

bool field_mentions(const VectorField& vf, const std::string& name) {
    for (int s = 0; s < 6; ++s) {
        if (contains_symbol(slot_expr(vf, s), name)) return true;
    }
    return false;
}

// Exact solve of A x = b over the rationals (Gauss-Jordan, first-nonzero
// pivoting, free variables set to zero). Returns nullopt when inconsistent.
std::optional<std::vector<Rational>> solve_exact(
    std::vector<std::vector<Rational>> aug, int ncols) {
    const int nrows = static_cast<int>(aug.size());
    std::vector<int> pivot_row_of_col(ncols, -1);
    int rank = 0;
    for (int col = 0; col < ncols && rank < nrows; ++col) {
        int piv = -1;
        for (int r = rank; r < nrows; ++r) {
            if (aug[r][col] != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) continue;
        std::swap(aug[rank], aug[piv]);
        for (int r = 0; r < nrows; ++r) {
            if (r == rank || aug[r][col] == 0) continue;
            Rational f = aug[r][col] / aug[rank][col];
            for (int cc = col; cc <= ncols; ++cc) {
                aug[r][cc] -= f * aug[rank][cc];
            }
        }
        pivot_row_of_col[col] = rank;
        ++rank;
    }
    for (int r = rank; r < nrows; ++r) {
        if (aug[r][ncols] != 0) return std::nullopt;
    }
    std::vector<Rational> x(ncols, Rational(0));
    for (int col = 0; col < ncols; ++col) {
        int r = pivot_row_of_col[col];
        if (r >= 0) x[col] = aug[r][ncols] / aug[r][col];
    }
    return x;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string combo_text(const std::vector<std::pair<double, std::string>>& terms) {
    std::string out;
    bool first = true;
    for (const auto& [coeff, label] : terms) {
        if (first) {
            if (coeff < 0) out += "-";
            out += fmt_double(std::fabs(coeff));
        } else {
            out += coeff < 0 ? " - " : " + ";
            out += fmt_double(std::fabs(coeff));
        }
        out += "*" + label;
        first = false;
    }
    return first ? "0" : out;
}

}  // namespace

Expr LieAlgebra::bracket_in_basis(int i, int j) const {
    Expr out;
    for (int k = 0; k < dim(); ++k) {
        const Expr& coeff = structure(i, j, k);
        if (!coeff.is_zero()) out += coeff * Expr::parameter(basis[k]);
    }
    return out;
}

LieAlgebra structure_constants(const std::vector<std::string>& labels,
                               const std::vector<VectorField>& gens) {
    if (labels.size() != gens.size()) {
        throw ExprError("structure_constants: label/generator count mismatch");
    }
    const int n = static_cast<int>(gens.size());

    std::vector<std::vector<VectorField>> brackets(n);
    bool rotation_present = false;
    for (int i = 0; i < n; ++i) {
        if (field_mentions(gens[i], kRotationParam)) rotation_present = true;
        brackets[i].reserve(n);
        for (int j = 0; j < n; ++j) {
            brackets[i].push_back(vf_commutator(gens[i], gens[j]));
            if (field_mentions(brackets[i][j], kRotationParam)) {
                rotation_present = true;
            }
        }
    }
    const int dmax = rotation_present ? 2 : 0;
    const Expr omega = Expr::parameter(kRotationParam);

    // Candidate column (k, d) contributes Omega^d * e_k; precompute its six
    // slot expressions once.
    const int ncols = n * (dmax + 1);
    std::vector<std::vector<Expr>> col_slots(ncols);
    for (int k = 0; k < n; ++k) {
        for (int d = 0; d <= dmax; ++d) {
            Expr factor = d == 0 ? Expr::integer(1) : omega.pow(d);
            auto& slots = col_slots[k * (dmax + 1) + d];
            slots.reserve(6);
            for (int s = 0; s < 6; ++s) {
                slots.push_back(factor * slot_expr(gens[k], s));
            }
        }
    }

    LieAlgebra alg;
    alg.basis = labels;
    alg.gens = gens;
    alg.c.assign(n, std::vector<std::vector<Expr>>(
                        n, std::vector<Expr>(n, Expr())));

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // Index rows by (slot, monomial) over the union of supports.
            std::vector<std::map<detail::Monomial, int, detail::MonomialLess>>
                row_of(6);
            int nrows = 0;
            auto note_rows = [&](int s, const Expr& e) {
                for (const auto& [mono, coeff] : e.poly()) {
                    (void)coeff;
                    if (row_of[s].emplace(mono, nrows).second) ++nrows;
                }
            };
            for (int s = 0; s < 6; ++s) {
                note_rows(s, slot_expr(brackets[i][j], s));
                for (int col = 0; col < ncols; ++col) {
                    note_rows(s, col_slots[col][s]);
                }
            }

            std::vector<std::vector<Rational>> aug(
                nrows, std::vector<Rational>(ncols + 1, Rational(0)));
            for (int s = 0; s < 6; ++s) {
                for (int col = 0; col < ncols; ++col) {
                    for (const auto& [mono, coeff] : col_slots[col][s].poly()) {
                        aug[row_of[s].at(mono)][col] = coeff;
                    }
                }
                for (const auto& [mono, coeff] :
                     slot_expr(brackets[i][j], s).poly()) {
                    aug[row_of[s].at(mono)][ncols] = coeff;
                }
            }

            auto sol = solve_exact(std::move(aug), ncols);
            if (!sol) {
                throw ClosureError("commutator [" + labels[i] + ", " +
                                   labels[j] +
                                   "] is not in the span of the catalog");
            }
            for (int k = 0; k < n; ++k) {
                Expr coeff;
                for (int d = 0; d <= dmax; ++d) {
                    const Rational& a = (*sol)[k * (dmax + 1) + d];
                    if (a == 0) continue;
                    Expr part(a);
                    if (d > 0) part *= omega.pow(d);
                    coeff += part;
                }
                alg.c[i][j][k] = coeff;
                alg.c[j][i][k] = -coeff;
            }
        }
    }
    return alg;
}

void check_antisymmetry(const LieAlgebra& alg) {
    const int n = alg.dim();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                if (!(alg.structure(i, j, k) + alg.structure(j, i, k))
                         .is_zero()) {
                    throw ExprError("antisymmetry violated for [" +
                                    alg.basis[i] + ", " + alg.basis[j] +
                                    "] component " + alg.basis[k]);
                }
            }
        }
    }
}

void check_jacobi(const LieAlgebra& alg) {
    const int n = alg.dim();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    Expr sum;
                    for (int m = 0; m < n; ++m) {
                        sum += alg.structure(i, j, m) * alg.structure(m, k, l);
                        sum += alg.structure(j, k, m) * alg.structure(m, i, l);
                        sum += alg.structure(k, i, m) * alg.structure(m, j, l);
                    }
                    if (!sum.is_zero()) {
                        throw ExprError(
                            "Jacobi identity violated for (" + alg.basis[i] +
                            ", " + alg.basis[j] + ", " + alg.basis[k] +
                            ") component " + alg.basis[l] + ": " + sum.str());
                    }
                }
            }
        }
    }
}

bool is_abelian(const LieAlgebra& alg) {
    const int n = alg.dim();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                if (!alg.structure(i, j, k).is_zero()) return false;
            }
        }
    }
    return true;
}

Eigen::MatrixXd ad_matrix(const LieAlgebra& alg, int i, double omega_value) {
    const int n = alg.dim();
    Eigen::MatrixXd m(n, n);
    const std::map<std::string, double> bindings = {{kRotationParam, omega_value}};
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            m(k, j) = eval_numeric(alg.structure(i, j, k), bindings);
        }
    }
    return m;
}

Eigen::MatrixXd adjoint_numeric(const LieAlgebra& alg, int i, double eps,
                                double omega_value) {
    Eigen::MatrixXd m = -eps * ad_matrix(alg, i, omega_value);
    return m.exp();
}

FixtureTable load_table_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open reference table: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FixtureError("malformed reference table " + path + ": " +
                           e.what());
    }
    FixtureTable fix;
    try {
        fix.title = j.value("title", "");
        fix.kind = j.value("kind", "");
        for (const auto& b : j.at("basis")) {
            fix.basis.push_back(b.get<std::string>());
        }
        for (const auto& cell : j.at("cells")) {
            fix.cells.push_back({cell.at("row").get<std::string>(),
                                 cell.at("col").get<std::string>(),
                                 cell.at("entry").get<std::string>()});
        }
        if (j.contains("notes")) {
            for (const auto& note : j["notes"]) {
                fix.notes.push_back(note.get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FixtureError("malformed reference table " + path + ": " +
                           e.what());
    }
    for (const auto& cell : fix.cells) {
        for (const std::string* lbl : {&cell.row, &cell.col}) {
            if (std::find(fix.basis.begin(), fix.basis.end(), *lbl) ==
                fix.basis.end()) {
                throw FixtureError("reference table " + path +
                                   " uses label outside its basis: " + *lbl);
            }
        }
    }
    return fix;
}

TableReport commutator_compare(const LieAlgebra& alg, const FixtureTable& fix) {
    TableReport rep;
    rep.title = fix.title;
    rep.basis = fix.basis;
    auto index_of = [&](const std::string& lbl) {
        auto it = std::find(alg.basis.begin(), alg.basis.end(), lbl);
        if (it == alg.basis.end()) {
            throw FixtureError("reference table label not in catalog: " + lbl);
        }
        return static_cast<int>(it - alg.basis.begin());
    };
    for (const auto& fcell : fix.cells) {
        TableCell cell;
        cell.row = fcell.row;
        cell.col = fcell.col;
        cell.table_text = fcell.entry;
        Expr computed =
            alg.bracket_in_basis(index_of(fcell.row), index_of(fcell.col));
        cell.computed_text = computed.str();
        try {
            Expr entry = parse_expr(fcell.entry);
            cell.match = computed == entry;
            if (!cell.match) {
                cell.detail = "derived " + cell.computed_text +
                              ", table has " + entry.str();
            }
        } catch (const ExprError& e) {
            cell.parseable = false;
            cell.detail = std::string("entry not parseable: ") + e.what();
        }
        if (!cell.parseable) {
            ++rep.unparseable;
        } else if (cell.match) {
            ++rep.matched;
        } else {
            ++rep.mismatched;
        }
        rep.cells.push_back(std::move(cell));
    }
    return rep;
}

TableReport adjoint_compare(const LieAlgebra& alg, const FixtureTable& fix,
                            const std::vector<double>& eps_samples,
                            const std::vector<double>& omega_samples,
                            double tol) {
    TableReport rep;
    rep.title = fix.title;
    rep.basis = fix.basis;
    const int n = alg.dim();
    auto index_of = [&](const std::string& lbl) {
        auto it = std::find(alg.basis.begin(), alg.basis.end(), lbl);
        if (it == alg.basis.end()) {
            throw FixtureError("reference table label not in catalog: " + lbl);
        }
        return static_cast<int>(it - alg.basis.begin());
    };
    for (const auto& fcell : fix.cells) {
        TableCell cell;
        cell.row = fcell.row;
        cell.col = fcell.col;
        cell.table_text = fcell.entry;
        const int i = index_of(fcell.row);
        const int j = index_of(fcell.col);

        std::optional<Expr> entry;
        try {
            entry = parse_expr(fcell.entry);
        } catch (const ExprError& e) {
            cell.parseable = false;
            cell.detail = std::string("entry not parseable: ") + e.what();
        }

        bool match = cell.parseable;
        double worst = 0.0;
        std::string worst_note;
        bool first_sample = true;
        for (double eps : eps_samples) {
            for (double omega : omega_samples) {
                Eigen::MatrixXd ad = adjoint_numeric(alg, i, eps, omega);
                if (first_sample) {
                    std::vector<std::pair<double, std::string>> terms;
                    for (int k = 0; k < n; ++k) {
                        if (std::fabs(ad(k, j)) > 1e-12) {
                            terms.emplace_back(ad(k, j), alg.basis[k]);
                        }
                    }
                    cell.computed_text = combo_text(terms);
                    first_sample = false;
                }
                if (!entry) continue;
                std::map<std::string, double> bindings = {
                    {"eps", eps}, {kRotationParam, omega}};
                for (const auto& lbl : alg.basis) bindings[lbl] = 0.0;
                const double base = eval_numeric(*entry, bindings);
                for (int k = 0; k < n; ++k) {
                    bindings[alg.basis[k]] = 1.0;
                    const double table_coeff =
                        eval_numeric(*entry, bindings) - base;
                    bindings[alg.basis[k]] = 0.0;
                    const double dev = std::fabs(table_coeff - ad(k, j));
                    if (dev > worst) {
                        worst = dev;
                        worst_note = "at eps=" + fmt_double(eps) + ", " +
                                     kRotationParam + "=" + fmt_double(omega) +
                                     ": coefficient of " + alg.basis[k] +
                                     " derived " + fmt_double(ad(k, j)) +
                                     ", table gives " + fmt_double(table_coeff);
                    }
                    if (dev > tol) match = false;
                }
            }
        }
        if (cell.parseable) {
            cell.match = match;
            if (!match) cell.detail = worst_note;
        }
        if (!cell.parseable) {
            ++rep.unparseable;
        } else if (cell.match) {
            ++rep.matched;
        } else {
            ++rep.mismatched;
        }
        rep.cells.push_back(std::move(cell));
    }
    return rep;
}

std::string table_report_text(const TableReport& rep) {
    std::vector<std::string> rows, cols;
    for (const auto& cell : rep.cells) {
        if (std::find(rows.begin(), rows.end(), cell.row) == rows.end()) {
            rows.push_back(cell.row);
        }
        if (std::find(cols.begin(), cols.end(), cell.col) == cols.end()) {
            cols.push_back(cell.col);
        }
    }
    std::map<std::pair<std::string, std::string>, const TableCell*> lookup;
    for (const auto& cell : rep.cells) lookup[{cell.row, cell.col}] = &cell;

    auto cell_text = [&](const std::string& r,
                         const std::string& c) -> std::string {
        auto it = lookup.find({r, c});
        if (it == lookup.end()) return "";
        const TableCell& cell = *it->second;
        std::string mark = cell.parseable ? (cell.match ? "" : "!") : "?";
        return mark + cell.table_text;
    };

    std::vector<std::size_t> widths(cols.size() + 1, 0);
    for (const auto& r : rows) widths[0] = std::max(widths[0], r.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        widths[c + 1] = cols[c].size();
        for (const auto& r : rows) {
            widths[c + 1] = std::max(widths[c + 1], cell_text(r, cols[c]).size());
        }
    }

    std::ostringstream out;
    out << rep.title << "\n";
    out << "matched " << rep.matched << " / mismatched " << rep.mismatched
        << " / unparseable " << rep.unparseable << " (" << rep.cells.size()
        << " cells); '!' marks a table entry that disagrees with the derived "
           "value, '?' an unparseable entry\n";
    auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    out << pad("", widths[0]);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << "  " << pad(cols[c], widths[c + 1]);
    }
    out << "\n";
    for (const auto& r : rows) {
        out << pad(r, widths[0]);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << "  " << pad(cell_text(r, cols[c]), widths[c + 1]);
        }
        out << "\n";
    }
    bool any_detail = false;
    for (const auto& cell : rep.cells) {
        if (!cell.detail.empty()) {
            if (!any_detail) out << "details:\n";
            any_detail = true;
            out << "  [" << cell.row << ", " << cell.col
                << "]: " << cell.detail << "\n";
        }
    }
    return out.str();
}

OptimalSystemFixture load_optimal_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open representative list: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FixtureError("malformed representative list " + path + ": " +
                           e.what());
    }
    OptimalSystemFixture fix;
    try {
        fix.algebra = j.value("algebra", "");
        for (const auto& fam : j.at("families")) {
            RepFamily rf;
            rf.name = fam.at("name").get<std::string>();
            for (const auto& [label, text] : fam.at("coeffs").items()) {
                rf.coeffs[label] = parse_expr(text.get<std::string>());
            }
            if (fam.contains("constants")) {
                for (const auto& cname : fam["constants"]) {
                    rf.constants.push_back(cname.get<std::string>());
                }
            }
            fix.families.push_back(std::move(rf));
        }
        if (j.contains("notes")) {
            for (const auto& note : j["notes"]) {
                fix.notes.push_back(note.get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FixtureError("malformed representative list " + path + ": " +
                           e.what());
    }
    return fix;
}

namespace {

struct RepInstance {
    std::map<std::string, double> assignment;
    Eigen::VectorXd vec;
};

std::vector<RepInstance> instantiate(const RepFamily& fam,
                                     const std::vector<std::string>& basis,
                                     const std::vector<double>& values) {
    std::vector<std::map<std::string, double>> assignments = {{}};
    for (const auto& cname : fam.constants) {
        std::vector<std::map<std::string, double>> grown;
        for (const auto& partial : assignments) {
            for (double v : values) {
                auto next = partial;
                next[cname] = v;
                grown.push_back(std::move(next));
            }
        }
        assignments = std::move(grown);
    }
    std::vector<RepInstance> out;
    for (const auto& assignment : assignments) {
        RepInstance inst;
        inst.assignment = assignment;
        inst.vec = Eigen::VectorXd::Zero(static_cast<int>(basis.size()));
        for (std::size_t k = 0; k < basis.size(); ++k) {
            auto it = fam.coeffs.find(basis[k]);
            if (it != fam.coeffs.end()) {
                inst.vec(static_cast<int>(k)) =
                    eval_numeric(it->second, assignment);
            }
        }
        out.push_back(std::move(inst));
    }
    return out;
}

std::optional<double> proportional(const Eigen::VectorXd& r,
                                   const Eigen::VectorXd& t, double tol) {
    int idx = 0;
    t.cwiseAbs().maxCoeff(&idx);
    if (std::fabs(t(idx)) <= tol) return std::nullopt;
    const double lambda = r(idx) / t(idx);
    if (std::fabs(lambda) <= tol) return std::nullopt;
    if ((r - lambda * t).cwiseAbs().maxCoeff() > tol) return std::nullopt;
    return lambda;
}

}  // namespace

ScreenReport optimal_system_screen(const LieAlgebra& alg,
                                   const OptimalSystemFixture& fix,
                                   double omega_value,
                                   const std::vector<double>& grid,
                                   const std::vector<double>& instance_values,
                                   double tol) {
    ScreenReport rep;
    rep.grid = grid;
    rep.instance_values = instance_values;
    const int n = alg.dim();

    std::vector<std::pair<std::string, double>> map_keys;
    std::vector<Eigen::MatrixXd> map_mats;
    for (int k = 0; k < n; ++k) {
        for (double eps : grid) {
            map_keys.emplace_back(alg.basis[k], eps);
            map_mats.push_back(adjoint_numeric(alg, k, eps, omega_value));
        }
    }
    const int nmaps = static_cast<int>(map_mats.size());

    std::vector<std::vector<RepInstance>> instances;
    instances.reserve(fix.families.size());
    for (const auto& fam : fix.families) {
        instances.push_back(instantiate(fam, alg.basis, instance_values));
    }

    // All depth-1 then depth-2 images of each source instance, with the map
    // sequence that produced them, in search order.
    struct Image {
        Eigen::VectorXd vec;
        std::vector<int> path;
    };
    auto images_of = [&](const Eigen::VectorXd& v) {
        std::vector<Image> images;
        images.reserve(nmaps + nmaps * nmaps);
        for (int m = 0; m < nmaps; ++m) {
            images.push_back({map_mats[m] * v, {m}});
        }
        for (int m1 = 0; m1 < nmaps; ++m1) {
            const Eigen::VectorXd mid = map_mats[m1] * v;
            for (int m2 = 0; m2 < nmaps; ++m2) {
                images.push_back({map_mats[m2] * mid, {m1, m2}});
            }
        }
        return images;
    };

    const std::size_t nfam = fix.families.size();
    std::vector<std::vector<std::vector<Image>>> image_cache(nfam);
    for (std::size_t f = 0; f < nfam; ++f) {
        for (const auto& inst : instances[f]) {
            image_cache[f].push_back(images_of(inst.vec));
        }
    }

    for (std::size_t fs = 0; fs < nfam; ++fs) {
        for (std::size_t ft = 0; ft < nfam; ++ft) {
            if (fs == ft) continue;
            ++rep.pairs_examined;
            bool found = false;
            for (std::size_t si = 0; si < instances[fs].size() && !found;
                 ++si) {
                for (const auto& tgt : instances[ft]) {
                    for (const auto& img : image_cache[fs][si]) {
                        auto lambda = proportional(img.vec, tgt.vec, tol);
                        if (!lambda) continue;
                        ScreenFinding finding;
                        finding.source_family = fix.families[fs].name;
                        finding.target_family = fix.families[ft].name;
                        finding.source_instance =
                            instances[fs][si].assignment;
                        finding.target_instance = tgt.assignment;
                        for (int m : img.path) {
                            finding.maps.push_back(map_keys[m]);
                        }
                        finding.lambda = *lambda;
                        rep.findings.push_back(std::move(finding));
                        found = true;
                        break;
                    }
                    if (found) break;
                }
            }
            if (!found) {
                rep.not_refuted.emplace_back(fix.families[fs].name,
                                             fix.families[ft].name);
            }
        }
    }
    return rep;
}

}  // namespace swsym

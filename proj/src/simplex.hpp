#pragma once
// Dense two-phase simplex for small/medium LPs (hundreds of rows/cols).
// Variables are free by default (split internally); constraints are <=, >=, ==.
#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace gapkit {

// Sparse affine expression over LP variables: sum(coeff * var) + cst.
struct LinExpr {
    std::vector<std::pair<int, double>> terms;
    double cst = 0.0;

    LinExpr() = default;
    explicit LinExpr(double c) : cst(c) {}

    static LinExpr var(int idx, double coeff = 1.0) {
        LinExpr e;
        e.terms.push_back({idx, coeff});
        return e;
    }
    LinExpr& add(int idx, double coeff) {
        if (coeff != 0.0) terms.push_back({idx, coeff});
        return *this;
    }
    LinExpr& operator+=(const LinExpr& o) {
        for (auto& t : o.terms) terms.push_back(t);
        cst += o.cst;
        return *this;
    }
    LinExpr operator-() const {
        LinExpr e;
        e.cst = -cst;
        e.terms.reserve(terms.size());
        for (auto& t : terms) e.terms.push_back({t.first, -t.second});
        return e;
    }
};

class LinearProgram {
  public:
    enum Rel { LE, GE, EQ };

    struct Row {
        std::vector<std::pair<int, double>> terms;
        Rel rel;
        double rhs;
    };

    int add_var(double obj = 0.0, bool nonneg = false) {
        obj_.push_back(obj);
        nonneg_.push_back(nonneg);
        return static_cast<int>(obj_.size()) - 1;
    }
    void set_obj(int var, double coeff) { obj_[var] = coeff; }

    void add_row(const LinExpr& lhs, Rel rel, double rhs) {
        rows_.push_back({lhs.terms, rel, rhs - lhs.cst});
    }
    // lhs <= rhs_expr  (moves everything to the left side)
    void add_le(const LinExpr& lhs, const LinExpr& rhs) {
        LinExpr e = lhs;
        e += -rhs;
        add_row(e, LE, 0.0);
    }
    void add_eq(const LinExpr& lhs, const LinExpr& rhs) {
        LinExpr e = lhs;
        e += -rhs;
        add_row(e, EQ, 0.0);
    }

    int num_vars() const { return static_cast<int>(obj_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }

    const std::vector<double>& objective() const { return obj_; }
    const std::vector<char>& nonneg_flags() const { return nonneg_; }
    const std::vector<Row>& rows() const { return rows_; }

  private:
    std::vector<double> obj_;
    std::vector<char> nonneg_;
    std::vector<Row> rows_;
};

struct LpResult {
    enum Status { Optimal, Infeasible, Unbounded, IterLimit } status = IterLimit;
    double value = 0.0;
    Eigen::VectorXd x;  // per original variable

    bool ok() const { return status == Optimal; }
};

LpResult solve_lp(const LinearProgram& lp);

}  // namespace gapkit

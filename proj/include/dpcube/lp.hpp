#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dpcube {

enum class Relation { LessEq, GreaterEq, Equal };

// min c'x  s.t.  A x {<=,>=,=} b,  x >= 0, with A given as sparse triplets.
struct LinearProgram {
    struct Entry {
        int row;
        int col;
        double value;
    };

    int num_vars = 0;
    std::vector<double> objective;
    std::vector<Entry> entries;
    std::vector<Relation> relations;
    std::vector<double> rhs;

    int num_rows() const { return static_cast<int>(rhs.size()); }

    int add_row(Relation rel, double b) {
        relations.push_back(rel);
        rhs.push_back(b);
        return num_rows() - 1;
    }

    void set(int row, int col, double value) {
        if (value != 0.0) entries.push_back({row, col, value});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    std::vector<double> x;
    double objective = 0.0;
    long iterations = 0;
};

class LpSolverError : public std::runtime_error {
public:
    explicit LpSolverError(const std::string& what) : std::runtime_error(what) {}
};

// Two-phase simplex (revised form, dense basis inverse) with Dantzig pricing
// and an automatic switch to Bland's rule on stalls. Deterministic: identical
// input gives the identical basis sequence.
LpSolution lp_solve(const LinearProgram& lp, double tol = 1e-9);

}  // namespace dpcube

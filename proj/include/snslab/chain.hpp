#pragma once

// Finite-state switching chain r(t) on {0, ..., m-1}: generator, the interval
// (Skorohod) representation driven by a Poisson random measure, a Gillespie
// simulator used as its oracle, and matrix-exponential transition laws.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "snslab/random.hpp"

namespace snslab {

class Generator {
public:
    Generator() = default;
    /// Off-diagonal rates; the diagonal of `rates` is ignored and recomputed.
    explicit Generator(const Eigen::MatrixXd& rates);
    /// Accepts a full matrix whose rows must already sum to zero.
    static Generator from_full(const Eigen::MatrixXd& gamma, double tol = 1e-12);

    int regimes() const { return static_cast<int>(gamma_.rows()); }
    const Eigen::MatrixXd& matrix() const { return gamma_; }
    double rate(int i, int j) const { return gamma_(i, j); }
    double exit_rate(int i) const { return -gamma_(i, i); }
    double norm_inf() const;

    /// Strong connectivity of the positive-rate digraph.
    bool irreducible() const;

private:
    Eigen::MatrixXd gamma_;
};

struct Interval {
    int from = 0;
    int to = 0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Consecutive half-open intervals [lo, hi) of length gamma_ij, laid out
/// row by row (i = 0..m-1, j != i ascending).
class IntervalTable {
public:
    IntervalTable() = default;
    explicit IntervalTable(const Generator& g);

    const std::vector<Interval>& intervals() const { return intervals_; }
    double total_length() const { return total_; }
    /// j - i when y lies in the interval of row i pointing to j, else 0.
    int h_jump(int i, double y) const;
    /// Sum of interval lengths in row i.
    double row_length(int i) const;

private:
    std::vector<Interval> intervals_;
    std::vector<std::size_t> row_begin_;
    double total_ = 0.0;
};

IntervalTable build_intervals(const Generator& g);
inline int h_jump(int i, double y, const IntervalTable& t) { return t.h_jump(i, y); }

/// Right-continuous step path.
class ChainPath {
public:
    ChainPath() = default;
    ChainPath(int initial, double horizon) : initial_(initial), horizon_(horizon) {}

    int initial() const { return initial_; }
    double horizon() const { return horizon_; }
    void set_horizon(double T) { horizon_ = T; }
    const std::vector<double>& jump_times() const { return times_; }
    const std::vector<int>& states() const { return states_; }
    std::size_t jump_count() const { return times_.size(); }

    void push(double t, int state);
    int at(double t) const;        ///< r(t)
    int before(double t) const;    ///< r(t-)
    /// Time spent in each state over [0, horizon].
    std::vector<double> occupation(int m) const;
    /// Completed holding times per state (the final censored sojourn is dropped).
    std::vector<std::vector<double>> holding_times(int m) const;
    /// transitions[i][j] counts i -> j jumps.
    std::vector<std::vector<long>> transition_counts(int m) const;

private:
    int initial_ = 0;
    double horizon_ = 0.0;
    std::vector<double> times_;
    std::vector<int> states_;
};

struct ChainAtom {
    double time = 0.0;
    double y = 0.0;
};

/// Atoms of the Poisson random measure with intensity dt x Lebesgue on
/// [t0, t1) x [0, L).
std::vector<ChainAtom> sample_chain_atoms(double total_length, double t0, double t1,
                                          RandomStream& rng);

/// Drives a path from i0 with given atoms (sorted by time).
ChainPath apply_atoms(const IntervalTable& table, int i0, double T,
                      const std::vector<ChainAtom>& atoms);

ChainPath simulate_chain_skorohod(const Generator& g, int i0, double T, RandomStream& rng);
ChainPath simulate_chain_gillespie(const Generator& g, int i0, double T, RandomStream& rng);

/// exp(t Gamma) by scaling and squaring of a truncated Taylor series.
Eigen::MatrixXd transition_matrix(const Generator& g, double t);

/// pi Gamma = 0, sum pi = 1. Throws for reducible generators.
Eigen::VectorXd stationary_distribution(const Generator& g);

}  // namespace snslab

#include "snslab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace snslab {

Generator::Generator(const Eigen::MatrixXd& rates) : gamma_(rates) {
    if (rates.rows() != rates.cols() || rates.rows() < 1)
        throw std::invalid_argument("Generator: rate matrix must be square and nonempty");
    const auto m = rates.rows();
    for (Eigen::Index i = 0; i < m; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            const double r = rates(i, j);
            if (!std::isfinite(r) || r < 0.0)
                throw std::invalid_argument("Generator: rate (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") must be finite and nonnegative");
            row += r;
        }
        gamma_(i, i) = -row;
    }
}

Generator Generator::from_full(const Eigen::MatrixXd& gamma, double tol) {
    Generator g(gamma);
    for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
        const double scale = std::max(1.0, std::abs(g.gamma_(i, i)));
        if (std::abs(gamma(i, i) - g.gamma_(i, i)) > tol * scale)
            throw std::invalid_argument("Generator: row " + std::to_string(i) + " does not sum to zero");
    }
    return g;
}

double Generator::norm_inf() const { return gamma_.cwiseAbs().rowwise().sum().maxCoeff(); }

bool Generator::irreducible() const {
    const int m = regimes();
    auto reach_all = [&](bool transpose) {
        std::vector<char> seen(m, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < m; ++j) {
                const double r = transpose ? gamma_(j, i) : gamma_(i, j);
                if (j != i && r > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach_all(false) && reach_all(true);
}

// ---------------------------------------------------------------------------

IntervalTable::IntervalTable(const Generator& g) {
    const int m = g.regimes();
    double offset = 0.0;
    for (int i = 0; i < m; ++i) {
        row_begin_.push_back(intervals_.size());
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            const double len = g.rate(i, j);
            if (len <= 0.0) continue;
            intervals_.push_back({i, j, offset, offset + len});
            offset += len;
        }
    }
    row_begin_.push_back(intervals_.size());
    total_ = offset;
}

int IntervalTable::h_jump(int i, double y) const {
    if (i < 0 || static_cast<std::size_t>(i) + 1 >= row_begin_.size()) return 0;
    const auto first = intervals_.begin() + static_cast<std::ptrdiff_t>(row_begin_[i]);
    const auto last = intervals_.begin() + static_cast<std::ptrdiff_t>(row_begin_[i + 1]);
    const auto it = std::upper_bound(first, last, y, [](double v, const Interval& iv) { return v < iv.hi; });
    if (it == last || y < it->lo) return 0;
    return it->to - it->from;
}

double IntervalTable::row_length(int i) const {
    double s = 0.0;
    for (std::size_t k = row_begin_[i]; k < row_begin_[i + 1]; ++k) s += intervals_[k].hi - intervals_[k].lo;
    return s;
}

IntervalTable build_intervals(const Generator& g) { return IntervalTable(g); }

// ---------------------------------------------------------------------------

void ChainPath::push(double t, int state) {
    if (!times_.empty() && t <= times_.back())
        throw std::invalid_argument("ChainPath: jump times must be strictly increasing");
    times_.push_back(t);
    states_.push_back(state);
}

int ChainPath::at(double t) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return initial_;
    return states_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

int ChainPath::before(double t) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return initial_;
    return states_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

std::vector<double> ChainPath::occupation(int m) const {
    std::vector<double> occ(m, 0.0);
    double t = 0.0;
    int s = initial_;
    for (std::size_t k = 0; k < times_.size() && times_[k] <= horizon_; ++k) {
        occ[s] += times_[k] - t;
        t = times_[k];
        s = states_[k];
    }
    occ[s] += horizon_ - t;
    return occ;
}

std::vector<std::vector<double>> ChainPath::holding_times(int m) const {
    std::vector<std::vector<double>> out(m);
    double t = 0.0;
    int s = initial_;
    for (std::size_t k = 0; k < times_.size(); ++k) {
        out[s].push_back(times_[k] - t);
        t = times_[k];
        s = states_[k];
    }
    return out;
}

std::vector<std::vector<long>> ChainPath::transition_counts(int m) const {
    std::vector<std::vector<long>> c(m, std::vector<long>(m, 0));
    int s = initial_;
    for (int next : states_) {
        ++c[s][next];
        s = next;
    }
    return c;
}

std::vector<ChainAtom> sample_chain_atoms(double total_length, double t0, double t1, RandomStream& rng) {
    std::vector<ChainAtom> atoms;
    if (total_length <= 0.0 || t1 <= t0) return atoms;
    const long n = rng.poisson(total_length * (t1 - t0));
    atoms.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) atoms.push_back({rng.uniform(t0, t1), 0.0});
    std::sort(atoms.begin(), atoms.end(), [](const ChainAtom& a, const ChainAtom& b) { return a.time < b.time; });
    for (auto& a : atoms) a.y = rng.uniform(0.0, total_length);
    return atoms;
}

ChainPath apply_atoms(const IntervalTable& table, int i0, double T, const std::vector<ChainAtom>& atoms) {
    ChainPath path(i0, T);
    int state = i0;
    for (const auto& a : atoms) {
        if (a.time > T) break;
        const int dj = table.h_jump(state, a.y);
        if (dj == 0) continue;
        state += dj;
        path.push(a.time, state);
    }
    return path;
}

namespace {

void check_start(const Generator& g, int i0, double T) {
    if (!(T >= 0.0)) throw std::invalid_argument("chain simulation: horizon must be nonnegative");
    if (i0 < 0 || i0 >= g.regimes()) throw std::invalid_argument("chain simulation: initial state out of range");
}

}  // namespace

ChainPath simulate_chain_skorohod(const Generator& g, int i0, double T, RandomStream& rng) {
    check_start(g, i0, T);
    const IntervalTable table(g);
    return apply_atoms(table, i0, T, sample_chain_atoms(table.total_length(), 0.0, T, rng));
}

ChainPath simulate_chain_gillespie(const Generator& g, int i0, double T, RandomStream& rng) {
    check_start(g, i0, T);
    ChainPath path(i0, T);
    const int m = g.regimes();
    int state = i0;
    double t = 0.0;
    while (true) {
        const double rate = g.exit_rate(state);
        if (rate <= 0.0) break;
        t += rng.exponential(rate);
        if (t > T) break;
        double u = rng.uniform() * rate;
        int next = state;
        for (int j = 0; j < m; ++j) {
            if (j == state) continue;
            next = j;
            u -= g.rate(state, j);
            if (u < 0.0) break;
        }
        state = next;
        path.push(t, state);
    }
    return path;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd transition_matrix(const Generator& g, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("transition_matrix: t must be nonnegative");
    const Eigen::MatrixXd a = t * g.matrix();
    return a.exp();
}

Eigen::VectorXd stationary_distribution(const Generator& g) {
    if (!g.irreducible()) throw std::invalid_argument("stationary_distribution: generator is reducible");
    const Eigen::Index m = g.regimes();
    Eigen::MatrixXd a = g.matrix().transpose();
    a.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
    // one refinement step keeps the residual at machine precision for stiff rates
    const Eigen::VectorXd r = rhs - a * pi;
    pi += a.fullPivLu().solve(r);
    return pi;
}

}  // namespace snslab

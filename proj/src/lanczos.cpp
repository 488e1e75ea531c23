#include "xxz/lanczos.hpp"

#include <algorithm>
#include <cmath>

#include "xxz/errors.hpp"

namespace xxz {

namespace {

// splitmix64, for deterministic start vectors
double unit_noise(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
}

Eigen::VectorXd start_vector(std::size_t dim, std::uint64_t seed) {
    Eigen::VectorXd v(dim);
    std::uint64_t s = seed * 0x9E3779B97F4A7C15ull + 0x243F6A8885A308D3ull;
    for (std::size_t i = 0; i < dim; ++i) v[i] = unit_noise(s);
    return v;
}

void orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, int cols) {
    if (cols == 0) return;
    const auto b = basis.leftCols(cols);
    w.noalias() -= b * (b.transpose() * w);
}

}  // namespace

LanczosResult lanczos_lowest(const SymmetricOp& op, int k, const LanczosOptions& opts) {
    LanczosResult out;
    const std::size_t dim = op.dim;
    if (dim == 0 || k <= 0) return out;
    k = std::min<int>(k, static_cast<int>(dim));

    if (dim == 1) {
        Eigen::VectorXd e = Eigen::VectorXd::Ones(1), y(1);
        op.apply(e, y);
        out.values = {y[0]};
        out.vectors = e;
        out.residuals = {0.0};
        out.converged = true;
        return out;
    }

    const int cap = opts.max_subspace > 0
                        ? std::min<int>(opts.max_subspace, static_cast<int>(dim))
                        : std::min<int>(360, static_cast<int>(dim));

    Eigen::MatrixXd locked(dim, k);
    std::vector<double> locked_vals;
    int n_locked = 0;
    std::uint64_t seed = opts.seed;

    Eigen::MatrixXd v(dim, cap);
    std::vector<double> alpha, beta;
    Eigen::VectorXd w(dim), av(dim);
    double scale = 1.0;

    Eigen::VectorXd carry;  // unconverged best Ritz vector, continued next pass
    for (int restart = 0; restart < opts.max_restarts && n_locked < k; ++restart) {
        // Start vector: warm or carried over, pseudo-random otherwise, kept
        // orthogonal to everything already locked.
        Eigen::VectorXd v0;
        if (restart == 0 && opts.warm_start && opts.warm_start->size() == static_cast<long>(dim))
            v0 = *opts.warm_start + 1e-3 * start_vector(dim, seed);
        else if (carry.size() == static_cast<long>(dim))
            v0 = carry;
        else
            v0 = start_vector(dim, ++seed);
        carry.resize(0);
        orthogonalize(v0, locked, n_locked);
        double nrm = v0.norm();
        if (nrm < 1e-12) {
            v0 = start_vector(dim, ++seed);
            orthogonalize(v0, locked, n_locked);
            nrm = v0.norm();
        }
        v.col(0) = v0 / nrm;
        alpha.clear();
        beta.clear();

        int j = 0;
        bool breakdown = false;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
        const int want = k - n_locked;
        int check_every = 8;
        while (j < cap) {
            op.apply(v.col(j), w);
            ++out.iterations;
            if (j > 0) w.noalias() -= beta[j - 1] * v.col(j - 1);
            const double a = v.col(j).dot(w);
            alpha.push_back(a);
            w.noalias() -= a * v.col(j);
            // full reorthogonalization, second pass only if cancellation was heavy
            const double pre = w.norm();
            orthogonalize(w, locked, n_locked);
            orthogonalize(w, v, j + 1);
            double b = w.norm();
            if (b < 0.7 * pre) {
                orthogonalize(w, locked, n_locked);
                orthogonalize(w, v, j + 1);
                b = w.norm();
            }
            scale = std::max({scale, std::abs(a), b});
            ++j;
            if (b <= 1e-13 * scale) {
                breakdown = true;  // invariant subspace: Ritz pairs are exact
                beta.push_back(0.0);
                break;
            }
            beta.push_back(b);
            if (j == cap) break;
            v.col(j) = w / b;

            if (j % check_every == 0 && j >= want) {
                Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j, j);
                for (int i = 0; i < j; ++i) {
                    t(i, i) = alpha[i];
                    if (i + 1 < j) t(i, i + 1) = t(i + 1, i) = beta[i];
                }
                small.compute(t);
                bool all_ok = true;
                for (int q = 0; q < want && q < j; ++q)
                    if (std::abs(b * small.eigenvectors()(j - 1, q)) > opts.tol * scale) {
                        all_ok = false;
                        break;
                    }
                if (all_ok) break;
                if (j > 64) check_every = 16;
            }
        }

        // Ritz extraction: lock converged pairs, carry the best leftover.
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < m && beta[i] != 0.0) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
        const double last_beta = breakdown || beta.empty() ? 0.0 : beta.back();
        const int take = std::min(m, k - n_locked);
        for (int q = 0; q < take; ++q) {
            const double est = std::abs(last_beta * ritz.eigenvectors()(m - 1, q));
            Eigen::VectorXd x = v.leftCols(m) * ritz.eigenvectors().col(q);
            if (est > opts.tol * scale) {
                if (q == 0) carry = x;  // continue converging it next pass
                break;
            }
            orthogonalize(x, locked, n_locked);
            const double nx = x.norm();
            if (nx < 1e-8) continue;
            x /= nx;
            locked.col(n_locked) = x;
            locked_vals.push_back(ritz.eigenvalues()[q]);
            ++n_locked;
            if (n_locked == k) break;
        }
    }

    // Sort locked pairs ascending and compute explicit residuals.
    std::vector<int> order(n_locked);
    for (int i = 0; i < n_locked; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });
    out.vectors.resize(dim, n_locked);
    out.values.resize(n_locked);
    out.residuals.resize(n_locked);
    for (int i = 0; i < n_locked; ++i) {
        out.vectors.col(i) = locked.col(order[i]);
        op.apply(out.vectors.col(i), av);
        // one Rayleigh-quotient refinement of the eigenvalue
        out.values[i] = out.vectors.col(i).dot(av);
        out.residuals[i] = (av - out.values[i] * out.vectors.col(i)).norm();
    }
    out.converged = n_locked == k;
    if (!out.converged)
        throw Error("Lanczos failed to converge " + std::to_string(k) + " eigenpairs");
    return out;
}

}  // namespace xxz

#include "xxz/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace xxz {

PairDensityMatrix partial_trace(const Eigen::VectorXd& state, const SectorBasis& basis,
                                int site_i, int site_j) {
    if (site_i == site_j) throw InvalidArgument("partial trace needs two distinct sites");
    if (site_i < 0 || site_j < 0 || site_i >= basis.sites() || site_j >= basis.sites())
        throw InvalidArgument("pair site out of range");
    if (state.size() != static_cast<long>(basis.dim()))
        throw InvalidArgument("state length does not match the sector basis");

    PairDensityMatrix rho;
    rho.twice_si = basis.twice_spin(site_i);
    rho.twice_sj = basis.twice_spin(site_j);
    rho.provenance = PairProvenance::partial_trace;
    const int dj = rho.twice_sj + 1;
    rho.matrix = Eigen::MatrixXd::Zero(rho.dim(), rho.dim());

    // Group basis states by the configuration of all other sites; states in
    // one group contribute a small outer product on the pair space.
    const int n = basis.sites();
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> groups;
    groups.reserve(basis.dim());
    std::vector<int> shift(n, 0);
    {
        int bits = 0;
        for (int k = 0; k < n; ++k) {
            if (k == site_i || k == site_j) continue;
            shift[k] = bits;
            bits += 6;
        }
        if (bits > 64) throw BudgetExceeded("too many sites to key the environment in 64 bits");
    }
    for (std::size_t q = 0; q < basis.dim(); ++q) {
        std::uint64_t key = 0;
        for (int k = 0; k < n; ++k) {
            if (k == site_i || k == site_j) continue;
            key |= static_cast<std::uint64_t>(
                       (basis.twice_m_at(q, k) + basis.twice_spin(k)) / 2)
                   << shift[k];
        }
        groups[key].push_back(static_cast<std::uint32_t>(q));
    }
    for (const auto& [key, members] : groups) {
        for (std::uint32_t qa : members) {
            const int ra = ((basis.twice_m_at(qa, site_i) + rho.twice_si) / 2) * dj +
                           (basis.twice_m_at(qa, site_j) + rho.twice_sj) / 2;
            for (std::uint32_t qb : members) {
                const int rb = ((basis.twice_m_at(qb, site_i) + rho.twice_si) / 2) * dj +
                               (basis.twice_m_at(qb, site_j) + rho.twice_sj) / 2;
                rho.matrix(ra, rb) += state[qa] * state[qb];
            }
        }
    }
    return rho;
}

Eigen::MatrixXd partial_transpose_second(const PairDensityMatrix& rho) {
    const int di = rho.twice_si + 1, dj = rho.twice_sj + 1;
    Eigen::MatrixXd pt(di * dj, di * dj);
    for (int a = 0; a < di; ++a)
        for (int b = 0; b < dj; ++b)
            for (int ap = 0; ap < di; ++ap)
                for (int bp = 0; bp < dj; ++bp)
                    pt(a * dj + bp, ap * dj + b) = rho.matrix(a * dj + b, ap * dj + bp);
    return pt;
}

double negativity(const PairDensityMatrix& rho) {
    constexpr double kStateTol = 1e-8;
    if (std::abs(rho.trace() - 1.0) > kStateTol)
        throw InvalidArgument("negativity needs a unit-trace state");
    if (rho.min_eigenvalue() < -kStateTol)
        throw InvalidArgument("negativity needs a positive semidefinite state");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(partial_transpose_second(rho),
                                                          Eigen::EigenvaluesOnly);
    return 0.5 * (solver.eigenvalues().cwiseAbs().sum() - 1.0);
}

double concurrence(const PairDensityMatrix& rho) {
    if (rho.twice_si != 1 || rho.twice_sj != 1)
        throw InvalidArgument("concurrence is defined for two spin-1/2 sites");
    // For a real state the Wootters lambdas are |eig(sqrt(rho) Y sqrt(rho))|
    // with Y = sy x sy, a symmetric problem solved to machine precision.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.matrix);
    Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd root =
        es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(4, 4);  // basis order dd, du, ud, uu
    y(3, 0) = y(0, 3) = -1.0;
    y(2, 1) = y(1, 2) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(root * y * root);
    std::array<double, 4> lam{};
    for (int k = 0; k < 4; ++k) lam[k] = std::abs(sym.eigenvalues()[k]);
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

}  // namespace xxz

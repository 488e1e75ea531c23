#include "xxz/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "xxz/exact.hpp"

namespace xxz {

namespace {

constexpr double kPi = 3.14159265358979323846;

double lchoose(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

int int_from(double x, const char* what) {
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9) throw InvalidArgument(std::string(what) + " must be an integer");
    return static_cast<int>(r);
}

// Kahan-compensated accumulator for the per-amplitude log sums.
struct Compensated {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

ProjectedState projected_state(const SpinGraph& g, const SignAssignment& signs, int twice_m) {
    const SiteRatios r = site_ratios(g, signs);
    ProjectedState out;
    out.twice_m = twice_m;
    out.basis = SectorBasis::build(g, twice_m);
    const int n = g.size();

    // Record the ratio along each spanning-tree edge (BFS discovery order).
    {
        std::vector<char> seen(n, 0);
        seen[0] = 1;
        std::deque<int> queue{0};
        while (!queue.empty()) {
            const int s = queue.front();
            queue.pop_front();
            for (const auto& [nb, e] : g.neighbors(s)) {
                if (seen[nb]) continue;
                seen[nb] = 1;
                out.eta_chain.push_back(eta_ratio(g.edges()[e].delta(), signs(s, nb, g)));
                queue.push_back(nb);
            }
        }
    }

    const std::size_t dim = out.basis->dim();
    Eigen::VectorXd log_amp(dim);
    std::vector<int> sgn(dim, 1);
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < dim; ++q) {
        Compensated acc;
        int s = 1;
        for (int i = 0; i < n; ++i) {
            const int ts = g.sites()[i].twice_spin;
            const int flips = (ts - out.basis->twice_m_at(q, i)) / 2;  // s_i - m_i
            acc.add(0.5 * lchoose(ts, flips));
            acc.add(flips * r.log_abs[i]);
            if (r.sign[i] < 0 && (flips & 1)) s = -s;
        }
        log_amp[q] = acc.sum;
        sgn[q] = s;
        log_max = std::max(log_max, acc.sum);
    }
    out.amplitudes.resize(dim);
    for (std::size_t q = 0; q < dim; ++q)
        out.amplitudes[q] = sgn[q] * std::exp(log_amp[q] - log_max);
    out.amplitudes /= out.amplitudes.norm();
    return out;
}

LogValue jacobi_q_log(int n, double m, double k, double eta) {
    if (n < 0) throw InvalidArgument("Q needs n >= 0");
    if (!(eta > 0.0)) throw InvalidArgument("Q needs eta > 0");
    const int a = int_from(n + m - k, "n + m - k");
    const int b = int_from(n + m + k, "n + m + k");
    if (a < 0 || b < 0) throw InvalidArgument("Q needs n+m-k >= 0 and n+m+k >= 0");
    const double log_eta = std::log(eta);
    const int j_lo = std::max(0, n - b), j_hi = std::min(n, a);
    LogValue out;
    if (j_lo > j_hi) return out;  // identically zero
    double tmax = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(j_hi - j_lo + 1);
    for (int j = j_lo; j <= j_hi; ++j) {
        const double t = lchoose(a, j) + lchoose(b, n - j) + 2.0 * j * log_eta;
        terms.push_back(t);
        tmax = std::max(tmax, t);
    }
    Compensated acc;
    for (double t : terms) acc.add(std::exp(t - tmax));
    out.log_abs = tmax + std::log(acc.sum);
    out.sign = 1;
    return out;
}

double jacobi_q(int n, double m, double k, double eta) {
    return jacobi_q_log(n, m, k, eta).value();
}

ProjectedState pair_projected_state(int twice_spin, double delta, int sign, int twice_m) {
    if (std::abs(delta) < 1.0)
        throw InfeasibleAnisotropy("pair projection needs |Delta| >= 1");
    const double eta = eta_ratio(delta, sign);
    const int ts = twice_spin;
    const std::vector<int> spins{ts, ts};
    ProjectedState out;
    out.twice_m = twice_m;
    out.basis = SectorBasis::build(spins, twice_m);
    out.eta_chain = {eta};
    const double m_total = 0.5 * twice_m;
    const double log_q =
        jacobi_q_log(int_from(ts - m_total, "2s - M"), m_total, 0.0, std::abs(eta)).log_abs;
    const std::size_t dim = out.basis->dim();
    out.amplitudes.resize(dim);
    for (std::size_t q = 0; q < dim; ++q) {
        const int flips1 = (ts - out.basis->twice_m_at(q, 0)) / 2;
        const int flips2 = (ts - out.basis->twice_m_at(q, 1)) / 2;  // = s + m - M of the first
        const double log_amp = 0.5 * (lchoose(ts, flips1) + lchoose(ts, flips2) - log_q) +
                               flips2 * std::log(std::abs(eta));
        double amp = std::exp(log_amp);
        if (eta < 0 && (flips2 & 1)) amp = -amp;
        out.amplitudes[q] = amp;
    }
    return out;
}

double PairDensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[0];
}

double PairDensityMatrix::max_offblock() const {
    const int di = twice_si + 1, dj = twice_sj + 1;
    double worst = 0.0;
    for (int r = 0; r < di * dj; ++r)
        for (int c = 0; c < di * dj; ++c) {
            const int mr = (r / dj) * 2 - twice_si + (r % dj) * 2 - twice_sj;
            const int mc = (c / dj) * 2 - twice_si + (c % dj) * 2 - twice_sj;
            if (mr != mc) worst = std::max(worst, std::abs(matrix(r, c)));
        }
    return worst;
}

std::vector<int> PairDensityMatrix::block_twice_m() const {
    std::vector<int> out;
    for (int tm = -(twice_si + twice_sj); tm <= twice_si + twice_sj; tm += 2) out.push_back(tm);
    return out;
}

Eigen::MatrixXd PairDensityMatrix::block(int twice_m) const {
    const int dj = twice_sj + 1;
    std::vector<int> idx;
    for (int r = 0; r < dim(); ++r) {
        const int tm = (r / dj) * 2 - twice_si + (r % dj) * 2 - twice_sj;
        if (tm == twice_m) idx.push_back(r);
    }
    Eigen::MatrixXd b(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) b(r, c) = matrix(idx[r], idx[c]);
    return b;
}

PairDensityMatrix reduced_pair_alternating(int n_sites, int twice_spin, double delta,
                                           PairClass cls, int twice_m) {
    if (n_sites < 4) throw InvalidArgument("alternating reduced states need N >= 4");
    if (std::abs(delta) < 1.0)
        throw InfeasibleAnisotropy("alternating configuration needs |Delta| >= 1");
    const int ts = twice_spin;
    const int total = n_sites * ts;
    if (twice_m < -total || twice_m > total || (total - twice_m) % 2 != 0)
        throw InvalidArgument("magnetization does not fit this array");
    const double eta = std::abs(eta_ratio(delta, +1));
    const double s = 0.5 * ts;
    const double m_big = 0.5 * twice_m;
    const int delta_parity = n_sites % 2;  // 0 for even N, 1 for odd
    const int ell = cls == PairClass::odd_even ? 0 : (cls == PairClass::odd_odd ? -1 : 1);

    PairDensityMatrix rho;
    rho.twice_si = ts;
    rho.twice_sj = ts;
    rho.provenance = PairProvenance::analytic;
    const int d = ts + 1;
    rho.matrix = Eigen::MatrixXd::Zero(d * d, d * d);

    const LogValue denom =
        jacobi_q_log(int_from(n_sites * s - m_big, "Ns - M"), m_big, delta_parity * s, eta);
    const double log_eta = std::log(eta);

    for (int tmi = -ts; tmi <= ts; tmi += 2)
        for (int tmj = -ts; tmj <= ts; tmj += 2)
            for (int tmjp = -ts; tmjp <= ts; tmjp += 2) {
                const int tmip = tmi + tmj - tmjp;
                if (tmip < -ts || tmip > ts) continue;
                const double m = 0.5 * (tmi + tmj);  // pair magnetization
                const double n_val = n_sites * s - 2 * s - m_big + m;
                if (n_val < -1e-9) continue;
                const int n_idx = int_from(n_val, "Q degree");
                const double k_idx = (delta_parity + 2 * ell) * s;
                if (n_idx + (m_big - m) - k_idx < -1e-9 ||
                    n_idx + (m_big - m) + k_idx < -1e-9)
                    continue;
                const double mj = 0.5 * tmj, mjp = 0.5 * tmjp;
                const double lc = lchoose(ts, int_from(s - mj, "s-mj")) +
                                  lchoose(ts, int_from(s - m + mj, "s-m+mj")) +
                                  lchoose(ts, int_from(s - mjp, "s-mj'")) +
                                  lchoose(ts, int_from(s - m + mjp, "s-m+mj'"));
                if (!std::isfinite(lc)) continue;
                double f = 0.0;
                if (cls == PairClass::odd_even) f = 2 * s - mj - mjp;
                else if (cls == PairClass::even_even) f = 4 * s - 2 * m;
                const LogValue num = jacobi_q_log(n_idx, m_big - m, k_idx, eta);
                if (num.sign == 0) continue;
                const double log_val =
                    f * log_eta + 0.5 * lc + num.log_abs - denom.log_abs;
                const int row = ((tmi + ts) / 2) * d + (tmj + ts) / 2;
                const int col = ((tmip + ts) / 2) * d + (tmjp + ts) / 2;
                rho.matrix(row, col) = std::exp(log_val);
            }
    return rho;
}

HyperbolaBranch::HyperbolaBranch(int twice_spin, double j, double delta, int branch)
    : two_sj_(twice_spin * j), delta_(delta), branch_(branch) {
    if (branch != 1 && branch != -1) throw InvalidArgument("branch must be +1 or -1");
    if (delta < 1.0)
        throw InfeasibleAnisotropy("boundary branches cross at real fields only for Delta >= 1");
    if (j <= 0.0) throw InvalidArgument("boundary parameterization needs J > 0");
}

double HyperbolaBranch::crossing_field() const {
    return two_sj_ * std::sqrt(delta_ * delta_ - 1.0);  // 2 h_s
}

bool HyperbolaBranch::in_domain(double h1) const {
    const double x1 = h1 / two_sj_;
    if (branch_ * x1 <= -delta_) return false;  // also guards the pole
    const double x2 = 1.0 / (x1 + branch_ * delta_) - branch_ * delta_;
    const double lim = crossing_field() - 1e-12;
    if (std::abs(h1) < lim || std::abs(x2 * two_sj_) < lim) return false;
    if (-branch_ * x1 >= delta_ || -branch_ * x2 >= delta_) return false;
    return true;
}

double HyperbolaBranch::h2_of_h1(double h1) const {
    if (!in_domain(h1)) throw InvalidArgument("field outside the validity domain of this branch");
    const double x1 = h1 / two_sj_;
    return two_sj_ * (1.0 / (x1 + branch_ * delta_) - branch_ * delta_);
}

HyperbolaBranch boundary_hyperbola(int twice_spin, double j, double delta, int branch) {
    return HyperbolaBranch(twice_spin, j, delta, branch);
}

std::vector<std::pair<double, double>> sample_boundary(const HyperbolaBranch& b, double h1_min,
                                                       double h1_max, double step) {
    if (step <= 0.0) throw InvalidArgument("sampling step must be positive");
    std::vector<std::pair<double, double>> out;
    for (double h1 = h1_min; h1 <= h1_max + 1e-12; h1 += step)
        if (b.in_domain(h1)) out.push_back({h1, b.h2_of_h1(h1)});
    return out;
}

WStatePackage w_state_package(int n_sites, int twice_spin, double j, double jz, double h1,
                              double h2) {
    if (n_sites < 4 || n_sites % 2 != 0)
        throw InvalidArgument("alternating cyclic geometry needs even N >= 4");
    const double n = n_sites;
    const double s = 0.5 * twice_spin;
    WStatePackage pkg;
    WStateData& w = pkg.data;
    const double half_diff = 0.5 * (h1 - h2);
    w.lambda = std::hypot(half_diff, 2 * s * j);
    w.cos_alpha = std::sqrt((w.lambda - half_diff) / (2 * w.lambda));
    w.sin_alpha = std::sqrt((w.lambda + half_diff) / (2 * w.lambda));
    w.alpha = std::atan2(w.sin_alpha, w.cos_alpha);
    w.e_aligned = -n * s * (0.5 * (h1 + h2) + s * jz);
    w.e_one_flip = w.e_aligned + 0.5 * (h1 + h2) + 2 * s * jz - w.lambda;

    const double c2 = w.cos_alpha * w.cos_alpha;
    const double s2 = w.sin_alpha * w.sin_alpha;
    const double s2a = 2 * w.sin_alpha * w.cos_alpha;

    const int ts = twice_spin;
    const int d = ts + 1;
    const int uu = ts * d + ts;            // (m_i, m_j) = (s, s)
    const int ud = ts * d + (ts - 1);      // (s, s-1)
    const int du = (ts - 1) * d + ts;      // (s-1, s)
    auto make = [&](double top, double p_ud, double p_du, double off) {
        PairDensityMatrix r;
        r.twice_si = ts;
        r.twice_sj = ts;
        r.provenance = PairProvenance::w_state;
        r.matrix = Eigen::MatrixXd::Zero(d * d, d * d);
        r.matrix(uu, uu) = top;
        r.matrix(ud, ud) = p_ud;
        r.matrix(du, du) = p_du;
        r.matrix(ud, du) = r.matrix(du, ud) = off;
        return r;
    };
    pkg.rho_oe = make(1 - 2 / n, 2 * s2 / n, 2 * c2 / n, s2a / n);
    pkg.rho_oo = make(1 - 4 * c2 / n, 2 * c2 / n, 2 * c2 / n, 2 * c2 / n);
    pkg.rho_ee = make(1 - 4 * s2 / n, 2 * s2 / n, 2 * s2 / n, 2 * s2 / n);

    // Negativity of each block: the partial transpose couples (s,s) with
    // (s-1,s-1), whose population is zero in a one-magnon state.
    auto neg = [](double top, double off) { return std::hypot(0.5 * top, off) - 0.5 * top; };
    pkg.neg_oe = neg(1 - 2 / n, s2a / n);
    pkg.neg_oo = neg(1 - 4 * c2 / n, 2 * c2 / n);
    pkg.neg_ee = neg(1 - 4 * s2 / n, 2 * s2 / n);
    pkg.conc_oe = 2 * std::abs(s2a) / n;
    pkg.conc_oo = 4 * c2 / n;
    pkg.conc_ee = 4 * s2 / n;
    return pkg;
}

namespace {

double cell_energy(double theta_o, double theta_e, double s, double j, double jz, double h_o,
                   double h_e) {
    return -s * (h_o * std::cos(theta_o) + h_e * std::cos(theta_e)) -
           2 * s * s *
               (j * std::sin(theta_o) * std::sin(theta_e) +
                jz * std::cos(theta_o) * std::cos(theta_e));
}

}  // namespace

bool afm_region(double h_odd, double h_even, int twice_spin, double j, double delta) {
    const double scale = twice_spin * j;  // 2 s J
    const double x1 = h_odd / scale, x2 = h_even / scale;
    const bool upper = (x1 + delta) * (x2 - delta) <= -1.0 && -x1 > delta;
    const bool lower = (x1 - delta) * (x2 + delta) <= -1.0 && x1 > delta;
    return upper || lower;
}

MeanFieldResult mean_field(double h_odd, double h_even, int twice_spin, double j,
                           double delta) {
    if (delta < 1.0) throw InfeasibleAnisotropy("mean-field package assumes Delta >= 1");
    const double s = 0.5 * twice_spin;
    const double jz = j * delta;
    struct Candidate {
        double e;
        MeanFieldPhase phase;
        std::optional<std::pair<double, double>> angles;
    };
    std::vector<Candidate> cands;
    cands.push_back({cell_energy(0, 0, s, j, jz, h_odd, h_even), MeanFieldPhase::aligned, {}});
    cands.push_back(
        {cell_energy(kPi, kPi, s, j, jz, h_odd, h_even), MeanFieldPhase::aligned, {}});
    cands.push_back({cell_energy(0, kPi, s, j, jz, h_odd, h_even),
                     MeanFieldPhase::antiferromagnetic, {}});
    cands.push_back({cell_energy(kPi, 0, s, j, jz, h_odd, h_even),
                     MeanFieldPhase::antiferromagnetic, {}});

    // Symmetry-breaking Neel-type stationary point.
    const double hs2_4 = (2 * s * j) * (2 * s * j) * (delta * delta - 1.0);  // (2 h_s)^2
    const double num_o = h_even * h_even - hs2_4;
    const double num_e = h_odd * h_odd - hs2_4;
    if (hs2_4 > 0 && num_e != 0.0 && num_o / num_e > 0.0) {
        const double pref = s * j / (0.5 * hs2_4);
        const double root = std::sqrt(num_o / num_e);
        const double cos_o = -pref * (h_even * delta + h_odd * root);
        const double cos_e = -pref * (h_odd * delta + h_even / root);
        if (std::abs(cos_o) <= 1 + 1e-12 && std::abs(cos_e) <= 1 + 1e-12) {
            const double to = std::acos(std::clamp(cos_o, -1.0, 1.0));
            const double te = std::acos(std::clamp(cos_e, -1.0, 1.0));
            cands.push_back({cell_energy(to, te, s, j, jz, h_odd, h_even),
                             MeanFieldPhase::symmetry_breaking, {{to, te}}});
        }
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.e < b.e; });
    MeanFieldResult out;
    out.phase = cands[0].phase;
    out.angles = cands[0].angles;
    out.energy_per_cell = cands[0].e;
    const double tol = 1e-12 * std::max(1.0, std::abs(cands[0].e));
    out.degenerate = cands.size() > 1 && cands[1].e - cands[0].e <= tol &&
                     cands[1].phase == cands[0].phase && !cands[0].angles;
    return out;
}

PlateauDirection plateau_direction(const SpinGraph& g, const SignAssignment& signs,
                                   int twice_m) {
    const ProjectedState upper = projected_state(g, signs, twice_m);
    const ProjectedState lower = projected_state(g, signs, twice_m - 2);
    const double s0_up = expectation_sz(upper.amplitudes, *upper.basis, 0);
    const double s0_dn = expectation_sz(lower.amplitudes, *lower.basis, 0);
    const double s1_up = expectation_sz(upper.amplitudes, *upper.basis, 1);
    const double s1_dn = expectation_sz(lower.amplitudes, *lower.basis, 1);
    PlateauDirection out;
    const double num = s0_up - s0_dn;
    const double den = s1_dn - s1_up;
    if (std::abs(den) < 1e-14 * std::max(1.0, std::abs(num))) {
        out.vertical = true;
        out.angle = 0.5 * kPi;
        return out;
    }
    out.tan_gamma = num / den;
    out.angle = std::atan2(num, den);
    if (out.angle <= -0.5 * kPi) out.angle += kPi;
    if (out.angle > 0.5 * kPi) out.angle -= kPi;
    return out;
}

}  // namespace xxz

#include "dsfpair/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "dsfpair/errors.hpp"

namespace dsfpair {

namespace {

// Gaussian elimination with partial pivoting for the small normal systems.
template <int N>
std::array<double, N> solve(std::array<std::array<double, N>, N> a, std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (a[col][col] == 0.0) throw NumericError("singular normal equations");
        for (int r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int r = N - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < N; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

std::vector<double> effective_weights(const std::vector<double>& values,
                                      const std::vector<double>& errs,
                                      const char* who) {
    std::vector<double> w(values.size());
    if (!errs.empty()) {
        if (errs.size() != values.size())
            throw DomainError(std::string(who) + ": error vector length mismatch");
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (!(errs[k] > 0.0)) throw DomainError(std::string(who) + ": standard errors must be > 0");
            w[k] = 1.0 / (errs[k] * errs[k]);
        }
    } else {
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = 1.0 / std::max(values[k], 1.0);
    }
    return w;
}

}  // namespace

void FringeScan::validate() const {
    if (phases.size() != counts.size())
        throw DomainError("FringeScan: phases/counts length mismatch");
    if (!counts_err.empty() && counts_err.size() != counts.size())
        throw DomainError("FringeScan: counts_err length mismatch");
    if (phases.size() < 6) throw DomainError("FringeScan: need at least 6 points");
    for (double c : counts)
        if (c < 0.0) throw DomainError("FringeScan: negative counts");
}

FringeFit fit_fringe(const FringeScan& scan) {
    scan.validate();
    const auto [mn, mx] = std::minmax_element(scan.phases.begin(), scan.phases.end());
    if (*mx - *mn < 1.5 * constants::pi)
        throw NumericError("fit_fringe: phase span below 1.5 pi, fit is ill-conditioned");

    const std::vector<double> w = effective_weights(scan.counts, scan.counts_err, "fit_fringe");
    std::array<std::array<double, 3>, 3> ata{};
    std::array<double, 3> atb{};
    for (std::size_t k = 0; k < scan.phases.size(); ++k) {
        const double basis[3] = {1.0, std::cos(scan.phases[k]), std::sin(scan.phases[k])};
        for (int r = 0; r < 3; ++r) {
            atb[r] += w[k] * basis[r] * scan.counts[k];
            for (int c = 0; c < 3; ++c) ata[r][c] += w[k] * basis[r] * basis[c];
        }
    }
    const auto sol = solve<3>(ata, atb);
    const double a_level = sol[0], c_cos = sol[1], s_sin = sol[2];

    FringeFit fit;
    fit.fringe_amp = std::hypot(c_cos, s_sin);
    fit.phase_offset = (fit.fringe_amp > 0.0) ? std::atan2(-s_sin, c_cos) : 0.0;
    fit.baseline = a_level - fit.fringe_amp;
    if (fit.baseline < 0.0) {
        fit.baseline = 0.0;
        fit.baseline_clipped = true;
    }
    const double total = fit.baseline + fit.fringe_amp;
    fit.visibility = total > 0.0 ? fit.fringe_amp / total : 0.0;

    double ss = 0.0;
    for (std::size_t k = 0; k < scan.phases.size(); ++k) {
        const double model = a_level + c_cos * std::cos(scan.phases[k]) + s_sin * std::sin(scan.phases[k]);
        const double r = scan.counts[k] - model;
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(scan.phases.size()));
    return fit;
}

PowerLawFit fit_power_law(const std::vector<double>& powers,
                          const std::vector<double>& baselines,
                          const std::vector<double>& baseline_err) {
    if (powers.size() != baselines.size())
        throw DomainError("fit_power_law: powers/baselines length mismatch");
    std::vector<double> distinct = powers;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw DomainError("fit_power_law: need at least 3 distinct powers");

    const std::vector<double> w = effective_weights(baselines, baseline_err, "fit_power_law");
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t k = 0; k < powers.size(); ++k) {
        const double p = powers[k], p2 = p * p, y = baselines[k];
        a11 += w[k] * p * p;
        a12 += w[k] * p * p2;
        a22 += w[k] * p2 * p2;
        b1 += w[k] * p * y;
        b2 += w[k] * p2 * y;
    }
    const double det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 1e-12 * a11 * a22))
        throw NumericError("fit_power_law: rank-deficient design");

    PowerLawFit fit;
    fit.s1 = (a22 * b1 - a12 * b2) / det;
    fit.s2 = (a11 * b2 - a12 * b1) / det;

    // Active-set clipping for the non-negativity constraint: with two
    // parameters the constrained optimum lies on an axis when the
    // unconstrained solution leaves the quadrant.
    if (fit.s1 < 0.0 || fit.s2 < 0.0) {
        const double lin = std::max(b1 / a11, 0.0);
        const double quad = std::max(b2 / a22, 0.0);
        double ss_lin = 0.0, ss_quad = 0.0;
        for (std::size_t k = 0; k < powers.size(); ++k) {
            const double rl = baselines[k] - lin * powers[k];
            const double rq = baselines[k] - quad * powers[k] * powers[k];
            ss_lin += w[k] * rl * rl;
            ss_quad += w[k] * rq * rq;
        }
        if (ss_lin <= ss_quad) { fit.s1 = lin; fit.s2 = 0.0; }
        else { fit.s1 = 0.0; fit.s2 = quad; }
    }

    double chi2 = 0.0, ss = 0.0;
    for (std::size_t k = 0; k < powers.size(); ++k) {
        const double r = baselines[k] - (fit.s1 * powers[k] + fit.s2 * powers[k] * powers[k]);
        chi2 += w[k] * r * r;
        ss += r * r;
    }
    const double dof = static_cast<double>(powers.size()) - 2.0;
    const double scale = dof > 0.0 ? chi2 / dof : 0.0;
    fit.covariance[0][0] = scale * a22 / det;
    fit.covariance[1][1] = scale * a11 / det;
    fit.covariance[0][1] = fit.covariance[1][0] = -scale * a12 / det;
    fit.residual_rms = std::sqrt(ss / static_cast<double>(powers.size()));
    return fit;
}

FringeLevels fringe_expectation(const RateBreakdown& rates, const FringeSetup& setup, double phase) {
    rates.validate();
    const double fringe = 1.0 + std::cos(phase);
    const double to_rate = setup.efficiency * setup.gate_rate;
    FringeLevels out;
    out.n_t = (rates.mu_pair + rates.mu_raman_i) * to_rate + rates.mu_spm_i * to_rate * fringe;
    out.n_p = setup.monitor_scale * setup.n_pump_photons * fringe;
    return out;
}

}  // namespace dsfpair

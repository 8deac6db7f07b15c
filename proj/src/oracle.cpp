#include "polarsep/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace polarsep {

namespace {

// Model: I_k = s/2 + (a/2) cos(alpha_k - 2 pf) + (b/2) cos(beta_k - 2 pr)
// with s = i_u + a + b, alpha = 2(c - l), beta = 2(c + l).
struct Fit {
    double s = 0.0;
    double a = 0.0;
    double pf = 0.0;
    double b = 0.0;
    double pr = 0.0;
};

struct Problem {
    std::vector<double> obs;
    std::vector<double> alpha;
    std::vector<double> beta;

    std::size_t n() const { return obs.size(); }

    double model(const Fit& f, std::size_t k) const {
        return 0.5 * f.s + 0.5 * f.a * std::cos(alpha[k] - 2.0 * f.pf) + 0.5 * f.b * std::cos(beta[k] - 2.0 * f.pr);
    }

    double residual(const Fit& f) const {
        double sum = 0.0;
        for (std::size_t k = 0; k < n(); ++k) {
            const double e = obs[k] - model(f, k);
            sum += e * e;
        }
        return sum;
    }
};

constexpr double kGolden = 0.6180339887498949;

// Observations minus every term except the selected sinusoid.
std::vector<double> partial_residual(const Problem& pb, const Fit& f, bool forward) {
    std::vector<double> r(pb.n());
    for (std::size_t k = 0; k < pb.n(); ++k) {
        const double other = forward ? 0.5 * f.b * std::cos(pb.beta[k] - 2.0 * f.pr)
                                     : 0.5 * f.a * std::cos(pb.alpha[k] - 2.0 * f.pf);
        r[k] = pb.obs[k] - 0.5 * f.s - other;
    }
    return r;
}

double sinusoid_error(const std::vector<double>& r, const std::vector<double>& gamma, double amp, double phase) {
    double sum = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double e = r[k] - 0.5 * amp * std::cos(gamma[k] - 2.0 * phase);
        sum += e * e;
    }
    return sum;
}

// Joint grid over amplitude levels and phase levels for one sinusoid.
void grid_sinusoid(const std::vector<double>& r, const std::vector<double>& gamma, const std::vector<double>& levels,
                   int phase_levels, double& amp, double& phase) {
    double r2 = 0.0;
    for (double v : r) r2 += v * v;
    double best = r2;  // amplitude zero
    double best_amp = 0.0, best_phase = phase;
    for (int j = 0; j < phase_levels; ++j) {
        const double ph = kPi * static_cast<double>(j) / static_cast<double>(phase_levels);
        double rc = 0.0, cc = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double c = 0.5 * std::cos(gamma[k] - 2.0 * ph);
            rc += r[k] * c;
            cc += c * c;
        }
        for (double lv : levels) {
            const double e = r2 - 2.0 * lv * rc + lv * lv * cc;
            if (e < best) {
                best = e;
                best_amp = lv;
                best_phase = ph;
            }
        }
    }
    amp = best_amp;
    phase = best_phase;
}

// Exact least-squares amplitude along a fixed phase, clamped at zero.
double best_amplitude(const std::vector<double>& r, const std::vector<double>& gamma, double phase) {
    double rc = 0.0, cc = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double c = 0.5 * std::cos(gamma[k] - 2.0 * phase);
        rc += r[k] * c;
        cc += c * c;
    }
    if (cc <= 0.0) return 0.0;
    return std::max(0.0, rc / cc);
}

// Phase that best explains r for a fixed positive amplitude: golden-section
// search in a sliding bracket, then guarded Newton polishing.
double best_phase(const std::vector<double>& r, const std::vector<double>& gamma, double amp, double phase,
                  double half_width) {
    auto err = [&](double ph) { return sinusoid_error(r, gamma, amp, ph); };

    double center = phase;
    for (int shift = 0; shift < 64; ++shift) {
        double lo = center - half_width, hi = center + half_width;
        double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
        double f1 = err(x1), f2 = err(x2);
        for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - kGolden * (hi - lo);
                f1 = err(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + kGolden * (hi - lo);
                f2 = err(x2);
            }
        }
        const double found = 0.5 * (lo + hi);
        const bool at_edge = std::abs(found - center) > 0.9 * half_width;
        center = found;
        if (!at_edge) break;
    }

    // Newton on dE/dphi with analytic derivatives.
    double ph = center;
    double e_cur = err(ph);
    for (int it = 0; it < 8; ++it) {
        double g = 0.0, h = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double u = gamma[k] - 2.0 * ph;
            const double ek = r[k] - 0.5 * amp * std::cos(u);
            g += -2.0 * ek * amp * std::sin(u);
            h += 2.0 * (amp * amp * std::sin(u) * std::sin(u) + 2.0 * amp * ek * std::cos(u));
        }
        if (!(h > 0.0)) break;
        const double cand = ph - g / h;
        const double e_cand = err(cand);
        if (!(e_cand <= e_cur)) break;
        const double step = std::abs(cand - ph);
        ph = cand;
        e_cur = e_cand;
        if (step < 1e-16) break;
    }
    return ph;
}

// Phase along which a vanishing sinusoid would reduce the error fastest.
double steepest_phase(const std::vector<double>& r, const std::vector<double>& gamma, int phase_levels) {
    double best = -1.0, best_ph = 0.0;
    for (int j = 0; j < phase_levels; ++j) {
        const double ph = kPi * static_cast<double>(j) / static_cast<double>(phase_levels);
        double rc = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) rc += r[k] * std::cos(gamma[k] - 2.0 * ph);
        if (rc > best) {
            best = rc;
            best_ph = ph;
        }
    }
    return best_ph;
}

void refine_sinusoid(const Problem& pb, Fit& f, bool forward, const OracleOptions& opt, double& moved) {
    const auto& gamma = forward ? pb.alpha : pb.beta;
    double& amp = forward ? f.a : f.b;
    double& phase = forward ? f.pf : f.pr;
    const auto r = partial_residual(pb, f, forward);

    const double half = kPi / static_cast<double>(opt.phase_levels);
    const double new_phase = amp > 0.0 ? best_phase(r, gamma, amp, phase, half)
                                       : steepest_phase(r, gamma, opt.phase_levels);
    const double new_amp = best_amplitude(r, gamma, new_phase);
    moved = std::max({moved, std::abs(new_amp - amp), new_amp * std::abs(new_phase - phase)});
    amp = new_amp;
    phase = new_phase;
}

void refine_total(const Problem& pb, Fit& f, double& moved) {
    // s enters with coefficient 1/2 in every observation
    double mean = 0.0;
    for (std::size_t k = 0; k < pb.n(); ++k) {
        mean += pb.obs[k] - 0.5 * f.a * std::cos(pb.alpha[k] - 2.0 * f.pf) -
                0.5 * f.b * std::cos(pb.beta[k] - 2.0 * f.pr);
    }
    mean /= static_cast<double>(pb.n());
    const double s = 2.0 * mean;
    moved = std::max(moved, std::abs(s - f.s));
    f.s = s;
}

}  // namespace

double model_residual(std::span<const double> intensities, const AngleSet& angles, double i_u, double i_f,
                      double phi_f, double i_r, double phi_r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < intensities.size(); ++k) {
        const double c = angles[k].theta_c(), l = angles[k].theta_l();
        const double m = 0.5 * i_u + 0.5 * i_f * (std::cos(2.0 * (c - l - phi_f)) + 1.0) +
                         0.5 * i_r * (std::cos(2.0 * (c + l - phi_r)) + 1.0);
        const double e = intensities[k] - m;
        sum += e * e;
    }
    return sum;
}

OracleFit brute_force_fit(std::span<const double> intensities, const AngleSet& angles, const OracleOptions& opt) {
    if (intensities.size() != angles.size()) {
        throw std::invalid_argument("intensity count does not match angle count");
    }
    if (opt.intensity_levels < 2 || opt.phase_levels < 2 || !(opt.dynamic_range > 1.0)) {
        throw std::invalid_argument("oracle grid too coarse");
    }

    Problem pb;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        pb.obs.push_back(intensities[k]);
        pb.alpha.push_back(2.0 * (angles[k].theta_c() - angles[k].theta_l()));
        pb.beta.push_back(2.0 * (angles[k].theta_c() + angles[k].theta_l()));
    }

    double peak = 0.0;
    for (double v : intensities) peak = std::max(peak, std::abs(v));

    OracleFit out;
    Fit f;
    if (peak > 0.0) {
        const double hi = 2.0 * peak;
        const double lo = hi / opt.dynamic_range;
        std::vector<double> levels;
        levels.reserve(static_cast<std::size_t>(opt.intensity_levels));
        for (int i = 0; i < opt.intensity_levels; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(opt.intensity_levels - 1);
            levels.push_back(lo * std::pow(hi / lo, t));
        }

        double mean = 0.0;
        for (double v : intensities) mean += v;
        f.s = 2.0 * mean / static_cast<double>(intensities.size());

        for (int pass = 0; pass < opt.grid_passes; ++pass) {
            grid_sinusoid(partial_residual(pb, f, true), pb.alpha, levels, opt.phase_levels, f.a, f.pf);
            grid_sinusoid(partial_residual(pb, f, false), pb.beta, levels, opt.phase_levels, f.b, f.pr);
            // unpolarized level on the same grid, zero included
            Fit t = f;
            t.s = f.a + f.b;
            double best = pb.residual(t), best_s = t.s;
            for (double lv : levels) {
                t.s = lv + f.a + f.b;
                if (double e = pb.residual(t); e < best) {
                    best = e;
                    best_s = t.s;
                }
            }
            f.s = best_s;
        }

        for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
            double moved = 0.0;
            refine_total(pb, f, moved);
            refine_sinusoid(pb, f, true, opt, moved);
            refine_total(pb, f, moved);
            refine_sinusoid(pb, f, false, opt, moved);
            out.sweeps_used = sweep + 1;
            if (moved <= opt.tolerance) break;
        }
    }

    out.params.i_f = f.a;
    out.params.i_r = f.b;
    out.params.phi_f = f.a > 0.0 ? canonical_angle(f.pf) : 0.0;
    out.params.phi_r = f.b > 0.0 ? canonical_angle(f.pr) : 0.0;
    out.i_u_raw = f.s - f.a - f.b;
    out.params.i_u = std::max(0.0, out.i_u_raw);
    out.residual = pb.residual(f);
    return out;
}

}  // namespace polarsep

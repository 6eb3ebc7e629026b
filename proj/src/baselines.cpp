#include "sparseset/baselines.hpp"

#include "sparseset/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparseset {

std::vector<double> make_regular_grid(int n, double t_split) {
    if (n < 2) throw std::invalid_argument("regular grid needs at least 2 points");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = t_split * static_cast<double>(i) / (n - 1);
    out.back() = t_split; // exact endpoint
    return out;
}

namespace {

// (time, value) observations of one channel, time-sorted
std::vector<std::pair<double, double>> channel_points(const SparseSeries& s, int c) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : s.records)
        if (r.channel == c) pts.emplace_back(r.time, r.value);
    return pts; // canonical series order is already time-ascending
}

double fill_for(const std::vector<double>& fill, int c) {
    return fill.empty() ? 0.0 : fill[static_cast<std::size_t>(c)];
}

} // namespace

ImputedGrid impute_linear(const SparseSeries& context, const std::vector<double>& grid, int C,
                          const std::vector<double>& fill_value) {
    ImputedGrid out;
    out.method = ImputeMethod::LINEAR;
    out.times = grid;
    out.values.assign(grid.size(), std::vector<double>(static_cast<std::size_t>(C), 0.0));
    for (int c = 0; c < C; ++c) {
        auto pts = channel_points(context, c);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double t = grid[k];
            double v;
            if (pts.empty()) {
                v = fill_for(fill_value, c);
            } else if (t <= pts.front().first) {
                v = pts.front().second; // flat extrapolation
            } else if (t >= pts.back().first) {
                v = pts.back().second;
            } else {
                auto it = std::upper_bound(pts.begin(), pts.end(), t,
                                           [](double x, const auto& p) { return x < p.first; });
                const auto& [t1, v1] = *it;
                const auto& [t0, v0] = *(it - 1);
                v = t1 == t0 ? v0 : v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
            out.values[k][static_cast<std::size_t>(c)] = v;
        }
    }
    return out;
}

ImputedGrid impute_rbf(const SparseSeries& context, const std::vector<double>& grid, int C,
                       const std::vector<double>& fill_value) {
    ImputedGrid out;
    out.method = ImputeMethod::RBF;
    out.times = grid;
    out.values.assign(grid.size(), std::vector<double>(static_cast<std::size_t>(C), 0.0));
    const double t_split = context.t_split;
    for (int c = 0; c < C; ++c) {
        auto pts = channel_points(context, c);
        if (pts.empty()) {
            for (std::size_t k = 0; k < grid.size(); ++k)
                out.values[k][static_cast<std::size_t>(c)] = fill_for(fill_value, c);
            continue;
        }
        double h;
        const double floor_h = t_split / (2.0 * static_cast<double>(std::max<std::size_t>(pts.size(), 1)));
        if (pts.size() < 2) {
            h = floor_h;
        } else {
            std::vector<double> gaps;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i)
                gaps.push_back(pts[i + 1].first - pts[i].first);
            std::sort(gaps.begin(), gaps.end());
            double med = gaps.size() % 2 ? gaps[gaps.size() / 2]
                                         : 0.5 * (gaps[gaps.size() / 2 - 1] + gaps[gaps.size() / 2]);
            h = std::max(med, floor_h);
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double t = grid[k];
            double wsum = 0.0, vsum = 0.0;
            for (const auto& [ti, vi] : pts) {
                const double z = (t - ti) / h;
                const double w = std::exp(-0.5 * z * z);
                wsum += w;
                vsum += w * vi;
            }
            // all weights can underflow far from the data; fall back to the
            // nearest observation
            double v;
            if (wsum > 0.0) {
                v = vsum / wsum;
            } else {
                auto nearest = std::min_element(pts.begin(), pts.end(), [t](auto& a, auto& b) {
                    return std::abs(a.first - t) < std::abs(b.first - t);
                });
                v = nearest->second;
            }
            out.values[k][static_cast<std::size_t>(c)] = v;
        }
    }
    return out;
}

ImputedGrid impute(ImputeMethod method, const SparseSeries& context,
                   const std::vector<double>& grid, int C, const std::vector<double>& fill_value) {
    return method == ImputeMethod::LINEAR ? impute_linear(context, grid, C, fill_value)
                                          : impute_rbf(context, grid, C, fill_value);
}

double mechanistic_nll(const MechanisticParams& params, const SparseSeries& context,
                       ModelKind kind, const std::vector<double>& sigma) {
    DenseTrajectory traj;
    try {
        traj = integrate(kind, params, context.t_max);
    } catch (const IntegrationError&) {
        return std::numeric_limits<double>::infinity();
    }
    double loss = 0.0;
    for (const auto& r : context.records) {
        const double model_v = traj.eval(r.time)[static_cast<std::size_t>(r.channel)];
        const double z = (r.value - model_v) / sigma[static_cast<std::size_t>(r.channel)];
        loss += 0.5 * z * z;
    }
    return loss;
}

namespace {

std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& x, double step) {
    std::vector<double> g(x.size());
    std::vector<double> xt = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = step * std::max(std::abs(x[i]), 1.0);
        const double xi = x[i];
        xt[i] = xi + h;
        const double fp = f(xt);
        xt[i] = xi - h;
        const double fm = f(xt);
        xt[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

BfgsResult bfgs_minimize(const std::function<double(const std::vector<double>&)>& objective,
                         std::vector<double> x0, const BfgsOptions& opt) {
    const std::size_t n = x0.size();
    BfgsResult res;
    res.x = std::move(x0);
    res.f = objective(res.x);
    if (!std::isfinite(res.f))
        throw std::invalid_argument("objective not finite at starting point");

    std::vector<double> g = fd_gradient(objective, res.x, opt.fd_step);
    // inverse Hessian approximation, identity start
    std::vector<double> H(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        res.grad_norm = inf_norm(g);
        if (res.grad_norm < opt.grad_tol) {
            res.converged = true;
            return res;
        }
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i] -= H[i * n + j] * g[j];
        double gd = 0.0;
        for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
        if (gd >= 0.0) { // not a descent direction; reset to steepest descent
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            gd = 0.0;
            for (std::size_t i = 0; i < n; ++i) gd -= g[i] * g[i];
            std::fill(H.begin(), H.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
        }

        double step = 1.0;
        std::vector<double> x_new(n);
        double f_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + step * d[i];
            f_new = objective(x_new);
            if (std::isfinite(f_new) && f_new <= res.f + opt.armijo_c * step * gd) {
                accepted = true;
                break;
            }
            step *= opt.shrink;
        }
        if (!accepted) {
            res.converged = false;
            return res; // best point so far
        }

        auto g_new = fd_gradient(objective, x_new, opt.fd_step);
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - res.x[i];
            y[i] = g_new[i] - g[i];
        }
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) sy += s[i] * y[i];
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
            double yHy = 0.0;
            for (std::size_t i = 0; i < n; ++i) yHy += y[i] * Hy[i];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i * n + j] += (sy + yHy) * rho * rho * s[i] * s[j] -
                                    rho * (Hy[i] * s[j] + s[i] * Hy[j]);
        }

        const double f_prev = res.f;
        res.x = x_new;
        res.f = f_new;
        g = std::move(g_new);
        res.iterations = iter + 1;
        if (std::abs(f_prev - res.f) < opt.rel_f_tol * std::max(1.0, std::abs(f_prev))) {
            res.grad_norm = inf_norm(g);
            res.converged = true;
            return res;
        }
    }
    res.grad_norm = inf_norm(g);
    res.converged = false;
    return res;
}

FitResult fit_mechanistic_bfgs(const SparseSeries& context, ModelKind kind,
                               const PriorSpec& prior, const std::vector<double>& sigma,
                               int multistart, std::uint64_t seed, const BfgsOptions& options) {
    if (context.empty()) throw std::invalid_argument("cannot fit an empty context");
    prior.validate();
    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < prior.lo.size(); ++i)
        if (!prior.is_fixed(i)) free_idx.push_back(i);

    auto assemble = [&](const std::vector<double>& logx) {
        MechanisticParams p;
        p.kind = kind;
        p.values = prior.lo; // fixed entries pinned
        for (std::size_t k = 0; k < free_idx.size(); ++k)
            p.values[free_idx[k]] = std::exp(logx[k]);
        return p;
    };
    auto objective = [&](const std::vector<double>& logx) {
        return mechanistic_nll(assemble(logx), context, kind, sigma);
    };

    std::vector<std::vector<double>> starts;
    {
        // prior-interval midpoint in log space
        std::vector<double> x0;
        for (std::size_t i : free_idx) x0.push_back(0.5 * (std::log(prior.lo[i]) + std::log(prior.hi[i])));
        starts.push_back(std::move(x0));
        Rng rng(child_seed(seed, 0xf17, 0));
        for (int s = 1; s < multistart; ++s) {
            std::vector<double> x;
            for (std::size_t i : free_idx)
                x.push_back(std::log(rng.uniform(prior.lo[i], prior.hi[i])));
            starts.push_back(std::move(x));
        }
    }

    FitResult best;
    bool have_best = false;
    for (const auto& x0 : starts) {
        auto r = bfgs_minimize(objective, x0, options);
        if (!have_best || r.f < best.loss) {
            best.params = assemble(r.x);
            best.loss = r.f;
            best.iterations = r.iterations;
            best.converged = r.converged;
            best.grad_norm = r.grad_norm;
            have_best = true;
        }
    }
    return best;
}

} // namespace sparseset

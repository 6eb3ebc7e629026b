#include "sparseset/mechanistic.hpp"

#include <algorithm>
#include <cmath>

namespace sparseset {

namespace {

const std::vector<std::string> kMmkParams = {"Vmax", "Km", "S0", "P0"};
const std::vector<std::string> kEcoliParams = {
    "qs_max", "Ks",  "qs_crit", "Kia", "Yas", "qa_max", "Ka",   "Kis", "Yxs_ox",
    "Yxs_of", "Yxa", "Yos",     "Yoa", "kLa", "X0",     "S0",   "A0",  "DOT0"};

const std::vector<std::string> kMmkChannels = {"A", "P"};
const std::vector<std::string> kEcoliChannels = {"X", "S", "A", "DOT"};

// DOT* = 100 % and oxygen saturation 0.0084 g/L folded into one constant.
constexpr double kTauO = 100.0 / 0.0084;

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("unknown parameter: " + name);
    return static_cast<std::size_t>(it - names.begin());
}

} // namespace

const std::vector<std::string>& param_names(ModelKind kind) {
    return kind == ModelKind::MMK ? kMmkParams : kEcoliParams;
}

std::size_t state_dim(ModelKind kind) { return kind == ModelKind::MMK ? 2 : 4; }

std::size_t n_channels(ModelKind kind) { return state_dim(kind); }

const std::vector<std::string>& channel_names(ModelKind kind) {
    return kind == ModelKind::MMK ? kMmkChannels : kEcoliChannels;
}

double MechanisticParams::get(const std::string& name) const {
    return values[index_of(param_names(kind), name)];
}

void MechanisticParams::set(const std::string& name, double v) {
    values[index_of(param_names(kind), name)] = v;
}

void PriorSpec::validate() const {
    const auto& names = param_names(kind);
    if (lo.size() != names.size() || hi.size() != names.size())
        throw std::invalid_argument("prior size does not match parameter count");
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!(lo[i] <= hi[i])) throw std::invalid_argument("prior lo > hi for " + names[i]);
        if (lo[i] < 0.0) throw std::invalid_argument("negative prior bound for " + names[i]);
    }
}

PriorSpec default_prior(ModelKind kind) {
    PriorSpec p;
    p.kind = kind;
    const auto& names = param_names(kind);
    p.lo.assign(names.size(), 0.0);
    p.hi.assign(names.size(), 0.0);
    auto set = [&](const std::string& n, double lo, double hi) {
        std::size_t i = index_of(names, n);
        p.lo[i] = lo;
        p.hi[i] = hi;
    };
    if (kind == ModelKind::MMK) {
        set("Vmax", 0.5, 2.0);
        set("Km", 0.1, 1.0);
        set("S0", 0.5, 2.0);
        set("P0", 0.0, 0.0);
    } else {
        set("qs_max", 0.8, 1.6);
        set("Ks", 0.02, 0.1);
        set("qs_crit", 0.5, 1.2);
        set("Kia", 1.0, 5.0);
        set("Yas", 0.3, 0.6);
        set("qa_max", 0.1, 0.3);
        set("Ka", 0.05, 0.2);
        set("Kis", 0.5, 2.0);
        set("Yxs_ox", 0.45, 0.55);
        set("Yxs_of", 0.1, 0.25);
        set("Yxa", 0.2, 0.4);
        set("Yos", 0.4, 0.6);
        set("Yoa", 0.5, 0.8);
        set("kLa", 100.0, 300.0);
        set("X0", 0.1, 0.3);
        set("S0", 4.0, 8.0);
        set("A0", 0.0, 0.0);
        set("DOT0", 100.0, 100.0);
    }
    return p;
}

MechanisticParams sample_params(ModelKind kind, const PriorSpec& prior, Rng& rng) {
    prior.validate();
    MechanisticParams p;
    p.kind = kind;
    p.values.resize(prior.lo.size());
    for (std::size_t i = 0; i < prior.lo.size(); ++i)
        p.values[i] = prior.is_fixed(i) ? prior.lo[i] : rng.uniform(prior.lo[i], prior.hi[i]);
    return p;
}

void mmk_rhs(const double* state, const MechanisticParams& p, double* dstate) {
    const double Vmax = p.values[0], Km = p.values[1];
    const double S = state[0];
    const double rate = Vmax * S / (Km + S);
    dstate[0] = -rate;
    dstate[1] = rate;
}

void ecoli_rhs(const double* state, const MechanisticParams& p, double* dstate) {
    const double qs_max = p.values[0], Ks = p.values[1], qs_crit = p.values[2], Kia = p.values[3];
    const double Yas = p.values[4], qa_max = p.values[5], Ka = p.values[6], Kis = p.values[7];
    const double Yxs_ox = p.values[8], Yxs_of = p.values[9], Yxa = p.values[10];
    const double Yos = p.values[11], Yoa = p.values[12], kLa = p.values[13];

    const double X = state[0], S = state[1], A = state[2], DOT = state[3];

    const double qs = qs_max * S / (S + Ks) / (1.0 + A / Kia);
    const double qs_of = std::max(0.0, qs - qs_crit);
    const double qs_ox = qs - qs_of;
    const double qa_c = qa_max * A / (A + Ka) * Kis / (Kis + qs);
    const double mu = Yxs_ox * qs_ox + Yxs_of * qs_of + Yxa * qa_c;

    dstate[0] = mu * X;
    dstate[1] = -qs * X;
    dstate[2] = (Yas * qs_of - qa_c) * X;
    dstate[3] = kLa * (100.0 - DOT) - kTauO * (Yos * qs_ox + Yoa * qa_c) * X;
}

void model_rhs(ModelKind kind, const double* state, const MechanisticParams& p, double* dstate) {
    if (kind == ModelKind::MMK)
        mmk_rhs(state, p, dstate);
    else
        ecoli_rhs(state, p, dstate);
}

namespace {

void clamp_state(ModelKind kind, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] = std::max(0.0, y[j]);
    if (kind == ModelKind::ECOLI) y[3] = std::min(100.0, y[3]);
}

std::vector<double> initial_state(ModelKind kind, const MechanisticParams& p) {
    if (kind == ModelKind::MMK) return {p.values[2], p.values[3]}; // S0, P0
    return {p.values[14], p.values[15], p.values[16], p.values[17]}; // X0, S0, A0, DOT0
}

} // namespace

DenseTrajectory integrate(ModelKind kind, const MechanisticParams& params, double t_max,
                          const IntegrateOptions& opts) {
    auto rhs = [kind, params](double, const double* y, double* dy) {
        model_rhs(kind, y, params, dy);
    };
    auto clamp = [kind](double* y, std::size_t n) { clamp_state(kind, y, n); };
    try {
        auto traj = integrate_adaptive(rhs, initial_state(kind, params), t_max, opts, clamp);
        traj.kind = kind;
        return traj;
    } catch (const IntegrationError& e) {
        std::string msg = std::string(e.what()) + " [" + to_string(kind) + " params:";
        const auto& names = param_names(kind);
        for (std::size_t i = 0; i < names.size(); ++i)
            msg += " " + names[i] + "=" + std::to_string(params.values[i]);
        throw IntegrationError(msg + "]");
    }
}

DenseTrajectory integrate_adaptive(const RhsFn& rhs, std::vector<double> y0, double t_max,
                                   const IntegrateOptions& opts, const ClampFn& clamp) {
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
    const std::size_t n = y0.size();

    DenseTrajectory traj;
    traj.clamp = clamp;
    std::vector<double> y = std::move(y0);
    if (clamp) clamp(y.data(), n);
    std::vector<double> f(n);
    rhs(0.0, y.data(), f.data());
    traj.times.push_back(0.0);
    traj.states.push_back(y);
    traj.derivs.push_back(f);

    // hmax keeps the cubic-Hermite dense output well inside the step tolerance
    const double hmax = t_max / 50.0;
    const double hmin = 1e-12 * t_max;
    double t = 0.0;
    double h = std::min(hmax, t_max / 100.0);
    std::vector<double> y5(n), y4(n);

    while (t < t_max) {
        h = std::min(h, t_max - t);
        dopri5_step(rhs, t, y.data(), h, n, y5.data(), y4.data());
        double err = 0.0;
        bool finite = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(y5[j])) finite = false;
            double scale = opts.atol + opts.rtol * std::max(std::abs(y[j]), std::abs(y5[j]));
            double e = (y5[j] - y4[j]) / scale;
            err += e * e;
        }
        err = std::sqrt(err / static_cast<double>(n));
        if (finite && err <= 1.0) {
            t += h;
            y = y5;
            if (clamp) clamp(y.data(), n);
            rhs(t, y.data(), f.data());
            traj.times.push_back(t);
            traj.states.push_back(y);
            traj.derivs.push_back(f);
        }
        double factor = finite ? 0.9 * std::pow(std::max(err, 1e-10), -0.2) : 0.25;
        h *= std::clamp(factor, 0.2, 5.0);
        h = std::min(h, hmax);
        if (h < hmin)
            throw IntegrationError("step size underflow at t=" + std::to_string(t));
        if (traj.times.size() > 200000)
            throw IntegrationError("step budget exhausted at t=" + std::to_string(t) +
                                   " (stiff system)");
    }
    return traj;
}

std::vector<double> DenseTrajectory::eval(double t) const {
    if (t < times.front() || t > times.back())
        throw std::out_of_range("evaluation time outside trajectory span");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.end()) return states.back();
    std::size_t i1 = static_cast<std::size_t>(it - times.begin());
    std::size_t i0 = i1 - 1;
    if (t == times[i0]) return states[i0];
    const double h = times[i1] - times[i0];
    const double th = (t - times[i0]) / h;
    const double th2 = th * th, th3 = th2 * th;
    const double h00 = 2 * th3 - 3 * th2 + 1;
    const double h10 = th3 - 2 * th2 + th;
    const double h01 = -2 * th3 + 3 * th2;
    const double h11 = th3 - th2;
    std::vector<double> out(states[i0].size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = h00 * states[i0][j] + h10 * h * derivs[i0][j] + h01 * states[i1][j] +
                 h11 * h * derivs[i1][j];
    if (clamp) clamp(out.data(), out.size());
    return out;
}

} // namespace sparseset

#include "ptlearn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>

#include "ptlearn/errors.hpp"
#include "ptlearn/parallel.hpp"

namespace ptlearn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kVarFloor = 1e-30;   // keeps logs finite on degenerate fits
constexpr double kSseFloor = 1e-300;

double clip_correlation(double rho) {
    return std::clamp(rho, -kMaxAbsCorrelation, kMaxAbsCorrelation);
}

}  // namespace

SuffStats SuffStats::from_data(const std::vector<DataMatrix>& data, int threads) {
    if (data.empty()) throw InputError("suff_stats: no environments given");
    SuffStats out;
    out.p_ = data[0].cols;
    if (out.p_ < 1) throw InputError("suff_stats: environments must have at least one column");
    out.envs_.resize(data.size());

    for (std::size_t e = 0; e < data.size(); ++e) {
        const DataMatrix& m = data[e];
        if (m.cols != out.p_) throw InputError("suff_stats: column counts differ across environments");
        if (m.rows < 2) throw InputError("suff_stats: each environment needs at least two rows");
        out.total_n_ += m.rows;
    }

    const int p = out.p_;
    for (std::size_t e = 0; e < data.size(); ++e) {
        const DataMatrix& m = data[e];
        const int n = m.rows;
        EnvStats& env = out.envs_[e];
        env.n = n;
        env.mean.assign(p, 0.0);
        env.var.assign(p, 0.0);
        env.zero_var.assign(p, 0);
        env.corr = SymMatrix(p, 0.0);

        for (int r = 0; r < n; ++r)
            for (int c = 0; c < p; ++c) env.mean[c] += m.at(r, c);
        for (int c = 0; c < p; ++c) env.mean[c] /= n;

        // Centered copy, then packed upper-triangle Gram filled in row blocks.
        std::vector<double> centered(static_cast<std::size_t>(n) * p);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < p; ++c)
                centered[static_cast<std::size_t>(r) * p + c] = m.at(r, c) - env.mean[c];

        std::vector<double> gram(static_cast<std::size_t>(p) * (p + 1) / 2, 0.0);
        auto row_start = [p](int u) {
            return static_cast<std::size_t>(u) * p - static_cast<std::size_t>(u) * (u - 1) / 2;
        };
        parallel_for(0, p, threads, [&](int u) {
            double* acc = gram.data() + row_start(u) - u;
            for (int r = 0; r < n; ++r) {
                const double* row = centered.data() + static_cast<std::size_t>(r) * p;
                const double du = row[u];
                if (du == 0.0) continue;
                for (int v = u; v < p; ++v) acc[v] += du * row[v];
            }
        });

        for (int v = 0; v < p; ++v) {
            const double g = gram[row_start(v)];
            env.var[v] = g / n;
            if (!std::isfinite(env.var[v]))
                throw NumericError("suff_stats: non-finite variance encountered");
            if (env.var[v] <= 1e-24 * (1.0 + env.mean[v] * env.mean[v])) {
                env.var[v] = std::max(env.var[v], 0.0);
                env.zero_var[v] = 1;
            }
        }
        for (int u = 0; u < p; ++u) {
            env.corr(u, u) = 1.0;
            for (int v = u + 1; v < p; ++v) {
                if (env.zero_var[u] || env.zero_var[v]) {
                    env.corr(u, v) = 0.0;
                    continue;
                }
                const double g = gram[row_start(u) + (v - u)];
                double rho = g / (std::sqrt(static_cast<double>(n) * env.var[u]) *
                                  std::sqrt(static_cast<double>(n) * env.var[v]));
                if (!std::isfinite(rho)) throw NumericError("suff_stats: non-finite correlation");
                env.corr(u, v) = std::clamp(rho, -1.0, 1.0);
            }
        }
    }
    return out;
}

SuffStats SuffStats::from_covariances(const std::vector<SymMatrix>& covariances,
                                      const std::vector<int>& sizes) {
    if (covariances.empty() || covariances.size() != sizes.size())
        throw InputError("from_covariances: one covariance and size per environment required");
    SuffStats out;
    out.p_ = covariances[0].size();
    out.envs_.resize(covariances.size());
    for (std::size_t e = 0; e < covariances.size(); ++e) {
        const SymMatrix& cov = covariances[e];
        if (cov.size() != out.p_) throw InputError("from_covariances: dimension mismatch");
        if (sizes[e] < 2) throw InputError("from_covariances: sizes must be at least 2");
        out.total_n_ += sizes[e];
        EnvStats& env = out.envs_[e];
        env.n = sizes[e];
        env.mean.assign(out.p_, 0.0);
        env.var.resize(out.p_);
        env.zero_var.assign(out.p_, 0);
        env.corr = SymMatrix(out.p_, 0.0);
        for (int v = 0; v < out.p_; ++v) {
            env.var[v] = cov(v, v);
            if (env.var[v] <= 0.0) env.zero_var[v] = 1;
        }
        for (int u = 0; u < out.p_; ++u) {
            env.corr(u, u) = 1.0;
            for (int v = u + 1; v < out.p_; ++v) {
                if (env.zero_var[u] || env.zero_var[v]) continue;
                env.corr(u, v) =
                    std::clamp(cov(u, v) / std::sqrt(env.var[u] * env.var[v]), -1.0, 1.0);
            }
        }
    }
    return out;
}

SuffStats suff_stats(const std::vector<DataMatrix>& data, int threads) {
    return SuffStats::from_data(data, threads);
}

double SuffStats::second_moment(int e, int u) const {
    const EnvStats& env = envs_[e];
    return env.n * env.var[u];
}

double SuffStats::cross_moment(int e, int u, int v) const {
    const EnvStats& env = envs_[e];
    return env.n * env.corr(u, v) * std::sqrt(env.var[u] * env.var[v]);
}

double fisher_weight(std::span<const double> rhos, std::span<const double> ns) {
    if (rhos.size() != ns.size()) throw InputError("fisher_weight: mismatched lengths");
    double acc = 0.0;
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        const double r = clip_correlation(rhos[i]);
        acc -= 0.5 * ns[i] * std::log1p(-r * r);
    }
    return acc;
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    if (values.empty() || values.size() != weights.size())
        throw InputError("weighted_mean: empty or mismatched input");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] < 0) throw InputError("weighted_mean: negative weight");
        num += weights[i] * values[i];
        den += weights[i];
    }
    if (den <= 0) throw InputError("weighted_mean: weights sum to zero");
    return num / den;
}

double weighted_median(std::span<const double> values, std::span<const double> weights) {
    if (values.empty() || values.size() != weights.size())
        throw InputError("weighted_median: empty or mismatched input");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0) throw InputError("weighted_median: negative weight");
        total += weights[i];
    }
    if (total <= 0) throw InputError("weighted_median: weights sum to zero");
    double cum = 0.0;
    for (std::size_t i : order) {
        cum += weights[i];
        if (cum >= 0.5 * total) return values[i];
    }
    return values[order.back()];
}

namespace {

struct PairMoments {
    double n, suu, suv, svv;
};

PairMoments pair_moments(const SuffStats& s, int e, int u, int v) {
    return {static_cast<double>(s.env(e).n), s.second_moment(e, u), s.cross_moment(e, u, v),
            s.second_moment(e, v)};
}

// Slope-equality F statistic from centered second moments of the reference
// and the intervened environment, with per-environment residual variances
// (equal designs and variances reduce it to the classical pooled form) and
// Welch-Satterthwaite denominator degrees of freedom. Each environment loses
// k = 2 degrees of freedom: its mean (absorbed by centering) and its slope.
std::optional<double> f_test_from_moments(const PairMoments& m0, const PairMoments& m1) {
    constexpr double k = 2.0;
    if (m0.n < 3 || m1.n < 3) return std::nullopt;
    if (m0.suu <= 0.0 || m1.suu <= 0.0) return std::nullopt;
    const double slope0 = m0.suv / m0.suu;
    const double slope1 = m1.suv / m1.suu;
    const double sse0 = std::max(m0.svv - m0.suv * slope0, 0.0);
    const double sse1 = std::max(m1.svv - m1.suv * slope1, 0.0);
    if (sse0 + sse1 <= 0.0) return std::nullopt;

    // Variance of each slope estimate, then the combined degrees of freedom.
    const double g0 = sse0 / (m0.n - k) / m0.suu;
    const double g1 = sse1 / (m1.n - k) / m1.suu;
    if (g0 + g1 <= 0.0) return std::nullopt;
    const double f =
        (g0 + g1) * (g0 + g1) / (g0 * g0 / (m0.n - k) + g1 * g1 / (m1.n - k));
    if (!std::isfinite(f) || f <= 0.0) return std::nullopt;

    const double diff = slope0 - slope1;
    const double stat = diff * diff / (g0 + g1);
    if (!std::isfinite(stat)) return std::nullopt;
    boost::math::fisher_f dist(1.0, f);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

PairMoments span_moments(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    PairMoments m{n, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        m.suu += dx * dx;
        m.suv += dx * dy;
        m.svv += dy * dy;
    }
    return m;
}

}  // namespace

std::optional<double> irc_f_test(std::span<const double> x_u0, std::span<const double> x_v0,
                                 std::span<const double> x_uI, std::span<const double> x_vI) {
    if (x_u0.size() != x_v0.size() || x_uI.size() != x_vI.size())
        throw InputError("irc_f_test: columns within an environment must match in length");
    if (x_u0.size() < 3 || x_uI.size() < 3)
        throw InputError("irc_f_test: both environments need at least three samples");
    return f_test_from_moments(span_moments(x_u0, x_v0), span_moments(x_uI, x_vI));
}

EdgeTestResult irc_orient_edge(int u, int v, const SuffStats& stats,
                               const InterventionFamily& fam, double alpha) {
    EdgeTestResult res;
    const int obs = fam.observational_index();
    if (stats.env(obs).n < kMinPairwiseSamples || stats.pair_flagged(obs, u, v)) return res;

    std::vector<int> on_u, on_v;  // environments intervening on exactly one endpoint
    for (int e = 0; e < stats.env_count(); ++e) {
        if (e == obs) continue;
        if (stats.env(e).n < kMinPairwiseSamples || stats.pair_flagged(e, u, v)) continue;
        const bool iu = fam.intervenes(e, u);
        const bool iv = fam.intervenes(e, v);
        if (iu && !iv)
            on_u.push_back(e);
        else if (iv && !iu)
            on_v.push_back(e);
    }

    // run(envs, a, b): test invariance of the slope of b regressed on a.
    auto run = [&](const std::vector<int>& envs, int a, int b) {
        double best = std::numeric_limits<double>::infinity();
        int count = 0;
        const PairMoments ref = pair_moments(stats, obs, a, b);
        for (int e : envs) {
            if (auto p = f_test_from_moments(ref, pair_moments(stats, e, a, b))) {
                best = std::min(best, *p);
                ++count;
            }
        }
        return std::pair<double, int>{best, count};
    };

    const auto [p_uv, n_uv] = run(on_u, u, v);  // null: u -> v survives interventions on u
    const auto [p_vu, n_vu] = run(on_v, v, u);  // null: v -> u survives interventions on v
    res.tests_run = n_uv + n_vu;
    if (res.tests_run == 0) return res;

    const bool reject_uv = n_uv > 0 && p_uv < alpha / n_uv;
    const bool reject_vu = n_vu > 0 && p_vu < alpha / n_vu;
    if (reject_uv && reject_vu) {
        // Both rejectable: follow the smaller p-value.
        if (p_uv <= p_vu) {
            res.direction = Direction::v_to_u;
            res.p_value = p_uv;
        } else {
            res.direction = Direction::u_to_v;
            res.p_value = p_vu;
        }
    } else if (reject_uv) {
        res.direction = Direction::v_to_u;
        res.p_value = p_uv;
    } else if (reject_vu) {
        res.direction = Direction::u_to_v;
        res.p_value = p_vu;
    } else if (n_uv > 0 && n_vu == 0) {
        // Only one orientation testable and it survived: keep it.
        res.direction = Direction::u_to_v;
        res.p_value = p_uv;
    } else if (n_vu > 0 && n_uv == 0) {
        res.direction = Direction::v_to_u;
        res.p_value = p_vu;
    } else {
        // Both testable, neither rejected: leave the edge alone.
        res.p_value = std::min(p_uv, p_vu);
    }
    return res;
}

BrentResult brent_maximize(const std::function<double(double)>& f, double lo, double hi,
                           double tol) {
    if (!(lo < hi)) throw InputError("brent_maximize: lo must be below hi");
    auto g = [&](double x) {
        const double y = f(x);
        if (!std::isfinite(y))
            throw NumericError("brent_maximize: objective returned a non-finite value");
        return -y;
    };

    constexpr double cgold = 0.3819660112501051;
    constexpr int max_iter = 200;
    const double eps = std::numeric_limits<double>::epsilon();
    double a = lo, b = hi;
    double x = a + cgold * (b - a), w = x, v = x;
    double fx = g(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + eps * (std::abs(x) + 1.0);
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
        bool golden = true;
        if (std::abs(e) > tol1) {
            // Parabolic interpolation through (x, w, v).
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double pnum = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) pnum = -pnum;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::abs(pnum) < std::abs(0.5 * q * etemp) && pnum > q * (a - x) &&
                pnum < q * (b - x)) {
                d = pnum / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
                golden = false;
            }
        }
        if (golden) {
            e = (x >= xm) ? a - x : b - x;
            d = cgold * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
        const double fu = g(u);
        if (fu <= fx) {
            if (u >= x)
                a = x;
            else
                b = x;
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return {x, -fx};
}

namespace {

// Coarse scan plus a Brent polish inside the best cell; used for the shared
// coefficient profiles, which need not be unimodal over a wide bracket.
BrentResult maximize_scalar(const std::function<double(double)>& f, double lo, double hi) {
    constexpr int kGrid = 128;
    const double step = (hi - lo) / kGrid;
    double best_x = lo, best_f = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kGrid; ++i) {
        const double x = lo + i * step;
        const double y = f(x);
        if (!std::isfinite(y)) throw NumericError("profile maximization: non-finite objective");
        if (y > best_f) {
            best_f = y;
            best_x = x;
        }
    }
    const double cell_lo = std::max(lo, best_x - step);
    const double cell_hi = std::min(hi, best_x + step);
    BrentResult r = brent_maximize(f, cell_lo, cell_hi, 1e-10);
    if (r.value < best_f) return {best_x, best_f};
    return r;
}

struct EnvSplit {
    std::vector<int> intervened;  // environments targeting the child
    std::vector<int> rest;
};

EnvSplit split_envs(const std::vector<int>& included, const InterventionFamily& fam, int child) {
    EnvSplit s;
    for (int e : included) {
        if (fam.intervenes(e, child))
            s.intervened.push_back(e);
        else
            s.rest.push_back(e);
    }
    return s;
}

double env_count_of(const SuffStats& stats, const std::vector<int>& envs) {
    double n = 0;
    for (int e : envs) n += stats.env(e).n;
    return n;
}

double sse_at(const PairMoments& m, double lambda) {
    return std::max(m.svv - 2.0 * lambda * m.suv + lambda * lambda * m.suu, 0.0);
}

// Gaussian log-likelihood contribution of a fit with per-environment MLE
// variance sigma2 on n points: -(n/2) (log 2*pi + log sigma2 + 1).
double gauss_term(double n, double sigma2) {
    return -0.5 * n * (kLog2Pi + std::log(std::max(sigma2, kVarFloor)) + 1.0);
}

// Marginal of x with a free variance in every environment.
double marginal_free(int x, const std::vector<int>& envs, const SuffStats& stats) {
    double acc = 0.0;
    for (int e : envs) acc += gauss_term(stats.env(e).n, stats.env(e).var[x]);
    return acc;
}

// Conditional child | parent with free per-environment variances, a shared
// slope across `rest` and per-environment slopes on `intervened`.
double conditional_free_variance(int child, int parent, const EnvSplit& split,
                                 const SuffStats& stats, double* lambda_shared_out) {
    double acc = 0.0;
    for (int e : split.intervened) {
        const PairMoments m = pair_moments(stats, e, parent, child);
        const double lambda = m.suu > 0 ? m.suv / m.suu : 0.0;
        acc += gauss_term(m.n, sse_at(m, lambda) / m.n);
    }
    if (!split.rest.empty()) {
        std::vector<PairMoments> ms;
        ms.reserve(split.rest.size());
        double bracket = 0.0;
        for (int e : split.rest) {
            ms.push_back(pair_moments(stats, e, parent, child));
            const PairMoments& m = ms.back();
            if (m.suu > 0) bracket = std::max(bracket, std::abs(m.suv / m.suu));
        }
        double lambda;
        if (ms.size() == 1) {
            lambda = ms[0].suu > 0 ? ms[0].suv / ms[0].suu : 0.0;
        } else {
            const double b = 2.0 * bracket + 1.0;
            auto profile = [&](double l) {
                double value = 0.0;
                for (const PairMoments& m : ms)
                    value -= 0.5 * m.n * std::log(std::max(sse_at(m, l), kSseFloor));
                return value;
            };
            lambda = maximize_scalar(profile, -b, b).x;
        }
        if (lambda_shared_out) *lambda_shared_out = lambda;
        for (const PairMoments& m : ms) acc += gauss_term(m.n, sse_at(m, lambda) / m.n);
    } else if (lambda_shared_out) {
        *lambda_shared_out = 0.0;
    }
    return acc;
}

std::vector<int> included_envs(const SuffStats& stats, int* excluded) {
    std::vector<int> incl;
    for (int e = 0; e < stats.env_count(); ++e) {
        if (stats.env(e).n >= 2)
            incl.push_back(e);
        else if (excluded)
            ++*excluded;
    }
    return incl;
}

}  // namespace

BicScore bic_edge_score(int u, int v, const SuffStats& stats, const InterventionFamily& fam) {
    BicScore out;
    std::vector<int> incl;
    for (int e = 0; e < stats.env_count(); ++e) {
        if (stats.env(e).n >= 2 && !stats.pair_flagged(e, u, v))
            incl.push_back(e);
        else
            ++out.excluded_envs;
    }
    if (incl.empty()) return out;

    const double n = env_count_of(stats, incl);
    const EnvSplit split = split_envs(incl, fam, v);

    double loglik = marginal_free(u, incl, stats);
    loglik += conditional_free_variance(v, u, split, stats, &out.lambda_shared);

    out.dim = 2 * static_cast<int>(incl.size()) + (split.rest.empty() ? 0 : 1) +
              static_cast<int>(split.intervened.size());
    out.loglik = loglik;
    out.score = std::log(n) * out.dim - 2.0 * loglik;
    return out;
}

double bic_root_score(const std::vector<int>& component,
                      const std::vector<VertexPair>& component_edges, int root,
                      const SuffStats& stats, const InterventionFamily& fam) {
    const std::vector<int> incl = included_envs(stats, nullptr);
    if (incl.empty()) return 0.0;
    const double n = env_count_of(stats, incl);

    double loglik = 0.0;
    int dim = 0;

    // Root marginal: variance shared across the environments that leave it alone.
    {
        const EnvSplit split = split_envs(incl, fam, root);
        if (!split.rest.empty()) {
            double pooled = 0.0, n_rest = 0.0;
            for (int e : split.rest) {
                pooled += stats.env(e).n * stats.env(e).var[root];
                n_rest += stats.env(e).n;
            }
            pooled /= n_rest;
            for (int e : split.rest) loglik += gauss_term(stats.env(e).n, pooled);
            dim += 1;
        }
        for (int e : split.intervened) loglik += gauss_term(stats.env(e).n, stats.env(e).var[root]);
        dim += static_cast<int>(split.intervened.size());
    }

    // Orient edges away from the root to read off each vertex's parent.
    std::vector<std::vector<int>> adj;
    {
        int max_v = root;
        for (const auto& [a, b] : component_edges) max_v = std::max({max_v, a, b});
        adj.resize(max_v + 1);
        for (const auto& [a, b] : component_edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
    }
    if (std::find(component.begin(), component.end(), root) == component.end())
        throw InputError("bic_root_score: root is not a component vertex");
    std::vector<std::pair<int, int>> order;  // (vertex, parent)
    {
        std::vector<int> queue{root};
        std::vector<char> seen(adj.size(), 0);
        seen[root] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int x = queue[head];
            for (int y : adj[x]) {
                if (seen[y]) continue;
                seen[y] = 1;
                order.emplace_back(y, x);
                queue.push_back(y);
            }
        }
    }

    for (const auto& [child, parent] : order) {
        const EnvSplit split = split_envs(incl, fam, child);
        for (int e : split.intervened) {
            const PairMoments m = pair_moments(stats, e, parent, child);
            const double lambda = m.suu > 0 ? m.suv / m.suu : 0.0;
            loglik += gauss_term(m.n, sse_at(m, lambda) / m.n);
        }
        dim += 2 * static_cast<int>(split.intervened.size());
        if (!split.rest.empty()) {
            // Pooled slope and pooled conditional variance (closed form).
            double suu = 0.0, suv = 0.0, n_rest = 0.0, sse = 0.0;
            std::vector<PairMoments> ms;
            for (int e : split.rest) {
                ms.push_back(pair_moments(stats, e, parent, child));
                suu += ms.back().suu;
                suv += ms.back().suv;
                n_rest += ms.back().n;
            }
            const double lambda = suu > 0 ? suv / suu : 0.0;
            for (const PairMoments& m : ms) sse += sse_at(m, lambda);
            const double pooled = sse / n_rest;
            for (const PairMoments& m : ms) loglik += gauss_term(m.n, pooled);
            dim += 2;
        }
    }
    return std::log(n) * dim - 2.0 * loglik;
}

bool collider_test_simple(int u, int v, int w, const SuffStats& stats,
                          const InterventionFamily& fam) {
    (void)v;
    (void)fam;
    double stat = 0.0;  // twice the Fisher aggregation weight of rho_uw
    for (int e = 0; e < stats.env_count(); ++e) {
        const double rho = clip_correlation(stats.env(e).corr(u, w));
        stat -= stats.env(e).n * std::log1p(-rho * rho);
    }
    const double n = static_cast<double>(stats.total_samples());
    return stat <= std::log(n) * stats.env_count();
}

namespace {

struct TripleMoments {
    double n, suu, sww, svv, suw, suv, swv;
};

TripleMoments triple_moments(const SuffStats& s, int e, int u, int v, int w) {
    return {static_cast<double>(s.env(e).n),
            s.second_moment(e, u),
            s.second_moment(e, w),
            s.second_moment(e, v),
            s.cross_moment(e, u, w),
            s.cross_moment(e, u, v),
            s.cross_moment(e, w, v)};
}

double sse2_at(const TripleMoments& m, double lu, double lw) {
    const double sse = m.svv + lu * lu * m.suu + lw * lw * m.sww + 2.0 * lu * lw * m.suw -
                       2.0 * lu * m.suv - 2.0 * lw * m.swv;
    return std::max(sse, 0.0);
}

}  // namespace

ColliderDecision collider_test_refined(int u, int v, int w, const SuffStats& stats,
                                       const InterventionFamily& fam) {
    std::vector<int> incl;
    for (int e = 0; e < stats.env_count(); ++e)
        if (stats.env(e).n >= 2 && !stats.pair_flagged(e, u, v) && !stats.pair_flagged(e, w, v))
            incl.push_back(e);
    if (incl.empty()) return {collider_test_simple(u, v, w, stats, fam), true};

    std::vector<TripleMoments> tm;
    tm.reserve(incl.size());
    for (int e : incl) {
        tm.push_back(triple_moments(stats, e, u, v, w));
        const TripleMoments& m = tm.back();
        const double det = m.suu * m.sww - m.suw * m.suw;
        if (m.suu <= 0.0 || m.sww <= 0.0 || det <= 1e-12 * m.suu * m.sww)
            return {collider_test_simple(u, v, w, stats, fam), true};
    }

    const double n = env_count_of(stats, incl);
    const double log_n = std::log(n);
    const int n_env = static_cast<int>(incl.size());
    const EnvSplit split_v = split_envs(incl, fam, v);
    const EnvSplit split_w = split_envs(incl, fam, w);

    // Chain u -> v -> w: two single-edge conditionals.
    double chain = marginal_free(u, incl, stats);
    chain += conditional_free_variance(v, u, split_v, stats, nullptr);
    chain += conditional_free_variance(w, v, split_w, stats, nullptr);
    const int dim_chain = 3 * n_env + static_cast<int>(split_v.intervened.size()) +
                          static_cast<int>(split_w.intervened.size()) + 2;
    const double bic_chain = log_n * dim_chain - 2.0 * chain;

    // Collider u -> v <- w: bivariate regression of v on (u, w).
    double coll = marginal_free(u, incl, stats) + marginal_free(w, incl, stats);
    std::vector<TripleMoments> rest_ms;
    for (std::size_t i = 0; i < incl.size(); ++i) {
        const bool intervened = fam.intervenes(incl[i], v);
        const TripleMoments& m = tm[i];
        if (intervened) {
            const double det = m.suu * m.sww - m.suw * m.suw;
            const double lu = (m.suv * m.sww - m.swv * m.suw) / det;
            const double lw = (m.swv * m.suu - m.suv * m.suw) / det;
            coll += gauss_term(m.n, sse2_at(m, lu, lw) / m.n);
        } else {
            rest_ms.push_back(m);
        }
    }
    if (!rest_ms.empty()) {
        // Shared pair of slopes: start at the pooled solution, then refine by
        // coordinate-wise bounded maximization.
        TripleMoments pooled{0, 0, 0, 0, 0, 0, 0};
        for (const TripleMoments& m : rest_ms) {
            pooled.suu += m.suu;
            pooled.sww += m.sww;
            pooled.svv += m.svv;
            pooled.suw += m.suw;
            pooled.suv += m.suv;
            pooled.swv += m.swv;
        }
        const double det = pooled.suu * pooled.sww - pooled.suw * pooled.suw;
        double lu = (pooled.suv * pooled.sww - pooled.swv * pooled.suw) / det;
        double lw = (pooled.swv * pooled.suu - pooled.suv * pooled.suw) / det;
        auto objective = [&](double a, double b) {
            double value = 0.0;
            for (const TripleMoments& m : rest_ms)
                value -= 0.5 * m.n * std::log(std::max(sse2_at(m, a, b), kSseFloor));
            return value;
        };
        if (rest_ms.size() > 1) {
            const double bracket = 2.0 * (std::abs(lu) + std::abs(lw)) + 1.0;
            double value = objective(lu, lw);
            for (int sweep = 0; sweep < 40; ++sweep) {
                const double lw_fixed = lw;
                lu = maximize_scalar([&](double a) { return objective(a, lw_fixed); },
                                     lu - bracket, lu + bracket)
                         .x;
                const double lu_fixed = lu;
                const BrentResult rb = maximize_scalar(
                    [&](double b) { return objective(lu_fixed, b); }, lw - bracket, lw + bracket);
                lw = rb.x;
                if (rb.value - value < 1e-10) break;
                value = rb.value;
            }
        }
        for (const TripleMoments& m : rest_ms) coll += gauss_term(m.n, sse2_at(m, lu, lw) / m.n);
    }
    const int dim_coll = 2 * (2 * n_env + static_cast<int>(split_v.intervened.size()) + 1);
    const double bic_coll = log_n * dim_coll - 2.0 * coll;

    return {bic_coll <= bic_chain, false};
}

}  // namespace ptlearn

#include "fourbody/minimizer.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "fourbody/errors.hpp"
#include "fourbody/testpaths.hpp"
#include "parallel.hpp"

namespace fourbody {

namespace {

constexpr double kGuard = 1e-6;  // line-search collision guard
constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void clamp_bounds(std::vector<double>& x) {
    for (std::size_t i : {1, 2, 4, 5}) x[i] = std::max(x[i], 0.0);
}

// splitmix64 keyed by (seed, stream); value k of a stream depends only on k.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

    double uniform() {
        const std::uint64_t v = mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
        return static_cast<double>(v >> 11) * 0x1.0p-53;
    }

    double normal() {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

struct Evaluation {
    bool ok = false;
    double f = kInf;
    std::vector<double> g;
};

Evaluation evaluate(DiscretePath& scratch, const std::vector<double>& x) {
    Evaluation e;
    scratch.unpack(x);
    const PolylinePath poly = scratch.polyline();
    if (path_min_pair_distance(poly).distance < kGuard) return e;
    try {
        ActionGradient ag = discrete_action_gradient(scratch);
        e.ok = std::isfinite(ag.action);
        e.f = ag.action;
        e.g = std::move(ag.gradient);
    } catch (const CollisionError&) {
        e.ok = false;
    }
    return e;
}

// ---- Hessian by colored central differences of the analytic gradient ----

struct VarSlot {
    int node;
    int offset;
};

VarSlot slot_of(std::size_t v, int N) {
    if (v < 3) return {0, static_cast<int>(v)};
    if (v < 6) return {N, static_cast<int>(v - 3)};
    const std::size_t k = v - 6;
    return {1 + static_cast<int>(k / 6), static_cast<int>(k % 6)};
}

long var_of(int node, int offset, int N) {
    if (node == 0) return offset < 3 ? offset : -1;
    if (node == N) return offset < 3 ? 3 + offset : -1;
    return 6 + 6L * (node - 1) + offset;
}

bool hessian(DiscretePath& scratch, const std::vector<double>& x, Eigen::SparseMatrix<double>& H) {
    const int N = scratch.N;
    const std::size_t n = x.size();
    const double eps = 1e-6;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * 20);
    std::vector<double> xp(x), xm(x);
    for (int color = 0; color < 3; ++color) {
        for (int off = 0; off < 6; ++off) {
            bool any = false;
            xp = x;
            xm = x;
            for (int node = color; node <= N; node += 3) {
                const long v = var_of(node, off, N);
                if (v < 0) continue;
                xp[static_cast<std::size_t>(v)] += eps;
                xm[static_cast<std::size_t>(v)] -= eps;
                any = true;
            }
            if (!any) continue;
            Evaluation ep = evaluate(scratch, xp), em = evaluate(scratch, xm);
            if (!ep.ok || !em.ok) return false;
            for (std::size_t r = 0; r < n; ++r) {
                const int jr = slot_of(r, N).node;
                for (int jc = std::max(0, jr - 1); jc <= std::min(N, jr + 1); ++jc) {
                    if (jc % 3 != color) continue;
                    const long c = var_of(jc, off, N);
                    if (c < 0) continue;
                    const double h = (ep.g[r] - em.g[r]) / (2.0 * eps);
                    trip.emplace_back(static_cast<int>(r), static_cast<int>(c), 0.5 * h);
                    trip.emplace_back(static_cast<int>(c), static_cast<int>(r), 0.5 * h);
                }
            }
        }
    }
    H.resize(static_cast<int>(n), static_cast<int>(n));
    H.setFromTriplets(trip.begin(), trip.end());
    return true;
}

std::vector<bool> active_set(const std::vector<double>& x, const std::vector<double>& g) {
    std::vector<bool> a(x.size(), false);
    for (std::size_t i : {1, 2, 4, 5}) a[i] = x[i] <= 0.0 && g[i] > 0.0;
    return a;
}

// Newton steps judged by gradient decrease; the action itself is flat to rounding here.
int newton_polish(DiscretePath& scratch, std::vector<double>& x, Evaluation& cur, std::vector<double>* history) {
    int steps = 0;
    for (int it = 0; it < 40; ++it) {
        const double gn = inf_norm(project_gradient(x, cur.g));
        if (gn <= 1e-14) break;
        Eigen::SparseMatrix<double> H;
        if (!hessian(scratch, x, H)) break;
        const auto act = active_set(x, cur.g);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = act[i] ? 0.0 : -cur.g[i];
        for (int k = 0; k < H.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator itr(H, k); itr; ++itr) {
                if (act[static_cast<std::size_t>(itr.row())] || act[static_cast<std::size_t>(itr.col())]) {
                    itr.valueRef() = itr.row() == itr.col() ? 1.0 : 0.0;
                }
            }
        }
        double maxdiag = 0.0;
        for (int k = 0; k < H.rows(); ++k) maxdiag = std::max(maxdiag, std::abs(H.coeff(k, k)));
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
        Eigen::SparseMatrix<double> I(H.rows(), H.cols());
        I.setIdentity();
        double shift = 0.0;
        bool factored = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            ldlt.compute(shift > 0.0 ? Eigen::SparseMatrix<double>(H + shift * I) : H);
            if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
                factored = true;
                break;
            }
            shift = shift == 0.0 ? 1e-10 * maxdiag : shift * 10.0;
        }
        if (!factored) break;
        const Eigen::VectorXd d = ldlt.solve(rhs);
        bool accepted = false;
        double alpha = 1.0;
        for (int ls = 0; ls < 12 && !accepted; ++ls, alpha *= 0.5) {
            std::vector<double> xt(x);
            for (std::size_t i = 0; i < x.size(); ++i) xt[i] += alpha * d[static_cast<Eigen::Index>(i)];
            clamp_bounds(xt);
            Evaluation et = evaluate(scratch, xt);
            if (!et.ok) continue;
            const double gt = inf_norm(project_gradient(xt, et.g));
            if (et.f <= cur.f + 1e-12 * std::abs(cur.f) && gt < gn) {
                x = std::move(xt);
                cur = std::move(et);
                accepted = true;
            }
        }
        if (!accepted) break;
        ++steps;
        if (history) history->push_back(cur.f);
    }
    return steps;
}

}  // namespace

// ---- DiscretePath ----

std::vector<Configuration> DiscretePath::nodes() const {
    std::vector<Configuration> q;
    q.reserve(static_cast<std::size_t>(N) + 1);
    BoundaryParams s = start, e = end;
    s.side = Side::Start;
    e.side = end_side(variant);
    e.theta = theta;
    q.push_back(build_boundary(s));
    for (const auto& c : interior) q.push_back(c);
    q.push_back(build_boundary(e));
    return q;
}

PolylinePath DiscretePath::polyline() const { return PolylinePath::uniform(nodes()); }

std::vector<double> DiscretePath::pack() const {
    std::vector<double> x;
    x.reserve(dimension());
    for (double v : {start.a, start.b, start.c, end.a, end.b, end.c}) x.push_back(v);
    for (const auto& c : interior) {
        for (int i = 0; i < 3; ++i) {
            x.push_back(c[static_cast<std::size_t>(i)].x);
            x.push_back(c[static_cast<std::size_t>(i)].y);
        }
    }
    return x;
}

void DiscretePath::unpack(const std::vector<double>& x) {
    if (x.size() != dimension()) throw DomainError("packed vector has the wrong dimension");
    start = BoundaryParams{Side::Start, x[0], x[1], x[2], RotationAngle{}};
    end = BoundaryParams{end_side(variant), x[3], x[4], x[5], theta};
    interior.resize(static_cast<std::size_t>(N - 1));
    for (std::size_t j = 0; j < interior.size(); ++j) {
        const double* p = &x[6 + 6 * j];
        interior[j] = complete_configuration({p[0], p[1]}, {p[2], p[3]}, {p[4], p[5]});
    }
}

DiscretePath DiscretePath::from_polyline(Variant v, const RotationAngle& theta, const PolylinePath& p, int N) {
    if (N < 2) throw DomainError("a discrete path needs N >= 2 segments");
    DiscretePath d;
    d.variant = v;
    d.theta = theta;
    d.N = N;
    const double t0 = p.t_begin(), t1 = p.t_end();
    d.start = fit_boundary(p.nodes().front(), Side::Start, RotationAngle{}).params;
    d.end = fit_boundary(p.nodes().back(), end_side(v), theta).params;
    for (BoundaryParams* bp : {&d.start, &d.end}) {
        bp->b = std::max(bp->b, 0.0);
        bp->c = std::max(bp->c, 0.0);
    }
    for (int j = 1; j < N; ++j) {
        const Configuration q = p.at(t0 + (t1 - t0) * j / N);
        d.interior.push_back(complete_configuration(q[0], q[1], q[2]));
    }
    return d;
}

bool is_bound_index(std::size_t i) { return i == 1 || i == 2 || i == 4 || i == 5; }

ActionGradient discrete_action_gradient(const DiscretePath& path) {
    const int N = path.N;
    const std::vector<Configuration> q = path.nodes();
    const double dt = 1.0 / N;
    std::vector<Configuration> G(q.size(), Configuration{});
    double kinetic = 0.0, potential = 0.0;
    for (int k = 0; k < N; ++k) {
        const Configuration& P = q[static_cast<std::size_t>(k)];
        const Configuration& Q = q[static_cast<std::size_t>(k) + 1];
        Configuration& GP = G[static_cast<std::size_t>(k)];
        Configuration& GQ = G[static_cast<std::size_t>(k) + 1];
        kinetic += segment_kinetic(P, Q, dt);
        for (int i = 0; i < 4; ++i) {
            const Vec2 v = (1.0 / dt) * (Q[i] - P[i]);
            GP[i] -= v;
            GQ[i] += v;
        }
        for (const Pair& pr : kPairs) {
            InverseDistanceGradient g;
            try {
                g = segment_inverse_distance_gradient(P[pr.i] - P[pr.j], Q[pr.i] - Q[pr.j]);
            } catch (const CollisionError& e) {
                throw CollisionError(e.what(), k, pr);
            }
            potential += dt * g.value;
            GP[pr.i] += dt * g.dA;
            GP[pr.j] -= dt * g.dA;
            GQ[pr.i] += dt * g.dB;
            GQ[pr.j] -= dt * g.dB;
        }
    }
    ActionGradient out;
    out.action = kinetic + potential;
    out.gradient.assign(path.dimension(), 0.0);
    const auto js = boundary_jacobian(Side::Start, RotationAngle{});
    const auto je = boundary_jacobian(end_side(path.variant), path.theta);
    for (int p = 0; p < 3; ++p) {
        for (int i = 0; i < 4; ++i) {
            out.gradient[static_cast<std::size_t>(p)] += dot(G.front()[i], js[p][i]);
            out.gradient[3 + static_cast<std::size_t>(p)] += dot(G.back()[i], je[p][i]);
        }
    }
    for (int j = 1; j < N; ++j) {
        const Configuration& g = G[static_cast<std::size_t>(j)];
        double* o = &out.gradient[6 + 6 * static_cast<std::size_t>(j - 1)];
        for (int i = 0; i < 3; ++i) {
            o[2 * i] = g[i].x - g[3].x;
            o[2 * i + 1] = g[i].y - g[3].y;
        }
    }
    return out;
}

std::vector<double> project_gradient(const std::vector<double>& x, const std::vector<double>& g) {
    std::vector<double> pg(g);
    for (std::size_t i : {1, 2, 4, 5}) {
        if (i < x.size() && x[i] <= 0.0 && pg[i] > 0.0) pg[i] = 0.0;
    }
    return pg;
}

FirstVariationResidual first_variation_residual(const DiscretePath& path) {
    if (path.N < 4) throw DomainError("first_variation_residual needs N >= 4");
    const auto q = path.nodes();
    const double h = 1.0 / path.N;
    const std::size_t n = q.size() - 1;
    Configuration v0{}, v1{};
    for (int i = 0; i < 4; ++i) {
        v0[i] = (1.0 / (2.0 * h)) * (-3.0 * q[0][i] + 4.0 * q[1][i] - q[2][i]);
        v1[i] = (1.0 / (2.0 * h)) * (3.0 * q[n][i] - 4.0 * q[n - 1][i] + q[n - 2][i]);
    }
    FirstVariationResidual r;
    r.start_terms = {std::abs(v0[0].x), std::abs(v0[1].x), std::abs(v0[2].x + v0[3].x), std::abs(v0[2].y - v0[3].y)};
    const Mat2 M = kReflectX * rotation(path.theta.scaled(2));
    Vec2 e1, e2;
    if (path.variant == Variant::E1) {
        e1 = v1[0] - v1[3] * M;
        e2 = v1[1] - v1[2] * M;
    } else {
        e1 = v1[0] + v1[1] * M;
        e2 = v1[2] + v1[3] * M;
    }
    r.end_terms = {std::abs(e1.x), std::abs(e1.y), std::abs(e2.x), std::abs(e2.y)};
    r.start = *std::max_element(r.start_terms.begin(), r.start_terms.end());
    r.end = *std::max_element(r.end_terms.begin(), r.end_terms.end());
    return r;
}

// ---- descent ----

RestartTrace descend(DiscretePath& path, const MinimizeOptions& opts) {
    RestartTrace tr;
    DiscretePath scratch = path;
    std::vector<double> x = path.pack();
    clamp_bounds(x);
    Evaluation cur = evaluate(scratch, x);
    if (!cur.ok) {
        tr.initial_action = tr.final_action = kInf;
        tr.collapsed = true;
        tr.note = "seed violates the collision guard";
        return tr;
    }
    tr.initial_action = cur.f;
    std::vector<double>* hist = opts.record_history ? &tr.history : nullptr;
    if (hist) hist->push_back(cur.f);

    struct Pair3 {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair3> mem;
    const std::size_t m = 12;
    const std::size_t n = x.size();
    int stall = 0;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const std::vector<double> pg = project_gradient(x, cur.g);
        if (inf_norm(pg) <= opts.gradient_tolerance) break;
        const auto act = active_set(x, cur.g);

        std::vector<double> r(pg);
        std::vector<double> alphas(mem.size());
        for (std::size_t k = mem.size(); k-- > 0;) {
            alphas[k] = mem[k].rho * dotv(mem[k].s, r);
            for (std::size_t i = 0; i < n; ++i) r[i] -= alphas[k] * mem[k].y[i];
        }
        if (!mem.empty()) {
            const double gamma = dotv(mem.back().s, mem.back().y) / dotv(mem.back().y, mem.back().y);
            for (double& v : r) v *= gamma;
        }
        for (std::size_t k = 0; k < mem.size(); ++k) {
            const double beta = mem[k].rho * dotv(mem[k].y, r);
            for (std::size_t i = 0; i < n; ++i) r[i] += (alphas[k] - beta) * mem[k].s[i];
        }
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = act[i] ? 0.0 : -r[i];
        if (dotv(d, pg) >= 0.0) {
            mem.clear();
            for (std::size_t i = 0; i < n; ++i) d[i] = -pg[i];
        }

        double alpha = mem.empty() ? std::min(1.0, 0.01 / std::max(inf_norm(d), 1e-300)) : 1.0;
        bool accepted = false;
        Evaluation next;
        std::vector<double> xt(n);
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + alpha * d[i];
            clamp_bounds(xt);
            next = evaluate(scratch, xt);
            if (next.ok) {
                double dec = 0.0;
                for (std::size_t i = 0; i < n; ++i) dec += cur.g[i] * (xt[i] - x[i]);
                if (next.f <= cur.f + 1e-4 * dec) {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            } else {
                alpha *= 0.1;
            }
        }
        if (!accepted) {
            if (!mem.empty()) {
                mem.clear();
                continue;
            }
            tr.note = "line search exhausted";
            break;
        }
        Pair3 p{std::vector<double>(n), std::vector<double>(n), 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            p.s[i] = xt[i] - x[i];
            p.y[i] = next.g[i] - cur.g[i];
        }
        const double sy = dotv(p.s, p.y);
        if (sy > 1e-12 * std::sqrt(dotv(p.s, p.s) * dotv(p.y, p.y))) {
            p.rho = 1.0 / sy;
            mem.push_back(std::move(p));
            if (mem.size() > m) mem.pop_front();
        }
        stall = (cur.f - next.f <= 1e-15 * std::abs(cur.f)) ? stall + 1 : 0;
        x = xt;
        cur = std::move(next);
        if (hist) hist->push_back(cur.f);
        if (stall >= 25) {
            tr.note = "action stationary to rounding";
            break;
        }
    }
    tr.iterations = it;
    if (opts.newton_polish) tr.newton_steps = newton_polish(scratch, x, cur, hist);

    path.unpack(x);
    tr.final_action = cur.f;
    tr.gradient_norm = inf_norm(project_gradient(x, cur.g));
    tr.converged = tr.gradient_norm <= opts.gradient_tolerance;
    tr.min_pair_distance = path_min_pair_distance(path.polyline()).distance;
    tr.collapsed = tr.min_pair_distance < opts.collapse_tolerance;
    return tr;
}

DiscretePath prolong(const DiscretePath& path, int N) {
    return DiscretePath::from_polyline(path.variant, path.theta, path.polyline(), N);
}

DiscretePath test_path_seed(Variant v, const RotationAngle& theta, int N) {
    const TestPathTable* table = nullptr;
    try {
        table = &load_table(v, theta);
    } catch (const DomainError&) {
        double best = kInf;
        for (const auto& t : all_tables()) {
            if (t.variant != v) continue;
            const double d = std::abs(t.theta0.radians() - theta.radians());
            if (d < best) {
                best = d;
                table = &t;
            }
        }
    }
    return DiscretePath::from_polyline(v, theta, build_test_path(*table, theta), N);
}

namespace {

DiscretePath make_seed(Variant v, const RotationAngle& theta, int N, int restart, int restarts,
                       const MinimizeOptions& opts, std::string& kind) {
    DiscretePath base = test_path_seed(v, theta, N);
    if (restart == 0) {
        kind = "test-path";
        return base;
    }
    if (restart == restarts - 1) {
        kind = "homotopy";
        const auto q = base.nodes();
        for (int j = 1; j < N; ++j) {
            const double s = static_cast<double>(j) / N;
            const Configuration c = (1.0 - s) * q.front() + s * q.back();
            base.interior[static_cast<std::size_t>(j - 1)] = complete_configuration(c[0], c[1], c[2]);
        }
        return base;
    }
    kind = "test-path+noise";
    double scale = 0.0;
    const auto q = base.nodes();
    for (const auto& c : q) {
        for (const auto& p : c) scale += dot(p, p);
    }
    scale = std::sqrt(scale / (4.0 * static_cast<double>(q.size())));
    const double sigma = opts.noise * scale;
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(restart));
    std::vector<double> x = base.pack();
    for (double& xi : x) xi += sigma * rng.normal();
    clamp_bounds(x);
    base.unpack(x);
    return base;
}

}  // namespace

MinimizeResult minimize(Variant v, const RotationAngle& theta, int N, const MinimizeOptions& opts) {
    if (!(theta.radians() > 0.0) || theta.over_pi() >= 0.25) {
        throw DomainError("minimize: theta must lie in (0, pi/4)");
    }
    if (N < 2) throw DomainError("minimize: N must be at least 2");
    if (opts.restarts < 1) throw DomainError("minimize: need at least one restart");
    if (!(opts.gradient_tolerance > 0.0)) throw DomainError("minimize: gradient tolerance must be positive");

    std::vector<int> levels;
    for (int l : opts.ladder) {
        if (l >= 2 && l < N) levels.push_back(l);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    levels.push_back(N);

    std::vector<DiscretePath> finals(static_cast<std::size_t>(opts.restarts));
    std::vector<RestartTrace> traces(static_cast<std::size_t>(opts.restarts));
    detail::parallel_for(finals.size(), opts.threads, [&](std::size_t r) {
        std::string kind;
        DiscretePath p = make_seed(v, theta, levels.front(), static_cast<int>(r), opts.restarts, opts, kind);
        RestartTrace total;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (l > 0) p = prolong(p, levels[l]);
            RestartTrace t = descend(p, opts);
            if (l == 0) total.initial_action = t.initial_action;
            total.iterations += t.iterations;
            total.newton_steps += t.newton_steps;
            total.history.insert(total.history.end(), t.history.begin(), t.history.end());
            total.final_action = t.final_action;
            total.converged = t.converged;
            total.gradient_norm = t.gradient_norm;
            total.min_pair_distance = t.min_pair_distance;
            total.collapsed = t.collapsed;
            total.note = t.note;
            if (t.collapsed) break;
        }
        total.restart = static_cast<int>(r);
        total.seed_kind = kind;
        finals[r] = std::move(p);
        traces[r] = std::move(total);
    });

    MinimizeResult res;
    res.trace = traces;
    res.all_restarts_collapsed = std::all_of(traces.begin(), traces.end(), [](auto& t) { return t.collapsed; });
    double best = kInf;
    for (std::size_t r = 0; r < traces.size(); ++r) {
        const bool eligible = res.all_restarts_collapsed || !traces[r].collapsed;
        if (eligible && traces[r].final_action < best) {
            best = traces[r].final_action;
            res.best_restart = static_cast<int>(r);
        }
    }
    if (res.best_restart < 0) res.best_restart = 0;
    res.path = finals[static_cast<std::size_t>(res.best_restart)];
    if (res.path.N != N) res.path = test_path_seed(v, theta, N);  // every restart collapsed at a coarse level
    const PolylinePath poly = res.path.polyline();
    res.min_pair = path_min_pair_distance(poly);
    res.collision_free = res.min_pair.distance >= opts.collapse_tolerance;
    try {
        res.action = polyline_action(poly).total;
    } catch (const CollisionError&) {
        res.action = kInf;
    }
    if (N >= 4) res.residuals = first_variation_residual(res.path);
    return res;
}

}  // namespace fourbody

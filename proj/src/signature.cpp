#include "nhsl/signature.hpp"
#include "nhsl/dense.hpp"
#include "nhsl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

namespace nhsl::signature {

namespace {

constexpr double pi = std::numbers::pi;

struct EigSummary {
    int sig = 0;
    double line_gap = 0.0;
    double scale = 0.0;
};

EigSummary summarize(const std::vector<cd>& ev) {
    EigSummary s;
    s.line_gap = std::numeric_limits<double>::infinity();
    for (const cd& w : ev) {
        if (w.real() > 0.0) ++s.sig;
        if (w.real() < 0.0) --s.sig;
        s.line_gap = std::min(s.line_gap, std::abs(w.real()));
        s.scale = std::max(s.scale, std::abs(w));
    }
    if (ev.empty()) s.line_gap = 0.0;
    return s;
}

} // namespace

SignatureReport sig_eigencount(const Matrix& l, double gap_tolerance) {
    if (l.rows() != l.cols()) throw validation_error("signature needs a square matrix");
    SignatureReport rep;
    rep.method = Method::EigenCount;
    rep.eigenvalues = dense::eigenvalues(l);
    const EigSummary s = summarize(rep.eigenvalues);
    rep.line_gap = s.line_gap;
    rep.odd_dimension = l.rows() % 2 != 0;
    if (s.line_gap <= gap_tolerance * s.scale) {
        rep.gap_closed = true;
        return rep;
    }
    rep.signature = s.sig;
    return rep;
}

SignatureReport sig_eigencount(const localizer::LocalizerMatrix& l, double gap_tolerance) {
    return sig_eigencount(l.matrix, gap_tolerance);
}

namespace {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

struct RhContext {
    const Matrix& l;
    bool gap_closed = false;
    long node_count = 0;
};

/// Integrand of the theta-substituted winding integral; one LU solve.
cd rh_node(RhContext& ctx, double theta) {
    const double s = std::tan(theta);
    ++ctx.node_count;
    Matrix m = ctx.l;
    m.diagonal().array() += cd(0.0, s);
    dense::LuFactor lu(std::move(m));
    if (lu.rcond() < 1.0 / rh_condition_limit) {
        ctx.gap_closed = true;
        return cd(0.0, 0.0);
    }
    Matrix b = cd(0.0, s) * ctx.l;
    b.diagonal().array() += 1.0;
    return lu.solve(b).trace() / (2.0 * pi);
}

cd rh_panel(RhContext& ctx, double a, double b, const std::vector<double>& x,
            const std::vector<double>& w) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cd acc(0.0, 0.0);
    for (size_t k = 0; k < x.size(); ++k) {
        if (ctx.gap_closed) return acc;
        acc += w[k] * rh_node(ctx, mid + half * x[k]);
    }
    return acc * half;
}

} // namespace

SignatureReport sig_routh_hurwitz(const Matrix& l, double quadrature_tolerance) {
    if (l.rows() != l.cols()) throw validation_error("signature needs a square matrix");
    if (quadrature_tolerance <= 0.0) throw validation_error("quadrature tolerance must be positive");
    SignatureReport rep;
    rep.method = Method::RouthHurwitz;
    rep.odd_dimension = l.rows() % 2 != 0;
    if (l.rows() == 0) return rep;

    static thread_local std::vector<double> x7, w7, x15, w15;
    if (x7.empty()) {
        legendre_rule(7, x7, w7);
        legendre_rule(15, x15, w15);
    }

    RhContext ctx{l};
    struct Panel {
        double a, b;
        int depth;
    };
    std::vector<Panel> work{{-pi / 2, 0.0, 0}, {0.0, pi / 2, 0}};
    cd total(0.0, 0.0);
    constexpr int max_depth = 28;
    while (!work.empty()) {
        const Panel p = work.back();
        work.pop_back();
        const cd coarse = rh_panel(ctx, p.a, p.b, x7, w7);
        const cd fine = rh_panel(ctx, p.a, p.b, x15, w15);
        if (ctx.gap_closed) break;
        const double budget = quadrature_tolerance * (p.b - p.a) / pi;
        if (std::abs(fine - coarse) <= budget || p.depth >= max_depth) {
            total += fine;
        } else {
            const double m = 0.5 * (p.a + p.b);
            work.push_back({p.a, m, p.depth + 1});
            work.push_back({m, p.b, p.depth + 1});
        }
    }
    if (ctx.gap_closed) {
        rep.gap_closed = true;
        return rep;
    }
    const double integral = total.real();
    rep.signature = static_cast<int>(std::lround(2.0 * integral));
    rep.residual = std::abs(integral - rep.signature / 2.0);
    if (rep.residual > rh_residual_limit)
        throw numerical_error("routh-hurwitz quadrature unreliable: residual " +
                              std::to_string(rep.residual));
    return rep;
}

SignatureReport sig_routh_hurwitz(const localizer::LocalizerMatrix& l,
                                  double quadrature_tolerance) {
    return sig_routh_hurwitz(l.matrix, quadrature_tolerance);
}

namespace {

/// Greedy nearest-neighbor assignment a[k] -> b[perm[k]], globally smallest
/// distances first.
std::vector<int> greedy_match(const std::vector<cd>& a, const std::vector<cd>& b) {
    const int n = static_cast<int>(a.size());
    struct Pair {
        float dist;
        int i, j;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            pairs.push_back({static_cast<float>(std::abs(a[i] - b[j])), i, j});
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& p, const Pair& q) { return p.dist < q.dist; });
    std::vector<int> perm(n, -1);
    std::vector<char> used(n, 0);
    int matched = 0;
    for (const Pair& p : pairs) {
        if (perm[p.i] >= 0 || used[p.j]) continue;
        perm[p.i] = p.j;
        used[p.j] = 1;
        if (++matched == n) break;
    }
    return perm;
}

struct Segment {
    std::vector<cd> end; // matched order
    std::vector<Crossing> crossings;
};

struct FlowWorker {
    const std::function<Matrix(double)>& path;
    int max_levels;
    bool exhausted = false;

    Segment process(double t0, const std::vector<cd>& a, double t1, std::vector<cd> b_raw,
                    int level) {
        const std::vector<int> perm = greedy_match(a, b_raw);
        std::vector<cd> b(a.size());
        for (size_t k = 0; k < a.size(); ++k) b[k] = b_raw[static_cast<size_t>(perm[k])];

        // A track whose endpoint sits within twice its own displacement of
        // the real axis can cross; only those gate the bisection.
        bool ambiguous = false;
        for (size_t k = 0; k < a.size() && !ambiguous; ++k) {
            const double disp = std::abs(b[k] - a[k]);
            if (disp == 0.0) continue;
            if (std::min(std::abs(a[k].real()), std::abs(b[k].real())) >= 2.0 * disp) continue;
            double second = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < b_raw.size(); ++j)
                if (static_cast<int>(j) != perm[k])
                    second = std::min(second, std::abs(b_raw[j] - a[k]));
            if (second < 2.0 * disp) ambiguous = true;
        }

        if (ambiguous) {
            if (level >= max_levels) {
                exhausted = true;
            } else {
                const double tm = 0.5 * (t0 + t1);
                Segment left = process(t0, a, tm, dense::eigenvalues(path(tm)), level + 1);
                if (exhausted) return left;
                Segment right = process(tm, left.end, t1, std::move(b_raw), level + 1);
                right.crossings.insert(right.crossings.begin(), left.crossings.begin(),
                                       left.crossings.end());
                return right;
            }
        }

        Segment seg;
        seg.end = std::move(b);
        for (size_t k = 0; k < a.size(); ++k) {
            const double r0 = a[k].real(), r1 = seg.end[k].real();
            if (r0 < 0.0 && r1 >= 0.0)
                seg.crossings.push_back({t0 + (t1 - t0) * (-r0 / (r1 - r0)), +1});
            else if (r0 >= 0.0 && r1 < 0.0)
                seg.crossings.push_back({t0 + (t1 - t0) * (r0 / (r0 - r1)), -1});
        }
        return seg;
    }
};

} // namespace

FlowDiagram spectral_flow(const std::function<Matrix(double)>& path, int steps, int max_levels,
                          double gap_tolerance) {
    if (steps < 2) throw validation_error("spectral flow needs at least 2 samples");
    FlowDiagram fd;
    fd.t_samples.resize(steps);
    for (int i = 0; i < steps; ++i) fd.t_samples[i] = static_cast<double>(i) / (steps - 1);

    std::vector<cd> current = dense::eigenvalues(path(0.0));
    const size_t n = current.size();
    const EigSummary s0 = summarize(current);
    if (s0.line_gap <= gap_tolerance * s0.scale)
        throw domain_error("spectral flow: line-gap closed at the path start");

    fd.tracks.assign(n, std::vector<cd>(fd.t_samples.size()));
    for (size_t k = 0; k < n; ++k) fd.tracks[k][0] = current[k];

    FlowWorker worker{path, max_levels};
    for (int i = 0; i + 1 < steps; ++i) {
        Segment seg = worker.process(fd.t_samples[i], current, fd.t_samples[i + 1],
                                     dense::eigenvalues(path(fd.t_samples[i + 1])), 0);
        if (worker.exhausted)
            throw numerical_error("spectral flow: eigenvalue tracking stayed ambiguous after " +
                                  std::to_string(max_levels) + " bisection levels");
        current = std::move(seg.end);
        for (size_t k = 0; k < n; ++k) fd.tracks[k][static_cast<size_t>(i + 1)] = current[k];
        fd.crossings.insert(fd.crossings.end(), seg.crossings.begin(), seg.crossings.end());
    }

    const EigSummary s1 = summarize(current);
    if (s1.line_gap <= gap_tolerance * s1.scale)
        throw domain_error("spectral flow: line-gap closed at the path end");

    std::sort(fd.crossings.begin(), fd.crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
    fd.net_flow = 0;
    for (const Crossing& c : fd.crossings) fd.net_flow += c.direction;
    fd.endpoint_half_sig_difference = (s1.sig - s0.sig) / 2;
    fd.mismatch = fd.net_flow != fd.endpoint_half_sig_difference;
    return fd;
}

void FlowDiagram::write_tracks_csv(std::ostream& os) const {
    os << "t";
    for (size_t k = 0; k < tracks.size(); ++k) os << ",re_" << k << ",im_" << k;
    os << '\n';
    char buf[64];
    for (size_t i = 0; i < t_samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", t_samples[i]);
        os << buf;
        for (const auto& track : tracks) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", track[i].real(), track[i].imag());
            os << buf;
        }
        os << '\n';
    }
}

void FlowDiagram::write_crossings_csv(std::ostream& os) const {
    os << "t,direction\n";
    char buf[64];
    for (const Crossing& c : crossings) {
        std::snprintf(buf, sizeof buf, "%.17g,%d\n", c.t, c.direction);
        os << buf;
    }
}

double localizer_line_gap(const Matrix& l) {
    const auto ev = dense::eigenvalues(l);
    double gap = std::numeric_limits<double>::infinity();
    for (const cd& w : ev) gap = std::min(gap, std::abs(w.real()));
    return ev.empty() ? 0.0 : gap;
}

double localizer_line_gap(const localizer::LocalizerMatrix& l) {
    return localizer_line_gap(l.matrix);
}

} // namespace nhsl::signature

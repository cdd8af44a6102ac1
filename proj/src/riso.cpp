#include "mv/riso.hpp"

#include <algorithm>
#include <sstream>

#include "mv/errors.hpp"

namespace mv {

namespace {

// One polynomial branch y = f(x) over a canonical union of domain balls.
struct Branch {
    KPoly f;
    std::vector<Ball> dom;
};

struct Input {
    const Field* F = nullptr;
    int n = 2;
    bool swapped = false;
    std::vector<Branch> branches;
    std::vector<std::vector<Series>> points;  // singletons off every branch
    std::vector<Ball> balls;                  // n = 1 ball cells
};

std::vector<Series> flip(std::vector<Series> p) {
    std::swap(p[0], p[1]);
    return p;
}

bool on_branch(const Branch& b, const std::vector<Series>& p) {
    for (const auto& D : b.dom)
        if (D.contains({p[0]})) return b.f.eval(p[0]) == p[1];
    return false;
}

Input prepare(const CellSet& X) {
    Input in;
    in.F = X.F;
    in.n = X.n;
    bool sw = false, plain = false;
    for (const auto& c : X.cells) {
        if (c.kind == Cell::Kind::Graph) {
            if (c.tube) throw Unsupported("riso data for thickened graphs");
            (c.swap ? sw : plain) = true;
        }
        if (c.kind == Cell::Kind::Box && X.n != 1) throw Unsupported("riso data for boxes in K^" + std::to_string(X.n));
    }
    if (sw && plain) throw Unsupported("graph cells over both coordinate axes");
    in.swapped = sw;
    std::vector<std::vector<Series>> pts;
    for (const auto& c : X.cells) {
        switch (c.kind) {
            case Cell::Kind::Singleton: pts.push_back(sw ? flip(c.point) : c.point); break;
            case Cell::Kind::Box: in.balls.push_back(c.box[0]); break;
            case Cell::Kind::Graph: {
                auto it = std::find_if(in.branches.begin(), in.branches.end(),
                                       [&](const Branch& b) { return b.f == c.f; });
                if (it == in.branches.end()) in.branches.push_back({c.f, c.domain});
                else it->dom.insert(it->dom.end(), c.domain.begin(), c.domain.end());
                break;
            }
        }
    }
    for (auto& b : in.branches) b.dom = canonical_balls(in.F, b.dom);
    if (X.n == 1) in.balls = canonical_balls(in.F, in.balls);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (const auto& p : pts) {
        bool covered = false;
        for (const auto& b : in.branches) covered = covered || on_branch(b, p);
        for (const auto& B : in.balls) covered = covered || B.contains(p);
        if (!covered) in.points.push_back(p);
    }
    return in;
}

std::vector<Ball> locus(const KPoly& h, const Ball& D, long c, const RisoOptions& opt) {
    try {
        return val_ge_locus(h, D, c, opt.max_depth);
    } catch (const Unsupported& e) {
        throw DepthExceeded(e.what());
    }
}

bool covers(const std::vector<Ball>& balls, const Ball& D) { return balls.size() == 1 && balls[0] == D; }

// Valuation of h on D if it is constant there.
std::optional<long> constant_val(const KPoly& h, const Ball& D, const RisoOptions& opt) {
    if (h.is_zero()) return VAL_INF;
    long v = expand(h, D.center[0], D.rad).m;
    for (int i = 0; i < opt.max_depth; ++i) {
        auto up = locus(h, D, v + 1, opt);
        if (up.empty()) return v;
        if (!covers(up, D)) return std::nullopt;
        ++v;
    }
    throw DepthExceeded("valuation of a separation did not settle on " + D.str());
}

// |f'(x) - f'(c)| reaches 1 somewhere on D.
bool slope_varies(const KPoly& f, const Ball& D, const RisoOptions& opt) {
    KPoly g = f.derivative();
    if (g.degree() <= 0) return false;
    KPoly d = g - KPoly::constant(g.eval(D.center[0]));
    if (expand(d, D.center[0], D.rad).m >= 1) return false;
    return !covers(locus(d, D, 1, opt), D);
}

Ball ball2(const Series& x, const Series& y, long r) { return Ball({x, y}, r); }

// Both branches meet the ball over D at height rad(D).
bool meets(const KPoly& h, const Ball& D, const RisoOptions& opt) { return !locus(h, D, D.rad, opt).empty(); }

struct Collector {
    const Input& in;
    const RisoOptions& opt;
    std::vector<RisoItem> cand;

    void singleton(std::vector<Series> p) {
        RisoItem it;
        it.singleton = true;
        it.point = std::move(p);
        cand.push_back(it);
    }
    void ball(Ball b) {
        RisoItem it;
        it.ball = std::move(b);
        cand.push_back(it);
    }

    // Unique root of h in B(c, s), where the reduction is linear.
    Series hensel(const KPoly& h, Series a, long s) {
        long stop = s + opt.hensel_precision;
        for (long k = s; k < stop; ++k) {
            Expansion e = expand(h, a, k);
            if (e.point_type) return a;
            if (e.w != 1) throw DepthExceeded("Hensel lifting lost the simple root");
            a = a + Series::monomial(in.F, k, in.F->neg(in.F->div(e.red.c[0], e.red.c[1])));
        }
        return a.with_prec(stop);
    }

    // Returns whether an item was emitted below (or at) B(c, s).
    bool descend(const Branch& bi, const KPoly& h, const Series& c, long s, int depth) {
        if (depth > opt.max_depth) throw DepthExceeded("separation descent exceeded depth " + std::to_string(opt.max_depth));
        Ball D = Ball::one_dim(c, s);
        if (!meets(h, D, opt)) return false;
        if (constant_val(h, D, opt)) return false;
        Expansion e = expand(h, c, s);
        if (e.point_type) {
            singleton({c, bi.f.eval(c)});
            return true;
        }
        if (e.w == 1) {
            Series a = hensel(h, c, s);
            singleton({a, bi.f.eval(a)});
            return true;
        }
        std::vector<KElem> kids;
        for (const auto& [z, mult] : roots_in_k(e.red)) kids.push_back(z);
        bool any = false;
        for (const auto& z : kids) any = descend(bi, h, c + Series::monomial(in.F, s, z), s + 1, depth + 1) || any;
        if (!any) ball(ball2(c, bi.f.eval(c), s));
        return true;
    }
};

bool contains_item(const RisoItem& outer, const RisoItem& inner) {
    if (outer.singleton) return false;
    if (inner.singleton) return outer.ball.contains(inner.point);
    return outer.ball.contains(inner.ball);
}

bool same_item(const RisoItem& a, const RisoItem& b) {
    if (a.singleton != b.singleton) return false;
    if (a.singleton) {
        for (size_t i = 0; i < a.point.size(); ++i) {
            Series d = a.point[i] - b.point[i];
            if (d.val_lower_bound() < std::min(a.point[i].prec(), b.point[i].prec()) && !d.is_zero()) return false;
        }
        return true;
    }
    return a.ball == b.ball;
}

std::vector<RisoItem> minimal(std::vector<RisoItem> cand) {
    std::vector<RisoItem> out;
    for (size_t i = 0; i < cand.size(); ++i) {
        bool drop = false;
        for (size_t j = 0; j < cand.size() && !drop; ++j) {
            if (i == j) continue;
            if (same_item(cand[i], cand[j])) drop = j < i;
            else drop = contains_item(cand[i], cand[j]);
        }
        if (!drop) out.push_back(cand[i]);
    }
    std::sort(out.begin(), out.end(), [](const RisoItem& a, const RisoItem& b) {
        if (a.singleton != b.singleton) return a.singleton;
        if (a.singleton) return a.point < b.point;
        return a.ball < b.ball;
    });
    return out;
}

RisoItem unflip(RisoItem it) {
    if (it.singleton) it.point = flip(it.point);
    else it.ball = Ball(flip(it.ball.center), it.ball.rad);
    return it;
}

RtspResult full_space(const Field* F, int n) {
    RtspResult r;
    for (int i = 0; i < n; ++i) {
        std::vector<KElem> e(n, F->zero());
        e[i] = F->one();
        r.basis.push_back(e);
    }
    return r;
}

RtspResult rtsp_plane(const Input& in, const Ball& B, const RisoOptions& opt) {
    const Series& x0 = B.center[0];
    const Series& y0 = B.center[1];
    long s = B.rad;
    Ball foot = Ball::one_dim(x0, s);
    for (const auto& p : in.points)
        if (B.contains(p)) return RtspResult{};
    std::vector<const Branch*> meeting;
    for (const auto& br : in.branches) {
        for (const auto& D : br.dom) {
            if (D.contains(foot)) {
                Series d = br.f.eval(x0) - y0;
                if (d.is_zero() || d.val() >= s) meeting.push_back(&br);
            } else if (foot.contains(D)) {
                Series d = br.f.eval(D.center[0]) - y0;
                if (d.is_zero() || d.val() >= s) return RtspResult{};  // proper part of the footprint
            }
        }
    }
    if (meeting.empty()) return full_space(in.F, 2);
    for (const Branch* br : meeting)
        if (slope_varies(br->f, foot, opt)) return RtspResult{};
    for (size_t i = 0; i < meeting.size(); ++i)
        for (size_t j = i + 1; j < meeting.size(); ++j)
            if (!constant_val(meeting[i]->f - meeting[j]->f, foot, opt)) return RtspResult{};
    KPoly g = meeting[0]->f.derivative();
    KElem slope = g.is_zero() ? in.F->zero() : g.eval(x0).coeff(0);
    RtspResult r;
    r.basis.push_back({in.F->one(), slope});
    return r;
}

RtspResult rtsp_line(const Input& in, const Ball& B) {
    for (const auto& D : in.balls)
        if (D.contains(B)) return full_space(in.F, 1);
    for (const auto& D : in.balls)
        if (B.contains(D)) return RtspResult{};
    for (const auto& p : in.points)
        if (B.contains(p)) return RtspResult{};
    return full_space(in.F, 1);
}

}  // namespace

bool RisoItem::inside(const Ball& B) const { return singleton ? B.contains(point) : B.contains(ball); }

std::string RisoItem::str() const {
    if (!singleton) return ball.str();
    std::ostringstream os;
    os << "{(";
    for (size_t i = 0; i < point.size(); ++i) os << (i ? ", " : "") << point[i].str();
    os << ")}";
    return os.str();
}

RtspResult rtsp(const CellSet& X, const Ball& B0, const RisoOptions& opt) {
    if (B0.dim() != X.n) throw DomainError("ball and set dimensions differ");
    Input in = prepare(X);
    try {
        if (X.n == 1) return rtsp_line(in, B0);
        if (X.n != 2 || (in.branches.empty() && in.balls.empty())) {
            for (const auto& p : in.points)
                if (B0.contains(in.swapped ? flip(p) : p)) return RtspResult{};
            return full_space(in.F, X.n);
        }
        Ball B = in.swapped ? Ball(flip(B0.center), B0.rad) : B0;
        RtspResult r = rtsp_plane(in, B, opt);
        if (in.swapped)
            for (auto& v : r.basis) std::swap(v[0], v[1]);
        return r;
    } catch (const DepthExceeded& e) {
        throw Uncertified(std::string("no certificate within the depth cap: ") + e.what());
    }
}

RisoReport min_nonrisotrivial(const CellSet& X, const RisoOptions& opt) {
    Input in = prepare(X);
    Collector col{in, opt, {}};
    for (const auto& p : in.points) col.singleton(p);
    if (X.n == 1) {
        for (const auto& D : in.balls) col.ball(Ball::one_dim(D.center[0], D.rad - 1));
    } else if (X.n == 2) {
        for (const auto& br : in.branches)
            for (const auto& D : br.dom) {
                Series y = br.f.eval(D.center[0]);
                col.ball(ball2(D.center[0], y, D.rad - 1));
                if (slope_varies(br.f, D, opt)) col.ball(ball2(D.center[0], y, D.rad));
            }
        for (size_t i = 0; i < in.branches.size(); ++i)
            for (size_t j = i + 1; j < in.branches.size(); ++j) {
                KPoly h = in.branches[i].f - in.branches[j].f;
                for (const auto& Di : in.branches[i].dom)
                    for (const auto& Dj : in.branches[j].dom)
                        if (auto E = intersect(Di, Dj)) col.descend(in.branches[i], h, E->center[0], E->rad, 0);
            }
    }
    RisoReport rep;
    for (auto& it : minimal(col.cand)) rep.items.push_back(in.swapped ? unflip(it) : it);
    for (const auto& it : rep.items) rep.s0_class += it.cls;
    return rep;
}

CVal v0(const CellSet& X, const RisoOptions& opt) { return min_nonrisotrivial(X, opt).s0_class; }

CVal v0_rel(const RisoReport& report, const Ball& B) {
    CVal c;
    for (const auto& it : report.items)
        if (it.inside(B)) c += it.cls;
    return c;
}

CVal v0_rel(const CellSet& X, const Ball& B, const RisoOptions& opt) { return v0_rel(min_nonrisotrivial(X, opt), B); }

}  // namespace mv

#include "ddq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ddq/errors.hpp"

namespace ddq {

std::vector<UnitCell> unit_cell_tiling(const HexGrid& grid, Coord start, Coord direction,
                                       int length) {
    if (length < 2) throw GeometryError("unit-cell line needs at least two centers");
    bool dir_ok = false;
    for (const Coord& d : kHexDirs)
        if (d == direction) dir_ok = true;
    if (!dir_ok) throw GeometryError("line direction must be a unit hex step");

    std::vector<UnitCell> cells;
    Coord c = start;
    for (int i = 0; i < length; ++i) {
        if (!grid.in_bounds(c)) throw GeometryError("unit-cell line exits the grid");
        UnitCell uc;
        uc.center = c;
        uc.rank = i;
        uc.members.push_back(c);
        for (const Coord& d : kHexDirs) {
            const Coord n = c + d;
            if (grid.in_bounds(n)) uc.members.push_back(n);
        }
        cells.push_back(std::move(uc));
        c = c + direction;
    }
    return cells;
}

std::vector<double> flux_charge(const HexGrid& snapshot, const std::vector<UnitCell>& cells) {
    std::vector<double> out;
    out.reserve(cells.size());
    for (const UnitCell& uc : cells) {
        long long q = 0;
        for (const Coord& c : uc.members) q += charge_of(snapshot.at(c));
        out.push_back(static_cast<double>(q));
    }
    return out;
}

std::vector<double> flux_field(const HexGrid& snapshot, const std::vector<UnitCell>& cells) {
    std::vector<double> out = flux_charge(snapshot, cells);
    const double a = snapshot.unit_cell_area();
    for (double& v : out) v /= a;
    return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit fit;
    fit.n = static_cast<int>(x.size());
    if (fit.n < 2) throw AnalysisError("linear fit needs at least two points");
    double sx = 0, sy = 0;
    for (int i = 0; i < fit.n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / fit.n, my = sy / fit.n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < fit.n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (int i = 0; i < fit.n; ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += e * e;
    }
    fit.r2 = syy > 0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

DiffusionFit diffusion_fit(const Trajectory& trajectory,
                           const std::vector<std::vector<UnitCell>>& lines,
                           double unit_cell_area_nm2) {
    if (trajectory.snapshots.size() < 2)
        throw AnalysisError("diffusion fit needs at least two snapshots");
    const double uc_nm2 = 1.3 * unit_cell_area_nm2;

    // Curvature is discrete (the second difference of integer flower
    // charges), so the rates belonging to one curvature value are pooled and
    // the line goes through the per-value means, weighted by sample count.
    std::map<long long, std::pair<double, int>> bins;  // ddQ -> (rate sum, n)
    int samples = 0;
    for (const auto& line : lines) {
        if (line.size() < 3) throw AnalysisError("diffusion fit needs >= 3 cells per line");
        std::vector<std::vector<double>> q;
        q.reserve(trajectory.snapshots.size());
        for (const Snapshot& s : trajectory.snapshots)
            q.push_back(flux_charge(s.grid, line));
        for (std::size_t k = 0; k + 1 < q.size(); ++k) {
            const double dt_min =
                (trajectory.snapshots[k + 1].t_seconds - trajectory.snapshots[k].t_seconds) /
                60.0;
            for (std::size_t i = 1; i + 1 < line.size(); ++i) {
                const long long ddq = static_cast<long long>(
                    std::llround(q[k][i + 1] - 2.0 * q[k][i] + q[k][i - 1]));
                const double rate = (q[k + 1][i] - q[k][i]) / unit_cell_area_nm2 / dt_min;
                auto& bin = bins[ddq];
                bin.first += rate;
                bin.second += 1;
                ++samples;
            }
        }
    }
    if (samples < 3 || bins.size() < 2)
        throw AnalysisError("diffusion fit needs >= 3 samples");

    // Weighted least squares over the bin means.
    double sw = 0, sx = 0, sy = 0;
    struct Pt {
        double x, y, w;
    };
    std::vector<Pt> pts;
    for (const auto& [ddq, bin] : bins) {
        const double x = static_cast<double>(ddq) / unit_cell_area_nm2 / uc_nm2;
        const double y = bin.first / bin.second;
        const double w = bin.second;
        pts.push_back({x, y, w});
        sw += w;
        sx += w * x;
        sy += w * y;
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (const Pt& p : pts) {
        sxx += p.w * (p.x - mx) * (p.x - mx);
        sxy += p.w * (p.x - mx) * (p.y - my);
        syy += p.w * (p.y - my) * (p.y - my);
    }
    DiffusionFit fit;
    fit.samples = samples;
    fit.d = sxx > 0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.d * mx;
    double ss_res = 0;
    for (const Pt& p : pts) {
        const double e = p.y - (fit.intercept + fit.d * p.x);
        ss_res += p.w * e * e;
    }
    fit.r2 = syy > 0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

namespace {

// Smoothed profile (1,2,1)/4 at interior ranks, in electrons per unit cell.
std::vector<double> smoothed_profile(const HexGrid& snapshot,
                                     const std::vector<UnitCell>& line) {
    const std::vector<double> q = flux_charge(snapshot, line);
    std::vector<double> out(q.size(), 0.0);
    for (std::size_t i = 1; i + 1 < q.size(); ++i)
        out[i] = 0.25 * (q[i - 1] + 2.0 * q[i] + q[i + 1]);
    return out;
}

}  // namespace

ProfileFit fit_profile_samples(const std::vector<ProfileSample>& raw) {
    struct Sample {
        double z, t, v;
    };
    std::vector<Sample> samples;
    samples.reserve(raw.size());
    for (const ProfileSample& s : raw) {
        if (s.t_minutes <= 0) throw AnalysisError("profile samples need t > 0");
        samples.push_back({s.z, s.t_minutes, s.value});
    }
    if (samples.size() < 4) throw AnalysisError("profile fit needs more samples");

    double vmax = 0.0;
    for (const Sample& s : samples) vmax = std::max(vmax, s.v);
    if (vmax <= 0.0) throw AnalysisError("profile is identically zero");

    ProfileFit fit;
    // Start from the peak sample; b = 1 matches the source formula.
    double a = 0.0, z0 = 0.0, b = 1.0;
    for (const Sample& s : samples)
        if (s.v * std::sqrt(s.t) > a) {
            a = s.v * std::sqrt(s.t);
            z0 = s.z;
        }
    if (a <= 0.0) a = vmax;

    // Levenberg-Marquardt on (a, z0, b).
    double lambda = 1e-3;
    auto sse = [&](double pa, double pz, double pb) {
        double s = 0.0;
        for (const Sample& smp : samples) {
            const double dz = smp.z - pz;
            const double m = pa / std::sqrt(smp.t) * std::exp(-dz * dz / (pb * smp.t));
            const double e = m - smp.v;
            s += e * e;
        }
        return s;
    };
    double cur = sse(a, z0, b);
    for (int iter = 0; iter < 200; ++iter) {
        double jtj[3][3] = {{0}}, jte[3] = {0};
        for (const Sample& smp : samples) {
            const double dz = smp.z - z0;
            const double g = std::exp(-dz * dz / (b * smp.t));
            const double m = a / std::sqrt(smp.t) * g;
            const double e = m - smp.v;
            const double da = m / a;
            const double dzd = m * 2.0 * dz / (b * smp.t);
            const double db = m * dz * dz / (b * b * smp.t);
            const double jac[3] = {da, dzd, db};
            for (int r = 0; r < 3; ++r) {
                jte[r] += jac[r] * e;
                for (int c = 0; c < 3; ++c) jtj[r][c] += jac[r] * jac[c];
            }
        }
        double m3[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                m3[r][c] = jtj[r][c] + (r == c ? lambda * (jtj[r][r] + 1e-12) : 0.0);
        // Solve m3 * d = -jte by Gaussian elimination.
        double rhs[3] = {-jte[0], -jte[1], -jte[2]};
        bool singular = false;
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::abs(m3[r][col]) > std::abs(m3[piv][col])) piv = r;
            if (std::abs(m3[piv][col]) < 1e-300) {
                singular = true;
                break;
            }
            std::swap(m3[col], m3[piv]);
            std::swap(rhs[col], rhs[piv]);
            for (int r = col + 1; r < 3; ++r) {
                const double f = m3[r][col] / m3[col][col];
                for (int c = col; c < 3; ++c) m3[r][c] -= f * m3[col][c];
                rhs[r] -= f * rhs[col];
            }
        }
        if (singular) break;
        double d[3];
        for (int r = 2; r >= 0; --r) {
            double v = rhs[r];
            for (int c = r + 1; c < 3; ++c) v -= m3[r][c] * d[c];
            d[r] = v / m3[r][r];
        }
        double na = a + d[0], nz = z0 + d[1], nb = b + d[2];
        if (na <= 1e-9) na = 1e-9;
        if (nb <= 1e-6) nb = 1e-6;
        const double nxt = sse(na, nz, nb);
        if (nxt < cur) {
            a = na;
            z0 = nz;
            b = nb;
            cur = nxt;
            lambda = std::max(lambda * 0.5, 1e-12);
            if (std::abs(d[0]) + std::abs(d[1]) + std::abs(d[2]) < 1e-12) break;
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
    }
    fit.a = a;
    fit.z0 = z0;
    fit.b = b;
    fit.residual = cur;
    return fit;
}

ProfileFit flux_profile_fit(const Trajectory& trajectory, const std::vector<UnitCell>& line,
                            double saturation_tolerance) {
    if (trajectory.snapshots.size() < 4)
        throw AnalysisError("profile fit needs at least three scans");
    if (line.size() < 3) throw AnalysisError("profile fit needs a longer line");

    std::vector<ProfileSample> samples;
    std::vector<std::vector<double>> profiles;
    for (std::size_t k = 1; k < trajectory.snapshots.size(); ++k) {
        const auto prof = smoothed_profile(trajectory.snapshots[k].grid, line);
        const double t = trajectory.snapshots[k].t_seconds / 60.0;
        for (std::size_t i = 1; i + 1 < prof.size(); ++i)
            samples.push_back({static_cast<double>(line[i].rank), t, prof[i]});
        profiles.push_back(prof);
    }

    ProfileFit fit = fit_profile_samples(samples);
    // Saturation: the first scan whose smoothed profile stopped moving.
    for (std::size_t k = 1; k < profiles.size(); ++k) {
        double change = 0.0;
        for (std::size_t i = 0; i < profiles[k].size(); ++i)
            change = std::max(change, std::abs(profiles[k][i] - profiles[k - 1][i]));
        if (change < saturation_tolerance) {
            fit.saturation_scan = static_cast<int>(k + 1);
            fit.saturation_s = trajectory.snapshots[k + 1].t_seconds;
            break;
        }
    }
    return fit;
}

CancerPoint cancer_closed_form(const CancerParams& p, double t) {
    if (t < 0) throw AnalysisError("negative time");
    const double nu = p.neff() * p.u2;
    if (std::abs(nu - p.u1) < 1e-12 * std::max(1.0, std::abs(p.u1)))
        throw AnalysisError("degenerate rates: Neff*u2 == u1");
    const double e1 = std::exp(-p.u1 * t);
    const double e2 = std::exp(-nu * t);
    CancerPoint out;
    out.x0 = p.x00 * e1;
    out.x1 = p.x00 * p.u1 * (e1 - e2) / (nu - p.u1);
    out.x3 = p.x00 * (1.0 - (nu * e1 - p.u1 * e2) / (nu - p.u1));
    return out;
}

N3Series n3_series(const Trajectory& trajectory, const Region& cg) {
    if (trajectory.snapshots.size() < 2)
        throw AnalysisError("N3 series needs at least two snapshots");
    N3Series series;
    long long cum = 0;
    for (std::size_t k = 0; k + 1 < trajectory.snapshots.size(); ++k) {
        const HexGrid& before = trajectory.snapshots[k].grid;
        const HexGrid& after = trajectory.snapshots[k + 1].grid;
        for (const Coord& c : cg.coords)
            if (after.at(c) == CellState::S3 && before.at(c) != CellState::S3) ++cum;
        series.cumulative.push_back(cum);
        series.t_minutes.push_back(trajectory.snapshots[k + 1].t_seconds / 60.0);
    }
    return series;
}

KineticsFit kinetics_fit(const std::vector<double>& cumulative,
                         const std::vector<double>& t_minutes) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        if (cumulative[i] > 0 && t_minutes[i] > 0) {
            lx.push_back(std::log(t_minutes[i]));
            ly.push_back(std::log(cumulative[i]));
        }
    }
    if (lx.size() < 4) throw AnalysisError("kinetics fit needs >= 4 nonzero points");
    const LinearFit lf = linear_fit(lx, ly);
    KineticsFit fit;
    fit.c = std::exp(lf.intercept);
    fit.p = lf.slope;
    fit.points = lf.n;

    // Earliest interpolated doubling interval.
    std::size_t first = 0;
    while (first < cumulative.size() && cumulative[first] <= 0) ++first;
    if (first < cumulative.size()) {
        const double target = 2.0 * cumulative[first];
        for (std::size_t i = first + 1; i < cumulative.size(); ++i) {
            if (cumulative[i] >= target) {
                const double prev = cumulative[i - 1];
                const double tprev = t_minutes[i - 1];
                double tcross = t_minutes[i];
                if (cumulative[i] > prev)
                    tcross = tprev + (target - prev) / (cumulative[i] - prev) *
                                         (t_minutes[i] - tprev);
                fit.t_half_s = (tcross - t_minutes[first]) * 60.0;
                break;
            }
        }
    }
    return fit;
}

double fit_u2(const std::vector<double>& cumulative, const std::vector<double>& t_minutes,
              double u1, double x00) {
    if (cumulative.empty()) throw AnalysisError("empty series");
    CancerParams params;
    params.u1 = u1;
    params.x00 = x00;
    auto sse = [&](double u2) {
        params.u2 = u2;
        double s = 0.0;
        for (std::size_t i = 0; i < cumulative.size(); ++i) {
            const double e = cancer_closed_form(params, t_minutes[i]).x3 - cumulative[i];
            s += e * e;
        }
        return s;
    };
    // Golden-section search on log10(u2); the objective is unimodal because
    // X3 is monotone in u2 at every t.
    double lo = -8.0, hi = 0.0;
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sse(std::pow(10.0, x1)), f2 = sse(std::pow(10.0, x2));
    for (int i = 0; i < 120; ++i) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = sse(std::pow(10.0, x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = sse(std::pow(10.0, x2));
        }
    }
    return std::pow(10.0, 0.5 * (lo + hi));
}

GateResult gate_readout(const HexGrid& snapshot, const GateGeometry& g) {
    GateResult out;
    const Region mid = disc_region(snapshot, g.midpoint, g.radius);
    out.mid_density = charge_density(snapshot, mid);

    const Region disc_a = disc_region(snapshot, g.center_a, g.radius);
    const Region disc_b = disc_region(snapshot, g.center_b, g.radius);
    out.density_a = charge_density(snapshot, disc_a);
    out.density_b = charge_density(snapshot, disc_b);
    out.retention_a =
        g.q0_a > 0 ? static_cast<double>(excess_charge(snapshot, disc_a)) / g.q0_a : 0.0;
    out.retention_b =
        g.q0_b > 0 ? static_cast<double>(excess_charge(snapshot, disc_b)) / g.q0_b : 0.0;

    bool moved = true;
    if (g.wrote_a && out.retention_a >= 0.5) moved = false;
    if (g.wrote_b && out.retention_b >= 0.5) moved = false;
    out.bit = (out.mid_density > 0.5 && moved) ? 1 : 0;
    return out;
}

std::optional<int> periodicity(const Trajectory& trajectory, const Region& region) {
    const int n = static_cast<int>(trajectory.snapshots.size());
    if (n < 4) throw AnalysisError("periodicity needs at least four snapshots");
    auto equal_at = [&](int i, int j) {
        const HexGrid& a = trajectory.snapshots[i].grid;
        const HexGrid& b = trajectory.snapshots[j].grid;
        for (const Coord& c : region.coords)
            if (a.at(c) != b.at(c)) return false;
        return true;
    };
    for (int p = 1; p <= n / 2; ++p) {
        bool ok = true;
        for (int k = std::max(0, n - 2 * p); k + p < n; ++k)
            if (!equal_at(k, k + p)) {
                ok = false;
                break;
            }
        if (ok) return p;
    }
    return std::nullopt;
}

}  // namespace ddq

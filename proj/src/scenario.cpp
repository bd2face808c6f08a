#include "ddq/scenario.hpp"

#include <fstream>
#include <sstream>

#include "ddq/errors.hpp"

namespace ddq {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void invalid(const std::string& msg) { throw ValidationError(msg); }

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

Coord parse_dir(const std::string& name) {
    static const std::pair<const char*, int> names[] = {
        {"E", 0}, {"NE", 1}, {"NW", 2}, {"W", 3}, {"SW", 4}, {"SE", 5}};
    for (const auto& [n, i] : names)
        if (name == n) return kHexDirs[i];
    invalid("unknown direction '" + name + "'");
}

std::string dir_name(Coord d) {
    static const char* names[] = {"E", "NE", "NW", "W", "SW", "SE"};
    for (int i = 0; i < 6; ++i)
        if (kHexDirs[i] == d) return names[i];
    return "E";
}

Region parse_region(const Json& j, const HexGrid& grid, const std::optional<TissueSpec>& tissue) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "all") return full_region(grid);
        if (name == "cg") {
            if (!tissue) invalid("region 'cg' needs a tissue_rings generator");
            return tissue->cg;
        }
        invalid("unknown region name '" + name + "'");
    }
    if (j.contains("rect")) {
        const auto v = j.at("rect").get<std::vector<int>>();
        if (v.size() != 4) invalid("rect region needs [col,row,width,height]");
        std::vector<Coord> cells;
        for (int r = v[1]; r < v[1] + v[3]; ++r)
            for (int c = v[0]; c < v[0] + v[2]; ++c) {
                const Coord cc = axial_from_offset(c, r);
                if (!grid.in_bounds(cc)) invalid("rect region out of bounds");
                cells.push_back(cc);
            }
        return Region::of(std::move(cells));
    }
    if (j.contains("disc")) {
        const auto v = j.at("disc").get<std::vector<int>>();
        if (v.size() != 3) invalid("disc region needs [col,row,radius]");
        const Coord center = axial_from_offset(v[0], v[1]);
        if (!grid.in_bounds(center)) invalid("disc region center out of bounds");
        return disc_region(grid, center, v[2]);
    }
    invalid("unrecognized region spec");
}

Fragment fragment_from_rows(const Json& rows) {
    std::string text;
    for (const auto& r : rows) {
        text += r.get<std::string>();
        text += '\n';
    }
    return parse_fragment(text);
}

Json fragment_to_rows(const Fragment& f) {
    Json rows = Json::array();
    for (const std::string& r : f.rows) rows.push_back(r);
    return rows;
}

}  // namespace

Scenario load_scenario(const Json& doc) {
    Scenario sc;
    try {
        sc.name = get_or<std::string>(doc, "name", "scenario");

        const Json grid_j = get_or<Json>(doc, "grid", Json::object());
        const int width = get_or<int>(grid_j, "width", 24);
        const int height = get_or<int>(grid_j, "height", 27);
        const double spacing = get_or<double>(grid_j, "spacing_nm", 0.98);
        if (width <= 0 || height <= 0) invalid("grid dimensions must be positive");
        if (spacing < 0.93 || spacing > 1.03)
            invalid("lattice spacing must lie in [0.93, 1.03] nm");

        const Json engine_j = get_or<Json>(doc, "engine", Json::object());
        if (!engine_j.contains("seed")) invalid("engine.seed is mandatory");
        sc.config.seed = engine_j.at("seed").get<std::uint64_t>();
        sc.config.spacing_nm = spacing;
        sc.config.micro_steps_per_scan = get_or<int>(engine_j, "micro_steps_per_scan", 10);
        sc.config.scan_period_s = get_or<double>(engine_j, "scan_period_s", 40.0);
        sc.config.interaction_radius =
            get_or<int>(engine_j, "interaction_radius", kInteractionRadius);
        if (sc.config.micro_steps_per_scan < 1) invalid("micro_steps_per_scan must be >= 1");

        const Json mob = get_or<Json>(engine_j, "mobility", Json::object());
        sc.config.mobility.hold_s1 = get_or<double>(mob, "hold_s1", 0.25);
        sc.config.mobility.hold_s3 = get_or<double>(mob, "hold_s3", 0.50);
        sc.config.mobility.scatter_s1 = get_or<double>(mob, "scatter_s1", 0.10);
        sc.config.mobility.scatter_s3 = get_or<double>(mob, "scatter_s3", 0.05);
        sc.config.mobility.dx_slope = get_or<double>(mob, "dx_slope", 1.0);
        if (sc.config.mobility.hold_s1 >= sc.config.mobility.hold_s3)
            invalid("hold_s1 must stay below hold_s3 (state 1 moves faster)");

        const Json circ = get_or<Json>(engine_j, "circuits", Json::object());
        if (circ.contains("thresholds")) {
            const Json& t = circ.at("thresholds");
            auto& th = sc.config.circuits.thresholds;
            th.s3_type5 = get_or<double>(t, "s3_type5", th.s3_type5);
            th.s1_type1 = get_or<double>(t, "s1_type1", th.s1_type1);
            th.s2_type2 = get_or<double>(t, "s2_type2", th.s2_type2);
            th.s0_type7 = get_or<double>(t, "s0_type7", th.s0_type7);
            th.s1_type4_lo = get_or<double>(t, "s1_type4_lo", th.s1_type4_lo);
            th.s1_type4_hi = get_or<double>(t, "s1_type4_hi", th.s1_type4_hi);
            th.s2_type3_lo = get_or<double>(t, "s2_type3_lo", th.s2_type3_lo);
            th.s2_type3_hi = get_or<double>(t, "s2_type3_hi", th.s2_type3_hi);
            th.s3_type6_lo = get_or<double>(t, "s3_type6_lo", th.s3_type6_lo);
            th.s3_type6_hi = get_or<double>(t, "s3_type6_hi", th.s3_type6_hi);
        }
        if (circ.contains("degrees"))
            for (const auto& [k, v] : circ.at("degrees").items()) {
                const int type = std::stoi(k);
                if (type < 1 || type > 8) invalid("circuit degree override outside 1..8");
                const int deg = v.get<int>();
                if (deg < 2 || deg > 6) invalid("circuit degree must be in [2,6]");
                sc.config.circuits.degree[type] = deg;
            }
        if (circ.contains("priorities"))
            for (const auto& [k, v] : circ.at("priorities").items()) {
                const int type = std::stoi(k);
                if (type < 1 || type > 8) invalid("priority override outside 1..8");
                const auto list = v.get<std::vector<int>>();
                if (list.size() != 6) invalid("priority list must hold rules 1..6");
                for (int i = 0; i < 6; ++i) sc.config.circuits.priority[type][i] = list[i];
            }

        sc.initial = HexGrid(width, height, spacing);
        Rng gen_rng(sc.config.seed ^ 0x6464712d67656eULL);

        // Generators fill the initial grid and export context for analyses.
        const Json init = get_or<Json>(doc, "initial", Json::object());
        for (const Json& g : get_or<Json>(init, "generators", Json::array())) {
            const std::string kind = g.at("kind").get<std::string>();
            if (kind == "fragment") {
                const Fragment f = fragment_from_rows(g.at("rows"));
                const auto anchor = get_or<std::vector<int>>(g, "anchor", {0, 0});
                apply_fragment(sc.initial, f, anchor[0], anchor[1]);
            } else if (kind == "and_inputs") {
                const int separation = get_or<int>(g, "separation", 12);
                sc.gate = make_and_inputs(get_or<int>(g, "a", 0) != 0,
                                          get_or<int>(g, "b", 0) != 0, separation, sc.initial,
                                          gen_rng, get_or<double>(g, "s3_fraction", 0.2));
                apply_fragment(sc.initial, sc.gate->fragment, 0, 0);
            } else if (kind == "tissue_rings") {
                const auto center = get_or<std::vector<int>>(g, "center", {width / 2, height / 2});
                sc.tissue = make_tissue_rings(g.at("n").get<int>(), g.at("s1").get<int>(),
                                              sc.initial,
                                              axial_from_offset(center[0], center[1]));
                apply_fragment(sc.initial, tissue_fragment(*sc.tissue, sc.initial), 0, 0);
            } else if (kind == "diffusion_band") {
                const auto anchor = g.at("anchor").get<std::vector<int>>();
                const Fragment f =
                    make_diffusion_band(g.at("width").get<int>(), g.at("height").get<int>());
                apply_fragment(sc.initial, f, anchor[0], anchor[1]);
            } else if (kind == "packet") {
                const Fragment shape = fragment_from_rows(g.at("shape"));
                const std::string mode = get_or<std::string>(g, "mode", "mirror");
                const Fragment f = make_packet(
                    shape, mode == "mirror" ? PacketMode::Mirror : PacketMode::Gradient);
                const auto anchor = g.at("anchor").get<std::vector<int>>();
                apply_fragment(sc.initial, f, anchor[0], anchor[1]);
            } else {
                invalid("unknown generator kind '" + kind + "'");
            }
        }

        const Json sched = get_or<Json>(doc, "schedule", Json::object());
        sc.n_scans = get_or<int>(sched, "scans", 0);
        if (sc.n_scans < 0) invalid("scan count must be nonnegative");
        for (const Json& e : get_or<Json>(sched, "events", Json::array())) {
            const std::string op = e.at("op").get<std::string>();
            std::vector<int> at;
            if (e.contains("at_scan")) {
                at.push_back(e.at("at_scan").get<int>());
            } else if (e.contains("from_scan")) {
                const int from = e.at("from_scan").get<int>();
                const int until = get_or<int>(e, "until_scan", sc.n_scans - 1);
                const int every = get_or<int>(e, "every", 1);
                if (every < 1) invalid("event 'every' must be >= 1");
                for (int k = from; k <= until; k += every) at.push_back(k);
            } else if (e.contains("at_s")) {
                const double t = e.at("at_s").get<double>();
                const double per = sc.config.scan_period_s;
                const double k = t / per;
                if (std::abs(k - std::round(k)) > 1e-9)
                    throw ScheduleError("event time not aligned to a scan boundary");
                at.push_back(static_cast<int>(std::round(k)));
            } else {
                at.push_back(0);
            }
            for (int k : at) {
                Event ev;
                ev.at_scan = k;
                if (op == "write") {
                    ev.op = Event::Op::Write;
                    ev.fragment = fragment_from_rows(e.at("rows"));
                    const auto anchor = get_or<std::vector<int>>(e, "anchor", {0, 0});
                    ev.anchor_col = anchor[0];
                    ev.anchor_row = anchor[1];
                    if (ev.anchor_col < 0 || ev.anchor_row < 0 ||
                        ev.anchor_col + ev.fragment.width() > width ||
                        ev.anchor_row + ev.fragment.height() > height)
                        invalid("write event out of bounds");
                } else if (op == "trigger") {
                    ev.op = Event::Op::Trigger;
                } else if (op == "erase_all") {
                    ev.op = Event::Op::EraseAll;
                } else if (op == "add_s1") {
                    ev.op = Event::Op::AddS1;
                    ev.count = e.at("count").get<int>();
                    if (ev.count < 0) invalid("add_s1 count must be >= 0");
                    ev.region = parse_region(e.at("region"), sc.initial, sc.tissue);
                } else if (op == "delete_s2") {
                    ev.op = Event::Op::DeleteS2;
                    ev.region = parse_region(e.at("region"), sc.initial, sc.tissue);
                } else {
                    invalid("unknown event op '" + op + "'");
                }
                sc.events.push_back(std::move(ev));
            }
        }
        std::stable_sort(sc.events.begin(), sc.events.end(),
                         [](const Event& a, const Event& b) { return a.at_scan < b.at_scan; });
        for (const Event& e : sc.events)
            if (e.at_scan < 0 || e.at_scan > sc.n_scans)
                throw ScheduleError("event scan index outside the run");

        for (const Json& a : get_or<Json>(doc, "analyses", Json::array())) {
            AnalysisSpec spec;
            spec.kind = a.at("kind").get<std::string>();
            auto parse_line = [&](const Json& l) {
                LineSpec ls;
                const auto start = l.at("start").get<std::vector<int>>();
                ls.col = start[0];
                ls.row = start[1];
                ls.direction = parse_dir(get_or<std::string>(l, "dir", "E"));
                ls.length = get_or<int>(l, "length", 10);
                return ls;
            };
            if (a.contains("lines"))
                for (const Json& l : a.at("lines")) spec.lines.push_back(parse_line(l));
            if (a.contains("line")) spec.lines.push_back(parse_line(a.at("line")));
            spec.saturation_tolerance = get_or<double>(a, "saturation_tolerance", 0.5);
            spec.u1 = get_or<double>(a, "u1_per_min", 0.13);
            spec.at_scan = get_or<int>(a, "at_scan", 0);
            if (a.contains("probes"))
                for (const auto& p : a.at("probes")) {
                    const auto v = p.get<std::vector<int>>();
                    spec.probes.push_back(axial_from_offset(v[0], v[1]));
                }
            if (a.contains("region"))
                spec.region = parse_region(a.at("region"), sc.initial, sc.tissue);
            sc.analyses.push_back(std::move(spec));
        }
    } catch (const Json::exception& e) {
        invalid(std::string("scenario schema: ") + e.what());
    }

    // Normalized echo: everything a replay needs, defaults included.
    Json echo = doc;
    echo["name"] = sc.name;
    echo["grid"] = {{"width", sc.initial.width()},
                    {"height", sc.initial.height()},
                    {"spacing_nm", sc.initial.spacing()}};
    Json eng;
    eng["seed"] = sc.config.seed;
    eng["micro_steps_per_scan"] = sc.config.micro_steps_per_scan;
    eng["scan_period_s"] = sc.config.scan_period_s;
    eng["interaction_radius"] = sc.config.interaction_radius;
    eng["mobility"] = {{"hold_s1", sc.config.mobility.hold_s1},
                       {"hold_s3", sc.config.mobility.hold_s3},
                       {"scatter_s1", sc.config.mobility.scatter_s1},
                       {"scatter_s3", sc.config.mobility.scatter_s3},
                       {"dx_slope", sc.config.mobility.dx_slope}};
    Json degrees = Json::object();
    Json priorities = Json::object();
    for (int t = 1; t <= 8; ++t) {
        degrees[std::to_string(t)] = sc.config.circuits.degree[t];
        priorities[std::to_string(t)] = sc.config.circuits.priority[t];
    }
    const auto& th = sc.config.circuits.thresholds;
    eng["circuits"] = {{"thresholds",
                        {{"s3_type5", th.s3_type5},
                         {"s1_type1", th.s1_type1},
                         {"s2_type2", th.s2_type2},
                         {"s0_type7", th.s0_type7},
                         {"s1_type4_lo", th.s1_type4_lo},
                         {"s1_type4_hi", th.s1_type4_hi},
                         {"s2_type3_lo", th.s2_type3_lo},
                         {"s2_type3_hi", th.s2_type3_hi},
                         {"s3_type6_lo", th.s3_type6_lo},
                         {"s3_type6_hi", th.s3_type6_hi}}},
                       {"degrees", degrees},
                       {"priorities", priorities}};
    echo["engine"] = eng;
    sc.echo = echo;
    return sc;
}

Scenario load_scenario_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot open scenario file " + path.string());
    Json doc;
    try {
        in >> doc;
    } catch (const Json::exception& e) {
        invalid(std::string("scenario is not valid JSON: ") + e.what());
    }
    return load_scenario(doc);
}

Trajectory run_trajectory(const Scenario& scenario) {
    return run(scenario.initial, scenario.events, scenario.n_scans, scenario.config);
}

namespace {

Json line_echo(const LineSpec& ls) {
    return {{"start", {ls.col, ls.row}}, {"dir", dir_name(ls.direction)},
            {"length", ls.length}};
}

std::vector<UnitCell> line_cells(const HexGrid& grid, const LineSpec& ls) {
    return unit_cell_tiling(grid, axial_from_offset(ls.col, ls.row), ls.direction, ls.length);
}

long long applied_add_s1(const Trajectory& traj) {
    long long n = 0;
    for (const EventLogEntry& e : traj.events)
        if (e.op == "add_s1") n += e.applied;
    return n;
}

Json one_analysis(const Scenario& sc, const Trajectory& traj, const AnalysisSpec& spec) {
    const HexGrid& grid0 = traj.snapshots.front().grid;
    Json out;
    out["kind"] = spec.kind;
    if (spec.kind == "diffusion") {
        std::vector<std::vector<UnitCell>> lines;
        for (const LineSpec& ls : spec.lines) lines.push_back(line_cells(grid0, ls));
        if (lines.empty()) throw AnalysisError("diffusion analysis needs measurement lines");
        const DiffusionFit fit = diffusion_fit(traj, lines, grid0.unit_cell_area());
        out["d_nm2_per_min"] = fit.d;
        out["r2"] = fit.r2;
        out["intercept"] = fit.intercept;
        out["samples"] = fit.samples;
    } else if (spec.kind == "profile") {
        if (spec.lines.empty()) throw AnalysisError("profile analysis needs a line");
        const auto cells = line_cells(grid0, spec.lines[0]);
        const ProfileFit fit = flux_profile_fit(traj, cells, spec.saturation_tolerance);
        out["a"] = fit.a;
        out["z0"] = fit.z0;
        out["b"] = fit.b;
        out["residual"] = fit.residual;
        out["line_mid_rank"] = 0.5 * (cells.size() - 1);
        out["saturation_scan"] = fit.saturation_scan;
        out["saturation_s"] = fit.saturation_s;
    } else if (spec.kind == "cancer") {
        Region cg;
        if (spec.region)
            cg = *spec.region;
        else if (sc.tissue)
            cg = sc.tissue->cg;
        else
            throw AnalysisError("cancer analysis needs a CG region");
        const N3Series series = n3_series(traj, cg);
        long long s1_0 = 0;
        for (const Coord& c : cg.coords)
            if (grid0.at(c) == CellState::S1) ++s1_0;
        const double x00 = 0.5 * (static_cast<double>(s1_0) + applied_add_s1(traj));
        out["n"] = sc.tissue ? sc.tissue->n : static_cast<int>(cg.size());
        out["initial_s1"] = s1_0;
        out["encoded_s1"] = applied_add_s1(traj);
        out["x00"] = x00;
        out["u1_per_min"] = spec.u1;
        out["n3_cumulative"] = series.cumulative;
        out["t_minutes"] = series.t_minutes;
        std::vector<double> cum(series.cumulative.begin(), series.cumulative.end());
        try {
            const KineticsFit fit = kinetics_fit(cum, series.t_minutes);
            out["c"] = fit.c;
            out["p"] = fit.p;
            if (fit.t_half_s)
                out["t_half_s"] = *fit.t_half_s;
            else
                out["t_half_s"] = nullptr;
        } catch (const AnalysisError&) {
            out["c"] = nullptr;
            out["p"] = nullptr;
            out["t_half_s"] = nullptr;
        }
        out["u2_fit_per_min"] = fit_u2(cum, series.t_minutes, spec.u1, x00);
    } else if (spec.kind == "gate") {
        if (!sc.gate) throw AnalysisError("gate analysis needs an and_inputs generator");
        GateGeometry geo;
        geo.center_a = sc.gate->center_a;
        geo.center_b = sc.gate->center_b;
        geo.midpoint = sc.gate->midpoint;
        geo.radius = sc.gate->radius;
        geo.wrote_a = sc.gate->wrote_a;
        geo.wrote_b = sc.gate->wrote_b;
        geo.q0_a = excess_charge(grid0, disc_region(grid0, geo.center_a, geo.radius));
        geo.q0_b = excess_charge(grid0, disc_region(grid0, geo.center_b, geo.radius));
        const GateResult res = gate_readout(traj.snapshots.back().grid, geo);
        out["bit"] = res.bit;
        out["mid_density"] = res.mid_density;
        out["retention_a"] = res.retention_a;
        out["retention_b"] = res.retention_b;
        out["density_a"] = res.density_a;
        out["density_b"] = res.density_b;
    } else if (spec.kind == "voronoi" || spec.kind == "classify") {
        const int k = spec.at_scan;
        if (k < 0 || k >= static_cast<int>(traj.snapshots.size()))
            throw AnalysisError("analysis scan index out of range");
        const HexGrid& snap = traj.snapshots[k].grid;
        const CircuitMap map = segment_domains(snap, sc.config.circuits);
        Json domains = Json::array();
        for (const Domain& d : map.domains)
            domains.push_back({{"circuit", d.circuit},
                               {"cells", d.region.size()},
                               {"area_nm2", d.area_nm2}});
        out["domains"] = domains;
        if (spec.kind == "voronoi") {
            const auto points = voronoi_generators(snap, map);
            const VoronoiReport rep = voronoi_check(snap, map, points);
            Json pts = Json::array();
            for (const VoronoiPoint& p : points)
                pts.push_back({{"x_nm", p.position_nm.x},
                               {"y_nm", p.position_nm.y},
                               {"domain", p.domain}});
            out["points"] = pts;
            out["applicable"] = rep.applicable;
            out["max_asymmetry"] = rep.max_asymmetry;
            out["mean_asymmetry"] = rep.mean_asymmetry;
            out["boundary_cells"] = rep.boundary_cells;
        } else {
            Json probes = Json::array();
            for (const Coord& p : spec.probes)
                probes.push_back({{"cell", {offset_col(p), p.r}},
                                  {"circuit", map.circuit_at(snap, p)}});
            out["probes"] = probes;
        }
    } else if (spec.kind == "periodicity") {
        const Region region = spec.region ? *spec.region : full_region(grid0);
        const auto p = periodicity(traj, region);
        if (p)
            out["period"] = *p;
        else
            out["period"] = nullptr;
    } else {
        throw AnalysisError("unknown analysis kind '" + spec.kind + "'");
    }
    return out;
}

}  // namespace

Json analyses_report(const Scenario& sc, const Trajectory& traj) {
    Json out = Json::array();
    for (const AnalysisSpec& spec : sc.analyses) out.push_back(one_analysis(sc, traj, spec));
    return out;
}

Json analysis_report_one(const Scenario& sc, const Trajectory& traj, const std::string& kind) {
    for (const AnalysisSpec& spec : sc.analyses)
        if (spec.kind == kind) return one_analysis(sc, traj, spec);
    throw AnalysisError("scenario has no analysis of kind '" + kind + "'");
}

namespace {

std::string snapshot_name(int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scan_%04d.txt", k);
    return buf;
}

std::string counts_csv(const Trajectory& traj) {
    std::ostringstream csv;
    csv << "scan,t_seconds,s0,s1,s2,s3,q\n";
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const StateCounts h =
            histogram(traj.snapshots[k].grid, full_region(traj.snapshots[k].grid));
        csv << k << ',' << traj.snapshots[k].t_seconds << ',' << h[CellState::S0] << ','
            << h[CellState::S1] << ',' << h[CellState::S2] << ',' << h[CellState::S3] << ','
            << h[CellState::S1] + 2LL * h[CellState::S3] << '\n';
    }
    return csv.str();
}

}  // namespace

void write_ppm_frame(const HexGrid& grid, const fs::path& path) {
    constexpr int block = 8;
    const int w = grid.width() * block + block / 2;
    const int h = grid.height() * block;
    static const unsigned char palette[4][3] = {
        {50, 90, 220},    // S0 blue
        {60, 190, 70},    // S1 green
        {235, 215, 60},   // S2 yellow
        {225, 55, 45},    // S3 red
    };
    std::vector<unsigned char> img(static_cast<std::size_t>(w) * h * 3, 20);
    for (int row = 0; row < grid.height(); ++row) {
        const int xoff = (row % 2 == 1) ? block / 2 : 0;
        for (int col = 0; col < grid.width(); ++col) {
            const int s = static_cast<int>(grid.at_unchecked(axial_from_offset(col, row)));
            for (int y = row * block; y < (row + 1) * block; ++y)
                for (int x = col * block + xoff; x < (col + 1) * block + xoff; ++x) {
                    unsigned char* px = &img[(static_cast<std::size_t>(y) * w + x) * 3];
                    px[0] = palette[s][0];
                    px[1] = palette[s][1];
                    px[2] = palette[s][2];
                }
        }
    }
    std::ofstream out(path, std::ios::binary);
    out << "P6\n" << w << ' ' << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

RunReport run_scenario(const Scenario& sc, const fs::path& output_dir, bool frames) {
    const Trajectory traj = run_trajectory(sc);

    fs::create_directories(output_dir);
    {
        std::ofstream out(output_dir / "scenario.json");
        out << sc.echo.dump(2) << '\n';
    }
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        std::ofstream out(output_dir / snapshot_name(static_cast<int>(k)));
        out << serialize_grid(traj.snapshots[k].grid);
    }
    {
        std::ofstream out(output_dir / "states.csv");
        out << counts_csv(traj);
    }
    if (frames) {
        fs::create_directories(output_dir / "frames");
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "scan_%04zu.ppm", k);
            write_ppm_frame(traj.snapshots[k].grid, output_dir / "frames" / buf);
        }
    }

    RunReport report;
    report.json["tool"] = {{"name", "ddq"}, {"version", "0.1.0"}};
    report.json["scenario"] = sc.echo;
    Json events = Json::array();
    for (const EventLogEntry& e : traj.events)
        events.push_back({{"at_scan", e.at_scan},
                          {"op", e.op},
                          {"requested", e.requested},
                          {"applied", e.applied},
                          {"partial", e.partial}});
    report.json["events"] = events;
    report.json["counts_file"] = "states.csv";
    report.json["snapshots"] = static_cast<int>(traj.snapshots.size());
    try {
        report.json["analyses"] = analyses_report(sc, traj);
    } catch (const std::exception& e) {
        report.json["analyses"] = nullptr;
        report.json["analysis_error"] = e.what();
        report.analysis_ok = false;
    }
    {
        std::ofstream out(output_dir / "report.json");
        out << report.json.dump(2) << '\n';
    }
    return report;
}

Trajectory load_trajectory(const fs::path& run_dir, const Scenario& sc) {
    Trajectory traj;
    for (int k = 0;; ++k) {
        const fs::path p = run_dir / snapshot_name(k);
        if (!fs::exists(p)) break;
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        traj.snapshots.push_back(
            {parse_grid(ss.str(), sc.initial.spacing()), k * sc.config.scan_period_s});
    }
    if (traj.snapshots.empty())
        throw ValidationError("no snapshots found in " + run_dir.string());
    return traj;
}

VerifyResult replay_verify(const fs::path& run_dir) {
    const fs::path scenario_path = run_dir / "scenario.json";
    if (!fs::exists(scenario_path)) return {false, "missing scenario.json"};
    const Scenario sc = load_scenario_file(scenario_path);
    const Trajectory traj = run_trajectory(sc);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const fs::path p = run_dir / snapshot_name(static_cast<int>(k));
        if (!fs::exists(p)) return {false, "missing " + snapshot_name(static_cast<int>(k))};
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        if (ss.str() != serialize_grid(traj.snapshots[k].grid))
            return {false, "snapshot mismatch at scan " + std::to_string(k)};
    }
    const fs::path csv = run_dir / "states.csv";
    if (fs::exists(csv)) {
        std::ifstream in(csv);
        std::stringstream ss;
        ss << in.rdbuf();
        if (ss.str() != counts_csv(traj)) return {false, "states.csv mismatch"};
    }
    return {true, "bit-identical replay"};
}

}  // namespace ddq

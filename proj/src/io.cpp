#include "fourbody/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fourbody/errors.hpp"
#include "json.hpp"

namespace fourbody {

using nlohmann::json;

namespace {

json theta_json(const RotationAngle& th) {
    if (th.is_rational()) return {{"p", th.ratio().p}, {"q", th.ratio().q}};
    return {{"radians", th.radians()}, {"irrational", true}};
}

RotationAngle theta_from(const json& j) {
    if (j.value("irrational", false)) return RotationAngle::irrational(j.at("radians").get<double>());
    return RotationAngle::pi_fraction(j.at("p").get<std::int64_t>(), j.at("q").get<std::int64_t>());
}

json params_json(const BoundaryParams& p) { return {{"a", p.a}, {"b", p.b}, {"c", p.c}}; }

// JSON has no infinities; keep them readable instead of silently writing null
json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

double number_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    return NAN;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

PathDocument make_path_document(const MinimizeResult& r) {
    PathDocument d;
    d.path = r.path;
    d.action = r.action;
    d.residuals = r.residuals;
    d.min_pair_distance = r.min_pair.distance;
    d.trace = r.trace;
    for (auto& t : d.trace) t.history.clear();
    return d;
}

std::string write_path_json(const PathDocument& doc) {
    const DiscretePath& p = doc.path;
    json nodes = json::array();
    for (const auto& c : p.nodes()) {
        json row = json::array();
        for (const auto& v : c) row.push_back({v.x, v.y});
        nodes.push_back(row);
    }
    json trace = json::array();
    for (const auto& t : doc.trace) {
        trace.push_back({{"restart", t.restart},
                         {"seed", t.seed_kind},
                         {"initial_action", number(t.initial_action)},
                         {"final_action", number(t.final_action)},
                         {"iterations", t.iterations},
                         {"newton_steps", t.newton_steps},
                         {"converged", t.converged},
                         {"gradient_norm", number(t.gradient_norm)},
                         {"min_pair_distance", number(t.min_pair_distance)},
                         {"collapsed", t.collapsed},
                         {"note", t.note}});
    }
    json j = {{"variant", to_string(p.variant)},
              {"theta", theta_json(p.theta)},
              {"N", p.N},
              {"start_params", params_json(p.start)},
              {"end_params", params_json(p.end)},
              {"nodes", nodes},
              {"action", number(doc.action)},
              {"residuals",
               {{"start", doc.residuals.start},
                {"end", doc.residuals.end},
                {"start_terms", doc.residuals.start_terms},
                {"end_terms", doc.residuals.end_terms}}},
              {"min_pair_distance", number(doc.min_pair_distance)},
              {"trace", trace}};
    return j.dump(2) + "\n";
}

PathDocument read_path_json(std::string_view text) {
    const json j = json::parse(text);
    PathDocument d;
    DiscretePath& p = d.path;
    p.variant = parse_variant(j.at("variant").get<std::string>());
    p.theta = theta_from(j.at("theta"));
    p.N = j.at("N").get<int>();
    if (p.N < 2) throw DomainError("path file: N must be at least 2");
    const auto& sp = j.at("start_params");
    const auto& ep = j.at("end_params");
    p.start = BoundaryParams{Side::Start, sp.at("a"), sp.at("b"), sp.at("c"), RotationAngle{}};
    p.end = BoundaryParams{end_side(p.variant), ep.at("a"), ep.at("b"), ep.at("c"), p.theta};
    const auto& nodes = j.at("nodes");
    if (nodes.size() != static_cast<std::size_t>(p.N) + 1) throw DomainError("path file: expected N + 1 nodes");
    for (int k = 1; k < p.N; ++k) {
        const auto& row = nodes.at(static_cast<std::size_t>(k));
        Vec2 q[3];
        for (int i = 0; i < 3; ++i) q[i] = {row.at(i).at(0).get<double>(), row.at(i).at(1).get<double>()};
        p.interior.push_back(complete_configuration(q[0], q[1], q[2]));
    }
    d.action = number_from(j.at("action"));
    d.min_pair_distance = number_from(j.at("min_pair_distance"));
    if (j.contains("residuals")) {
        const auto& r = j.at("residuals");
        d.residuals.start = r.at("start");
        d.residuals.end = r.at("end");
        d.residuals.start_terms = r.at("start_terms").get<std::array<double, 4>>();
        d.residuals.end_terms = r.at("end_terms").get<std::array<double, 4>>();
    }
    if (j.contains("trace")) {
        for (const auto& t : j.at("trace")) {
            RestartTrace rt;
            rt.restart = t.at("restart");
            rt.seed_kind = t.at("seed");
            rt.initial_action = number_from(t.at("initial_action"));
            rt.final_action = number_from(t.at("final_action"));
            rt.iterations = t.at("iterations");
            rt.newton_steps = t.at("newton_steps");
            rt.converged = t.at("converged");
            rt.gradient_norm = number_from(t.at("gradient_norm"));
            rt.min_pair_distance = number_from(t.at("min_pair_distance"));
            rt.collapsed = t.at("collapsed");
            rt.note = t.at("note");
            d.trace.push_back(std::move(rt));
        }
    }
    return d;
}

std::string write_certificate_json(const CertificateReport& r) {
    json recs = json::array();
    for (const auto& x : r.records) {
        recs.push_back({{"theta", to_string(x.theta)},
                        {"table", x.table},
                        {"action", number(x.action)},
                        {"bound", number(x.bound)},
                        {"margin", number(x.margin)},
                        {"extrapolated", x.extrapolated}});
    }
    json j = {{"variant", to_string(r.variant)},
              {"grid_step", to_string(r.step)},
              {"range_hi", to_string(r.range_hi)},
              {"overall_pass", r.overall_pass},
              {"min_margin", number(r.min_margin)},
              {"min_margin_theta", to_string(r.min_margin_theta)},
              {"min_margin_table", r.min_margin_table},
              {"records", recs}};
    return j.dump(2) + "\n";
}

CertificateReport read_certificate_json(std::string_view text) {
    const json j = json::parse(text);
    CertificateReport r;
    r.variant = parse_variant(j.at("variant").get<std::string>());
    r.step = parse_rational(j.at("grid_step").get<std::string>());
    r.range_hi = parse_rational(j.at("range_hi").get<std::string>());
    r.overall_pass = j.at("overall_pass");
    r.min_margin = number_from(j.at("min_margin"));
    r.min_margin_theta = parse_rational(j.at("min_margin_theta").get<std::string>());
    r.min_margin_table = j.at("min_margin_table");
    for (const auto& x : j.at("records")) {
        CertificateRecord c;
        c.theta = parse_rational(x.at("theta").get<std::string>());
        c.table = x.at("table");
        c.action = number_from(x.at("action"));
        c.bound = number_from(x.at("bound"));
        c.margin = number_from(x.at("margin"));
        c.extrapolated = x.at("extrapolated");
        r.records.push_back(c);
    }
    return r;
}

std::string write_certificate_csv(const CertificateReport& r) {
    std::string out = "# variant: " + to_string(r.variant) + "\n# grid step: " + to_string(r.step) +
                      "pi\ntheta_over_pi,table,action,bound,margin,extrapolated\n";
    for (const auto& x : r.records) {
        out += to_string(x.theta) + "," + x.table + "," + fmt(x.action) + "," + fmt(x.bound) + "," + fmt(x.margin) +
               "," + (x.extrapolated ? "1" : "0") + "\n";
    }
    return out;
}

std::string write_trajectory_csv(const ExtendedTrajectory& traj) {
    std::string out;
    out += "# variant: " + to_string(traj.orbit.variant()) + "\n";
    const RotationAngle& th = traj.orbit.theta();
    out += "# theta: " + (th.is_rational() ? to_string(th.ratio()) + "pi" : fmt(th.radians()) + " rad (irrational)") + "\n";
    if (traj.period.periodic) {
        out += "# period: periodic " + fmt(traj.period.period) + " (minimal " + fmt(traj.period.minimal_period) + ")\n";
    } else {
        out += "# period: quasi-periodic\n";
    }
    out += "# window: " + fmt(traj.t_min) + " " + fmt(traj.t_max) + "\n";
    out += "t,q1x,q1y,q2x,q2y,q3x,q3y,q4x,q4y\n";
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        out += fmt(traj.times[i]);
        for (const auto& v : traj.samples[i]) out += "," + fmt(v.x) + "," + fmt(v.y);
        out += "\n";
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace fourbody

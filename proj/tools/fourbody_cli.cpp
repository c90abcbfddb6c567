// fourbody: certify, minimize, extend, tables.
// Exit codes: 0 pass, 1 analytic failure, 2 usage.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fourbody/bounds.hpp"
#include "fourbody/errors.hpp"
#include "fourbody/extension.hpp"
#include "fourbody/io.hpp"
#include "fourbody/minimizer.hpp"
#include "fourbody/testpaths.hpp"
#include "json.hpp"

using namespace fourbody;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
    } else {
        write_file(out, content);
    }
}

Rational angle_ratio(const std::string& text) {
    try {
        return RotationAngle::parse(text).ratio();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

struct CertifyArgs {
    std::string variant;
    std::string step = "1/10000pi";
    std::string theta_max;
    std::string out;
    std::string format = "json";
    unsigned threads = 0;
};

int cmd_certify(const CertifyArgs& a) {
    const Variant v = parse_variant(a.variant);
    SweepOptions o;
    o.step = angle_ratio(a.step);
    o.threads = a.threads;
    if (o.step.p <= 0) throw UsageError("--grid-step must be positive");
    const Rational cap = certified_max(v);
    if (!a.theta_max.empty()) {
        const Rational hi = angle_ratio(a.theta_max);
        if (hi.p <= 0 || compare(hi, cap) > 0) {
            throw UsageError("--theta-max " + a.theta_max + " is outside the certified range (0, " + to_string(cap) +
                             "pi]");
        }
        o.range_hi = hi;
    }
    const CertificateReport rep = certificate_sweep(v, o);
    emit(a.out.empty() ? std::string() : a.out,
         a.out.empty() ? std::string() : (a.format == "csv" ? write_certificate_csv(rep) : write_certificate_json(rep)));
    std::size_t tables = 0;
    for (const auto& t : all_tables()) tables += t.variant == v;
    std::printf("variant %s: %zu evaluations over (0, %spi], %zu tables\n", to_string(v).c_str(), rep.records.size(),
                to_string(rep.range_hi).c_str(), tables);
    std::printf("min margin %.6e at theta = %spi (table %s)\n", rep.min_margin, to_string(rep.min_margin_theta).c_str(),
                rep.min_margin_table.c_str());
    std::printf("certificate: %s\n", rep.overall_pass ? "PASS" : "FAIL");
    return rep.overall_pass ? 0 : 1;
}

struct MinimizeArgs {
    std::string variant;
    std::string theta;
    std::optional<double> theta_real;
    int segments = 40;
    int restarts = 4;
    std::uint64_t seed = 0;
    int max_iterations = 20000;
    double gradient_tolerance = 1e-9;
    std::vector<int> ladder;
    bool no_newton = false;
    std::string out;
    std::string format = "json";
    unsigned threads = 0;
};

int cmd_minimize(const MinimizeArgs& a) {
    const Variant v = parse_variant(a.variant);
    RotationAngle th;
    if (a.theta_real) {
        th = RotationAngle::irrational(*a.theta_real);
    } else if (!a.theta.empty()) {
        try {
            th = RotationAngle::parse(a.theta);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    } else {
        throw UsageError("minimize needs --theta <p>/<q>pi or --theta-real <radians>");
    }
    if (!(th.radians() > 0.0) || th.over_pi() >= 0.25) throw UsageError("theta must lie in (0, pi/4)");
    if (a.segments < 2) throw UsageError("--segments must be at least 2");
    if (a.restarts < 1) throw UsageError("--restarts must be at least 1");
    MinimizeOptions o;
    o.restarts = a.restarts;
    o.seed = a.seed;
    o.max_iterations = a.max_iterations;
    o.gradient_tolerance = a.gradient_tolerance;
    o.ladder = a.ladder;
    o.newton_polish = !a.no_newton;
    o.threads = a.threads;
    const MinimizeResult r = minimize(v, th, a.segments, o);
    const PathDocument doc = make_path_document(r);
    if (a.format == "csv") {
        const auto nodes = r.path.nodes();
        std::string csv = "# variant: " + to_string(v) + "\n# theta: " + th.str() + "\nt,q1x,q1y,q2x,q2y,q3x,q3y,q4x,q4y\n";
        char buf[64];
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(k) / r.path.N);
            csv += buf;
            for (const auto& q : nodes[k]) {
                std::snprintf(buf, sizeof buf, ",%.17g,%.17g", q.x, q.y);
                csv += buf;
            }
            csv += "\n";
        }
        emit(a.out.empty() ? "-" : a.out, csv);
    } else if (!a.out.empty()) {
        emit(a.out, write_path_json(doc));
    }
    std::printf("variant %s, theta %s, N = %d, best restart %d of %d\n", to_string(v).c_str(), th.str().c_str(),
                a.segments, r.best_restart, a.restarts);
    std::printf("action %.12f\n", r.action);
    if (th.over_pi() <= kBoundThetaMax) {
        const double g = g_bound(v, th.radians());
        std::printf("g(theta) %.12f  margin %.6e  %s\n", g, g - r.action, r.action < g ? "below bound" : "NOT below bound");
    } else {
        std::printf("g(theta) undefined beyond pi/10\n");
    }
    std::printf("min pair distance %.6f (bodies %d-%d)\n", r.min_pair.distance, r.min_pair.pair.i + 1,
                r.min_pair.pair.j + 1);
    std::printf("first-variation residuals: t=0 %.3e  t=1 %.3e\n", r.residuals.start, r.residuals.end);
    if (r.all_restarts_collapsed) {
        std::printf("all restarts collapsed toward a collision\n");
        return 1;
    }
    return 0;
}

struct ExtendArgs {
    std::string path;
    std::vector<double> window;
    double samples_per_unit = 100.0;
    bool theta_real = false;
    bool backward = false;
    std::string out;
    std::string format = "csv";
};

int cmd_extend(const ExtendArgs& a) {
    PathDocument doc;
    try {
        doc = read_path_json(read_file(a.path));
    } catch (const std::exception& e) {
        throw UsageError(std::string("cannot read path file: ") + e.what());
    }
    DiscretePath p = doc.path;
    const RotationAngle th = a.theta_real ? RotationAngle::irrational(p.theta.radians()) : p.theta;
    const PeriodClass pc = classify_period(p.variant, th);
    const int block = block_length(p.variant);
    double t0 = 0.0, t1 = pc.periodic ? pc.period : 10.0 * block;
    if (!a.window.empty()) {
        if (a.window.size() != 2 || !(a.window[1] > a.window[0])) throw UsageError("--window needs t_min < t_max");
        t0 = a.window[0];
        t1 = a.window[1];
    }
    ExtendOptions eo;
    eo.samples_per_unit = a.samples_per_unit;
    eo.backward_reflection = a.backward;
    ExtendedTrajectory tr = [&] {
        try {
            return extend(p.polyline(), p.variant, th, t0, t1, eo);
        } catch (const EndpointCollisionError& e) {
            std::fprintf(stderr, "endpoint collision: %s (min distance %.3e)\n", e.what(), e.distance);
            throw;
        }
    }();
    if (a.format == "json") {
        nlohmann::json j = {{"variant", to_string(p.variant)},
                            {"theta", th.str()},
                            {"periodic", pc.periodic},
                            {"period", pc.period},
                            {"times", tr.times}};
        nlohmann::json s = nlohmann::json::array();
        for (const auto& c : tr.samples) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& q : c) row.push_back({q.x, q.y});
            s.push_back(row);
        }
        j["samples"] = s;
        emit(a.out.empty() ? "-" : a.out, j.dump() + "\n");
    } else {
        emit(a.out.empty() ? "-" : a.out, write_trajectory_csv(tr));
    }
    if (pc.periodic) {
        std::fprintf(stderr, "classification: periodic, period %g (minimal %g)\n", pc.period, pc.minimal_period);
    } else {
        std::fprintf(stderr, "classification: quasi-periodic\n");
    }
    const JunctionReport jr = c1_junction_check(tr);
    for (const auto& j : jr.junctions) std::fprintf(stderr, "  junction t=%g velocity jump %.3e\n", j.t, j.jump);
    std::fprintf(stderr, "C1 check: max jump %.3e, tol %.3e, %s\n", jr.max_jump, jr.tol, jr.pass ? "pass" : "fail");
    // node-aligned samples so second differences see the discrete path, not its interpolation
    ExtendOptions nodal = eo;
    nodal.samples_per_unit = p.N;
    const NewtonResidual nr = newton_residual(extend(p.polyline(), p.variant, th, 0.0, block, nodal));
    std::fprintf(stderr, "Newton residual over one block: max %.3e, rms %.3e\n", nr.max, nr.rms);
    return 0;
}

struct TablesArgs {
    bool list = false;
    std::string dump;
    bool raw = false;
    std::string out;
    std::string format = "csv";
};

int cmd_tables(const TablesArgs& a) {
    if (a.list) {
        auto pi = [](const Rational& r) { return r.p == 0 ? std::string("0") : to_string(r) + "pi"; };
        std::string text;
        for (const auto& t : all_tables()) {
            text += t.id + "  " + to_string(t.variant) + "  theta0 " + t.theta0.str() + "  interval " +
                    (t.interval.lo_closed ? "[" : "(") + pi(t.interval.lo) + ", " + pi(t.interval.hi) + "]  repairs " +
                    std::to_string(t.repairs.size()) + "\n";
        }
        emit(a.out, text);
        return 0;
    }
    if (a.dump.empty()) throw UsageError("tables needs --list or --dump <id>");
    const TestPathTable* t = nullptr;
    try {
        t = &table_by_id(a.dump);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    std::string text = t->csv(a.raw);
    for (const auto& r : t->repairs) {
        text += "# repair t=" + r.t + " " + r.column + ": " + r.raw + " -> " + r.repaired + " (" + r.rule + ")\n";
    }
    emit(a.out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Four-body action certificates, minimizers and orbit extensions"};
    app.require_subcommand(1);

    CertifyArgs ca;
    auto* certify = app.add_subcommand("certify", "check A(test path) < g(theta) over the certified range");
    certify->add_option("--variant", ca.variant, "e1 or e2")->required()->check(CLI::IsMember({"e1", "e2"}));
    certify->add_option("--grid-step", ca.step, "grid step as <p>/<q>pi")->capture_default_str();
    certify->add_option("--theta-max", ca.theta_max, "upper end of the sweep as <p>/<q>pi");
    certify->add_option("--out", ca.out, "report file");
    certify->add_option("--format", ca.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    certify->add_option("--threads", ca.threads, "worker threads, 0 = all cores");

    MinimizeArgs ma;
    auto* mini = app.add_subcommand("minimize", "minimize the discrete action with free boundary parameters");
    mini->add_option("--variant", ma.variant, "e1 or e2")->required()->check(CLI::IsMember({"e1", "e2"}));
    auto* theta_opt = mini->add_option("--theta", ma.theta, "angle as <p>/<q>pi");
    mini->add_option("--theta-real", ma.theta_real, "angle in radians, treated as irrational")->excludes(theta_opt);
    mini->add_option("--segments", ma.segments, "N, number of segments")->capture_default_str();
    mini->add_option("--restarts", ma.restarts, "number of restarts")->capture_default_str();
    mini->add_option("--seed", ma.seed, "seed for the restart perturbations")->capture_default_str();
    mini->add_option("--max-iterations", ma.max_iterations)->capture_default_str();
    mini->add_option("--gradient-tolerance", ma.gradient_tolerance)->capture_default_str();
    mini->add_option("--ladder", ma.ladder, "coarse N levels solved first, e.g. --ladder 20 40");
    mini->add_flag("--no-newton", ma.no_newton, "skip the Newton polish after L-BFGS");
    mini->add_option("--out", ma.out, "path file");
    mini->add_option("--format", ma.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    mini->add_option("--threads", ma.threads, "worker threads, 0 = all cores");

    ExtendArgs ea;
    auto* ext = app.add_subcommand("extend", "extend a minimizer on [0,1] to a periodic or quasi-periodic orbit");
    ext->add_option("--path", ea.path, "path JSON written by minimize")->required();
    ext->add_option("--window", ea.window, "t_min t_max")->expected(2);
    ext->add_option("--samples-per-unit", ea.samples_per_unit)->capture_default_str();
    ext->add_flag("--theta-real", ea.theta_real, "treat the path's angle as irrational");
    ext->add_flag("--backward", ea.backward, "use the direct reflection formula on [-1, 0]");
    ext->add_option("--out", ea.out, "trajectory file");
    ext->add_option("--format", ea.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

    TablesArgs ta;
    auto* tables = app.add_subcommand("tables", "list or dump the embedded node tables");
    tables->add_flag("--list", ta.list);
    tables->add_option("--dump", ta.dump, "table id, e.g. e1-0539");
    tables->add_flag("--raw", ta.raw, "print the values as printed before repair");
    tables->add_option("--out", ta.out);
    tables->add_option("--format", ta.format)->check(CLI::IsMember({"csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (certify->parsed()) return cmd_certify(ca);
        if (mini->parsed()) return cmd_minimize(ma);
        if (ext->parsed()) return cmd_extend(ea);
        if (tables->parsed()) return cmd_tables(ta);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const EndpointCollisionError&) {
        return 1;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

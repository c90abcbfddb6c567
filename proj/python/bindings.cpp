#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fourbody/action.hpp"
#include "fourbody/bounds.hpp"
#include "fourbody/errors.hpp"
#include "fourbody/extension.hpp"
#include "fourbody/io.hpp"
#include "fourbody/minimizer.hpp"
#include "fourbody/testpaths.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace fourbody;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Angles come in as "p/qpi" strings, or as floats meaning an irrational angle in radians.
RotationAngle angle(const py::object& theta) {
    if (py::isinstance<py::str>(theta)) return RotationAngle::parse(theta.cast<std::string>());
    return RotationAngle::irrational(theta.cast<double>());
}

Configuration config_from(const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != 4 || a.shape(1) != 2) throw DomainError("configuration must have shape (4, 2)");
    auto r = a.unchecked<2>();
    Configuration q;
    for (int i = 0; i < 4; ++i) q[i] = {r(i, 0), r(i, 1)};
    return q;
}

Array to_array(const Configuration& q) {
    Array out({4, 2});
    auto w = out.mutable_unchecked<2>();
    for (int i = 0; i < 4; ++i) {
        w(i, 0) = q[i].x;
        w(i, 1) = q[i].y;
    }
    return out;
}

Array to_array(const std::vector<Configuration>& qs) {
    Array out({static_cast<py::ssize_t>(qs.size()), py::ssize_t{4}, py::ssize_t{2}});
    auto w = out.mutable_unchecked<3>();
    for (std::size_t k = 0; k < qs.size(); ++k)
        for (int i = 0; i < 4; ++i) {
            w(k, i, 0) = qs[k][i].x;
            w(k, i, 1) = qs[k][i].y;
        }
    return out;
}

PolylinePath path_from(const Array& nodes, std::optional<std::vector<double>> times) {
    if (nodes.ndim() != 3 || nodes.shape(1) != 4 || nodes.shape(2) != 2) {
        throw DomainError("nodes must have shape (K, 4, 2)");
    }
    auto r = nodes.unchecked<3>();
    std::vector<Configuration> qs(static_cast<std::size_t>(nodes.shape(0)));
    for (std::size_t k = 0; k < qs.size(); ++k)
        for (int i = 0; i < 4; ++i) qs[k][i] = {r(k, i, 0), r(k, i, 1)};
    if (!times) return PolylinePath::uniform(std::move(qs));
    return PolylinePath(std::move(*times), std::move(qs));
}

Side side_from(const std::string& s) {
    if (s == "start") return Side::Start;
    if (s == "e1") return Side::EndE1;
    if (s == "e2") return Side::EndE2;
    throw DomainError("side must be start, e1 or e2");
}

py::dict path_dict(const DiscretePath& p) {
    py::dict d;
    d["variant"] = to_string(p.variant);
    d["theta"] = p.theta.str();
    d["N"] = p.N;
    d["start_params"] = py::make_tuple(p.start.a, p.start.b, p.start.c);
    d["end_params"] = py::make_tuple(p.end.a, p.end.b, p.end.c);
    d["nodes"] = to_array(p.nodes());
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Compiled core of the fourbody package
        -------------------------------------

        Configurations are (4, 2) arrays, paths are (K, 4, 2) arrays on a
        uniform mesh over [0, 1] unless times are given. Angles are strings
        like "1/20pi"; a float is taken as an irrational angle in radians.
    )pbdoc";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<CollisionError>(m, "CollisionError", PyExc_ArithmeticError);
    py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);
    py::register_exception<EndpointCollisionError>(m, "EndpointCollisionError", PyExc_ArithmeticError);

    m.def(
        "build_boundary",
        [](const std::string& side, double a, double b, double c, const py::object& theta) {
            return to_array(build_boundary({side_from(side), a, b, c, angle(theta)}));
        },
        py::arg("side"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("theta") = "0",
        R"pbdoc(Boundary configuration of the start, e1 or e2 family.)pbdoc");

    m.def(
        "min_pair_distance",
        [](const Array& q) {
            const PairDistance d = min_pair_distance(config_from(q));
            return py::make_tuple(d.distance, py::make_tuple(d.pair.i, d.pair.j));
        },
        R"pbdoc(Smallest pairwise distance and its (zero-based) pair.)pbdoc");

    m.def(
        "polyline_action",
        [](const Array& nodes, std::optional<std::vector<double>> times) {
            const ActionBreakdown a = polyline_action(path_from(nodes, std::move(times)));
            py::dict d;
            d["total"] = a.total;
            d["kinetic"] = a.kinetic;
            d["potential"] = a.potential;
            d["pairwise"] = a.pairwise;
            return d;
        },
        py::arg("nodes"), py::arg("times") = py::none(),
        R"pbdoc(Exact action of a piecewise-linear path.)pbdoc");

    m.def(
        "action_quadrature_oracle",
        [](const Array& nodes, std::optional<std::vector<double>> times, double tol) {
            return action_quadrature_oracle(path_from(nodes, std::move(times)), tol);
        },
        py::arg("nodes"), py::arg("times") = py::none(), py::arg("tol") = 1e-9);

    m.def("kepler_lower_bound",
          [](double mu, double alpha, double theta, double T, bool collision) {
              return kepler_lower_bound({mu, alpha, theta, T}, collision);
          },
          py::arg("mu"), py::arg("alpha"), py::arg("theta"), py::arg("T"), py::arg("collision") = false);
    m.def("total_collision_bound", &total_collision_bound);
    m.def("g1", &g1, py::arg("theta"), R"pbdoc(Lower bound for E1 paths with boundary collisions, theta in radians.)pbdoc");
    m.def("g2", &g2, py::arg("theta"));
    m.def(
        "case_bound",
        [](const std::string& v, int case_id, double theta, bool printed) {
            return case_bound(parse_variant(v), case_id, theta,
                              printed ? Case2Coefficient::Printed : Case2Coefficient::Repaired);
        },
        py::arg("variant"), py::arg("case_id"), py::arg("theta"), py::arg("printed_coefficient") = false);

    m.def(
        "tables",
        [] {
            py::list out;
            for (const auto& t : all_tables()) {
                py::dict d;
                d["id"] = t.id;
                d["variant"] = to_string(t.variant);
                d["theta0"] = t.theta0.str();
                d["interval"] = py::make_tuple(to_string(t.interval.lo), to_string(t.interval.hi));
                d["repairs"] = t.repairs.size();
                out.append(d);
            }
            return out;
        },
        R"pbdoc(The embedded node tables, E1 first, each by decreasing theta0.)pbdoc");

    m.def(
        "build_test_path",
        [](const std::string& v, const py::object& theta) {
            return to_array(build_test_path(parse_variant(v), angle(theta)).nodes());
        },
        py::arg("variant"), py::arg("theta"));

    m.def(
        "certificate_sweep",
        [](const std::string& v, const std::string& step, std::optional<std::string> range_hi) {
            SweepOptions o;
            o.step = parse_rational(step);
            if (range_hi) o.range_hi = parse_rational(*range_hi);
            CertificateReport r;
            {
                py::gil_scoped_release release;
                r = certificate_sweep(parse_variant(v), o);
            }
            py::dict d;
            d["overall_pass"] = r.overall_pass;
            d["min_margin"] = r.min_margin;
            d["min_margin_theta"] = to_string(r.min_margin_theta);
            d["min_margin_table"] = r.min_margin_table;
            d["count"] = r.records.size();
            std::vector<double> margins;
            for (const auto& x : r.records) margins.push_back(x.margin);
            d["margins"] = margins;
            return d;
        },
        py::arg("variant"), py::arg("step") = "1/10000", py::arg("range_hi") = py::none(),
        R"pbdoc(Check A(test path) < g(theta) on a grid; step and range are multiples of pi as "p/q".)pbdoc");

    m.def(
        "minimize",
        [](const std::string& v, const py::object& theta, int N, int restarts, std::uint64_t seed) {
            MinimizeOptions o;
            o.restarts = restarts;
            o.seed = seed;
            const RotationAngle th = angle(theta);
            MinimizeResult r;
            {
                py::gil_scoped_release release;
                r = minimize(parse_variant(v), th, N, o);
            }
            py::dict d = path_dict(r.path);
            d["action"] = r.action;
            d["min_pair_distance"] = r.min_pair.distance;
            d["residuals"] = py::make_tuple(r.residuals.start, r.residuals.end);
            d["all_restarts_collapsed"] = r.all_restarts_collapsed;
            d["json"] = write_path_json(make_path_document(r));
            return d;
        },
        py::arg("variant"), py::arg("theta"), py::arg("N") = 40, py::arg("restarts") = 4, py::arg("seed") = 0);

    m.def(
        "read_path_json",
        [](const std::string& text) { return path_dict(read_path_json(text).path); },
        R"pbdoc(Parse a path file written by minimize.)pbdoc");

    m.def(
        "classify_period",
        [](const std::string& v, const py::object& theta) {
            const PeriodClass pc = classify_period(parse_variant(v), angle(theta));
            return py::make_tuple(pc.periodic, pc.period, pc.minimal_period);
        },
        py::arg("variant"), py::arg("theta"));

    m.def(
        "extend",
        [](const std::string& v, const py::object& theta, const Array& nodes, double t_min, double t_max,
           double samples_per_unit) {
            ExtendOptions o;
            o.samples_per_unit = samples_per_unit;
            const ExtendedTrajectory tr = extend(path_from(nodes, std::nullopt), parse_variant(v), angle(theta), t_min, t_max, o);
            const JunctionReport jr = c1_junction_check(tr);
            py::dict d;
            d["times"] = tr.times;
            d["samples"] = to_array(tr.samples);
            d["c1_max_jump"] = jr.max_jump;
            d["periodic"] = tr.period.periodic;
            d["period"] = tr.period.period;
            return d;
        },
        py::arg("variant"), py::arg("theta"), py::arg("nodes"), py::arg("t_min"), py::arg("t_max"),
        py::arg("samples_per_unit") = 100.0);

    m.def(
        "newton_acceleration", [](const Array& q) { return to_array(newton_acceleration(config_from(q))); },
        R"pbdoc(Unit-mass Newtonian acceleration of each body.)pbdoc");

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}

#include "fourbody/testpaths.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include "json.hpp"

#include "embedded_tables.hpp"
#include "fourbody/bounds.hpp"
#include "fourbody/errors.hpp"
#include "parallel.hpp"

namespace fourbody {

namespace {

const char* const kColumns[7] = {"t", "q1x", "q1y", "q2x", "q2y", "q3x", "q3y"};

double parse_double_strict(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw DomainError("malformed numeric literal '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view strip_cr(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    return s;
}

bool in_closed(const TableInterval& iv, const Rational& th) {
    return compare(th, iv.lo) >= 0 && compare(th, iv.hi) <= 0 && th.p > 0;
}

bool in_lookup(const TableInterval& iv, const RotationAngle& th) {
    if (th.is_rational()) return compare(th.ratio(), iv.lo) > 0 && compare(th.ratio(), iv.hi) <= 0;
    const double x = th.over_pi();
    const double lo = static_cast<double>(iv.lo.p) / iv.lo.q, hi = static_cast<double>(iv.hi.p) / iv.hi.q;
    return x > lo && x <= hi;
}

Rational reduce(std::int64_t p, std::int64_t q) {
    RotationAngle a = RotationAngle::pi_fraction(p, q);
    return a.ratio();
}

}  // namespace

int compare(const Rational& a, const Rational& b) {
    const __int128 l = static_cast<__int128>(a.p) * b.q;
    const __int128 r = static_cast<__int128>(b.p) * a.q;
    return l < r ? -1 : (l > r ? 1 : 0);
}

std::string to_string(const Rational& r) {
    if (r.q == 1) return std::to_string(r.p);
    return std::to_string(r.p) + "/" + std::to_string(r.q);
}

Rational parse_rational(std::string_view s) {
    auto slash = s.find('/');
    auto as_int = [](std::string_view t) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
            throw DomainError("malformed rational '" + std::string(t) + "'");
        }
        return v;
    };
    if (slash == std::string_view::npos) return reduce(as_int(s), 1);
    return reduce(as_int(s.substr(0, slash)), as_int(s.substr(slash + 1)));
}

// ---- TestPathTable ----

Configuration TestPathTable::row(int k) const {
    const auto& r = rows.at(static_cast<std::size_t>(k));
    return complete_configuration(r[0], r[1], r[2]);
}

BoundaryParams TestPathTable::start_params() const {
    const auto& r = rows.front();
    return BoundaryParams{Side::Start, -r[1].x, r[2].y, r[1].x - r[0].x, RotationAngle{}};
}

BoundaryParams TestPathTable::end_params() const {
    const auto& r = rows.back();
    if (variant == Variant::E1) {
        // rows (-b,-a), (-c,a), (c,a), (b,-a)
        return BoundaryParams{Side::EndE1, -r[0].y, -r[0].x, -r[1].x, RotationAngle{}};
    }
    // rows (-a,-b), (-a,b), (a,c), (a,-c)
    return BoundaryParams{Side::EndE2, -r[0].x, r[1].y, r[2].y, RotationAngle{}};
}

std::string TestPathTable::csv(bool raw) const {
    std::string out;
    for (int c = 0; c < 7; ++c) out += std::string(c ? "," : "") + kColumns[c];
    out += "\n";
    for (const auto& line : cells) {
        for (int c = 0; c < 7; ++c) {
            std::string cell = line[static_cast<std::size_t>(c)];
            if (raw && c > 0) {
                for (const auto& rep : repairs) {
                    if (rep.t == line[0] && rep.column == kColumns[c]) cell = rep.raw;
                }
            }
            out += (c ? "," : "") + cell;
        }
        out += "\n";
    }
    return out;
}

TestPathTable parse_table(std::string_view csv_text, std::string_view sidecar_json) {
    TestPathTable t;
    const auto meta = nlohmann::json::parse(sidecar_json);
    t.id = meta.at("id").get<std::string>();
    t.variant = parse_variant(meta.at("variant").get<std::string>());
    const Rational th0 = parse_rational(meta.at("theta0").get<std::string>());
    t.theta0 = RotationAngle::pi_fraction(th0.p, th0.q);
    const auto& iv = meta.at("interval");
    t.interval.lo = parse_rational(iv.at("lo").get<std::string>());
    t.interval.hi = parse_rational(iv.at("hi").get<std::string>());
    t.interval.lo_closed = iv.at("lo_closed").get<bool>();
    for (const auto& r : meta.at("repairs")) {
        t.repairs.push_back({r.at("t"), r.at("column"), r.at("raw"), r.at("repaired"), r.at("rule"),
                             r.value("note", std::string{})});
    }

    bool header = true;
    for (std::string_view line : split(csv_text, '\n')) {
        line = strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = split(line, ',');
        if (fields.size() != 7) throw DomainError(t.id + ": expected 7 columns in '" + std::string(line) + "'");
        if (header) {
            for (int c = 0; c < 7; ++c) {
                if (fields[static_cast<std::size_t>(c)] != kColumns[c]) {
                    throw DomainError(t.id + ": unexpected header '" + std::string(line) + "'");
                }
            }
            header = false;
            continue;
        }
        std::array<std::string, 7> cell;
        std::array<Vec2, 3> row;
        for (int c = 0; c < 7; ++c) cell[static_cast<std::size_t>(c)] = std::string(fields[static_cast<std::size_t>(c)]);
        for (int b = 0; b < 3; ++b) {
            row[static_cast<std::size_t>(b)] = Vec2{parse_double_strict(fields[static_cast<std::size_t>(1 + 2 * b)]),
                                                    parse_double_strict(fields[static_cast<std::size_t>(2 + 2 * b)])};
        }
        t.cells.push_back(std::move(cell));
        t.rows.push_back(row);
    }
    validate_table(t);
    return t;
}

void validate_table(const TestPathTable& t) {
    if (static_cast<int>(t.rows.size()) != TestPathTable::kRows) {
        throw DomainError(t.id + ": expected 11 rows, found " + std::to_string(t.rows.size()));
    }
    for (int k = 0; k < TestPathTable::kRows; ++k) {
        const double tv = parse_double_strict(t.cells[static_cast<std::size_t>(k)][0]);
        if (std::abs(tv - k / 10.0) > 1e-12) throw DomainError(t.id + ": row times must be 0, 0.1, ..., 1");
    }
    if (compare(t.interval.lo, t.interval.hi) >= 0 || t.interval.lo.p < 0) {
        throw DomainError(t.id + ": empty or negative interval");
    }
    if (!in_family(t.row(0), Side::Start, RotationAngle{}, 1e-6)) {
        throw DomainError(t.id + ": t=0 row is not a double isosceles configuration");
    }
    if (!in_family(t.row(10), end_side(t.variant), RotationAngle{}, 1e-6)) {
        throw DomainError(t.id + ": unrotated t=1 row is not in the end family");
    }
}

const std::vector<TestPathTable>& all_tables() {
    static const std::vector<TestPathTable> tables = [] {
        std::vector<TestPathTable> out;
        for (std::size_t i = 0; i < detail::kEmbeddedTableCount; ++i) {
            const auto& e = detail::kEmbeddedTables[i];
            out.push_back(parse_table(e.csv, e.json));
        }
        std::sort(out.begin(), out.end(), [](const TestPathTable& a, const TestPathTable& b) {
            if (a.variant != b.variant) return a.variant < b.variant;
            return compare(a.theta0.ratio(), b.theta0.ratio()) > 0;
        });
        return out;
    }();
    return tables;
}

const TestPathTable& table_by_id(std::string_view id) {
    for (const auto& t : all_tables()) {
        if (t.id == id) return t;
    }
    throw DomainError("unknown table id '" + std::string(id) + "'");
}

Rational certified_max(Variant v) {
    Rational best{0, 1};
    for (const auto& t : all_tables()) {
        if (t.variant == v && compare(t.interval.hi, best) > 0) best = t.interval.hi;
    }
    return best;
}

const TestPathTable& load_table(Variant v, const RotationAngle& theta) {
    for (const auto& t : all_tables()) {
        if (t.variant == v && in_lookup(t.interval, theta)) return t;
    }
    throw DomainError("theta = " + theta.str() + " is outside the certified range (0, " +
                      to_string(certified_max(v)) + "pi] for " + to_string(v));
}

PolylinePath build_test_path(const TestPathTable& table, const RotationAngle& theta) {
    std::vector<Configuration> nodes;
    nodes.reserve(TestPathTable::kRows);
    for (int k = 0; k < TestPathTable::kRows - 1; ++k) nodes.push_back(table.row(k));
    BoundaryParams end = table.end_params();
    end.theta = theta;
    nodes.push_back(build_boundary(end));
    return PolylinePath::uniform(std::move(nodes));
}

PolylinePath build_test_path(Variant v, const RotationAngle& theta) {
    return build_test_path(load_table(v, theta), theta);
}

// ---- certificate sweep ----

CertificateReport certificate_sweep(Variant v, const SweepOptions& opts) {
    if (opts.step.p <= 0 || opts.step.q <= 0) throw DomainError("grid step must be positive");
    CertificateReport rep;
    rep.variant = v;
    rep.step = reduce(opts.step.p, opts.step.q);
    rep.range_hi = opts.range_hi ? reduce(opts.range_hi->p, opts.range_hi->q) : certified_max(v);
    if (rep.range_hi.p <= 0) throw DomainError("sweep range must be positive");
    if (compare(rep.range_hi, Rational{1, 10}) > 0) throw DomainError("sweep range exceeds the bounds' validity (pi/10)");

    std::vector<const TestPathTable*> tables;
    for (const auto& t : all_tables()) {
        if (t.variant == v) tables.push_back(&t);
    }

    std::vector<Rational> grid;
    const __int128 kmax = (static_cast<__int128>(rep.range_hi.p) * rep.step.q) /
                          (static_cast<__int128>(rep.range_hi.q) * rep.step.p);
    for (__int128 k = 1; k <= kmax; ++k) {
        grid.push_back(reduce(static_cast<std::int64_t>(k * rep.step.p), rep.step.q));
    }
    for (const auto* t : tables) {
        for (const Rational& e : {t->interval.lo, t->interval.hi}) {
            if (e.p > 0 && compare(e, rep.range_hi) <= 0) grid.push_back(e);
        }
    }
    std::sort(grid.begin(), grid.end(), [](const Rational& a, const Rational& b) { return compare(a, b) < 0; });
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](const Rational& a, const Rational& b) { return compare(a, b) == 0; }),
               grid.end());

    const TestPathTable* top = *std::max_element(tables.begin(), tables.end(), [](auto* a, auto* b) {
        return compare(a->interval.hi, b->interval.hi) < 0;
    });

    // seam points are checked under every table whose closed interval holds them
    for (const Rational& th : grid) {
        bool any = false;
        for (auto it = tables.rbegin(); it != tables.rend(); ++it) {
            if (in_closed((*it)->interval, th)) {
                rep.records.push_back({th, (*it)->id});
                any = true;
            }
        }
        if (!any) rep.records.push_back({th, top->id, 0.0, 0.0, 0.0, true});
    }

    detail::parallel_for(rep.records.size(), opts.threads, [&](std::size_t i) {
        CertificateRecord& r = rep.records[i];
        const RotationAngle th = RotationAngle::pi_fraction(r.theta.p, r.theta.q);
        r.bound = g_bound(v, th.radians());
        try {
            r.action = polyline_action(build_test_path(table_by_id(r.table), th)).total;
            r.margin = r.bound - r.action;
        } catch (const CollisionError&) {
            r.action = std::numeric_limits<double>::infinity();
            r.margin = -std::numeric_limits<double>::infinity();
        }
    });

    rep.overall_pass = !rep.records.empty();
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.records) {
        if (!r.passed()) rep.overall_pass = false;
        if (r.margin < rep.min_margin) {
            rep.min_margin = r.margin;
            rep.min_margin_theta = r.theta;
            rep.min_margin_table = r.table;
        }
    }
    return rep;
}

}  // namespace fourbody

#include "xxz/scenario.hpp"

#include <fstream>
#include <set>

namespace xxz {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError("scenario: " + msg); }

void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

double number_at(const json& obj, const char* key) {
    require(obj.contains(key) && obj[key].is_number(), std::string(key) + " must be a number");
    return obj[key].get<double>();
}

SpinGraph parse_graph(const json& g) {
    require(g.is_object(), "graph must be an object");
    check_keys(g, "graph",
               {"geometry", "n", "rows", "cols", "spin", "j_xy", "j_z", "sites", "edges",
                "cyclic"});
    require(g.contains("geometry") && g["geometry"].is_string(), "graph.geometry is required");
    const Geometry geom = geometry_from_string(g["geometry"].get<std::string>());
    if (geom == Geometry::custom) {
        require(g.contains("sites") && g["sites"].is_array(), "custom graph needs sites[]");
        require(g.contains("edges") && g["edges"].is_array(), "custom graph needs edges[]");
        std::vector<Site> sites;
        for (const auto& s : g["sites"]) {
            check_keys(s, "site", {"index", "spin"});
            sites.push_back({static_cast<int>(number_at(s, "index")),
                             twice_spin_from(number_at(s, "spin"))});
        }
        std::vector<Edge> edges;
        for (const auto& e : g["edges"]) {
            check_keys(e, "edge", {"i", "j", "j_xy", "j_z"});
            edges.push_back({static_cast<int>(number_at(e, "i")),
                             static_cast<int>(number_at(e, "j")), number_at(e, "j_xy"),
                             number_at(e, "j_z")});
        }
        return SpinGraph(std::move(sites), std::move(edges), Geometry::custom);
    }
    const int ts = twice_spin_from(number_at(g, "spin"));
    const double j_xy = number_at(g, "j_xy");
    const double j_z = number_at(g, "j_z");
    switch (geom) {
        case Geometry::open_chain:
            return build_chain(static_cast<int>(number_at(g, "n")), ts, j_xy, j_z, false);
        case Geometry::cyclic_chain:
            return build_chain(static_cast<int>(number_at(g, "n")), ts, j_xy, j_z, true);
        case Geometry::rectangular:
            return build_rectangular(static_cast<int>(number_at(g, "rows")),
                                     static_cast<int>(number_at(g, "cols")), ts, j_xy, j_z);
        case Geometry::spin_star:
            return build_spin_star(static_cast<int>(number_at(g, "n")), ts, j_xy, j_z);
        default:
            fail("unreachable geometry");
    }
}

FieldPattern parse_pattern(const json& p, const SpinGraph& graph) {
    require(p.is_object(), "pattern must be an object");
    check_keys(p, "pattern", {"kind", "site_a", "site_b", "coeff_h1", "coeff_h2"});
    require(p.contains("kind") && p["kind"].is_string(), "pattern.kind is required");
    const std::string kind = p["kind"].get<std::string>();
    if (kind == "custom") {
        require(p.contains("coeff_h1") && p.contains("coeff_h2"),
                "custom pattern needs coeff_h1[] and coeff_h2[]");
        const auto& c1 = p["coeff_h1"];
        const auto& c2 = p["coeff_h2"];
        require(c1.is_array() && c2.is_array() &&
                    c1.size() == static_cast<std::size_t>(graph.size()) &&
                    c2.size() == c1.size(),
                "custom pattern coefficients must cover every site");
        std::vector<std::array<double, 2>> coeff(graph.size());
        for (int i = 0; i < graph.size(); ++i)
            coeff[i] = {c1[i].get<double>(), c2[i].get<double>()};
        return FieldPattern::custom(std::move(coeff));
    }
    if (kind == "zero_bulk_at") {
        return FieldPattern::zero_bulk_at(graph, static_cast<int>(number_at(p, "site_a")),
                                          static_cast<int>(number_at(p, "site_b")));
    }
    return FieldPattern::from_name(graph, kind);
}

}  // namespace

void validate_scenario_schema(const json& doc) {
    require(doc.is_object(), "document must be a JSON object");
    check_keys(doc, "scenario",
               {"graph", "pattern", "sweep", "pairs", "point", "fields", "select_m",
                "tolerances", "budget", "output", "workers"});
    require(doc.contains("graph"), "graph is required");
    if (doc.contains("sweep")) {
        const auto& s = doc["sweep"];
        check_keys(s, "sweep", {"h1_min", "h1_max", "h2_min", "h2_max", "step"});
        for (const char* k : {"h1_min", "h1_max", "h2_min", "h2_max", "step"})
            require(s.contains(k) && s[k].is_number(), std::string("sweep.") + k + " required");
        require(s["step"].get<double>() > 0, "sweep.step must be positive");
    }
    if (doc.contains("pairs")) {
        require(doc["pairs"].is_array(), "pairs must be an array of [i, j]");
        for (const auto& pr : doc["pairs"])
            require(pr.is_array() && pr.size() == 2, "each pair must be [i, j]");
    }
    if (doc.contains("point")) {
        check_keys(doc["point"], "point", {"h1", "h2"});
        require(doc["point"].contains("h1") && doc["point"].contains("h2"),
                "point needs h1 and h2");
    }
    if (doc.contains("fields")) require(doc["fields"].is_array(), "fields must be an array");
    if (doc.contains("tolerances"))
        check_keys(doc["tolerances"], "tolerances", {"degeneracy", "boundary"});
    if (doc.contains("budget"))
        check_keys(doc["budget"], "budget", {"max_sector_dim", "dense_threshold"});
    if (doc.contains("output")) check_keys(doc["output"], "output", {"path", "format"});
}

Scenario parse_scenario(const json& doc) {
    validate_scenario_schema(doc);
    Scenario s{parse_graph(doc.at("graph"))};
    if (doc.contains("pattern")) s.pattern = parse_pattern(doc["pattern"], s.graph);
    if (doc.contains("sweep")) {
        const auto& sw = doc["sweep"];
        s.sweep = GridSpec{sw["h1_min"].get<double>(), sw["h1_max"].get<double>(),
                           sw["h2_min"].get<double>(), sw["h2_max"].get<double>(),
                           sw["step"].get<double>()};
    }
    if (doc.contains("pairs"))
        for (const auto& pr : doc["pairs"]) {
            const int i = pr[0].get<int>(), j = pr[1].get<int>();
            if (i < 0 || j < 0 || i >= s.graph.size() || j >= s.graph.size())
                fail("pair site out of range");
            s.pairs.push_back({i, j});
        }
    if (doc.contains("point"))
        s.point = {doc["point"]["h1"].get<double>(), doc["point"]["h2"].get<double>()};
    if (doc.contains("fields")) {
        std::vector<double> h = doc["fields"].get<std::vector<double>>();
        if (h.size() != static_cast<std::size_t>(s.graph.size()))
            fail("fields length must equal the site count");
        s.fields = FieldConfig(std::move(h));
    }
    if (doc.contains("select_m")) s.select_twice_m = static_cast<int>(
        std::lround(2.0 * doc["select_m"].get<double>()));
    if (doc.contains("tolerances")) {
        const auto& t = doc["tolerances"];
        if (t.contains("degeneracy")) s.degeneracy_tol = t["degeneracy"].get<double>();
        if (t.contains("boundary")) s.boundary_tol = t["boundary"].get<double>();
    }
    if (doc.contains("budget")) {
        const auto& b = doc["budget"];
        if (b.contains("max_sector_dim"))
            s.max_sector_dim = b["max_sector_dim"].get<std::size_t>();
        if (b.contains("dense_threshold")) s.dense_threshold = b["dense_threshold"].get<int>();
    }
    if (doc.contains("workers")) s.workers = doc["workers"].get<int>();
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        if (o.contains("path")) s.output_path = o["path"].get<std::string>();
        if (o.contains("format")) {
            s.output_format = o["format"].get<std::string>();
            if (s.output_format != "csv" && s.output_format != "json")
                fail("output.format must be csv or json");
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ScenarioError("scenario is not valid JSON: " + std::string(e.what()));
    }
    return parse_scenario(doc);
}

json scenario_to_json(const Scenario& s) {
    json doc;
    json g;
    g["geometry"] = std::string(to_string(s.graph.geometry()));
    if (s.graph.geometry() == Geometry::custom) {
        for (const Site& site : s.graph.sites())
            g["sites"].push_back({{"index", site.index}, {"spin", site.spin()}});
        for (const Edge& e : s.graph.edges())
            g["edges"].push_back({{"i", e.i}, {"j", e.j}, {"j_xy", e.j_xy}, {"j_z", e.j_z}});
    } else {
        g["spin"] = s.graph.sites()[0].spin();
        g["j_xy"] = s.graph.edges()[0].j_xy;
        g["j_z"] = s.graph.edges()[0].j_z;
        if (s.graph.geometry() == Geometry::rectangular) {
            g["rows"] = s.graph.rows();
            g["cols"] = s.graph.cols();
        } else {
            g["n"] = s.graph.size();
        }
    }
    doc["graph"] = g;
    if (s.pattern) {
        json p;
        const std::string& kind = s.pattern->kind();
        p["kind"] = kind == "zero_bulk_at" ? "custom" : kind;  // zero_bulk_at round-trips as coefficients
        if (kind == "custom" || kind == "zero_bulk_at") {
            p["kind"] = "custom";
            json c1 = json::array(), c2 = json::array();
            for (const auto& c : s.pattern->coefficients()) {
                c1.push_back(c[0]);
                c2.push_back(c[1]);
            }
            p["coeff_h1"] = c1;
            p["coeff_h2"] = c2;
        }
        doc["pattern"] = p;
    }
    if (s.sweep)
        doc["sweep"] = {{"h1_min", s.sweep->h1_min}, {"h1_max", s.sweep->h1_max},
                        {"h2_min", s.sweep->h2_min}, {"h2_max", s.sweep->h2_max},
                        {"step", s.sweep->step}};
    if (!s.pairs.empty()) {
        json pairs = json::array();
        for (const auto& [i, j] : s.pairs) pairs.push_back({i, j});
        doc["pairs"] = pairs;
    }
    if (s.point) doc["point"] = {{"h1", s.point->first}, {"h2", s.point->second}};
    if (s.fields) doc["fields"] = s.fields->h;
    if (s.select_twice_m) doc["select_m"] = 0.5 * *s.select_twice_m;
    doc["tolerances"] = {{"degeneracy", s.degeneracy_tol}, {"boundary", s.boundary_tol}};
    doc["budget"] = {{"max_sector_dim", s.max_sector_dim},
                     {"dense_threshold", s.dense_threshold}};
    if (s.workers != 1) doc["workers"] = s.workers;
    if (!s.output_path.empty() || s.output_format != "csv")
        doc["output"] = {{"path", s.output_path}, {"format", s.output_format}};
    return doc;
}

}  // namespace xxz

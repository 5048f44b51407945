#include "sleepcell/scenario_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sleepcell::io {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
}

struct Entry {
    std::string value;
    int line;
};

// section -> key -> value, with duplicate detection at parse time
using Sections = std::map<std::string, std::map<std::string, Entry>>;

Sections parse_sections(const std::string& text, const std::string& name) {
    static const std::set<std::string> known = {"layout",  "loads",    "fading",    "power",
                                               "scheme",  "numerics", "simulation"};
    Sections out;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                fail(name, line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!known.count(section))
                fail(name, line, "unknown section [" + section + "]");
            out[section];
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail(name, line, "expected key = value");
        if (section.empty())
            fail(name, line, "key outside any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            fail(name, line, "empty key");
        if (value.empty())
            fail(name, line, "empty value for '" + key + "'");
        auto [it, fresh] = out[section].emplace(key, Entry{value, line});
        if (!fresh)
            fail(name, line,
                 "duplicate key '" + key + "' (first at line " + std::to_string(it->second.line) +
                     ")");
    }
    return out;
}

// Pulls typed values out of one section, tracking which keys were consumed so
// leftovers can be reported as unknown.
class Reader {
public:
    Reader(const Sections& all, const std::string& section, const std::string& name)
        : name_(name) {
        const auto it = all.find(section);
        if (it != all.end())
            entries_ = &it->second;
    }

    bool has(const std::string& key) const { return entries_ && entries_->count(key); }

    template <class F>
    void take(const std::string& key, F&& apply) {
        if (!has(key))
            return;
        const Entry& e = entries_->at(key);
        used_.insert(key);
        apply(e.value, e.line);
    }

    long integer(const std::string& value, int line) const {
        std::size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(value, &pos);
        } catch (const std::exception&) {
            fail(name_, line, "not an integer: '" + value + "'");
        }
        if (pos != value.size())
            fail(name_, line, "trailing characters after integer: '" + value + "'");
        return v;
    }

    double real(const std::string& value, int line) const {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &pos);
        } catch (const std::exception&) {
            fail(name_, line, "not a number: '" + value + "'");
        }
        if (pos != value.size())
            fail(name_, line, "trailing characters after number: '" + value + "'");
        return v;
    }

    std::uint64_t unsigned64(const std::string& value, int line) const {
        // stoull would happily wrap a negative sign; reject it up front
        if (!value.empty() && value[0] == '-')
            fail(name_, line, "not an unsigned integer: '" + value + "'");
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(value, &pos);
        } catch (const std::exception&) {
            fail(name_, line, "not an unsigned integer: '" + value + "'");
        }
        if (pos != value.size())
            fail(name_, line, "trailing characters after integer: '" + value + "'");
        return v;
    }

    std::vector<long> integer_list(const std::string& value, int line) const {
        std::string cleaned = value;
        std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
        std::istringstream in(cleaned);
        std::vector<long> out;
        std::string tok;
        while (in >> tok)
            out.push_back(integer(tok, line));
        if (out.empty())
            fail(name_, line, "empty list");
        return out;
    }

    void finish(const std::string& section) const {
        if (!entries_)
            return;
        for (const auto& [key, e] : *entries_)
            if (!used_.count(key))
                fail(name_, e.line, "unknown key '" + key + "' in [" + section + "]");
    }

private:
    const std::string& name_;
    const std::map<std::string, Entry>* entries_ = nullptr;
    std::set<std::string> used_;
};

}  // namespace

ScenarioFile parse_scenario_text(const std::string& text, const std::string& name) {
    const Sections sections = parse_sections(text, name);

    int tiers = 2;
    double radius = 500.0;
    int default_load = 5;
    std::map<std::size_t, int> cell_loads;
    bool have_u_th = false, have_sleeping = false;
    std::vector<long> sleeping;

    ScenarioFile out;
    Scenario& scn = out.scenario;

    Reader layout(sections, "layout", name);
    layout.take("tiers", [&](const std::string& v, int l) {
        tiers = static_cast<int>(layout.integer(v, l));
    });
    layout.take("radius",
                [&](const std::string& v, int l) { radius = layout.real(v, l); });
    layout.finish("layout");

    // [loads] carries one open-ended key family, so it is read directly:
    // 'default' plus any number of 'cell<N>' overrides
    Reader loads(sections, "loads", name);
    loads.take("default", [&](const std::string& v, int l) {
        default_load = static_cast<int>(loads.integer(v, l));
    });
    if (const auto lit = sections.find("loads"); lit != sections.end()) {
        for (const auto& [key, e] : lit->second) {
            if (key == "default")
                continue;
            const bool cellkey =
                key.size() > 4 && key.rfind("cell", 0) == 0 &&
                std::all_of(key.begin() + 4, key.end(),
                            [](unsigned char ch) { return std::isdigit(ch); });
            if (!cellkey)
                fail(name, e.line, "unknown key '" + key + "' in [loads]");
            std::size_t cell = 0;
            try {
                cell = std::stoul(key.substr(4));
            } catch (const std::out_of_range&) {
                fail(name, e.line, "cell index out of range in '" + key + "'");
            }
            cell_loads[cell] = static_cast<int>(loads.integer(e.value, e.line));
        }
    }

    Reader fading(sections, "fading", name);
    fading.take("zeta_shape",
                [&](const std::string& v, int l) { scn.zeta.kappa = fading.real(v, l); });
    fading.take("zeta_scale",
                [&](const std::string& v, int l) { scn.zeta.theta = fading.real(v, l); });
    fading.take("chi_shape",
                [&](const std::string& v, int l) { scn.chi.kappa = fading.real(v, l); });
    fading.take("chi_scale",
                [&](const std::string& v, int l) { scn.chi.theta = fading.real(v, l); });
    fading.take("beta", [&](const std::string& v, int l) { scn.beta = fading.real(v, l); });
    fading.finish("fading");

    Reader power(sections, "power", name);
    power.take("transmit", [&](const std::string& v, int l) { scn.P = power.real(v, l); });
    power.take("alpha", [&](const std::string& v, int l) { scn.alpha = power.real(v, l); });
    power.take("static",
               [&](const std::string& v, int l) { scn.power.P_static = power.real(v, l); });
    power.take("sleep",
               [&](const std::string& v, int l) { scn.power.P_sleep = power.real(v, l); });
    power.take("delta_dyn",
               [&](const std::string& v, int l) { scn.power.delta_dyn = power.real(v, l); });
    power.take("noise", [&](const std::string& v, int l) { scn.sigma2 = power.real(v, l); });
    power.finish("power");

    Reader scheme(sections, "scheme", name);
    scheme.take("scheduling", [&](const std::string& v, int l) {
        if (v == "greedy")
            scn.scheduling = Scheduling::greedy;
        else if (v == "rr" || v == "round_robin")
            scn.scheduling = Scheduling::round_robin;
        else
            fail(name, l, "scheduling must be greedy or rr");
    });
    scheme.take("association", [&](const std::string& v, int l) {
        if (v == "mmap")
            scn.association = AssociationScheme::mmap;
        else if (v == "mrsp")
            scn.association = AssociationScheme::mrsp;
        else if (v == "hybrid")
            scn.association = AssociationScheme::hybrid;
        else
            fail(name, l, "association must be mmap, mrsp or hybrid");
    });
    scheme.take("u_th", [&](const std::string& v, int l) {
        out.u_th = static_cast<int>(scheme.integer(v, l));
        have_u_th = true;
    });
    scheme.take("sleeping", [&](const std::string& v, int l) {
        sleeping = scheme.integer_list(v, l);
        have_sleeping = true;
    });
    scheme.take("q", [&](const std::string& v, int l) { scn.Q = scheme.real(v, l); });
    scheme.finish("scheme");

    Reader numerics(sections, "numerics", name);
    numerics.take("flavor", [&](const std::string& v, int l) {
        if (v == "series")
            scn.flavor = chan::StatFlavor::series;
        else if (v == "zones")
            scn.flavor = chan::StatFlavor::zones;
        else
            fail(name, l, "flavor must be series or zones");
    });
    numerics.take("series_max_terms", [&](const std::string& v, int l) {
        scn.series.max_terms = static_cast<int>(numerics.integer(v, l));
    });
    numerics.take("series_tail_tol",
                  [&](const std::string& v, int l) { scn.series.tail_tol = numerics.real(v, l); });
    numerics.take("series_grid_points", [&](const std::string& v, int l) {
        scn.series.grid_points = static_cast<int>(numerics.integer(v, l));
    });
    numerics.take("radial_zones", [&](const std::string& v, int l) {
        scn.disc.radial_zones = static_cast<int>(numerics.integer(v, l));
    });
    numerics.take("angular_intervals", [&](const std::string& v, int l) {
        scn.disc.angular_intervals = static_cast<int>(numerics.integer(v, l));
    });
    numerics.take("enumeration", [&](const std::string& v, int l) {
        if (v == "exact")
            scn.enumeration.exact = true;
        else if (v == "sampled")
            scn.enumeration.exact = false;
        else
            fail(name, l, "enumeration must be exact or sampled");
    });
    numerics.take("enum_samples", [&](const std::string& v, int l) {
        scn.enumeration.samples = numerics.integer(v, l);
    });
    numerics.take("enum_seed", [&](const std::string& v, int l) {
        scn.enumeration.seed = numerics.unsigned64(v, l);
    });
    numerics.finish("numerics");

    Reader simulation(sections, "simulation", name);
    simulation.take("iterations", [&](const std::string& v, int l) {
        out.sim.iterations = simulation.integer(v, l);
    });
    simulation.take("seed", [&](const std::string& v, int l) {
        out.sim.seed = simulation.unsigned64(v, l);
    });
    simulation.take("threads", [&](const std::string& v, int l) {
        out.sim.threads = static_cast<int>(simulation.integer(v, l));
    });
    simulation.finish("simulation");

    // ==== validation: collect everything, then throw once ====

    std::vector<std::string> bad;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok)
            bad.push_back(msg);
    };
    check(tiers >= 0, "tiers must be >= 0");
    check(tiers <= 100, "tiers must be at most 100");
    check(radius > 0.0, "radius must be positive");
    check(scn.beta > 2.0, "beta must exceed 2 (cross-power moments diverge otherwise)");
    check(scn.zeta.kappa > 0.0 && scn.zeta.theta > 0.0, "zeta shape and scale must be positive");
    check(scn.chi.kappa > 0.0 && scn.chi.theta > 0.0, "chi shape and scale must be positive");
    check(scn.P > 0.0, "transmit power must be positive");
    check(scn.alpha >= 1.0, "alpha must be at least 1");
    check(scn.power.P_static >= 0.0, "static power must be nonnegative");
    check(scn.power.P_sleep >= 0.0, "sleep power must be nonnegative");
    check(scn.power.delta_dyn >= 0.0, "delta_dyn must be nonnegative");
    check(scn.sigma2 >= 0.0, "noise must be nonnegative");
    check(scn.Q > 0.0, "q must be positive");
    check(default_load >= 0, "default load must be nonnegative");
    for (const auto& [cell, u] : cell_loads)
        check(u >= 0, "cell" + std::to_string(cell) + " load must be nonnegative");
    check(!(have_u_th && have_sleeping), "u_th and an explicit sleeping set are exclusive");
    check(!have_u_th || out.u_th >= 0, "u_th must be nonnegative");
    check(scn.series.max_terms >= 1, "series_max_terms must be at least 1");
    check(scn.series.tail_tol > 0.0, "series_tail_tol must be positive");
    check(scn.series.grid_points >= 16, "series_grid_points must be at least 16");
    check(scn.disc.radial_zones >= 1, "radial_zones must be at least 1");
    check(scn.disc.angular_intervals >= 1, "angular_intervals must be at least 1");
    check(scn.enumeration.samples >= 1, "enum_samples must be at least 1");
    check(out.sim.iterations >= 1, "iterations must be at least 1");
    check(out.sim.threads >= 1, "threads must be at least 1");

    if (bad.empty()) {
        scn.layout = geom::build_tier_layout(tiers, radius);
        scn.loads.assign(scn.layout.size(), default_load);
        for (const auto& [cell, u] : cell_loads) {
            if (cell >= scn.loads.size()) {
                bad.push_back("cell" + std::to_string(cell) + " is outside the layout");
                continue;
            }
            scn.loads[cell] = u;
        }
        if (have_sleeping) {
            out.explicit_sleep = true;
            std::set<std::size_t> uniq;
            for (long c : sleeping) {
                if (c < 0 || static_cast<std::size_t>(c) >= scn.layout.size())
                    bad.push_back("sleeping cell " + std::to_string(c) +
                                  " is outside the layout");
                else if (!uniq.insert(static_cast<std::size_t>(c)).second)
                    bad.push_back("sleeping cell " + std::to_string(c) + " listed twice");
            }
            if (bad.empty()) {
                scn.pattern = geom::SleepPattern{};
                for (std::size_t i = 0; i < scn.layout.size(); ++i)
                    (uniq.count(i) ? scn.pattern.sleeping : scn.pattern.active).push_back(i);
            }
        } else {
            // the threshold helper refuses an all-asleep outcome on its own;
            // fold that into the collected report
            try {
                scn.pattern = geom::select_sleep_pattern(scn.loads, out.u_th);
            } catch (const std::exception&) {
                bad.push_back("every cell is asleep; nothing can serve");
            }
        }
        if (bad.empty())
            check(!scn.pattern.active.empty(), "every cell is asleep; nothing can serve");
    }

    if (!bad.empty()) {
        std::string msg = name + ": invalid scenario";
        for (const auto& b : bad)
            msg += "\n  - " + b;
        throw std::runtime_error(msg);
    }
    return out;
}

ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(path + ": cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

}  // namespace sleepcell::io

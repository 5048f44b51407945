#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "sleepcell/scenario_io.hpp"

using namespace sleepcell;

namespace {

// message produced when `fn` throws, empty string if it does not
template <class F>
std::string thrown_message(F&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("empty text falls back to the documented defaults") {
    const io::ScenarioFile f = io::parse_scenario_text("");
    const Scenario& s = f.scenario;

    CHECK(s.layout.size() == 19);
    CHECK(s.layout.R == 500.0);
    CHECK(s.layout.cells[0].center.x == 0.0);
    CHECK(s.layout.cells[0].center.y == 0.0);
    REQUIRE(s.loads.size() == 19);
    for (int u : s.loads)
        CHECK(u == 5);
    // all loads sit above the default threshold, so nobody sleeps
    CHECK(f.u_th == 2);
    CHECK_FALSE(f.explicit_sleep);
    CHECK(s.pattern.sleeping.empty());
    CHECK(s.pattern.active.size() == 19);

    CHECK(s.scheduling == Scheduling::greedy);
    CHECK(s.association == AssociationScheme::mmap);
    CHECK(s.zeta.kappa == 0.5);
    CHECK(s.zeta.theta == 1.0);
    CHECK(s.chi.kappa == 2.0);
    CHECK(s.chi.theta == 1.0);
    CHECK(s.P == 1.0);
    CHECK(s.beta == 2.6);
    CHECK(s.alpha == 1.0);
    CHECK(s.sigma2 == 1e-16);
    CHECK(s.Q == 1.0);
    CHECK(s.disc.radial_zones == 50);
    CHECK(s.disc.angular_intervals == 10);
    CHECK(s.flavor == chan::StatFlavor::series);
    CHECK(s.series.max_terms == 25);
    CHECK(s.series.tail_tol == 1e-8);
    CHECK(s.series.grid_points == 2000);
    CHECK(s.enumeration.exact);
    CHECK(s.enumeration.samples == 100000);
    CHECK(s.enumeration.seed == 1);
    CHECK(s.power.P_static == 200.0);
    CHECK(s.power.P_sleep == 2.0);
    CHECK(s.power.delta_dyn == 3.77);

    CHECK(f.sim.iterations == 100000);
    CHECK(f.sim.seed == 1);
    CHECK(f.sim.threads == 1);
}

TEST_CASE("a fully specified file reads back every key") {
    const std::string text =
        "# comment line\n"
        "; alternative comment\n"
        "[layout]\n"
        "tiers = 1\n"
        "radius = 250\n"
        "\n"
        "[loads]\n"
        "default = 4\n"
        "cell0 = 1\n"
        "cell3 = 0\n"
        "[fading]\n"
        "zeta_shape = 1.5\n"
        "zeta_scale = 2.5\n"
        "chi_shape = 3\n"
        "chi_scale = 0.5\n"
        "beta = 3.1\n"
        "[power]\n"
        "transmit = 2\n"
        "alpha = 1.5\n"
        "static = 100\n"
        "sleep = 1\n"
        "delta_dyn = 2.5\n"
        "noise = 1e-12\n"
        "[scheme]\n"
        "scheduling = rr\n"
        "association = mrsp\n"
        "u_th = 1\n"
        "q = 0.5\n"
        "[numerics]\n"
        "flavor = zones\n"
        "series_max_terms = 30\n"
        "series_tail_tol = 1e-6\n"
        "series_grid_points = 500\n"
        "radial_zones = 20\n"
        "angular_intervals = 5\n"
        "enumeration = sampled\n"
        "enum_samples = 5000\n"
        "enum_seed = 42\n"
        "[simulation]\n"
        "iterations = 2000\n"
        "seed = 9\n"
        "threads = 3\n";
    const io::ScenarioFile f = io::parse_scenario_text(text, "full.ini");
    const Scenario& s = f.scenario;

    CHECK(s.layout.size() == 7);
    CHECK(s.layout.R == 250.0);
    REQUIRE(s.loads.size() == 7);
    CHECK(s.loads[0] == 1);
    CHECK(s.loads[1] == 4);
    CHECK(s.loads[2] == 4);
    CHECK(s.loads[3] == 0);
    CHECK(s.loads[6] == 4);
    CHECK(s.zeta.kappa == 1.5);
    CHECK(s.zeta.theta == 2.5);
    CHECK(s.chi.kappa == 3.0);
    CHECK(s.chi.theta == 0.5);
    CHECK(s.beta == 3.1);
    CHECK(s.P == 2.0);
    CHECK(s.alpha == 1.5);
    CHECK(s.power.P_static == 100.0);
    CHECK(s.power.P_sleep == 1.0);
    CHECK(s.power.delta_dyn == 2.5);
    CHECK(s.sigma2 == 1e-12);
    CHECK(s.scheduling == Scheduling::round_robin);
    CHECK(s.association == AssociationScheme::mrsp);
    CHECK(f.u_th == 1);
    CHECK_FALSE(f.explicit_sleep);
    CHECK(s.Q == 0.5);
    CHECK(s.flavor == chan::StatFlavor::zones);
    CHECK(s.series.max_terms == 30);
    CHECK(s.series.tail_tol == 1e-6);
    CHECK(s.series.grid_points == 500);
    CHECK(s.disc.radial_zones == 20);
    CHECK(s.disc.angular_intervals == 5);
    CHECK_FALSE(s.enumeration.exact);
    CHECK(s.enumeration.samples == 5000);
    CHECK(s.enumeration.seed == 42);
    CHECK(f.sim.iterations == 2000);
    CHECK(f.sim.seed == 9);
    CHECK(f.sim.threads == 3);

    // loads 1 and 0 sit at or below the threshold of 1
    REQUIRE(s.pattern.sleeping.size() == 2);
    CHECK(s.pattern.sleeping[0] == 0);
    CHECK(s.pattern.sleeping[1] == 3);
    CHECK(s.pattern.active.size() == 5);
}

TEST_CASE("explicit sleeping list matches the threshold rule it replaces") {
    const std::string common =
        "[layout]\ntiers = 1\n"
        "[loads]\ndefault = 4\ncell0 = 1\ncell3 = 0\n";
    const io::ScenarioFile by_th =
        io::parse_scenario_text(common + "[scheme]\nu_th = 1\n", "a.ini");
    const io::ScenarioFile by_list =
        io::parse_scenario_text(common + "[scheme]\nsleeping = 0, 3\n", "b.ini");
    const io::ScenarioFile by_spaces =
        io::parse_scenario_text(common + "[scheme]\nsleeping = 3 0\n", "c.ini");

    CHECK_FALSE(by_th.explicit_sleep);
    CHECK(by_list.explicit_sleep);
    CHECK(by_spaces.explicit_sleep);
    CHECK(by_list.scenario.pattern.sleeping == by_th.scenario.pattern.sleeping);
    CHECK(by_list.scenario.pattern.active == by_th.scenario.pattern.active);
    // listing order does not matter; patterns come out sorted
    CHECK(by_spaces.scenario.pattern.sleeping == by_list.scenario.pattern.sleeping);
}

TEST_CASE("parse errors carry the file name and line number") {
    auto msg_of = [](const std::string& text) {
        return thrown_message([&] { io::parse_scenario_text(text, "cfg"); });
    };

    SUBCASE("missing equals sign") {
        const std::string m = msg_of("[layout]\ntiers 2\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "expected key = value"));
    }
    SUBCASE("key before any section") {
        const std::string m = msg_of("tiers = 2\n");
        CHECK(contains(m, "cfg:1"));
        CHECK(contains(m, "outside any section"));
    }
    SUBCASE("unknown section") {
        const std::string m = msg_of("\n[turbo]\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "unknown section [turbo]"));
    }
    SUBCASE("unterminated section header") {
        const std::string m = msg_of("[layout\n");
        CHECK(contains(m, "cfg:1"));
        CHECK(contains(m, "unterminated"));
    }
    SUBCASE("unknown key in a known section") {
        const std::string m = msg_of("[layout]\nrings = 2\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "unknown key 'rings' in [layout]"));
    }
    SUBCASE("non-numeric cell override key") {
        const std::string m = msg_of("[loads]\ncellx = 2\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "unknown key 'cellx' in [loads]"));
    }
    SUBCASE("absurdly large cell index") {
        const std::string m = msg_of("[loads]\ncell99999999999999999999999 = 2\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "out of range"));
    }
    SUBCASE("duplicate key points back at the first occurrence") {
        const std::string m = msg_of("[layout]\ntiers = 2\ntiers = 3\n");
        CHECK(contains(m, "cfg:3"));
        CHECK(contains(m, "duplicate key 'tiers'"));
        CHECK(contains(m, "line 2"));
    }
    SUBCASE("empty value") {
        const std::string m = msg_of("[layout]\ntiers =\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "empty value for 'tiers'"));
    }
    SUBCASE("malformed integer") {
        const std::string m = msg_of("[layout]\ntiers = two\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "not an integer"));
    }
    SUBCASE("trailing characters after a number") {
        const std::string m = msg_of("[layout]\nradius = 500 m\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "trailing characters"));
    }
    SUBCASE("negative seed is not an unsigned integer") {
        const std::string m = msg_of("[simulation]\nseed = -3\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "not an unsigned integer"));
    }
    SUBCASE("bad scheduling enum") {
        const std::string m = msg_of("[scheme]\nscheduling = fifo\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "greedy or rr"));
    }
    SUBCASE("bad association enum") {
        const std::string m = msg_of("[scheme]\nassociation = nearest\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "mmap, mrsp or hybrid"));
    }
    SUBCASE("bad numerics flavor") {
        const std::string m = msg_of("[numerics]\nflavor = magic\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "series or zones"));
    }
    SUBCASE("empty sleeping list") {
        const std::string m = msg_of("[scheme]\nsleeping = ,\n");
        CHECK(contains(m, "cfg:2"));
        CHECK(contains(m, "empty list"));
    }
}

TEST_CASE("validation reports every violated rule at once") {
    const std::string text =
        "[layout]\n"
        "tiers = 1\n"
        "radius = -5\n"
        "[fading]\n"
        "beta = 1.9\n"
        "zeta_shape = 0\n"
        "[power]\n"
        "alpha = 0.5\n"
        "[scheme]\n"
        "u_th = 1\n"
        "sleeping = 0\n"
        "q = 0\n"
        "[simulation]\n"
        "threads = 0\n";
    const std::string m =
        thrown_message([&] { io::parse_scenario_text(text, "bad.ini"); });
    REQUIRE_FALSE(m.empty());
    CHECK(contains(m, "bad.ini: invalid scenario"));
    CHECK(contains(m, "radius must be positive"));
    CHECK(contains(m, "beta must exceed 2"));
    CHECK(contains(m, "cross-power moments diverge"));
    CHECK(contains(m, "zeta shape and scale must be positive"));
    CHECK(contains(m, "alpha must be at least 1"));
    CHECK(contains(m, "u_th and an explicit sleeping set are exclusive"));
    CHECK(contains(m, "q must be positive"));
    CHECK(contains(m, "threads must be at least 1"));
}

TEST_CASE("sleep lists are checked against the layout") {
    SUBCASE("duplicate entry") {
        const std::string m = thrown_message([] {
            io::parse_scenario_text("[layout]\ntiers = 1\n[scheme]\nsleeping = 3, 3\n", "d.ini");
        });
        CHECK(contains(m, "sleeping cell 3 listed twice"));
    }
    SUBCASE("index outside the layout") {
        const std::string m = thrown_message([] {
            io::parse_scenario_text("[layout]\ntiers = 1\n[scheme]\nsleeping = 99\n", "d.ini");
        });
        CHECK(contains(m, "sleeping cell 99 is outside the layout"));
    }
    SUBCASE("negative index") {
        const std::string m = thrown_message([] {
            io::parse_scenario_text("[layout]\ntiers = 1\n[scheme]\nsleeping = -1\n", "d.ini");
        });
        CHECK(contains(m, "sleeping cell -1 is outside the layout"));
    }
    SUBCASE("load override outside the layout") {
        const std::string m = thrown_message([] {
            io::parse_scenario_text("[layout]\ntiers = 0\n[loads]\ncell5 = 3\n", "d.ini");
        });
        CHECK(contains(m, "cell5 is outside the layout"));
    }
    SUBCASE("sleeping everyone leaves nothing to serve") {
        const std::string m = thrown_message([] {
            io::parse_scenario_text("[layout]\ntiers = 0\n[scheme]\nsleeping = 0\n", "d.ini");
        });
        CHECK(contains(m, "every cell is asleep"));
    }
    SUBCASE("threshold above every load also empties the network") {
        const std::string m = thrown_message([] {
            io::parse_scenario_text("[scheme]\nu_th = 5\n", "d.ini");
        });
        CHECK(contains(m, "every cell is asleep"));
    }
    SUBCASE("tiers beyond the supported cap") {
        const std::string m = thrown_message(
            [] { io::parse_scenario_text("[layout]\ntiers = 101\n", "d.ini"); });
        CHECK(contains(m, "tiers must be at most 100"));
    }
}

TEST_CASE("files on disk round-trip through the loader") {
    const std::string path = "/tmp/sleepcell_scn_io_test.ini";
    {
        std::ofstream out(path, std::ios::binary);
        REQUIRE(out.good());
        out << "[layout]\ntiers = 1\nradius = 300\n[scheme]\nu_th = 0\n"
            << "[loads]\ncell2 = 0\n";
    }
    const io::ScenarioFile f = io::load_scenario_file(path);
    CHECK(f.scenario.layout.size() == 7);
    CHECK(f.scenario.layout.R == 300.0);
    REQUIRE(f.scenario.pattern.sleeping.size() == 1);
    CHECK(f.scenario.pattern.sleeping[0] == 2);
    std::remove(path.c_str());

    const std::string m =
        thrown_message([] { io::load_scenario_file("/tmp/definitely_missing_scn.ini"); });
    CHECK(contains(m, "cannot open scenario file"));

    // errors from a loaded file are tagged with its path
    {
        std::ofstream out(path, std::ios::binary);
        out << "[layout]\ntiers = x\n";
    }
    const std::string m2 = thrown_message([&] { io::load_scenario_file(path); });
    CHECK(contains(m2, path + ":2"));
    std::remove(path.c_str());
}

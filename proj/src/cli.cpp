#include "gwt/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gwt/compensated.hpp"
#include "gwt/convergence.hpp"
#include "gwt/errors.hpp"
#include "gwt/events.hpp"
#include "gwt/exact.hpp"
#include "gwt/offspring.hpp"
#include "gwt/parallel.hpp"
#include "gwt/report.hpp"
#include "gwt/rng.hpp"
#include "gwt/samplers.hpp"
#include "gwt/tree.hpp"

namespace gwt {

namespace {

std::int64_t parse_int(const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (s.empty() || pos != s.size()) throw ConfigError("expected an integer, got '" + s + "'");
    return v;
}

double parse_real(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (s.empty() || pos != s.size()) throw ConfigError("expected a number, got '" + s + "'");
    return v;
}

// Accepts a shorthand name, an inline JSON object, or a path to a JSON file.
OffspringDistribution parse_dist(const std::string& text) {
    if (text == "binary") return OffspringDistribution::from_pmf({0.5, 0.0, 0.5});
    if (text == "subcritical") return OffspringDistribution::from_pmf({0.6, 0.0, 0.4});
    if (text.rfind("geometric:", 0) == 0)
        return OffspringDistribution::geometric_mixture(parse_real(text.substr(10)));
    if (text.rfind("poisson:", 0) == 0)
        return OffspringDistribution::poisson(parse_real(text.substr(8)));
    if (!text.empty() && text.front() == '{') return OffspringDistribution::from_json_spec(text);
    std::ifstream in(text);
    if (!in)
        throw ConfigError("'" + text +
                          "' is neither a known shorthand (binary, subcritical, geometric:Q, "
                          "poisson:L), inline JSON, nor a readable file");
    std::stringstream ss;
    ss << in.rdbuf();
    return OffspringDistribution::from_json_spec(ss.str());
}

// Event grammar: height>=N | height=N[@W] | card=N[@W] | card>=N |
// marks{SET}=N[@W] | marks{SET}>=N | genG=N.  SET as in DegreeSet::parse.
EventSpec parse_event(const std::string& text) {
    std::string body = text;
    std::optional<std::int64_t> width;
    auto at = body.rfind('@');
    if (at != std::string::npos) {
        width = parse_int(body.substr(at + 1));
        if (*width < 1) throw ConfigError("event width must be >= 1: " + text);
        body = body.substr(0, at);
    }
    bool ge = false;
    std::string lhs, rhs;
    auto ge_pos = body.find(">=");
    if (ge_pos != std::string::npos) {
        ge = true;
        lhs = body.substr(0, ge_pos);
        rhs = body.substr(ge_pos + 2);
    } else {
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("event needs '=' or '>=': " + text);
        lhs = body.substr(0, eq);
        rhs = body.substr(eq + 1);
    }
    if (ge && width) throw ConfigError("'>=' already means an unbounded window: " + text);
    std::int64_t n = parse_int(rhs);

    if (lhs == "height") {
        EventSpec ev = ge ? EventSpec::height_at_least(n) : EventSpec::height_exactly(n);
        if (width) ev.width = width;
        return ev;
    }
    if (lhs == "card") {
        EventSpec ev = EventSpec::card_exactly(n);
        if (ge)
            ev.width = std::nullopt;
        else if (width)
            ev.width = width;
        return ev;
    }
    if (lhs.rfind("marks{", 0) == 0 && lhs.back() == '}') {
        DegreeSet set = DegreeSet::parse(lhs.substr(6, lhs.size() - 7));
        if (ge) return EventSpec::mark_count(set, n, std::nullopt);
        return EventSpec::mark_count(set, n, width ? *width : 1);
    }
    if (lhs.rfind("gen", 0) == 0) {
        if (ge || width)
            throw ConfigError("generation-size events are point events only: " + text);
        return EventSpec::generation_size(parse_int(lhs.substr(3)), n);
    }
    throw ConfigError("unknown event functional in '" + text +
                      "' (expected height, card, marks{...}, or genG)");
}

std::string join_degrees(const std::vector<std::int64_t>& degrees) {
    std::ostringstream os;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (i) os << ' ';
        os << degrees[i];
    }
    return os.str();
}

double geometric_q_of(const OffspringDistribution& p) {
    nlohmann::json j = nlohmann::json::parse(p.to_json_spec());
    if (j.value("kind", std::string{}) != "geometric_mixture")
        throw ConfigError(
            "this route is closed-form for the geometric mixture only; use --dist geometric:Q");
    return j["q"].get<double>();
}

void emit(const std::string& prefix, const std::string& csv, const nlohmann::json& js) {
    write_file(prefix + ".csv", csv);
    write_file(prefix + ".json", js.dump(2) + "\n");
    std::cout << "wrote " << prefix << ".csv " << prefix << ".json\n";
}

int code_for(const Error& e) {
    if (dynamic_cast<const BudgetExceeded*>(&e) ||
        dynamic_cast<const RejectionBudgetExceeded*>(&e) ||
        dynamic_cast<const InconsistentBudget*>(&e) ||
        dynamic_cast<const TruncationRefused*>(&e))
        return 3;
    if (dynamic_cast<const ZeroMassEvent*>(&e)) return 4;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const OutsideInterval*>(&e) || dynamic_cast<const MalformedEncoding*>(&e) ||
        dynamic_cast<const LatticeMiss*>(&e) || dynamic_cast<const NotALeaf*>(&e) ||
        dynamic_cast<const EmptySet*>(&e) || dynamic_cast<const EmptyMark*>(&e) ||
        dynamic_cast<const Supercritical*>(&e) || dynamic_cast<const SeriesDivergence*>(&e))
        return 2;
    return 1;
}

// Per-command argument bags.  Defaults chosen so every leaf command runs
// out of the box on the binary shorthand.

struct SampleArgs {
    std::string dist = "binary";
    std::uint64_t count = 1;
    std::uint64_t seed = 1;
    std::string format = "parens";
    bool kesten = false;
    std::int64_t height = 3;
    std::string event_text;
    bool exact_cycle = false;
    std::uint64_t max_nodes = 0;  // 0: unlimited
    std::uint64_t max_rejections = 1000000;
    std::string out;
};

struct ExactProgenyArgs {
    std::string dist = "binary";
    std::int64_t k = 1;
    std::int64_t nmax = 50;
    std::string out = "report";
};

struct ExactHeightArgs {
    std::string dist = "binary";
    std::int64_t nmax = 64;
    std::string out = "report";
};

struct ExactGenerationArgs {
    std::string dist = "binary";
    double q = -1.0;  // < 0: use --dist and the convolution path
    std::int64_t n = 10;
    std::int64_t kmax = 50;
    std::int64_t cap = 512;
    std::string out = "report";
};

struct ExactTreesArgs {
    std::string dist = "binary";
    std::int64_t card_max = 9;
    std::uint64_t budget = 20000;
    std::string out = "report";
};

struct ExactMarksArgs {
    std::string dist = "binary";
    std::string set = "0";
    std::int64_t cap = 512;
    std::string out = "report";
};

struct RatioArgs {
    std::string dist = "binary";
    std::string family = "height_ge";
    std::int64_t width = 0;  // 0: span of the relevant law
    std::string set = "0";
    std::int64_t n_lo = 1;
    std::int64_t nmax = 100;
    std::int64_t stride = 1;
    double tol = 0.01;
    std::string out = "report";
};

struct TVArgs {
    std::string dist = "binary";
    std::string family = "card";
    std::string set = "0";
    std::int64_t h = 2;
    bool mc = false;
    std::uint64_t replicates = 200000;
    std::uint64_t seed = 1;
    std::int64_t n_lo = 1;
    std::int64_t nmax = 9;
    std::int64_t stride = 0;  // 0: span lattice stride for card, else 1
    std::int64_t alpha = 0;   // 0: alpha tracks n
    std::int64_t card_max = 0;  // 0: per-family rule
    std::uint64_t budget = 200000;
    std::string out = "report";
};

struct TiltArgs {
    std::string dist = "subcritical";
    std::string set = "0";
    std::vector<double> thetas = {0.8, 1.0, 1.2};
    std::int64_t n = 2;
    std::int64_t card_max = 11;
    std::uint64_t budget = 200000;
    std::string out = "report";
};

struct TiltSolveArgs {
    std::string dist = "subcritical";
    std::string set = "all";
    double tol = 1e-10;
    std::string out = "report";
};

nlohmann::json base_config(const std::vector<std::string>& argv_copy, const std::string& command,
                           const OffspringDistribution& p) {
    return {{"argv", argv_copy},
            {"command", command},
            {"dist", nlohmann::json::parse(p.to_json_spec())},
            {"threads", worker_count()}};
}

void cmd_sample(const SampleArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    nlohmann::json cfg = base_config(argv_copy, "sample", p);
    cfg["seed"] = a.seed;
    cfg["format"] = a.format;

    if (a.kesten && !a.event_text.empty())
        throw ConfigError("--kesten and --event are mutually exclusive");
    if (a.exact_cycle && a.event_text.empty())
        throw ConfigError("--exact-cycle needs --event card=N");

    SamplerBudget budget;
    if (a.max_nodes) budget.max_nodes = a.max_nodes;
    budget.max_rejections = a.max_rejections;

    std::optional<EventSpec> ev;
    if (!a.event_text.empty()) {
        ev = parse_event(a.event_text);
        if (a.exact_cycle &&
            (ev->functional != Functional::Card || !ev->width || *ev->width != 1))
            throw ConfigError("--exact-cycle works for point events card=N only");
        if (ev->functional == Functional::Card && ev->width && *ev->width == 1) {
            EventSpec probe = *ev;
            if (auto orig = probe.snap_to_lattice(p))
                throw LatticeMiss("card=" + std::to_string(*orig) +
                                  " has zero mass for this offspring law; nearest attainable "
                                  "size is " +
                                  std::to_string(probe.n));
        }
    }

    bool json_format = a.format == "json" || a.kesten;
    std::ostringstream lines;
    nlohmann::json jtrees = nlohmann::json::array();
    for (std::uint64_t i = 0; i < a.count; ++i) {
        SplitMix64 rng = SplitMix64::substream(a.seed, i);
        nlohmann::json row;
        Tree t = Tree::leaf();
        if (a.kesten) {
            KestenPrefix kp = sample_kesten(p, a.height, rng, budget);
            nlohmann::json spine_labels = nlohmann::json::array();
            for (const NodeLabel& l : kp.spine_labels()) spine_labels.push_back(l.to_string());
            row = {{"degrees", kp.tree().tree().degrees()},
                   {"h", kp.tree().cap()},
                   {"spine", kp.spine()},
                   {"spine_labels", spine_labels}};
        } else {
            if (ev && a.exact_cycle) {
                t = sample_progeny_exact(p, ev->n, rng);
            } else if (ev) {
                ConditionedDraw d = sample_conditioned(p, *ev, rng, budget);
                t = d.tree;
                row["attempts"] = d.attempts;
                row["overflows"] = d.overflows;
            } else {
                t = sample_gw(p, rng, budget);
            }
            row["degrees"] = t.degrees();
            row["card"] = t.card();
            row["height"] = t.height();
        }
        if (json_format) {
            jtrees.push_back(row);
        } else if (a.format == "degrees") {
            lines << join_degrees(t.degrees()) << "\n";
        } else {
            lines << t.to_parens() << "\n";
        }
    }

    std::string text;
    if (json_format) {
        nlohmann::json doc{{"config", cfg}, {"trees", jtrees}};
        text = doc.dump(2) + "\n";
    } else {
        text = "# config " + cfg.dump() + "\n" + lines.str();
    }
    if (a.out.empty())
        std::cout << text;
    else {
        write_file(a.out, text);
        std::cout << "wrote " << a.out << "\n";
    }
}

void cmd_exact_progeny(const ExactProgenyArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    if (a.k < 1) throw ConfigError("--k must be >= 1");
    nlohmann::json cfg = base_config(argv_copy, "exact progeny", p);
    cfg["k"] = a.k;
    cfg["nmax"] = a.nmax;
    PMFVector pmf = dwass_pmf(p, a.k, a.nmax);
    emit(a.out, pmf_csv(pmf, cfg), pmf_json(pmf, cfg));
}

void cmd_exact_height(const ExactHeightArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    nlohmann::json cfg = base_config(argv_copy, "exact height", p);
    cfg["nmax"] = a.nmax;
    HeightLaws hl = height_laws(p, a.nmax);

    std::ostringstream csv;
    csv << "# config " << cfg.dump() << "\n";
    csv << "n,tail,pmf\n";
    char buf[96];
    for (std::int64_t n = 0; n <= a.nmax; ++n) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(n),
                      hl.tail[static_cast<std::size_t>(n)], hl.pmf[static_cast<std::size_t>(n)]);
        csv << buf;
    }
    nlohmann::json js{{"config", cfg}, {"tail", hl.tail}, {"pmf", hl.pmf}};
    emit(a.out, csv.str(), js);
}

void cmd_exact_generation(const ExactGenerationArgs& a,
                          const std::vector<std::string>& argv_copy) {
    if (a.q >= 0.0) {
        if (a.q <= 0.0 || a.q >= 1.0) throw ConfigError("--q must lie in (0,1)");
        OffspringDistribution p = OffspringDistribution::geometric_mixture(a.q);
        nlohmann::json cfg = base_config(argv_copy, "exact generation", p);
        cfg["q"] = a.q;
        cfg["n"] = a.n;
        cfg["method"] = "closed_form";
        PMFVector pmf;
        pmf.offset = 0;
        for (std::int64_t k = 0; k <= a.kmax; ++k)
            pmf.values.push_back(geometric_generation_pmf(a.q, a.n, k));
        emit(a.out, pmf_csv(pmf, cfg), pmf_json(pmf, cfg));
        return;
    }
    OffspringDistribution p = parse_dist(a.dist);
    nlohmann::json cfg = base_config(argv_copy, "exact generation", p);
    cfg["n"] = a.n;
    cfg["cap"] = a.cap;
    cfg["method"] = "convolution";
    PMFVector pmf = generation_size_pmf(p, a.n, a.cap);
    emit(a.out, pmf_csv(pmf, cfg), pmf_json(pmf, cfg));
}

void cmd_exact_trees(const ExactTreesArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    nlohmann::json cfg = base_config(argv_copy, "exact trees", p);
    cfg["card_max"] = a.card_max;
    std::vector<EnumeratedTree> all = enumerate_trees(p, a.card_max, a.budget);

    NeumaierSum mass;
    std::ostringstream csv;
    csv << "# config " << cfg.dump() << "\n";
    csv << "degrees,probability\n";
    nlohmann::json jt = nlohmann::json::array();
    char buf[40];
    for (const EnumeratedTree& et : all) {
        mass.add(et.probability);
        std::snprintf(buf, sizeof buf, "%.17g", et.probability);
        csv << join_degrees(et.tree.degrees()) << "," << buf << "\n";
        jt.push_back({{"degrees", et.tree.degrees()},
                      {"parens", et.tree.to_parens()},
                      {"probability", et.probability}});
    }
    nlohmann::json js{{"config", cfg}, {"trees", jt}, {"captured_mass", mass.value()}};
    emit(a.out, csv.str(), js);
    std::cout << all.size() << " trees, captured mass " << mass.value() << "\n";
}

void cmd_exact_marks(const ExactMarksArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    DegreeSet set = DegreeSet::parse(a.set);
    nlohmann::json cfg = base_config(argv_copy, "exact marks", p);
    cfg["set"] = set.to_string();
    cfg["cap"] = a.cap;
    MarkOffspring mo = mark_offspring(p, set, a.cap);

    std::ostringstream csv;
    csv << "# config " << cfg.dump() << "\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "# q %.17g mean %.17g lost_mass %.17g\n", mo.q,
                  mo.law.mean(), mo.lost_mass);
    csv << buf << "k,offspring,before_thinning\n";
    std::size_t rows = std::max(mo.law.probs().size(), mo.xtilde.values.size());
    for (std::size_t k = 0; k < rows; ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k,
                      mo.law(static_cast<std::int64_t>(k)),
                      mo.xtilde.at(static_cast<std::int64_t>(k)));
        csv << buf;
    }
    nlohmann::json js{{"config", cfg},
                      {"q", mo.q},
                      {"mean", mo.law.mean()},
                      {"lost_mass", mo.lost_mass},
                      {"offspring", mo.law.probs()},
                      {"before_thinning", {{"offset", mo.xtilde.offset}, {"values", mo.xtilde.values}}}};
    emit(a.out, csv.str(), js);
    std::cout << "q " << mo.q << ", offspring mean " << mo.law.mean() << "\n";
}

void cmd_converge_ratio(const RatioArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    nlohmann::json cfg = base_config(argv_copy, "converge ratio", p);
    cfg["family"] = a.family;

    EventSpec proto = EventSpec::height_at_least(1);
    if (a.family == "height_ge") {
        proto = EventSpec::height_at_least(1);
    } else if (a.family == "height_eq") {
        proto = EventSpec::height_exactly(1);
        if (a.width > 0) proto.width = a.width;
    } else if (a.family == "card") {
        std::int64_t w = a.width > 0 ? a.width : std::max<std::int64_t>(1, p.span());
        proto = EventSpec::card_window(1, w);
    } else if (a.family == "marks") {
        DegreeSet set = DegreeSet::parse(a.set);
        std::int64_t w = a.width;
        if (w <= 0) w = std::max<std::int64_t>(1, mark_offspring(p, set).law.span());
        proto = EventSpec::mark_count(set, 1, w);
        cfg["set"] = set.to_string();
    } else {
        throw ConfigError("unknown ratio family '" + a.family +
                          "' (expected height_ge, height_eq, card, or marks)");
    }
    if (proto.width) cfg["width"] = *proto.width;

    RatioReport r = ratio_sequence(p, proto, a.n_lo, a.nmax, a.stride, a.tol);
    emit(a.out, ratio_csv(r, cfg), ratio_json(r, cfg));
    std::cout << "final ratio " << r.points.back().ratio << ", target " << r.target
              << ", distance " << r.final_distance << (r.converged ? " (converged)" : "")
              << "\n";
}

void cmd_converge_tv(const TVArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    nlohmann::json cfg = base_config(argv_copy, "converge tv", p);
    cfg["family"] = a.family;
    cfg["h"] = a.h;
    cfg["method"] = a.mc ? "monte_carlo" : "exact";
    if (a.mc) {
        cfg["replicates"] = a.replicates;
        cfg["seed"] = a.seed;
    }

    std::int64_t stride = a.stride;
    if (stride <= 0) stride = (a.family == "card") ? std::max<std::int64_t>(1, p.span()) : 1;

    std::vector<TVReport> rows;
    std::uint64_t row_index = 0;
    for (std::int64_t n = a.n_lo; n <= a.nmax; n += stride, ++row_index) {
        TVReport row;
        if (a.family == "gen" && !a.mc) {
            if (a.h != 1)
                throw ConfigError("the exact generation-size route is closed-form at h=1 only; "
                                  "use --mc for larger h");
            std::int64_t alpha = a.alpha > 0 ? a.alpha : n;
            row = tv_generation_exact_h1(geometric_q_of(p), n, alpha);
        } else {
            EventSpec ev = EventSpec::card_exactly(1);
            std::int64_t card_max = a.card_max;
            if (a.family == "card") {
                ev = EventSpec::card_exactly(n);
                if (card_max <= 0) card_max = n;
            } else if (a.family == "height_ge") {
                ev = EventSpec::height_at_least(n);
                if (card_max <= 0) card_max = 4 * n + 1;
            } else if (a.family == "height_eq") {
                ev = EventSpec::height_exactly(n);
                if (card_max <= 0) card_max = 4 * n + 1;
            } else if (a.family == "marks") {
                ev = EventSpec::mark_count(DegreeSet::parse(a.set), n, 1);
                if (card_max <= 0) card_max = 3 * n + 2;
            } else if (a.family == "gen") {
                ev = EventSpec::generation_size(n, a.alpha > 0 ? a.alpha : n);
            } else {
                throw ConfigError("unknown tv family '" + a.family +
                                  "' (expected card, height_ge, height_eq, marks, or gen)");
            }
            if (a.mc)
                row = tv_at_height_mc(p, ev, a.h, a.replicates, a.seed + 7919 * row_index,
                                      1000000);
            else
                row = tv_at_height_exact(p, ev, a.h, card_max, a.budget);
        }
        rows.push_back(std::move(row));
    }
    emit(a.out, tv_csv(rows, cfg), tv_json(rows, cfg));
    if (!rows.empty())
        std::cout << "last point: " << rows.back().event << " tv " << rows.back().tv << "\n";
}

void cmd_converge_tilt(const TiltArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    DegreeSet set = DegreeSet::parse(a.set);
    nlohmann::json cfg = base_config(argv_copy, "converge tilt", p);
    cfg["set"] = set.to_string();
    cfg["n"] = a.n;
    cfg["card_max"] = a.card_max;
    TiltCheckReport r = tilt_invariance_check(p, set, a.thetas, a.n, a.card_max, a.budget);
    emit(a.out, tilt_csv(r, cfg), tilt_json(r, cfg));
    std::cout << "max discrepancy " << r.max_discrepancy << "\n";
}

void cmd_tilt_solve(const TiltSolveArgs& a, const std::vector<std::string>& argv_copy) {
    OffspringDistribution p = parse_dist(a.dist);
    DegreeSet set = DegreeSet::parse(a.set);
    nlohmann::json cfg = base_config(argv_copy, "tilt-solve", p);
    cfg["set"] = set.to_string();
    TiltedFamily family(p, set);
    TiltInterval iv = family.interval();
    std::optional<double> tc = family.critical_theta(a.tol);

    nlohmann::json js{{"config", cfg},
                      {"interval", {{"lo", iv.lo}, {"hi", iv.hi}}},
                      {"critical_theta", nullptr},
                      {"normalizer", nullptr},
                      {"tilted_mean", nullptr}};
    std::ostringstream csv;
    csv << "# config " << cfg.dump() << "\n";
    csv << "critical_theta,interval_lo,interval_hi,tilted_mean\n";
    char buf[160];
    if (tc) {
        double mean = family.tilt(*tc).mean();
        js["critical_theta"] = *tc;
        js["normalizer"] = family.normalizer(*tc);
        js["tilted_mean"] = mean;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", *tc, iv.lo, iv.hi, mean);
        csv << buf;
        std::cout << "critical theta " << *tc << " (tilted mean " << mean << ")\n";
    } else {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,\n", iv.lo, iv.hi);
        csv << buf;
        std::cout << "no critical member on the validity interval (" << iv.lo << ", " << iv.hi
                  << ")\n";
    }
    emit(a.out, csv.str(), js);
}

}  // namespace

int run_cli(int argc, char** argv) {
    std::vector<std::string> argv_copy(argv, argv + argc);
    CLI::App app{"Conditioned Galton-Watson trees: exact laws, samplers, and convergence "
                 "diagnostics toward Kesten's spine tree"};
    app.require_subcommand(1);
    // --h is a real option below, so no -h shorthand for help anywhere.
    auto long_help = [](CLI::App* a) { a->set_help_flag("--help", "print this help and exit"); };
    long_help(&app);
    int threads = 0;
    app.add_option("--threads", threads,
                   "worker threads for parallel kernels (default: GWTREE_THREADS env, then "
                   "the OpenMP default); never changes output values");
    auto apply_threads = [&threads] {
        if (threads > 0) set_worker_count(threads);
    };

    SampleArgs sa;
    CLI::App* sample = app.add_subcommand("sample", "draw trees and spine-tree prefixes");
    sample->fallthrough();
    long_help(sample);
    sample->add_option("--dist", sa.dist, "offspring law: shorthand, inline JSON, or file");
    sample->add_option("--n", sa.count, "number of draws");
    sample->add_option("--seed", sa.seed, "RNG seed; draw i uses substream (seed, i)");
    sample->add_option("--format", sa.format, "parens | degrees | json")
        ->check(CLI::IsMember({"parens", "degrees", "json"}));
    sample->add_flag("--kesten", sa.kesten, "emit spine-tree prefixes at --height");
    sample->add_option("--height", sa.height, "restriction height for --kesten");
    sample->add_option("--event", sa.event_text,
                       "condition on an event, e.g. card=5, height>=3, marks{0}=2, gen2=3");
    sample->add_flag("--exact-cycle", sa.exact_cycle,
                     "cycle-lemma sampler for point card events (no rejection on the size)");
    sample->add_option("--max-nodes", sa.max_nodes, "node budget per draw (0: unlimited)");
    sample->add_option("--max-rejections", sa.max_rejections, "rejection budget per draw");
    sample->add_option("--out", sa.out, "write to a file instead of stdout");
    sample->callback([&] {
        apply_threads();
        cmd_sample(sa, argv_copy);
    });

    CLI::App* exact = app.add_subcommand("exact", "exact laws and enumerations");
    exact->require_subcommand(1);
    exact->fallthrough();
    long_help(exact);

    ExactProgenyArgs pa;
    CLI::App* progeny = exact->add_subcommand("progeny", "total-progeny law of a forest");
    progeny->fallthrough();
    long_help(progeny);
    progeny->add_option("--dist", pa.dist, "offspring law");
    progeny->add_option("--k", pa.k, "number of trees in the forest");
    progeny->add_option("--kmax,--nmax", pa.nmax, "largest total size tabulated");
    progeny->add_option("--out", pa.out, "output prefix");
    progeny->callback([&] {
        apply_threads();
        cmd_exact_progeny(pa, argv_copy);
    });

    ExactHeightArgs ha;
    CLI::App* height = exact->add_subcommand("height", "height tail and point laws");
    height->fallthrough();
    long_help(height);
    height->add_option("--dist", ha.dist, "offspring law");
    height->add_option("--nmax", ha.nmax, "largest height tabulated");
    height->add_option("--out", ha.out, "output prefix");
    height->callback([&] {
        apply_threads();
        cmd_exact_height(ha, argv_copy);
    });

    ExactGenerationArgs ga;
    CLI::App* generation = exact->add_subcommand("generation", "generation-size law");
    generation->fallthrough();
    long_help(generation);
    generation->add_option("--dist", ga.dist, "offspring law (convolution path)");
    generation->add_option("--q", ga.q, "geometric parameter: use the closed form instead");
    generation->add_option("--n", ga.n, "generation index");
    generation->add_option("--kmax", ga.kmax, "largest size tabulated (closed form)");
    generation->add_option("--cap", ga.cap, "generation-size cap (convolution path)");
    generation->add_option("--out", ga.out, "output prefix");
    generation->callback([&] {
        apply_threads();
        cmd_exact_generation(ga, argv_copy);
    });

    ExactTreesArgs ta;
    CLI::App* trees = exact->add_subcommand("trees", "enumerate trees with probabilities");
    trees->fallthrough();
    long_help(trees);
    trees->add_option("--dist", ta.dist, "offspring law");
    trees->add_option("--card-max", ta.card_max, "largest tree size enumerated");
    trees->add_option("--budget", ta.budget, "enumeration budget");
    trees->add_option("--out", ta.out, "output prefix");
    trees->callback([&] {
        apply_threads();
        cmd_exact_trees(ta, argv_copy);
    });

    ExactMarksArgs ma;
    CLI::App* marks = exact->add_subcommand("marks", "offspring law of the marked-node tree");
    marks->fallthrough();
    long_help(marks);
    marks->add_option("--dist", ma.dist, "offspring law");
    marks->add_option("--A", ma.set, "degree set, e.g. 0 | 0,2 | all | positive | co:0");
    marks->add_option("--cap", ma.cap, "walk-height cap of the first-passage recursion");
    marks->add_option("--out", ma.out, "output prefix");
    marks->callback([&] {
        apply_threads();
        cmd_exact_marks(ma, argv_copy);
    });

    CLI::App* converge = app.add_subcommand("converge", "convergence diagnostics");
    converge->require_subcommand(1);
    converge->fallthrough();
    long_help(converge);

    RatioArgs ra;
    CLI::App* ratio = converge->add_subcommand("ratio", "successive event-probability ratios");
    ratio->fallthrough();
    long_help(ratio);
    ratio->add_option("--dist", ra.dist, "offspring law");
    ratio->add_option("--event", ra.family, "family: height_ge | height_eq | card | marks");
    ratio->add_option("--width", ra.width, "window width (0: span of the relevant law)");
    ratio->add_option("--A", ra.set, "degree set for the marks family");
    ratio->add_option("--n-lo", ra.n_lo, "first n");
    ratio->add_option("--nmax", ra.nmax, "last n");
    ratio->add_option("--stride", ra.stride, "step between n values");
    ratio->add_option("--tol", ra.tol, "convergence tolerance on |ratio - mean|");
    ratio->add_option("--out", ra.out, "output prefix");
    ratio->callback([&] {
        apply_threads();
        cmd_converge_ratio(ra, argv_copy);
    });

    TVArgs va;
    CLI::App* tv = converge->add_subcommand(
        "tv", "total-variation distance to the spine tree at fixed height");
    tv->fallthrough();
    long_help(tv);
    tv->add_option("--dist", va.dist, "offspring law");
    tv->add_option("--event", va.family, "family: card | height_ge | height_eq | marks | gen");
    tv->add_option("--A", va.set, "degree set for the marks family");
    tv->add_option("--h", va.h, "restriction height");
    bool tv_exact_flag = false;
    tv->add_flag("--mc", va.mc, "Monte Carlo method (default: exact enumeration)");
    tv->add_flag("--exact", tv_exact_flag, "exact enumeration (the default)");
    tv->add_option("--replicates", va.replicates, "Monte Carlo sample size per n");
    tv->add_option("--seed", va.seed, "Monte Carlo seed");
    tv->add_option("--n-lo", va.n_lo, "first n");
    tv->add_option("--nmax", va.nmax, "last n");
    tv->add_option("--stride", va.stride, "step between n values (0: span lattice for card)");
    tv->add_option("--alpha", va.alpha, "generation-size target (0: track n)");
    tv->add_option("--card-max", va.card_max, "enumeration size bound (0: per-family rule)");
    tv->add_option("--budget", va.budget, "enumeration budget");
    tv->add_option("--out", va.out, "output prefix");
    tv->callback([&] {
        if (tv_exact_flag && va.mc)
            throw ConfigError("--exact and --mc are mutually exclusive");
        apply_threads();
        cmd_converge_tv(va, argv_copy);
    });

    TiltArgs ti;
    CLI::App* tilt = converge->add_subcommand(
        "tilt", "conditional-law invariance across the tilted family");
    tilt->fallthrough();
    long_help(tilt);
    tilt->add_option("--dist", ti.dist, "offspring law");
    tilt->add_option("--A", ti.set, "degree set");
    tilt->add_option("--theta", ti.thetas, "tilt parameters (repeatable)");
    tilt->add_option("--n", ti.n, "conditioned mark count");
    tilt->add_option("--card-max", ti.card_max, "enumeration size bound");
    tilt->add_option("--budget", ti.budget, "enumeration budget");
    tilt->add_option("--out", ti.out, "output prefix");
    tilt->callback([&] {
        apply_threads();
        cmd_converge_tilt(ti, argv_copy);
    });

    TiltSolveArgs ts;
    CLI::App* solve = app.add_subcommand("tilt-solve", "critical member of the tilted family");
    solve->fallthrough();
    long_help(solve);
    solve->add_option("--dist", ts.dist, "offspring law");
    solve->add_option("--A", ts.set, "degree set");
    solve->add_option("--tol", ts.tol, "bisection tolerance");
    solve->add_option("--out", ts.out, "output prefix");
    solve->callback([&] {
        apply_threads();
        cmd_tilt_solve(ts, argv_copy);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace gwt

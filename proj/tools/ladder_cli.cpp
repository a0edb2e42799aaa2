#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ladder/error.hpp"
#include "ladder/exact_rational.hpp"
#include "ladder/increments.hpp"
#include "ladder/kernels.hpp"
#include "ladder/ladder_exact.hpp"
#include "ladder/large_dev.hpp"
#include "ladder/limit_laws.hpp"
#include "ladder/model_io.hpp"
#include "ladder/monte_carlo.hpp"

using namespace ladder;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConsistency = 2;
constexpr int kExitConfig = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string model_file;
    std::string model_json;
    std::vector<double> drifts;
    std::vector<std::int64_t> ns;
    std::vector<double> vs;
    std::vector<std::string> routes;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t paths = 0;
    unsigned threads = 0;
    bool scalar = false;
    bool tilted = false;
    bool experimental = false;
    std::int64_t exact_limit = 0;
};

// Resolved experiment: config file values with command-line overrides on top.
struct Experiment {
    IncrementModel model;
    std::uint64_t hash = 0;
    std::vector<double> drifts;
    std::vector<std::int64_t> ns;
    std::vector<double> vs;
    std::vector<std::string> routes;
    std::string out;
    std::uint64_t seed = 1;
    std::int64_t paths = 100000;
    unsigned threads = 1;
    bool tilted = false;
    bool experimental = false;
    std::int64_t exact_limit = 20000;
};

unsigned default_threads() {
    if (const char* e = std::getenv("LADDER_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(e, &end, 10);
        if (end != e && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
        throw ConfigError("LADDER_THREADS must be a positive integer");
    }
    return 1;
}

template <class T>
std::vector<T> json_list(const json& j, const char* key) {
    std::vector<T> v;
    if (!j.contains(key)) return v;
    const json& x = j.at(key);
    if (x.is_array()) {
        for (const auto& e : x) {
            if constexpr (std::is_same_v<T, std::string>) v.push_back(e.get<std::string>());
            else v.push_back(static_cast<T>(parse_probability(e)));
        }
    } else if constexpr (std::is_same_v<T, std::string>) {
        v.push_back(x.get<std::string>());
    } else {
        v.push_back(static_cast<T>(parse_probability(x)));
    }
    return v;
}

Experiment resolve(const Options& o, bool need_model = true) {
    json cfg = json::object();
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw ConfigError("cannot open config " + o.config);
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw ConfigError("config " + o.config + ": " + e.what());
        }
    }
    Experiment x;
    try {
        if (!o.model_json.empty()) {
            x.model = model_from_json(json::parse(o.model_json));
        } else if (!o.model_file.empty()) {
            x.model = load_model(o.model_file);
        } else if (cfg.contains("model")) {
            const json& m = cfg.at("model");
            if (m.is_string()) {
                auto base = std::filesystem::path(o.config).parent_path();
                x.model = load_model((base / m.get<std::string>()).string());
            } else {
                x.model = model_from_json(m);
            }
        } else if (need_model) {
            throw ConfigError("no model given (use --model, --model-file or a config 'model' entry)");
        }
        x.drifts = o.drifts.empty() ? json_list<double>(cfg, "a") : o.drifts;
        x.ns = o.ns.empty() ? json_list<std::int64_t>(cfg, "n") : o.ns;
        x.vs = o.vs.empty() ? json_list<double>(cfg, "v") : o.vs;
        x.routes = o.routes.empty() ? json_list<std::string>(cfg, "routes") : o.routes;
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    x.out = !o.out.empty() ? o.out : cfg.value("output", std::string());
    x.seed = o.seed_set ? o.seed : cfg.value("seed", std::uint64_t{1});
    x.paths = o.paths > 0 ? o.paths : cfg.value("paths", std::int64_t{100000});
    x.threads = o.threads > 0 ? o.threads : cfg.value("threads", default_threads());
    x.tilted = o.tilted || cfg.value("tilted", false);
    x.experimental = o.experimental || cfg.value("experimental", false);
    x.exact_limit = o.exact_limit > 0 ? o.exact_limit : cfg.value("exact_limit", std::int64_t{20000});
    if (need_model) x.hash = model_hash(x.model);
    for (double a : x.drifts)
        if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("drifts must be finite and nonnegative");
    for (auto n : x.ns)
        if (n < 0) throw ConfigError("n grid entries must be nonnegative");
    for (double v : x.vs)
        if (!(v >= 0.0)) throw ConfigError("v grid entries must be nonnegative");
    if (x.threads < 1) throw ConfigError("threads must be >= 1");
    return x;
}

std::string hex(std::uint64_t h) {
    std::ostringstream s;
    s << std::hex << h;
    return s.str();
}

// Output goes to <out>/<name> when an output directory is set, else stdout.
class Sink {
public:
    Sink(const std::string& dir, const std::string& name) {
        if (dir.empty()) return;
        std::filesystem::create_directories(dir);
        file_.open(std::filesystem::path(dir) / name);
        if (!file_) throw ConfigError("cannot write " + (std::filesystem::path(dir) / name).string());
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

// Evaluates f(i) for i < count on a fixed pool; results are stored by index
// so output order never depends on scheduling.
template <class R>
std::vector<R> parallel_map(std::size_t count, unsigned threads, const std::function<R(std::size_t)>& f) {
    std::vector<R> out(count);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(count);
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = f(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (t <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < t; ++k) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

double rel_diff(double x, double y) {
    double m = std::max(std::fabs(x), std::fabs(y));
    return m == 0.0 ? 0.0 : std::fabs(x - y) / m;
}

bool has_route(const Experiment& x, const std::string& r) {
    return x.routes.empty() || std::find(x.routes.begin(), x.routes.end(), r) != x.routes.end();
}

int cmd_exact(const Options& o) {
    Experiment x = resolve(o);
    if (x.ns.empty()) throw ConfigError("exact: n grid is empty");
    if (!x.model.is_lattice()) throw ConfigError("exact: model must be a lattice law");
    if (x.drifts.empty()) x.drifts = {x.model.pre_drifted ? x.model.drift : 0.0};
    for (const auto& r : x.routes)
        if (r != "dp" && r != "spitzer") throw ConfigError("exact: unknown route '" + r + "'");
    const std::int64_t N = *std::max_element(x.ns.begin(), x.ns.end());

    struct Result {
        LadderTailTable dp, sp;
        double genf = 0.0, worst = 0.0;
        std::int64_t worst_j = 0;
    };
    auto results = parallel_map<Result>(x.drifts.size(), x.threads, [&](std::size_t i) {
        Result r;
        double a = x.drifts[i];
        r.dp = survival_dp(x.model, a, N);
        auto marg = marginal_nonneg_probs(x.model, a, N);
        r.sp = spitzer_recurrence(marg);
        r.genf = genf_check(r.dp, marg, std::min<std::int64_t>(N, 50));
        for (std::int64_t j = 0; j <= N; ++j) {
            double d = r.dp.probs[j], s = r.sp.probs[j];
            // Entries below 1e-250 carry no relative information.
            if (std::max(d, s) < 1e-250) continue;
            double e = rel_diff(d, s);
            if (e > r.worst) {
                r.worst = e;
                r.worst_j = j;
            }
        }
        return r;
    });

    Sink table(x.out, "exact_table.csv");
    CsvWriter w(table.stream(), {"j", "prob", "route", "a", "model_hash", "seed", "version"});
    for (std::size_t i = 0; i < x.drifts.size(); ++i) {
        for (auto j : x.ns) {
            for (const auto* t : {&results[i].dp, &results[i].sp}) {
                if (!has_route(x, route_name(t->route))) continue;
                w.cell(static_cast<long long>(j)).cell(t->probs[static_cast<std::size_t>(j)]).cell(route_name(t->route));
                w.cell(x.drifts[i]).cell(hex(x.hash)).cell(static_cast<long long>(x.seed)).cell(kCodeVersion);
                w.end_row();
            }
        }
    }

    constexpr double kRouteTol = 1e-10, kGenfTol = 1e-10;
    bool ok = true;
    Sink rep(x.out, "exact_consistency.csv");
    CsvWriter cw(rep.stream(), {"a", "n", "max_rel_dp_spitzer", "worst_j", "genf_check", "truncated_mass", "fft",
                                "kernel", "status", "model_hash", "seed", "version"});
    for (std::size_t i = 0; i < x.drifts.size(); ++i) {
        const auto& r = results[i];
        bool good = r.worst <= kRouteTol && r.genf <= kGenfTol;
        ok = ok && good;
        cw.cell(x.drifts[i]).cell(static_cast<long long>(N)).cell(r.worst).cell(static_cast<long long>(r.worst_j));
        cw.cell(r.genf).cell(r.dp.provenance.truncated_mass).cell(r.dp.provenance.fft ? "yes" : "no");
        cw.cell(r.dp.provenance.kernel).cell(good ? "ok" : "DISAGREE").cell(hex(x.hash));
        cw.cell(static_cast<long long>(x.seed)).cell(kCodeVersion);
        cw.end_row();
        if (!good)
            std::cerr << "route disagreement at a=" << x.drifts[i] << ": max rel diff " << r.worst << " at j="
                      << r.worst_j << " (dp " << r.dp.probs[r.worst_j] << ", spitzer " << r.sp.probs[r.worst_j]
                      << "), genf " << r.genf << "\n";
    }
    return ok ? kExitOk : kExitConsistency;
}

json estimate_json(const MCEstimate& e, double a, std::int64_t n, const char* kind, const Experiment& x) {
    json j;
    j["estimator"] = kind;
    j["a"] = a;
    j["n"] = n;
    j["value"] = e.value;
    j["std_error"] = e.std_error;
    j["paths"] = e.paths;
    j["seed"] = e.seed;
    j["tilt"] = e.tilt;
    j["cap"] = e.cap;
    if (!e.warning.empty()) j["warning"] = e.warning;
    j["model_hash"] = hex(x.hash);
    j["version"] = kCodeVersion;
    return j;
}

int cmd_mc(const Options& o) {
    Experiment x = resolve(o);
    if (x.ns.empty()) throw ConfigError("mc: n grid is empty");
    if (x.drifts.empty()) x.drifts = {x.model.pre_drifted ? x.model.drift : 0.0};
    Sink sink(x.out, "mc.jsonl");
    for (double a : x.drifts) {
        for (auto n : x.ns) {
            MCEstimate e = estimate_tail(x.model, a, n, x.paths, x.seed, x.threads);
            sink.stream() << estimate_json(e, a, n, "plain", x).dump() << "\n";
            if (x.tilted) {
                MCEstimate t = tilted_estimate_tail(x.model, a, n, x.paths, x.seed, x.threads);
                sink.stream() << estimate_json(t, a, n, "tilted", x).dump() << "\n";
            }
        }
    }
    return kExitOk;
}

// Smallest n with a n / c_n >= u.
std::int64_t n_for_u(const IncrementModel& m, double a, double u) {
    if (u <= 0.0) return 1;
    auto f = [&](std::int64_t n) { return a * static_cast<double>(n) / norming_c(m, static_cast<double>(n)); };
    std::int64_t hi = 1;
    while (f(hi) < u) {
        hi *= 2;
        if (hi > (std::int64_t{1} << 40)) throw ConfigError("transition-scan: n for u out of range");
    }
    std::int64_t lo = hi / 2;
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        (f(mid) >= u ? hi : lo) = mid;
    }
    return hi;
}

int cmd_transition_scan(const Options& o) {
    Experiment x = resolve(o);
    if (x.vs.empty() || x.drifts.empty()) throw ConfigError("transition-scan: needs a grid and v grid");
    for (double a : x.drifts)
        if (a <= 0.0) throw ConfigError("transition-scan: drifts must be positive");
    DomainInfo d = domain_of(x.model);
    StableParams sp = make_stable(d.alpha, d.beta);
    LimitCdf F = limit_cdf(sp);
    IncrementModel zero = zero_drift_counterpart(x.model);

    struct Row {
        double a, v, u, exact, exact_se, zero_tail, correction;
        std::int64_t n;
        std::string route;
    };
    std::vector<std::pair<double, double>> grid;
    for (double a : x.drifts)
        for (double v : x.vs) grid.emplace_back(a, v);
    auto rows = parallel_map<Row>(grid.size(), x.threads, [&](std::size_t i) {
        Row r{};
        r.a = grid[i].first;
        r.v = grid[i].second;
        // u = a n / c_n = sqrt(v); for finite variance this is n = v sigma^2 / a^2.
        r.n = d.finite_variance ? std::max<std::int64_t>(
                                      1, std::llround(r.v * variance(zero) / (r.a * r.a)))
                                : n_for_u(zero, r.a, std::sqrt(r.v));
        r.u = r.a * static_cast<double>(r.n) / norming_c(zero, static_cast<double>(r.n));
        IncrementModel drifted = x.model.pre_drifted ? make_pbiased(r.a) : x.model;
        if (x.model.is_lattice()) {
            r.exact = survival_dp(drifted, r.a, r.n).probs.back();
            r.zero_tail = survival_dp(zero, 0.0, r.n).probs.back();
            r.route = "dp";
        } else {
            MCEstimate e = estimate_tail(drifted, r.a, r.n, x.paths, x.seed + i, 1);
            r.exact = e.value;
            r.exact_se = e.std_error;
            r.zero_tail = zero_drift_tail(zero, r.n);
            r.route = "montecarlo";
        }
        r.correction = F(r.u);
        return r;
    });
    Sink sink(x.out, "transition_scan.csv");
    CsvWriter w(sink.stream(), {"a", "v", "n", "u", "exact", "exact_se", "route", "zero_tail", "ratio",
                                "limit_correction", "correction_route", "model_hash", "seed", "version"});
    for (const auto& r : rows) {
        w.cell(r.a).cell(r.v).cell(static_cast<long long>(r.n)).cell(r.u).cell(r.exact).cell(r.exact_se).cell(r.route);
        w.cell(r.zero_tail).cell(r.exact / r.zero_tail).cell(r.correction).cell(correction_route_name(F.route));
        w.cell(hex(x.hash)).cell(static_cast<long long>(x.seed)).cell(kCodeVersion);
        w.end_row();
    }
    return kExitOk;
}

IncrementModel at_drift(const IncrementModel& m, double a) { return m.pre_drifted ? make_pbiased(a) : m; }

int cmd_regime_scan(const Options& o) {
    Experiment x = resolve(o);
    if (x.drifts.empty() || x.ns.empty()) throw ConfigError("regime-scan: needs a grid and n grid");
    for (double a : x.drifts)
        if (a <= 0.0) throw ConfigError("regime-scan: drifts must be positive");
    struct Row {
        RegimeReport rep;
        double exact = std::nan("");
    };
    std::vector<std::pair<double, std::int64_t>> grid;
    for (double a : x.drifts)
        for (auto n : x.ns) grid.emplace_back(a, n);
    auto rows = parallel_map<Row>(grid.size(), x.threads, [&](std::size_t i) {
        auto [a, n] = grid[i];
        IncrementModel m = at_drift(x.model, a);
        Row r;
        RegimeOptions opt;
        opt.experimental_conjecture = x.experimental;
        r.rep = regime_classify(m, a, n, opt);
        if (m.is_lattice() && n <= x.exact_limit) r.exact = survival_dp(m, a, n).probs.back();
        return r;
    });
    Sink sink(x.out, "regime_scan.csv");
    CsvWriter w(sink.stream(), {"a", "n", "u", "label", "predictor", "predicted", "exact", "ratio", "unresolved",
                                "model_hash", "seed", "version"});
    for (const auto& r : rows) {
        w.cell(r.rep.a).cell(static_cast<long long>(r.rep.n)).cell(r.rep.u).cell(regime_name(r.rep.regime));
        w.cell(r.rep.predictor).cell(r.rep.value);
        if (std::isnan(r.exact)) w.cell(std::string()).cell(std::string());
        else w.cell(r.exact).cell(r.exact / r.rep.value);
        w.cell(r.rep.unresolved_window ? "yes" : "no").cell(hex(x.hash)).cell(static_cast<long long>(x.seed));
        w.cell(kCodeVersion);
        w.end_row();
    }
    return kExitOk;
}

json report_json(const RegimeReport& r, const Experiment& x) {
    json j;
    j["a"] = r.a;
    j["n"] = r.n;
    j["c_n"] = r.c_n;
    j["u"] = r.u;
    j["regime"] = regime_name(r.regime);
    j["predictor"] = r.predictor;
    j["value"] = r.value;
    j["competitor"] = r.competitor;
    j["competitor_value"] = r.competitor_value;
    j["ratio_to_competitor"] = r.competitor_value > 0.0 ? r.value / r.competitor_value : std::nan("");
    j["unresolved_window"] = r.unresolved_window;
    j["assumption"] = r.assumption;
    j["etau"] = r.etau;
    j["etau_method"] = r.etau_method;
    if (r.conjecture) j["conjecture_experimental"] = *r.conjecture;
    j["model_hash"] = hex(x.hash);
    j["seed"] = x.seed;
    j["version"] = kCodeVersion;
    return j;
}

int cmd_decide(const Options& o) {
    Experiment x = resolve(o);
    if (x.drifts.size() != 1 || x.ns.size() != 1) throw ConfigError("decide: give exactly one a and one n");
    double a = x.drifts[0];
    if (a <= 0.0 || x.ns[0] < 1) throw ConfigError("decide: needs a > 0 and n >= 1");
    RegimeOptions opt;
    opt.experimental_conjecture = x.experimental;
    RegimeReport r = regime_classify(at_drift(x.model, a), a, x.ns[0], opt);
    json j = report_json(r, x);
    std::cerr << "regime      " << regime_name(r.regime) << (r.unresolved_window ? " (unresolved window)" : "")
              << "\nu = a n/c_n " << r.u << "\nrecommended " << r.predictor << " = " << r.value;
    if (!r.competitor.empty())
        std::cerr << "\ncompetitor  " << r.competitor << " = " << r.competitor_value << " (ratio "
                  << r.value / r.competitor_value << ")";
    if (!r.etau_method.empty()) std::cerr << "\nE tau       " << r.etau << " [" << r.etau_method << "]";
    std::cerr << "\n";
    Sink sink(x.out, "decide.json");
    sink.stream() << j.dump(2) << "\n";
    return kExitOk;
}

struct Check {
    std::string name;
    bool ok;
    double value;
};

int cmd_verify(const Options& o) {
    Experiment x = resolve(o, false);
    std::vector<IncrementModel> corpus;
    if (!o.model_json.empty() || !o.model_file.empty() || !o.config.empty()) {
        x = resolve(o, true);
        corpus.push_back(x.model);
    } else {
        corpus = {make_symmetric_pm1(), make_pbiased(0.2),
                  make_lattice(1.0, -2, {0.15, 0.3, 0.15, 0.2, 0.2}, 0.0, "five_point"),
                  make_pareto(3.5, 0.1, 200)};
    }
    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool ok, double v) { checks.push_back({name, ok, v}); };
    for (const auto& m0 : corpus) {
        if (!m0.is_lattice()) {
            add(m0.name + ": lattice model required", false, 0.0);
            continue;
        }
        const double a = m0.pre_drifted ? m0.drift : 0.25 * m0.span;
        const std::string tag = m0.name + " a=" + format_double(a);
        std::int64_t nb = 1;
        std::size_t support = 0;
        for (double p : m0.mass) support += p > 0.0;
        while (nb < 12 && std::pow(static_cast<double>(support), static_cast<double>(nb + 1)) <= 1e6) ++nb;
        auto dp = survival_dp(m0, a, 400);
        auto bf = enumerate_bruteforce(m0, a, nb);
        double e1 = 0.0;
        for (std::int64_t j = 0; j <= nb; ++j) e1 = std::max(e1, std::fabs(dp.probs[j] - bf.probs[j]));
        add(tag + ": dp vs enumeration", e1 <= 1e-12, e1);
        auto marg = marginal_nonneg_probs(m0, a, 400);
        auto sp = spitzer_recurrence(marg);
        double e2 = 0.0;
        for (std::size_t j = 0; j < dp.probs.size(); ++j)
            if (dp.probs[j] > 1e-250) e2 = std::max(e2, rel_diff(dp.probs[j], sp.probs[j]));
        add(tag + ": dp vs spitzer", e2 <= 1e-10, e2);
        double g = genf_check(dp, marg, 50);
        add(tag + ": genf identity", g <= 1e-10, g);
        bool mono = dp.probs[0] == 1.0;
        for (std::size_t j = 1; j < dp.probs.size(); ++j) mono = mono && dp.probs[j] <= dp.probs[j - 1] * (1.0 + 1e-14);
        add(tag + ": table monotone", mono, 0.0);
        IncrementModel z = zero_drift_counterpart(m0);
        auto dz = survival_dp(z, 0.0, 400);
        bool dom = true;
        for (std::size_t j = 0; j < dp.probs.size(); ++j) dom = dom && dp.probs[j] <= dz.probs[j] * (1.0 + 1e-12);
        add(tag + ": dominated by zero drift", dom, 0.0);
        if (support <= 8) {
            auto q = survival_rational(m0, a, 24);
            double e3 = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j)
                e3 = std::max(e3, std::fabs(dp.probs[j] - static_cast<double>(q[j])));
            add(tag + ": float vs rational", e3 <= 1e-14, e3);
        }
    }
    bool ok = true;
    Sink sink(x.out, "verify.csv");
    CsvWriter w(sink.stream(), {"check", "status", "value", "version"});
    for (const auto& c : checks) {
        ok = ok && c.ok;
        w.cell(c.name).cell(c.ok ? "ok" : "FAIL").cell(c.value).cell(kCodeVersion);
        w.end_row();
    }
    return ok ? kExitOk : kExitConsistency;
}

int cmd_calibrate_fn(const Options& o) {
    Experiment x = resolve(o, false);
    std::vector<IncrementModel> corpus;
    if (!o.model_json.empty() || !o.model_file.empty() || !o.config.empty()) {
        x = resolve(o, true);
        corpus.push_back(x.model);
    } else {
        corpus = {make_symmetric_pm1(), make_pareto(3.5, 0.1, 2000), make_pareto(1.5, 0.01, 3000)};
    }
    std::vector<std::int64_t> ns = x.ns.empty() ? std::vector<std::int64_t>{10, 40, 160, 640} : x.ns;
    json out = json::array();
    double overall = 0.0;
    for (const auto& m : corpus) {
        FnCalibration c = calibrate_fuk_nagaev(m, ns);
        overall = std::max(overall, c.minimal_c);
        out.push_back({{"model", m.name},
                       {"model_hash", hex(model_hash(m))},
                       {"minimal_c", c.minimal_c},
                       {"worst_n", c.worst_n},
                       {"worst_x", c.worst_x},
                       {"points", c.points},
                       {"default_c_dominates", c.minimal_c <= kFukNagaevDefaultC}});
    }
    json doc{{"corpus", out}, {"minimal_c", overall}, {"default_c", kFukNagaevDefaultC}, {"version", kCodeVersion}};
    Sink sink(x.out, "calibrate_fn.json");
    sink.stream() << doc.dump(2) << "\n";
    return overall <= kFukNagaevDefaultC ? kExitOk : kExitConsistency;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("-c,--config", o.config, "JSON experiment config");
    sub->add_option("--model-file", o.model_file, "JSON model spec file");
    sub->add_option("--model", o.model_json, "inline JSON model spec");
    sub->add_option("-a,--drift", o.drifts, "drift grid");
    sub->add_option("-n,--n", o.ns, "n grid");
    sub->add_option("-v,--v", o.vs, "v grid (n a^2 / sigma^2)");
    sub->add_option("--routes", o.routes, "routes to run");
    sub->add_option("-o,--out", o.out, "output directory (stdout when absent)");
    sub->add_option("--seed", o.seed, "random seed")->each([&o](const std::string&) { o.seed_set = true; });
    sub->add_option("--paths", o.paths, "Monte Carlo paths");
    sub->add_option("--threads", o.threads, "worker threads (default LADDER_THREADS or 1)");
    sub->add_flag("--scalar", o.scalar, "force the scalar kernels");
    sub->add_flag("--tilted", o.tilted, "also run the tilted estimator");
    sub->add_flag("--experimental", o.experimental, "report the conjectured two-term formula");
    sub->add_option("--exact-limit", o.exact_limit, "largest n for exact DP in scans");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ladder-epoch tail probabilities for walks with small negative drift"};
    app.require_subcommand(1);
    Options o;
    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const Options&);
    };
    const Cmd cmds[] = {
        {"exact", "exact tables by DP and Spitzer recurrence with consistency report", cmd_exact},
        {"mc", "Monte Carlo tail estimates as JSON records", cmd_mc},
        {"transition-scan", "ratio to the zero-drift tail against the limit correction", cmd_transition_scan},
        {"regime-scan", "regime labels and predictors over an (a, n) grid", cmd_regime_scan},
        {"decide", "recommend an approximation for one (a, n)", cmd_decide},
        {"verify", "run the invariant suite", cmd_verify},
        {"calibrate-fn", "smallest Fuk-Nagaev constant dominating exact marginals", cmd_calibrate_fn},
    };
    std::vector<std::pair<CLI::App*, const Cmd*>> subs;
    for (const auto& c : cmds) {
        CLI::App* s = app.add_subcommand(c.name, c.help);
        add_common(s, o);
        subs.emplace_back(s, &c);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    try {
        if (o.scalar) kernels::force_scalar(true);
        for (auto& [s, c] : subs)
            if (s->parsed()) return c->run(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}

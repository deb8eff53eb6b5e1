#include "falcon/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "falcon/rng.hpp"

namespace falcon {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long parse_long(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long out = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an integer, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(out);
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a non-negative integer, got '" + v + "'");
    }
}

double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + v + "'");
    }
}

std::vector<double> parse_double_list(const std::string& field, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(parse_double(field, tok));
    return out;
}

std::vector<long> parse_long_list(const std::string& field, const std::string& v) {
    std::vector<long> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(parse_long(field, tok));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void apply_key(Experiment& e, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string field = section + "." + key;
    if (section == "run") {
        if (key == "algorithm") e.algorithm = value;
        else if (key == "horizon") e.horizon = parse_long(field, value);
        else if (key == "seed") e.seed = parse_u64(field, value);
        else if (key == "instance_seed") e.instance_seed = parse_u64(field, value);
        else if (key == "delta") e.delta = parse_double(field, value);
        else if (key == "epsilon") e.epsilon = parse_double(field, value);
        else if (key == "log_every") e.log_every = parse_long(field, value);
        else throw ConfigError(field, "unknown key");
    } else if (section == "schedule") {
        if (key == "kind") e.schedule.kind = value;
        else if (key == "boundaries") e.schedule.boundaries = parse_long_list(field, value);
        else throw ConfigError(field, "unknown key");
    } else if (section == "env") {
        if (key == "type") e.env.type = value;
        else if (key == "contexts") e.env.contexts = static_cast<int>(parse_long(field, value));
        else if (key == "actions") e.env.actions = static_cast<int>(parse_long(field, value));
        else if (key == "class_size") e.env.class_size = static_cast<int>(parse_long(field, value));
        else if (key == "gap") e.env.gap = parse_double(field, value);
        else if (key == "dimension") e.env.dimension = static_cast<int>(parse_long(field, value));
        else if (key == "theta") e.env.theta = parse_double_list(field, value);
        else if (key == "hot_mean") {
            const auto v = parse_double_list(field, value);
            if (v.size() != 2) throw ConfigError(field, "expected two numbers (lo hi)");
            e.env.hot_mean_lo = v[0];
            e.env.hot_mean_hi = v[1];
        } else if (key == "cold_mean") {
            const auto v = parse_double_list(field, value);
            if (v.size() != 2) throw ConfigError(field, "expected two numbers (lo hi)");
            e.env.cold_mean_lo = v[0];
            e.env.cold_mean_hi = v[1];
        } else throw ConfigError(field, "unknown key");
    } else if (section == "oracle") {
        if (key == "xi") e.oracle.xi = value;
        else if (key == "xi_c") e.oracle.xi_c = parse_double(field, value);
        else if (key == "xi_value") e.oracle.xi_value = parse_double(field, value);
        else if (key == "ridge") e.oracle.ridge = parse_double(field, value);
        else throw ConfigError(field, "unknown key");
    } else {
        throw ConfigError(section, "unknown section");
    }
}

}  // namespace

Experiment parse_config(const std::string& text) {
    Experiment e;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno), "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        if (section.empty())
            throw ConfigError(key, "key appears before any [section] header");
        apply_key(e, section, key, value);
    }
    return e;
}

Experiment load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const Experiment& e) {
    std::ostringstream out;
    out << "[run]\n";
    out << "algorithm = " << e.algorithm << "\n";
    out << "horizon = " << e.horizon << "\n";
    out << "seed = " << e.seed << "\n";
    out << "instance_seed = " << e.instance_seed << "\n";
    out << "delta = " << fmt(e.delta) << "\n";
    out << "epsilon = " << fmt(e.epsilon) << "\n";
    out << "log_every = " << e.log_every << "\n";
    out << "\n[schedule]\n";
    out << "kind = " << e.schedule.kind << "\n";
    if (!e.schedule.boundaries.empty()) {
        out << "boundaries =";
        for (long b : e.schedule.boundaries) out << " " << b;
        out << "\n";
    }
    out << "\n[env]\n";
    out << "type = " << e.env.type << "\n";
    if (e.env.type == "linear") {
        out << "dimension = " << e.env.dimension << "\n";
        out << "actions = " << e.env.actions << "\n";
        if (!e.env.theta.empty()) {
            out << "theta =";
            for (double v : e.env.theta) out << " " << fmt(v);
            out << "\n";
        }
        out << "hot_mean = " << fmt(e.env.hot_mean_lo) << " " << fmt(e.env.hot_mean_hi) << "\n";
        out << "cold_mean = " << fmt(e.env.cold_mean_lo) << " " << fmt(e.env.cold_mean_hi)
            << "\n";
    } else {
        out << "contexts = " << e.env.contexts << "\n";
        out << "actions = " << e.env.actions << "\n";
        out << "class_size = " << e.env.class_size << "\n";
        out << "gap = " << fmt(e.env.gap) << "\n";
    }
    out << "\n[oracle]\n";
    out << "xi = " << e.oracle.xi << "\n";
    out << "xi_c = " << fmt(e.oracle.xi_c) << "\n";
    out << "xi_value = " << fmt(e.oracle.xi_value) << "\n";
    out << "ridge = " << fmt(e.oracle.ridge) << "\n";
    return out.str();
}

void validate(const Experiment& e) {
    if (e.algorithm != "falcon" && e.algorithm != "falcon-plus" &&
        e.algorithm != "epsilon-greedy" && e.algorithm != "uniform")
        throw ConfigError("run.algorithm", "unknown algorithm '" + e.algorithm + "'");
    if (e.horizon < 1) throw ConfigError("run.horizon", "must be >= 1");
    if (!(e.delta > 0.0 && e.delta < 1.0)) throw ConfigError("run.delta", "must lie in (0, 1)");
    if (!(e.epsilon >= 0.0 && e.epsilon <= 1.0))
        throw ConfigError("run.epsilon", "must lie in [0, 1]");
    if (e.log_every < 1) throw ConfigError("run.log_every", "must be >= 1");

    if (e.schedule.kind == "geometric") {
        // always valid
    } else if (e.schedule.kind == "known-horizon") {
        if (e.horizon < 2)
            throw ConfigError("run.horizon", "known-horizon schedule needs horizon >= 2");
    } else if (e.schedule.kind == "custom") {
        if (e.schedule.boundaries.empty())
            throw ConfigError("schedule.boundaries", "custom schedule needs boundaries");
        long prev = 0;
        for (long b : e.schedule.boundaries) {
            if (b <= prev)
                throw ConfigError("schedule.boundaries", "must be strictly increasing");
            prev = b;
        }
        if (prev < e.horizon)
            throw ConfigError("schedule.boundaries",
                              "schedule ends before the run horizon (schedule exhausted)");
    } else {
        throw ConfigError("schedule.kind", "unknown kind '" + e.schedule.kind + "'");
    }

    if (e.env.type == "finite") {
        if (e.env.contexts < 1) throw ConfigError("env.contexts", "must be >= 1");
        if (e.env.actions < 2) throw ConfigError("env.actions", "must be >= 2");
        if (e.env.class_size < 4) throw ConfigError("env.class_size", "must be >= 4");
        if (!(e.env.gap > 0.0 && e.env.gap <= 0.5))
            throw ConfigError("env.gap", "must lie in (0, 0.5]");
    } else if (e.env.type == "linear") {
        if (e.env.dimension < 1) throw ConfigError("env.dimension", "must be >= 1");
        if (e.env.actions < 2) throw ConfigError("env.actions", "must be >= 2");
        if (!e.env.theta.empty()) {
            if (static_cast<int>(e.env.theta.size()) != e.env.dimension)
                throw ConfigError("env.theta", "needs exactly env.dimension entries");
            double n2 = 0.0;
            for (double v : e.env.theta) n2 += v * v;
            if (!(n2 > 0.0) || n2 > 1.0 + 1e-9)
                throw ConfigError("env.theta", "norm must lie in (0, 1]");
        }
        auto range_ok = [](double lo, double hi) {
            return 0.0 <= lo && lo <= hi && hi <= 1.0;
        };
        if (!range_ok(e.env.hot_mean_lo, e.env.hot_mean_hi))
            throw ConfigError("env.hot_mean", "needs 0 <= lo <= hi <= 1");
        if (!range_ok(e.env.cold_mean_lo, e.env.cold_mean_hi))
            throw ConfigError("env.cold_mean", "needs 0 <= lo <= hi <= 1");
    } else {
        throw ConfigError("env.type", "unknown type '" + e.env.type + "'");
    }

    if (e.algorithm == "falcon" && e.env.type != "finite")
        throw ConfigError("run.algorithm",
                          "falcon needs an explicit finite class (env.type = finite)");

    if (e.algorithm == "falcon-plus") {
        // The per-epoch-data learner needs geometrically growing epochs.
        if (!make_schedule(e).doubling_lower_bounded(e.horizon))
            throw ConfigError("schedule.kind",
                              "falcon-plus requires tau_m >= 2^m for every epoch in the run");
    }

    if (e.oracle.xi != "auto" && e.oracle.xi != "finite" && e.oracle.xi != "linear" &&
        e.oracle.xi != "constant")
        throw ConfigError("oracle.xi", "unknown curve '" + e.oracle.xi + "'");
    if (e.oracle.xi_c < 0.0) throw ConfigError("oracle.xi_c", "must be >= 0 (0 = default)");
    if (e.oracle.xi == "constant" && !(e.oracle.xi_value > 0.0))
        throw ConfigError("oracle.xi_value", "must be > 0");
    if (!(e.oracle.ridge > 0.0)) throw ConfigError("oracle.ridge", "must be > 0");
    if (e.oracle.xi == "finite" && e.env.type != "finite")
        throw ConfigError("oracle.xi", "finite curve needs a finite environment");
    if (e.oracle.xi == "linear" && e.env.type != "linear")
        throw ConfigError("oracle.xi", "linear curve needs a linear environment");
}

std::uint64_t effective_instance_seed(const Experiment& e, std::uint64_t run_seed) {
    return e.instance_seed != 0 ? e.instance_seed : derive_seed(run_seed, kInstanceStream);
}

std::unique_ptr<Environment> make_environment(const Experiment& e, std::uint64_t run_seed) {
    validate(e);
    if (e.env.type == "finite") {
        std::mt19937_64 gen(effective_instance_seed(e, run_seed));
        return std::make_unique<FiniteRealizableEnv>(make_planted_instance(
            e.env.contexts, e.env.actions, e.env.class_size, e.env.gap, gen));
    }
    LinearEnvParams p;
    p.dimension = e.env.dimension;
    p.num_actions = e.env.actions;
    p.theta = e.env.theta;
    p.hot_mean_lo = e.env.hot_mean_lo;
    p.hot_mean_hi = e.env.hot_mean_hi;
    p.cold_mean_lo = e.env.cold_mean_lo;
    p.cold_mean_hi = e.env.cold_mean_hi;
    try {
        return std::make_unique<LinearRealizableEnv>(std::move(p));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("env", ex.what());
    }
}

EpochSchedule make_schedule(const Experiment& e) {
    if (e.schedule.kind == "geometric") return EpochSchedule::geometric();
    if (e.schedule.kind == "known-horizon") return EpochSchedule::known_horizon(e.horizon);
    if (e.schedule.kind == "custom") return EpochSchedule::custom(e.schedule.boundaries);
    throw ConfigError("schedule.kind", "unknown kind '" + e.schedule.kind + "'");
}

EstimationErrorCurve make_xi_curve(const Experiment& e, const Environment& env) {
    std::string kind = e.oracle.xi;
    if (kind == "auto") kind = (e.env.type == "finite") ? "finite" : "linear";
    if (kind == "constant") return xi_constant(e.oracle.xi_value);
    if (kind == "finite") {
        const auto* fin = dynamic_cast<const FiniteRealizableEnv*>(&env);
        if (!fin) throw ConfigError("oracle.xi", "finite curve needs a finite environment");
        const double c = e.oracle.xi_c > 0.0 ? e.oracle.xi_c : 16.0;
        return xi_finite_class(fin->function_class().size(), c);
    }
    const auto* lin = dynamic_cast<const LinearRealizableEnv*>(&env);
    if (!lin) throw ConfigError("oracle.xi", "linear curve needs a linear environment");
    const double c = e.oracle.xi_c > 0.0 ? e.oracle.xi_c : 8.0;
    return xi_linear_class(lin->dimension(), c);
}

std::unique_ptr<BanditAlgorithm> make_algorithm(const Experiment& e, const Environment& env) {
    validate(e);
    const auto* fin = dynamic_cast<const FiniteRealizableEnv*>(&env);
    const auto* lin = dynamic_cast<const LinearRealizableEnv*>(&env);

    std::shared_ptr<const RegressionOracle> oracle;
    if (fin)
        oracle = std::make_shared<FiniteClassErmOracle>(fin->function_class());
    else if (lin)
        oracle = std::make_shared<LinearRidgeOracle>(lin->dimension(), e.oracle.ridge);
    else
        throw ConfigError("env.type", "unsupported environment object");

    if (e.algorithm == "falcon") {
        if (!fin) throw ConfigError("run.algorithm", "falcon needs a finite environment");
        return std::make_unique<FalconBandit>(fin->function_class(), e.delta);
    }
    if (e.algorithm == "falcon-plus") {
        return std::make_unique<FalconPlusBandit>(oracle, make_xi_curve(e, env),
                                                  env.num_actions(), e.delta);
    }
    if (e.algorithm == "epsilon-greedy") {
        return std::make_unique<EpsilonGreedyBandit>(oracle, env.num_actions(), e.epsilon);
    }
    // uniform: epsilon-greedy at epsilon = 1 plays every arm with probability 1/K.
    return std::make_unique<EpsilonGreedyBandit>(oracle, env.num_actions(), 1.0);
}

}  // namespace falcon

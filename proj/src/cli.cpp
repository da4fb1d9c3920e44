#include "brenv/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <span>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "brenv/analytics.hpp"

namespace brenv::cli {
namespace {

class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double parse_double(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError("invalid number for " + what + ": '" + text + "'");
    }
    if (used != text.size()) throw UsageError("invalid number for " + what + ": '" + text + "'");
    return value;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

// Counts given as reals so that 1e6 is accepted.
std::uint64_t to_count(double value, const std::string& what)
{
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e18)
        throw UsageError(what + " must be a positive integer");
    return static_cast<std::uint64_t>(value);
}

const char* regime_name(RegimeName r)
{
    switch (r) {
    case RegimeName::Fixed: return "fixed";
    case RegimeName::Global: return "global";
    case RegimeName::Local: return "local";
    case RegimeName::All: return "all";
    }
    return "";
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

nlohmann::ordered_json json_value(const std::string& field)
{
    if (field.empty()) return nullptr;
    if (field.find_first_not_of("0123456789") == std::string::npos) return std::stoull(field);
    char* end = nullptr;
    const double x = std::strtod(field.c_str(), &end);
    if (end == field.c_str() + field.size() && std::isfinite(x)) return x;
    return field;
}

class RowWriter {
public:
    RowWriter(std::ostream& out, Format format, std::span<const char* const> header, bool with_header)
        : out_(out), format_(format), header_(header.begin(), header.end()), with_header_(with_header)
    {
    }

    void write(std::span<const std::string> fields)
    {
        start();
        if (format_ == Format::Csv) {
            for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << csv_escape(fields[i]);
            out_ << '\n';
        } else {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < fields.size(); ++i) obj[header_[i]] = json_value(fields[i]);
            out_ << (rows_ ? ",\n  " : "  ") << obj.dump();
        }
        ++rows_;
        out_.flush();
    }

    void finish()
    {
        start();
        if (format_ == Format::Json) out_ << (rows_ ? "\n]\n" : "]\n");
        out_.flush();
    }

private:
    void start()
    {
        if (started_) return;
        started_ = true;
        if (format_ == Format::Json) {
            out_ << "[\n";
        } else if (with_header_) {
            for (std::size_t i = 0; i < header_.size(); ++i) out_ << (i ? "," : "") << header_[i];
            out_ << '\n';
        }
    }

    std::ostream& out_;
    Format format_;
    std::vector<std::string> header_;
    bool with_header_;
    bool started_ = false;
    std::uint64_t rows_ = 0;
};

std::string opt_number(const std::optional<double>& x) { return x ? format_number(*x) : ""; }

void fill_estimate(Row& row, const SurvivalEstimate& est)
{
    row[9] = std::to_string(est.trials);
    row[10] = std::to_string(est.survivals);
    row[11] = format_number(est.p_hat);
    row[12] = format_number(est.ci_lo);
    row[13] = format_number(est.ci_hi);
}

/// Analytic columns for an arbitrary law; returns false on an analytic error.
bool fill_analytics(Row& row, const RunSpec& spec)
{
    const MeanLaw& law = *spec.law;
    if (const auto* u = std::get_if<MeanLaw::Uniform>(&law.variant())) row[0] = format_number(u->a);
    if (spec.r) row[1] = format_number(*spec.r);
    row[2] = format_number(expect_mean(law));
    row[3] = format_number(expect_log_mean(law));
    row[6] = to_string(classify_global(law, spec.family).verdict);
    row[7] = to_string(classify_fixed(law));
    row[8] = regime_name(spec.regime);
    row[14] = "ok";
    if (spec.r && (spec.regime == RegimeName::Local || spec.command == Command::Classify)) {
        try {
            const RegimeClass local = classify_local(law, *spec.r);
            row[4] = format_number(local.expected_x);
            row[5] = to_string(local.label);
        } catch (const std::exception& e) {
            row[14] = e.what();
            return false;
        }
    }
    return true;
}

int execute_rc(const RunSpec& spec, std::ostream& out, std::ostream& err)
{
    CriticalThreshold rc{};
    try {
        rc = critical_r_uniform(*spec.a, spec.tol);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    RowWriter writer(out, spec.format, kRcHeader, true);
    const std::array<std::string, kRcHeader.size()> fields{
        format_number(*spec.a),  format_number(rc.r_c),      format_number(rc.bracket_lo),
        format_number(rc.bracket_hi), format_number(rc.residual), std::to_string(rc.iterations)};
    writer.write(fields);
    writer.finish();
    return 0;
}

int execute_sweep(const RunSpec& spec, std::ostream& out)
{
    std::vector<std::pair<double, double>> grid;
    for (double a : spec.a_grid->points())
        for (double r : spec.r_grid->points()) grid.emplace_back(a, r);

    SweepOptions opts;
    opts.family = spec.family;
    opts.cfg.max_generations = spec.max_generations;
    opts.cfg.population_cap = spec.population_cap;
    opts.cfg.per_type_individual_threshold = spec.aggregation_threshold;
    opts.cfg.seed = spec.seed;
    opts.trials = spec.trials;
    opts.threads = spec.threads;
    switch (spec.regime) {
    case RegimeName::Fixed: opts.regimes = {SweepRegime::Fixed}; break;
    case RegimeName::Global: opts.regimes = {SweepRegime::Global}; break;
    case RegimeName::Local: opts.regimes = {SweepRegime::Local}; break;
    case RegimeName::All: opts.regimes = {SweepRegime::Fixed, SweepRegime::Global, SweepRegime::Local}; break;
    }

    RowWriter writer(out, spec.format, kRowHeader, spec.skip_rows == 0);
    std::uint64_t index = 0;
    // Cells before the resume point are skipped without simulating.
    const std::uint64_t rows_per_cell = spec.trials == 0 ? 1 : opts.regimes.size();
    for (const auto& [a, r] : grid) {
        if (index + rows_per_cell <= spec.skip_rows) {
            index += rows_per_cell;
            continue;
        }
        for (const SweepRow& row : sweep_cell(a, r, opts)) {
            if (index++ < spec.skip_rows) continue;
            writer.write(to_row(row));
        }
    }
    writer.finish();
    return 0;
}

}  // namespace

Grid Grid::parse(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid must look like lo:hi:steps, got '" + text + "'");
    Grid g{parse_double(parts[0], "grid lo"), parse_double(parts[1], "grid hi"), 0};
    g.steps = to_count(parse_double(parts[2], "grid steps"), "grid steps");
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi)) throw UsageError("grid bounds must be finite");
    return g;
}

std::vector<double> Grid::points() const
{
    std::vector<double> pts;
    if (steps == 1) return {lo};
    for (std::uint64_t i = 0; i < steps; ++i)
        pts.push_back(i + 1 == steps ? hi : lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(steps - 1));
    return pts;
}

MeanLaw parse_law(const std::string& text)
{
    const auto parts = split(text, ':');
    try {
        if (parts.size() == 2 && parts[0] == "uniform") return MeanLaw::uniform(parse_double(parts[1], "law"));
        if (parts.size() == 2 && parts[0] == "constant") return MeanLaw::constant(parse_double(parts[1], "law"));
        if (parts.size() == 4 && parts[0] == "twopoint")
            return MeanLaw::two_point(parse_double(parts[1], "law"), parse_double(parts[2], "law"),
                                      parse_double(parts[3], "law"));
    } catch (const InvalidLaw& e) {
        throw UsageError(std::string("--law: ") + e.what());
    }
    throw UsageError("--law must be uniform:A, constant:M or twopoint:M1:M2:P, got '" + text + "'");
}

std::string format_number(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

Row to_row(const SweepRow& row)
{
    Row out;
    out[0] = format_number(row.a);
    out[1] = format_number(row.r);
    out[2] = opt_number(row.e_mean);
    out[3] = opt_number(row.e_log_mean);
    out[4] = opt_number(row.e_x);
    if (row.local_class) out[5] = to_string(*row.local_class);
    if (row.global_class) out[6] = to_string(*row.global_class);
    if (row.fixed_class) out[7] = to_string(*row.fixed_class);
    if (row.regime) out[8] = to_string(*row.regime);
    if (row.estimate) fill_estimate(out, *row.estimate);
    out[14] = row.status;
    return out;
}

namespace {

struct RawArgs {
    std::string law;
    std::string family = "poisson";
    std::string regime;
    std::optional<double> r;
    std::optional<double> a;
    double tol = 1e-9;
    std::string a_grid;
    std::string r_grid;
    double trials = 1000;
    double max_generations = 200;
    double population_cap = 1e6;
    double aggregation_threshold = static_cast<double>(kDefaultAggregationThreshold);
    std::optional<std::uint64_t> seed;
    std::uint64_t skip_rows = 0;
    unsigned threads = 0;
    std::string output;
    std::string format = "csv";
};

void add_io(CLI::App* sub, RawArgs& raw)
{
    sub->add_option("--format", raw.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output,-o", raw.output, "output path (default: standard output)");
}

void add_sim(CLI::App* sub, RawArgs& raw)
{
    sub->add_option("--trials", raw.trials, "Monte Carlo trials");
    sub->add_option("--max-generations", raw.max_generations, "generation horizon");
    sub->add_option("--population-cap", raw.population_cap, "population counted as survival");
    sub->add_option("--aggregation-threshold", raw.aggregation_threshold,
                    "parent count from which geometric litters use one negative-binomial draw");
    sub->add_option("--seed", raw.seed, "master seed (default: $BRENV_SEED or 0)");
    sub->add_option("--threads", raw.threads, "worker threads (0: all cores)");
}

void build_app(CLI::App& app, RawArgs& raw)
{
    app.require_subcommand(1, 1);
    app.fallthrough(false);

    auto* classify = app.add_subcommand("classify", "analytic verdicts for one point");
    classify->add_option("--law", raw.law, "uniform:A | constant:M | twopoint:M1:M2:P")->required();
    classify->add_option("--family", raw.family)->check(CLI::IsMember({"poisson", "geometric"}));
    classify->add_option("--regime", raw.regime)->check(CLI::IsMember({"fixed", "global", "local"}));
    classify->add_option("--r", raw.r, "mutation probability");
    add_io(classify, raw);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo survival estimate");
    simulate->add_option("--law", raw.law, "uniform:A | constant:M | twopoint:M1:M2:P")->required();
    simulate->add_option("--family", raw.family)->check(CLI::IsMember({"poisson", "geometric"}));
    simulate->add_option("--regime", raw.regime)->required()->check(CLI::IsMember({"fixed", "global", "local"}));
    simulate->add_option("--r", raw.r, "mutation probability");
    add_sim(simulate, raw);
    add_io(simulate, raw);

    auto* rc = app.add_subcommand("rc", "critical mutation probability for U[0,a], 1 < a < 2");
    rc->add_option("--a", raw.a)->required();
    rc->add_option("--tol", raw.tol, "bound on |E(X)(r_c) - 1|");
    add_io(rc, raw);

    auto* sweep = app.add_subcommand("sweep", "analytic and Monte Carlo table over an (a, r) grid");
    sweep->add_option("--a-grid", raw.a_grid, "lo:hi:steps")->required();
    sweep->add_option("--r-grid", raw.r_grid, "lo:hi:steps")->required();
    sweep->add_option("--family", raw.family)->check(CLI::IsMember({"poisson", "geometric"}));
    sweep->add_option("--regime", raw.regime)->check(CLI::IsMember({"fixed", "global", "local", "all"}));
    sweep->add_option("--skip-rows", raw.skip_rows, "resume: omit the first N rows and the header");
    add_sim(sweep, raw);
    add_io(sweep, raw);
    // --trials 0 is meaningful for sweep (analytic columns only).
}

RegimeName to_regime(const std::string& name)
{
    if (name == "fixed") return RegimeName::Fixed;
    if (name == "global") return RegimeName::Global;
    if (name == "all") return RegimeName::All;
    return RegimeName::Local;
}

}  // namespace

std::string usage()
{
    CLI::App app{"Branching processes in fixed, global and local random environments", "brenv"};
    RawArgs raw;
    build_app(app, raw);
    return app.help();
}

RunSpec parse_args(const std::vector<std::string>& args)
{
    CLI::App app{"Branching processes in fixed, global and local random environments", "brenv"};
    RawArgs raw;
    build_app(app, raw);

    std::vector<std::string> storage{"brenv"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& s : storage) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunSpec spec;
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    spec.command = name == "classify" ? Command::Classify
                   : name == "simulate" ? Command::Simulate
                   : name == "rc"       ? Command::Rc
                                        : Command::Sweep;
    spec.family = raw.family == "geometric" ? OffspringFamily::Geometric : OffspringFamily::Poisson;
    spec.format = raw.format == "json" ? Format::Json : Format::Csv;
    spec.output = raw.output;
    spec.r = raw.r;
    spec.a = raw.a;
    spec.tol = raw.tol;
    spec.skip_rows = raw.skip_rows;
    spec.threads = raw.threads;
    spec.max_generations = to_count(raw.max_generations, "--max-generations");
    spec.population_cap = to_count(raw.population_cap, "--population-cap");
    spec.aggregation_threshold = to_count(raw.aggregation_threshold, "--aggregation-threshold");
    if (spec.command == Command::Sweep && raw.trials == 0.0)
        spec.trials = 0;
    else
        spec.trials = to_count(raw.trials, "--trials");

    if (raw.seed) {
        spec.seed = *raw.seed;
    } else if (const char* env = std::getenv("BRENV_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            spec.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("BRENV_SEED is not an unsigned integer: '") + env + "'");
        }
    }

    if (spec.r && !(*spec.r >= 0.0 && *spec.r <= 1.0)) throw UsageError("--r must lie in [0, 1]");
    if (!(spec.tol > 0.0)) throw UsageError("--tol must be positive");

    switch (spec.command) {
    case Command::Classify:
        spec.law = parse_law(raw.law);
        spec.regime = raw.regime.empty() ? (spec.r ? RegimeName::Local : RegimeName::Global) : to_regime(raw.regime);
        if (spec.regime == RegimeName::Local && !spec.r) throw UsageError("--regime local requires --r");
        break;
    case Command::Simulate:
        spec.law = parse_law(raw.law);
        spec.regime = to_regime(raw.regime);
        if (spec.regime == RegimeName::Local && !spec.r) throw UsageError("--regime local requires --r");
        break;
    case Command::Rc:
        if (!(*spec.a > 1.0 && *spec.a < 2.0)) throw UsageError("--a must satisfy 1 < a < 2");
        break;
    case Command::Sweep:
        spec.regime = raw.regime.empty() ? RegimeName::Local : to_regime(raw.regime);
        spec.a_grid = Grid::parse(raw.a_grid);
        spec.r_grid = Grid::parse(raw.r_grid);
        break;
    }
    return spec;
}

int execute(const RunSpec& spec, std::ostream& out, std::ostream& err)
{
    switch (spec.command) {
    case Command::Rc: return execute_rc(spec, out, err);
    case Command::Sweep: return execute_sweep(spec, out);
    case Command::Classify:
    case Command::Simulate: break;
    }

    Row row;
    if (!fill_analytics(row, spec)) {
        err << "error: " << row[14] << '\n';
        return 1;
    }
    if (spec.command == Command::Simulate) {
        SimConfig cfg;
        cfg.max_generations = spec.max_generations;
        cfg.population_cap = spec.population_cap;
        cfg.per_type_individual_threshold = spec.aggregation_threshold;
        cfg.seed = spec.seed;
        Regime regime = GlobalRegime{};
        if (spec.regime == RegimeName::Fixed) regime = FixedRegime{expect_mean(*spec.law)};
        if (spec.regime == RegimeName::Local) regime = LocalRegimeSpec{*spec.r};
        try {
            fill_estimate(row, estimate_survival(regime, *spec.law, spec.family, cfg, spec.trials, spec.threads));
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    }
    RowWriter writer(out, spec.format, kRowHeader, true);
    writer.write(row);
    writer.finish();
    return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunSpec spec;
    try {
        spec = parse_args(args);
    } catch (const HelpRequested& help) {
        out << help.what();
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n\n" << usage();
        return 2;
    }
    if (spec.output.empty()) return execute(spec, out, err);
    std::ofstream file(spec.output, std::ios::binary);
    if (!file) {
        err << "error: cannot open " << spec.output << '\n';
        return 1;
    }
    return execute(spec, file, err);
}

}  // namespace brenv::cli

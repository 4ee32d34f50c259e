#include "qcsm/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qcsm/stats.h"

namespace qcsm {

using nlohmann::json;

MlOutcome ml_success(const std::vector<double> &delta_f) {
    MlOutcome out;
    double best = 0;  // identity exponent
    for (double df : delta_f) {
        best = std::max(best, -df);
    }
    double denom = std::exp(0.0 - best);
    for (double df : delta_f) {
        denom += std::exp(-df - best);
    }
    out.success_softmax = std::exp(0.0 - best) / denom;
    out.success_argmax = best <= 0;
    return out;
}

ExperimentConfig parse_experiment_config(const std::string &json_text) {
    json j = json::parse(json_text);
    ExperimentConfig c;
    auto get = [&](const char *key, auto &field) {
        if (j.contains(key)) {
            field = j[key].get<std::remove_reference_t<decltype(field)>>();
        }
    };
    get("builtin", c.builtin);
    get("circuit_file", c.circuit_file);
    get("distances", c.distances);
    if (j.contains("duration")) {
        c.duration = j["duration"].get<int>();
    }
    get("cnot_schedule", c.cnot_schedule);
    get("p_values", c.p_values);
    get("pz", c.pz);
    get("classes", c.class_names);
    get("realizations", c.realizations);
    get("method", c.method);
    get("replicas", c.replicas);
    get("beta_min", c.beta_min);
    get("hottest_gap", c.hottest_gap);
    get("therm_sweeps", c.therm_sweeps);
    get("measure_sweeps", c.measure_sweeps);
    get("jackknife_blocks", c.jackknife_blocks);
    get("population", c.population);
    get("pa_steps", c.pa_steps);
    get("pa_sweeps_per_step", c.pa_sweeps_per_step);
    get("pa_repeats", c.pa_repeats);
    get("seed", c.seed);
    get("threads", c.threads);
    get("output_prefix", c.output_prefix);
    if (c.builtin.empty() && c.circuit_file.empty()) {
        throw std::invalid_argument("config needs builtin or circuit_file");
    }
    if (c.p_values.empty()) {
        throw std::invalid_argument("config needs p_values");
    }
    if (c.distances.empty() && c.circuit_file.empty()) {
        throw std::invalid_argument("config needs distances");
    }
    return c;
}

namespace {

// Everything fixed per (circuit, channel) pair, shared across realizations.
struct CompiledInstance {
    Circuit circuit;
    GaugeBasis basis;
    SpinModel model;
    McModel mc_full;                 // valid when no CSS split is used
    bool use_sides = false;
    McModel mc_side[2];
    // Per nontrivial class: chain of eta-diff flip lists per side, plus the
    // flips on constant terms.
    struct ClassPlan {
        std::string name;
        std::vector<std::vector<int>> side_chain_flips[2];  // per side, per step (mc indices)
        std::vector<std::vector<int>> full_chain_flips;     // when use_sides is false
        std::vector<int> constant_flips;                    // model interaction indices
    };
    std::vector<ClassPlan> classes;
};

std::vector<int> to_mc_indices(const McModel &mc, const std::vector<int> &model_indices) {
    std::vector<int> out;
    std::vector<int> rev;  // model interaction -> mc index
    for (size_t c = 0; c < mc.model_interaction.size(); c++) {
        int mi = mc.model_interaction[c];
        if (mi >= static_cast<int>(rev.size())) {
            rev.resize(mi + 1, -1);
        }
        rev[mi] = static_cast<int>(c);
    }
    for (int mi : model_indices) {
        if (mi < static_cast<int>(rev.size()) && rev[mi] >= 0) {
            out.push_back(rev[mi]);
        }
    }
    return out;
}

CompiledInstance compile_instance(const Circuit &circuit, const NoiseChannel &channel,
                                  const std::vector<std::string> &class_names) {
    CompiledInstance inst;
    inst.circuit = circuit;
    for (const auto &issue : validate_circuit(circuit)) {
        if (issue.is_error) {
            throw std::invalid_argument("invalid circuit: " + issue.message);
        }
    }
    inst.basis = compile_gauge_basis(circuit, false);
    inst.model = simplify(build_hamiltonian(inst.basis, channel));

    inst.use_sides = inst.model.has_css_split;
    if (inst.use_sides) {
        inst.mc_side[0] = McModel::compile(inst.model, 0);
        inst.mc_side[1] = McModel::compile(inst.model, 1);
    } else {
        inst.mc_full = McModel::compile(inst.model);
    }

    // Expand the declared observables into the group they generate.
    std::vector<const ObservableDecl *> gens;
    for (const auto &obs : circuit.observables) {
        if (class_names.empty() ||
            std::find(class_names.begin(), class_names.end(), obs.name) != class_names.end()) {
            gens.push_back(&obs);
        }
    }
    if (gens.empty()) {
        throw std::invalid_argument("experiment needs at least one declared observable class");
    }
    if (gens.size() > 16) {
        throw std::invalid_argument("too many observable generators");
    }
    std::vector<std::pair<std::string, SpacetimePauli>> classes;
    for (uint32_t mask = 1; mask < (1u << gens.size()); mask++) {
        SpacetimePauli rep(circuit.grid());
        std::string name;
        for (size_t i = 0; i < gens.size(); i++) {
            if ((mask >> i) & 1) {
                multiply_inplace(rep, gens[i]->representative);
                if (!name.empty()) {
                    name += "*";
                }
                name += gens[i]->name;
            }
        }
        bool dup = rep.is_identity();
        for (const auto &[n, r] : classes) {
            dup |= r == rep;
        }
        if (!dup) {
            classes.emplace_back(name, rep);
        }
    }

    for (const auto &[name, rep] : classes) {
        CompiledInstance::ClassPlan plan;
        plan.name = name;
        for (const auto &q : decompose_logical(rep)) {
            std::vector<int> flips = flipped_interactions(inst.model, q);
            std::vector<int> nonconst_flips, const_flips;
            for (int c : flips) {
                (inst.model.interactions[c].is_constant() ? const_flips : nonconst_flips).push_back(c);
            }
            for (int c : const_flips) {
                plan.constant_flips.push_back(c);
            }
            if (inst.use_sides) {
                for (int side = 0; side < 2; side++) {
                    std::vector<int> side_model;
                    for (int c : nonconst_flips) {
                        if (inst.model.interaction_side[c] == side) {
                            side_model.push_back(c);
                        }
                    }
                    if (!side_model.empty()) {
                        plan.side_chain_flips[side].push_back(to_mc_indices(inst.mc_side[side], side_model));
                    }
                }
            } else if (!nonconst_flips.empty()) {
                plan.full_chain_flips.push_back(to_mc_indices(inst.mc_full, nonconst_flips));
            }
        }
        // Sites flipped twice cancel.
        std::sort(plan.constant_flips.begin(), plan.constant_flips.end());
        std::vector<int> dedup;
        for (size_t i = 0; i < plan.constant_flips.size();) {
            size_t j = i;
            while (j < plan.constant_flips.size() && plan.constant_flips[j] == plan.constant_flips[i]) {
                j++;
            }
            if ((j - i) % 2 == 1) {
                dedup.push_back(plan.constant_flips[i]);
            }
            i = j;
        }
        plan.constant_flips = std::move(dedup);
        inst.classes.push_back(std::move(plan));
    }
    return inst;
}

// dF of one class for one realization: per-side Bennett chains plus the
// exact constant part.
double class_delta_f(const CompiledInstance &inst, const CompiledInstance::ClassPlan &plan,
                     const std::vector<int8_t> &eta_full, const ExperimentConfig &cfg, uint64_t seed,
                     double *variance_out) {
    double df = 0, var = 0;
    BennettParams bp;
    bp.schedule = TemperatureSchedule::geometric(cfg.replicas, cfg.beta_min, cfg.hottest_gap);
    bp.therm_sweeps = cfg.therm_sweeps;
    bp.measure_sweeps = cfg.measure_sweeps;
    bp.jackknife_blocks = cfg.jackknife_blocks;

    PopulationParams pp;
    pp.schedule = TemperatureSchedule::geometric(cfg.pa_steps, 0.0, cfg.hottest_gap);
    pp.population = cfg.population;
    pp.sweeps_per_step = cfg.pa_sweeps_per_step;
    pp.repeats = cfg.pa_repeats;

    auto run_side = [&](const McModel &mc, const std::vector<std::vector<int>> &chain_flips,
                        uint64_t stream) {
        if (chain_flips.empty()) {
            return;
        }
        std::vector<int8_t> eta0 = mc.slice_eta(eta_full);
        if (cfg.method == "population") {
            std::vector<int8_t> eta1 = eta0;
            for (const auto &step : chain_flips) {
                for (int c : step) {
                    eta1[c] = -eta1[c];
                }
            }
            auto base = population_annealing_f(mc, eta0, pp, hash_combine(seed, stream * 2));
            auto shifted = population_annealing_f(mc, eta1, pp, hash_combine(seed, stream * 2 + 1));
            df += shifted.value - base.value;
            var += shifted.variance + base.variance;
        } else {
            std::vector<std::vector<int8_t>> chain;
            chain.push_back(eta0);
            for (const auto &step : chain_flips) {
                auto next = chain.back();
                for (int c : step) {
                    next[c] = -next[c];
                }
                chain.push_back(std::move(next));
            }
            auto est = bennett_delta_f(mc, chain, bp, hash_combine(seed, stream));
            df += est.value;
            var += est.variance;
        }
    };

    if (inst.use_sides) {
        run_side(inst.mc_side[0], plan.side_chain_flips[0], 11);
        run_side(inst.mc_side[1], plan.side_chain_flips[1], 12);
    } else {
        run_side(inst.mc_full, plan.full_chain_flips, 13);
    }
    for (int c : plan.constant_flips) {
        const auto &ia = inst.model.interactions[c];
        double lw_now = eta_full[c] > 0 ? ia.lw_plus : ia.lw_minus;
        double lw_flip = eta_full[c] > 0 ? ia.lw_minus : ia.lw_plus;
        df += lw_now - lw_flip;  // F gains -lw(flip) + lw(now)
    }
    if (variance_out) {
        *variance_out = var;
    }
    return df;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig &config) {
    ExperimentResult result;
    json manifest;
    manifest["seed"] = config.seed;
    manifest["method"] = config.method;
    manifest["realizations"] = config.realizations;
    manifest["pz"] = config.pz;
    json point_summaries = json::array();

    std::vector<int> distances = config.distances.empty() ? std::vector<int>{0} : config.distances;

    for (int d : distances) {
        Circuit circuit;
        if (!config.circuit_file.empty()) {
            std::ostringstream buf;
            std::ifstream in(config.circuit_file);
            if (!in) {
                throw std::invalid_argument("cannot open circuit file " + config.circuit_file);
            }
            buf << in.rdbuf();
            circuit = parse_circuit(buf.str());
        } else {
            BuiltinParams bp;
            bp.distance = d;
            bp.duration = config.duration;
            bp.cnot_schedule = config.cnot_schedule;
            circuit = builtin_circuit(config.builtin, bp);
        }
        for (size_t pi = 0; pi < config.p_values.size(); pi++) {
            double p = config.p_values[pi];
            NoiseChannel channel = NoiseChannel::independent(p, config.pz);
            CompiledInstance inst = compile_instance(circuit, channel, config.class_names);

            const int n = config.realizations;
            std::vector<double> softmax(n), argmax(n);
            std::atomic<int> next{0};
            uint64_t p_key = static_cast<uint64_t>(std::llround(p * 1e12));
            auto worker = [&]() {
                while (true) {
                    int i = next.fetch_add(1);
                    if (i >= n) {
                        return;
                    }
                    uint64_t rseed = counter_bits(config.seed, static_cast<uint64_t>(d), p_key,
                                                  static_cast<uint64_t>(i));
                    DisorderRealization eta = sample_signs_direct(inst.model, rseed, 0);
                    std::vector<double> dfs;
                    for (size_t cl = 0; cl < inst.classes.size(); cl++) {
                        dfs.push_back(class_delta_f(inst, inst.classes[cl], eta.eta, config,
                                                    hash_combine(rseed, 100 + cl), nullptr));
                    }
                    MlOutcome out = ml_success(dfs);
                    softmax[i] = out.success_softmax;
                    argmax[i] = out.success_argmax ? 1.0 : 0.0;
                }
            };
            int nthreads = config.threads > 0 ? config.threads
                                              : static_cast<int>(std::thread::hardware_concurrency());
            nthreads = std::max(1, std::min(nthreads, n));
            std::vector<std::thread> pool;
            for (int tIdx = 1; tIdx < nthreads; tIdx++) {
                pool.emplace_back(worker);
            }
            worker();
            for (auto &th : pool) {
                th.join();
            }

            CurvePoint pt;
            pt.d = d;
            pt.p = p;
            pt.n = n;
            pt.seed = config.seed;
            pt.rate = 1.0 - mean(softmax);
            pt.ci = 2.0 * std::sqrt(jackknife_variance_of_mean(softmax));
            pt.rate_argmax = 1.0 - mean(argmax);
            result.points.push_back(pt);

            json ps;
            ps["d"] = d;
            ps["p"] = p;
            ps["rate"] = pt.rate;
            ps["rate_argmax"] = pt.rate_argmax;
            ps["ci"] = pt.ci;
            ps["classes"] = inst.classes.size();
            ps["spins"] = inst.model.num_spins;
            point_summaries.push_back(ps);
        }
    }
    manifest["points"] = point_summaries;
    result.manifest_json = manifest.dump(2);
    result.csv = curve_points_to_csv(result.points);
    return result;
}

std::string curve_points_to_csv(const std::vector<CurvePoint> &points) {
    std::string out = "d,p,rate,ci,n,seed\n";
    char buf[256];
    for (const auto &pt : points) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%ld,%llu\n", pt.d, pt.p, pt.rate, pt.ci,
                      pt.n, static_cast<unsigned long long>(pt.seed));
        out += buf;
    }
    return out;
}

std::vector<CurvePoint> curve_points_from_csv(const std::string &text) {
    std::vector<CurvePoint> out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (first && line.rfind("d,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        CurvePoint pt;
        unsigned long long seed = 0;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%ld,%llu", &pt.d, &pt.p, &pt.rate, &pt.ci, &pt.n,
                        &seed) >= 4) {
            pt.seed = seed;
            out.push_back(pt);
        }
    }
    return out;
}

ThresholdEstimate estimate_threshold(const std::vector<CurvePoint> &points, double window_lo,
                                     double window_hi, uint64_t seed, int resamples) {
    struct Pt {
        double x, y, sigma;
    };
    std::map<int, std::vector<Pt>> by_d;
    for (const auto &pt : points) {
        if (pt.p >= window_lo && pt.p <= window_hi) {
            double s = pt.ci > 0 ? pt.ci / 2 : 1e-6;
            by_d[pt.d].push_back({pt.p, pt.rate, s});
        }
    }
    std::vector<int> ds;
    for (const auto &[d, pts] : by_d) {
        if (pts.size() >= 2) {
            ds.push_back(d);
        }
    }
    if (ds.size() < 2) {
        throw NoCrossingError("need at least two distances with two points inside the window");
    }

    auto fit_line = [](const std::vector<Pt> &pts, double *m_out, double *b_out) {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto &p : pts) {
            double w = 1.0 / (p.sigma * p.sigma);
            sw += w;
            sx += w * p.x;
            sy += w * p.y;
            sxx += w * p.x * p.x;
            sxy += w * p.x * p.y;
        }
        double det = sw * sxx - sx * sx;
        if (std::abs(det) < 1e-30) {
            throw NoCrossingError("degenerate line fit");
        }
        *m_out = (sw * sxy - sx * sy) / det;
        *b_out = (sxx * sy - sx * sxy) / det;
    };
    auto intersect = [&](const std::vector<double> &ms, const std::vector<double> &bs, double *x_out,
                         double *y_out) {
        // Least squares on m_i x - y + b_i = 0.
        double smm = 0, sm = 0, smb = 0, sb = 0;
        int n = static_cast<int>(ms.size());
        for (int i = 0; i < n; i++) {
            smm += ms[i] * ms[i];
            sm += ms[i];
            smb += ms[i] * bs[i];
            sb += bs[i];
        }
        double a11 = smm, a12 = -sm, a21 = -sm, a22 = n;
        double r1 = -smb, r2 = sb;
        double det = a11 * a22 - a12 * a21;
        double spread = 0;
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                spread = std::max(spread, std::abs(ms[i] - ms[j]));
            }
        }
        if (spread < 1e-9 || std::abs(det) < 1e-20) {
            throw NoCrossingError("fitted lines are parallel within tolerance");
        }
        *x_out = (r1 * a22 - a12 * r2) / det;
        *y_out = (a11 * r2 - a21 * r1) / det;
    };

    ThresholdEstimate est;
    est.window_lo = window_lo;
    est.window_hi = window_hi;
    std::vector<double> ms, bs;
    for (int d : ds) {
        double m, b;
        fit_line(by_d[d], &m, &b);
        est.distances.push_back(d);
        est.slopes.push_back(m);
        est.intercepts.push_back(b);
        ms.push_back(m);
        bs.push_back(b);
    }
    intersect(ms, bs, &est.x_c, &est.y_c);
    est.in_window = est.x_c >= window_lo && est.x_c <= window_hi;

    // Bootstrap: jitter each point within its error and refit.
    Rng rng(seed, 0xb005);
    std::vector<double> xs;
    for (int b = 0; b < resamples; b++) {
        std::vector<double> bms, bbs;
        bool ok = true;
        for (int d : ds) {
            std::vector<Pt> jit = by_d[d];
            for (auto &p : jit) {
                p.y += p.sigma * rng.gaussian();
            }
            double m, bb;
            try {
                fit_line(jit, &m, &bb);
            } catch (const NoCrossingError &) {
                ok = false;
                break;
            }
            bms.push_back(m);
            bbs.push_back(bb);
        }
        if (!ok) {
            continue;
        }
        double x, y;
        try {
            intersect(bms, bbs, &x, &y);
        } catch (const NoCrossingError &) {
            continue;
        }
        xs.push_back(x);
    }
    if (xs.size() >= 16) {
        std::sort(xs.begin(), xs.end());
        est.ci_lo = xs[static_cast<size_t>(0.025 * xs.size())];
        est.ci_hi = xs[std::min(xs.size() - 1, static_cast<size_t>(0.975 * xs.size()))];
        double bar = mean(xs);
        double var = 0;
        for (double v : xs) {
            var += (v - bar) * (v - bar);
        }
        est.sigma = std::sqrt(var / (xs.size() - 1));
    } else {
        est.ci_lo = est.ci_hi = est.x_c;
    }
    return est;
}

namespace {

double barrier_terms(const std::vector<std::pair<int, int>> &weights_and_coeffs, double p) {
    double acc = 0;
    for (auto [w, c] : weights_and_coeffs) {
        acc += c * effective_coupling(w, 0, p, 0);
    }
    return acc;
}

const std::vector<std::pair<int, int>> &barrier_family(const std::string &family) {
    static const std::vector<std::pair<int, int>> rep = {{1, 2}, {2, -4}, {3, 2}};
    static const std::vector<std::pair<int, int>> toric = {{5, 2}, {4, -4}, {3, 2}};
    if (family == "rep" || family == "rep_standard" || family == "rep_wiggling") {
        return rep;
    }
    if (family == "toric" || family == "toric_standard" || family == "toric_wiggling") {
        return toric;
    }
    throw std::invalid_argument("unknown barrier family " + family);
}

}  // namespace

double barrier_difference(const std::string &family, double p) {
    if (!(p > 0 && p < 0.5)) {
        if (p == 0.5) {
            return 0;
        }
        throw std::invalid_argument("barrier_difference needs p in (0, 0.5]");
    }
    return barrier_terms(barrier_family(family), p);
}

double barrier_difference_limit(const std::string &family) {
    // lim sum c_w K(w) = -(1/2) sum c_w ln w when the coefficients cancel.
    double acc = 0;
    for (auto [w, c] : barrier_family(family)) {
        acc += -0.5 * c * std::log(static_cast<double>(w));
    }
    return acc;
}

}  // namespace qcsm

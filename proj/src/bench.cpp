#include "vcsched/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace vcsched {

std::string to_string(sweep_axis a) {
    switch (a) {
        case sweep_axis::n_subtasks: return "n_subtasks";
        case sweep_axis::n_vehicles: return "n_vehicles";
        case sweep_axis::n_layers: return "n_layers";
        case sweep_axis::ccr: return "ccr";
    }
    return "?";
}

sweep_axis axis_from_string(const std::string& s) {
    if (s == "n_subtasks") return sweep_axis::n_subtasks;
    if (s == "n_vehicles") return sweep_axis::n_vehicles;
    if (s == "n_layers") return sweep_axis::n_layers;
    if (s == "ccr") return sweep_axis::ccr;
    throw config_error("unknown sweep axis: " + s);
}

namespace {

struct ini_data {
    // section -> key -> value
    std::map<std::string, std::map<std::string, std::string>> sections;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

ini_data parse_ini(const std::string& text) {
    ini_data out;
    std::istringstream in(text);
    std::string line, section = "experiment";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected key=value");
        out.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

class section_reader {
public:
    section_reader(const ini_data& ini, std::string name) : name_(std::move(name)) {
        auto it = ini.sections.find(name_);
        if (it != ini.sections.end()) kv_ = it->second;
    }
    ~section_reader() = default;

    void check_consumed() const {
        for (const auto& [k, v] : kv_)
            if (!consumed_.count(k))
                throw config_error("unknown key [" + name_ + "] " + k);
    }

    std::optional<std::string> raw(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        consumed_.insert(key);
        return it->second;
    }
    void get(const std::string& key, double& v) {
        if (auto s = raw(key)) v = parse_double(key, *s);
    }
    void get(const std::string& key, int& v) {
        if (auto s = raw(key)) v = static_cast<int>(parse_double(key, *s));
    }
    void get(const std::string& key, std::uint64_t& v) {
        if (auto s = raw(key)) v = std::stoull(*s);
    }
    void get(const std::string& key, bool& v) {
        if (auto s = raw(key)) v = (*s == "true" || *s == "1" || *s == "yes");
    }
    void get(const std::string& key, std::string& v) {
        if (auto s = raw(key)) v = *s;
    }

    double parse_double(const std::string& key, const std::string& s) const {
        try {
            size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw config_error("bad number for [" + name_ + "] " + key + ": " + s);
        }
    }

private:
    std::string name_;
    std::map<std::string, std::string> kv_;
    std::set<std::string> consumed_;
};

}  // namespace

experiment_config parse_config_text(const std::string& text) {
    auto ini = parse_ini(text);
    for (const auto& [sec, _] : ini.sections)
        if (sec != "experiment" && sec != "dag" && sec != "vc" && sec != "channel" &&
            sec != "rfid" && sec != "mga")
            throw config_error("unknown section [" + sec + "]");

    experiment_config cfg;
    {
        section_reader r(ini, "experiment");
        if (auto s = r.raw("axis")) cfg.axis = axis_from_string(*s);
        if (auto s = r.raw("axis_values")) {
            cfg.axis_values.clear();
            for (const auto& item : split_list(*s))
                cfg.axis_values.push_back(r.parse_double("axis_values", item));
        }
        r.get("trials", cfg.trials);
        if (auto s = r.raw("schedulers")) cfg.schedulers = split_list(*s);
        r.get("base_seed", cfg.base_seed);
        std::string tmp;
        r.get("trace_csv", tmp);
        if (!tmp.empty()) cfg.trace_csv = tmp;
        tmp.clear();
        r.get("trace_meta_csv", tmp);
        if (!tmp.empty()) cfg.trace_meta_csv = tmp;
        tmp.clear();
        r.get("dag_file", tmp);
        if (!tmp.empty()) cfg.dag_file = tmp;
        r.check_consumed();
    }
    {
        section_reader r(ini, "dag");
        r.get("n_subtasks", cfg.dag.n_subtasks);
        r.get("n_layers", cfg.dag.n_layers);
        r.get("ccr", cfg.dag.ccr);
        r.get("workload_mean_cycles", cfg.dag.workload_mean_cycles);
        r.get("workload_rel_std", cfg.dag.workload_rel_std);
        r.get("data_mean_bits", cfg.dag.data_mean_bits);
        r.get("data_rel_std", cfg.dag.data_rel_std);
        r.get("max_predecessors", cfg.dag.max_predecessors);
        r.check_consumed();
    }
    {
        section_reader r(ini, "vc");
        r.get("n_vehicles", cfg.vc.n_vehicles);
        r.get("region_x_m", cfg.vc.region_x_m);
        r.get("region_y_m", cfg.vc.region_y_m);
        r.get("speed_min_mps", cfg.vc.speed_min_mps);
        r.get("speed_max_mps", cfg.vc.speed_max_mps);
        r.get("horizon_s", cfg.vc.horizon_s);
        r.get("sample_dt_s", cfg.vc.sample_dt_s);
        r.get("cpu_mean_hz", cfg.vc.cpu_mean_hz);
        r.get("cpu_rel_std", cfg.vc.cpu_rel_std);
        r.get("antenna_m", cfg.vc.antenna_m);
        r.get("arrival_rate", cfg.vc.arrival_rate);
        r.get("departure_rate", cfg.vc.departure_rate);
        r.check_consumed();
    }
    {
        section_reader r(ini, "channel");
        auto& ch = cfg.sim.channel;
        r.get("l_b_db", ch.l_b_db);
        r.get("pl_d0_db", ch.pl_d0_db);
        r.get("eta2", ch.eta2);
        r.get("delta", ch.delta);
        r.get("wavelength_m", ch.wavelength_m);
        r.get("gamma_a", ch.gamma_a);
        r.get("gamma_b", ch.gamma_b);
        r.get("gamma_scale", ch.gamma_scale);
        r.get("radius_m", ch.radius_m);
        r.get("theta", ch.theta);
        auto& ct = cfg.sim.contact;
        std::string mode;
        r.get("mu_mode", mode);
        if (!mode.empty()) {
            if (mode == "constant") ct.constant_mode = true;
            else if (mode == "kinematic") ct.constant_mode = false;
            else throw config_error("bad mu_mode: " + mode);
        }
        r.get("mu_constant", ct.mu_constant);
        r.get("mu_floor", ct.mu_floor);
        r.get("margin_eps_m", ct.margin_eps_m);
        ct.radius_m = ch.radius_m;
        r.check_consumed();
    }
    {
        section_reader r(ini, "rfid");
        r.get("alpha_t", cfg.rfid.alpha_t);
        r.get("alpha_r", cfg.rfid.alpha_r);
        r.get("phi_scale", cfg.rfid.phi_scale);
        std::string mode;
        r.get("cti_sign_mode", mode);
        if (!mode.empty()) {
            if (mode == "as_printed") cfg.rfid.cti_mode = cti_sign_mode::as_printed;
            else if (mode == "absolute") cfg.rfid.cti_mode = cti_sign_mode::absolute;
            else throw config_error("bad cti_sign_mode: " + mode);
        }
        r.check_consumed();
    }
    {
        section_reader r(ini, "mga");
        r.get("population", cfg.mga.population);
        r.get("generations", cfg.mga.generations);
        r.get("crossover_rate", cfg.mga.crossover_rate);
        r.get("mutation_rate", cfg.mga.mutation_rate);
        r.get("elite", cfg.mga.elite);
        r.check_consumed();
    }

    if (cfg.trials < 1) throw config_error("trials must be >= 1");
    if (cfg.axis_values.empty()) throw config_error("axis_values must be nonempty");
    if (cfg.schedulers.empty()) throw config_error("schedulers must be nonempty");
    if (cfg.sim.channel.theta <= 0 || cfg.sim.channel.theta > 1)
        throw config_error("theta must be in (0, 1]");
    return cfg;
}

experiment_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::uint64_t instance_seed(std::uint64_t base, int axis_idx, int trial) {
    // splitmix64 over the packed coordinates
    std::uint64_t z = base * 0x9e3779b97f4a7c15ULL +
                      (static_cast<std::uint64_t>(axis_idx) << 32) +
                      static_cast<std::uint64_t>(trial) + 1;
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

std::unique_ptr<scheduler> make_scheduler(const std::string& name,
                                          const experiment_config& cfg) {
    if (name == "rfid") return std::make_unique<rfid_scheduler>(cfg.rfid);
    if (name == "heft") return std::make_unique<heft_scheduler>();
    if (name == "la") return std::make_unique<la_scheduler>();
    if (name == "mga") return std::make_unique<mga_scheduler>(cfg.mga);
    if (name == "brute_force") return std::make_unique<brute_force_scheduler>();
    throw config_error("unknown scheduler: " + name);
}

namespace {

int thread_budget() {
    if (const char* env = std::getenv("DAGVC_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct cell_params {
    dag_gen_params dag;
    synth_trace_params vc;
};

cell_params apply_axis(const experiment_config& cfg, double value) {
    cell_params out{cfg.dag, cfg.vc};
    switch (cfg.axis) {
        case sweep_axis::n_subtasks: out.dag.n_subtasks = static_cast<int>(value); break;
        case sweep_axis::n_vehicles: out.vc.n_vehicles = static_cast<int>(value); break;
        case sweep_axis::n_layers: out.dag.n_layers = static_cast<int>(value); break;
        case sweep_axis::ccr: out.dag.ccr = value; break;
    }
    return out;
}

}  // namespace

std::vector<metrics_row> run_sweep(const experiment_config& cfg) {
    const int n_axis = static_cast<int>(cfg.axis_values.size());
    const int n_sched = static_cast<int>(cfg.schedulers.size());
    std::vector<metrics_row> rows(
        static_cast<size_t>(n_axis) * cfg.trials * n_sched);

    std::optional<validated_dag> fixed_dag;
    if (cfg.dag_file)
        fixed_dag.emplace(validate(normalize_endpoints(load_dag(*cfg.dag_file))));
    std::optional<mobility_trace> fixed_trace;
    if (cfg.trace_csv) {
        if (!cfg.trace_meta_csv)
            throw config_error("trace_csv requires trace_meta_csv");
        fixed_trace.emplace(load_trace_csv(*cfg.trace_csv, *cfg.trace_meta_csv));
    }

    std::atomic<int> next_task{0};
    const int n_tasks = n_axis * cfg.trials;

    auto worker = [&] {
        for (;;) {
            int task = next_task.fetch_add(1);
            if (task >= n_tasks) return;
            int axis_idx = task / cfg.trials;
            int trial = task % cfg.trials;
            double value = cfg.axis_values[axis_idx];
            auto cell = apply_axis(cfg, value);

            std::uint64_t seed = instance_seed(cfg.base_seed, axis_idx, trial);
            std::mt19937_64 gen_rng(seed);
            std::optional<validated_dag> dag_local;
            const validated_dag* dag = fixed_dag ? &*fixed_dag : nullptr;
            if (!dag) {
                dag_local.emplace(validate(generate_random_dag(cell.dag, gen_rng)));
                dag = &*dag_local;
            }
            std::optional<mobility_trace> trace_local;
            const mobility_trace* trace = fixed_trace ? &*fixed_trace : nullptr;
            if (!trace) {
                trace_local.emplace(generate_synthetic_trace(cell.vc, gen_rng));
                trace = &*trace_local;
            }

            for (int si = 0; si < n_sched; ++si) {
                auto sched = make_scheduler(cfg.schedulers[si], cfg);
                std::mt19937_64 sched_rng(seed ^ 0x5cedu ^ (std::uint64_t(si) << 48));
                auto outcome = run_trial(*dag, *trace, *sched, cfg.sim, sched_rng);
                metrics_row& row =
                    rows[(static_cast<size_t>(task)) * n_sched + si];
                row.scheduler = cfg.schedulers[si];
                row.axis = cfg.axis;
                row.value = value;
                row.seed = seed;
                row.n_subtasks = fixed_dag ? fixed_dag->size() : cell.dag.n_subtasks;
                row.n_vehicles = fixed_trace ? fixed_trace->n_vehicles()
                                             : cell.vc.n_vehicles;
                row.n_layers = cell.dag.n_layers;
                row.ccr = cell.dag.ccr;
                row.otc_s = outcome.otc_s;
                row.success = outcome.success ? 1 : 0;
                row.sched_runtime_ms = outcome.sched_runtime_s * 1e3;
            }
        }
    };

    int n_threads = std::min(thread_budget(), n_tasks);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

std::map<std::pair<std::string, double>, aggregate_cell> aggregate(
    const std::vector<metrics_row>& rows) {
    if (rows.empty()) throw config_error("aggregate: empty input");
    std::map<std::pair<std::string, double>, aggregate_cell> out;
    std::map<std::pair<std::string, double>, std::vector<double>> otcs;
    for (const auto& row : rows) {
        auto key = std::make_pair(row.scheduler, row.value);
        auto& cell = out[key];
        ++cell.n_trials;
        cell.mean_runtime_ms += row.sched_runtime_ms;
        if (row.success) {
            ++cell.n_success;
            otcs[key].push_back(*row.otc_s);
        }
    }
    for (auto& [key, cell] : out) {
        cell.success_rate = static_cast<double>(cell.n_success) / cell.n_trials;
        cell.mean_runtime_ms /= cell.n_trials;
        const auto& v = otcs[key];
        if (!v.empty()) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= v.size();
            cell.mean_otc = mean;
            if (v.size() > 1) {
                double var = 0.0;
                for (double x : v) var += (x - mean) * (x - mean);
                var /= (v.size() - 1);
                cell.ci95_otc = 1.96 * std::sqrt(var / v.size());
            }
        }
    }
    return out;
}

namespace {

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(9);
    ss << v;
    return ss.str();
}

}  // namespace

std::string to_csv_row(const metrics_row& row) {
    std::ostringstream ss;
    ss << row.scheduler << ',' << to_string(row.axis) << ',' << format_double(row.value)
       << ',' << row.seed << ',' << row.n_subtasks << ',' << row.n_vehicles << ','
       << row.n_layers << ',' << format_double(row.ccr) << ','
       << (row.otc_s ? format_double(*row.otc_s) : "") << ',' << row.success << ','
       << format_double(row.sched_runtime_ms);
    return ss.str();
}

void write_results_csv(const std::vector<metrics_row>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write " + path);
    out << metrics_csv_header() << "\n";
    for (const auto& row : rows) out << to_csv_row(row) << "\n";
}

void write_summary_json(const std::vector<metrics_row>& rows, const std::string& path) {
    auto agg = aggregate(rows);
    nlohmann::json j;
    for (const auto& [key, cell] : agg) {
        nlohmann::json c;
        c["n_trials"] = cell.n_trials;
        c["n_success"] = cell.n_success;
        c["success_rate"] = cell.success_rate;
        if (cell.mean_otc) c["mean_otc_s"] = *cell.mean_otc;
        c["ci95_otc_s"] = cell.ci95_otc;
        c["mean_runtime_ms"] = cell.mean_runtime_ms;
        j[key.first][format_double(key.second)] = c;
    }
    std::ofstream out(path);
    if (!out) throw config_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace vcsched

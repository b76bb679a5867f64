#include "sdcnn/run_config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "sdcnn/errors.hpp"
#include "sdcnn/format.hpp"

namespace sdcnn {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(where + ": expected true/false, got '" + v + "'");
}

double parse_double(const std::string& v, const std::string& where) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size()) throw ConfigError(where + ": expected a number, got '" + v + "'");
    return out;
}

std::int64_t parse_int(const std::string& v, const std::string& where) {
    std::size_t pos = 0;
    std::int64_t out = 0;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size()) throw ConfigError(where + ": expected an integer, got '" + v + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
    RunConfig config;
    DataPaths data;
    SynthParams synth;
    bool saw_data = false;
    bool saw_synth = false;

    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "data" && section != "synth" && section != "split" &&
                section != "train" && section != "sweep" && section != "density" &&
                section != "output")
                throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(where + ": expected 'key = value'");

        if (section == "data") {
            saw_data = true;
            if (key == "edges") data.edges = value;
            else if (key == "features") data.features = value;
            else if (key == "labels") data.labels = value;
            else if (key == "directed") data.directed = parse_bool(value, where);
            else if (key == "normalize_features")
                data.normalize_features = parse_bool(value, where);
            else throw ConfigError(where + ": unknown key '" + key + "' in [data]");
        } else if (section == "synth") {
            saw_synth = true;
            if (key == "kind") synth.kind = parse_synth_kind(value);
            else if (key == "nodes") synth.n_nodes = parse_int(value, where);
            else if (key == "blocks") synth.blocks = parse_int(value, where);
            else if (key == "p_in") synth.p_in = parse_double(value, where);
            else if (key == "p_out") synth.p_out = parse_double(value, where);
            else if (key == "features") synth.n_features = parse_int(value, where);
            else if (key == "feature_signal") synth.feature_signal = parse_double(value, where);
            else if (key == "attach_edges") synth.attach_edges = parse_int(value, where);
            else if (key == "seed") synth.seed = static_cast<std::uint64_t>(parse_int(value, where));
            else throw ConfigError(where + ": unknown key '" + key + "' in [synth]");
        } else if (section == "split") {
            if (key == "train") config.split.train_fraction = parse_double(value, where);
            else if (key == "valid") config.split.valid_fraction = parse_double(value, where);
            else if (key == "test") config.split.test_fraction = parse_double(value, where);
            else if (key == "seed")
                config.split.seed = static_cast<std::uint64_t>(parse_int(value, where));
            else throw ConfigError(where + ": unknown key '" + key + "' in [split]");
        } else if (section == "train") {
            if (key == "hops") config.train.n_hops = parse_int(value, where);
            else if (key == "mode") config.train.threshold_mode = parse_kernel_mode(value);
            else if (key == "threshold") config.train.threshold = parse_double(value, where);
            else if (key == "learning_rate")
                config.train.learning_rate = parse_double(value, where);
            else if (key == "momentum") config.train.momentum = parse_double(value, where);
            else if (key == "max_epochs") config.train.max_epochs = parse_int(value, where);
            else if (key == "patience") config.train.patience = parse_int(value, where);
            else if (key == "seed")
                config.train.seed = static_cast<std::uint64_t>(parse_int(value, where));
            else if (key == "activation") config.train.activation = parse_activation(value);
            else throw ConfigError(where + ": unknown key '" + key + "' in [train]");
        } else if (section == "sweep") {
            if (key == "thresholds") {
                config.sweep_thresholds.clear();
                for (const std::string& item : split_list(value))
                    config.sweep_thresholds.push_back(parse_double(item, where));
            } else {
                throw ConfigError(where + ": unknown key '" + key + "' in [sweep]");
            }
        } else if (section == "density") {
            if (key == "hops_list") {
                config.density_hops.clear();
                for (const std::string& item : split_list(value))
                    config.density_hops.push_back(parse_int(item, where));
            } else {
                throw ConfigError(where + ": unknown key '" + key + "' in [density]");
            }
        } else if (section == "output") {
            if (key == "dir") config.out_dir = value;
            else throw ConfigError(where + ": unknown key '" + key + "' in [output]");
        } else {
            throw ConfigError(where + ": key outside any section");
        }
    }

    if (saw_data == saw_synth)
        throw ConfigError(origin + ": exactly one of [data] and [synth] must be present");
    if (saw_data) config.data = data;
    if (saw_synth) config.synth = synth;
    return config;
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config_text(buf.str(), path);
}

std::string serialize_run_config(const RunConfig& config) {
    std::ostringstream out;
    if (config.data) {
        out << "[data]\n";
        out << "edges = " << config.data->edges << "\n";
        out << "features = " << config.data->features << "\n";
        out << "labels = " << config.data->labels << "\n";
        out << "directed = " << (config.data->directed ? "true" : "false") << "\n";
        out << "normalize_features = "
            << (config.data->normalize_features ? "true" : "false") << "\n";
    }
    if (config.synth) {
        out << "[synth]\n";
        out << "kind = " << synth_kind_name(config.synth->kind) << "\n";
        out << "nodes = " << config.synth->n_nodes << "\n";
        out << "blocks = " << config.synth->blocks << "\n";
        out << "p_in = " << format_double(config.synth->p_in) << "\n";
        out << "p_out = " << format_double(config.synth->p_out) << "\n";
        out << "features = " << config.synth->n_features << "\n";
        out << "feature_signal = " << format_double(config.synth->feature_signal) << "\n";
        out << "attach_edges = " << config.synth->attach_edges << "\n";
        out << "seed = " << config.synth->seed << "\n";
    }
    out << "[split]\n";
    out << "train = " << format_double(config.split.train_fraction) << "\n";
    out << "valid = " << format_double(config.split.valid_fraction) << "\n";
    out << "test = " << format_double(config.split.test_fraction) << "\n";
    out << "seed = " << config.split.seed << "\n";
    out << "[train]\n";
    out << "hops = " << config.train.n_hops << "\n";
    out << "mode = " << kernel_mode_name(config.train.threshold_mode) << "\n";
    out << "threshold = " << format_double(config.train.threshold) << "\n";
    out << "learning_rate = " << format_double(config.train.learning_rate) << "\n";
    out << "momentum = " << format_double(config.train.momentum) << "\n";
    out << "max_epochs = " << config.train.max_epochs << "\n";
    out << "patience = " << config.train.patience << "\n";
    out << "seed = " << config.train.seed << "\n";
    out << "activation = " << activation_name(config.train.activation) << "\n";
    if (!config.sweep_thresholds.empty()) {
        out << "[sweep]\n";
        out << "thresholds = ";
        for (std::size_t i = 0; i < config.sweep_thresholds.size(); ++i)
            out << (i ? "," : "") << format_double(config.sweep_thresholds[i]);
        out << "\n";
    }
    if (!config.density_hops.empty()) {
        out << "[density]\n";
        out << "hops_list = ";
        for (std::size_t i = 0; i < config.density_hops.size(); ++i)
            out << (i ? "," : "") << config.density_hops[i];
        out << "\n";
    }
    if (!config.out_dir.empty()) {
        out << "[output]\n";
        out << "dir = " << config.out_dir << "\n";
    }
    return out.str();
}

std::string config_hash(const RunConfig& config) {
    // The hash identifies the experiment; where the results land is not part
    // of it, so runs into different directories stay byte-comparable.
    RunConfig keyed = config;
    keyed.out_dir.clear();
    const std::string text = serialize_run_config(keyed);
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sdcnn

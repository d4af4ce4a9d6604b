#include "run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "polystyle/corpus.hpp"

namespace polystyle::cli {

RunConfig RunConfig::train_defaults() {
    RunConfig cfg;
    cfg.values_ = {
        {"d", "32"},
        {"max_len", "25"},
        {"epochs", "10"},
        {"batch_size", "16"},
        {"seed", "1"},
        {"learning_rate", "0.1"},
        {"lr_decay", "0.1"},
        {"lr_min", "0.0001"},
        {"d_steps_per_g_step", "1"},
        {"convergence_window", "3"},
        {"val_fraction", "0.1"},
        {"loss_rec", "true"},
        {"loss_back", "true"},
        {"loss_mse", "true"},
        {"loss_cls", "true"},
        {"loss_adv", "true"},
        {"checkpoint_every", "0"},
        {"validation_scores", "auto"},
    };
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot read " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.resize(hash_pos);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: " + path + " line " + std::to_string(lineno) +
                                     " is not 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("config: " + path + " line " + std::to_string(lineno) +
                                     " has an empty key");
        }
        values_[key] = value;
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void RunConfig::apply_overrides(const std::vector<std::string>& kvs) {
    for (const auto& kv : kvs) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::runtime_error("config: override '" + kv + "' is not key=value");
        }
        set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) != 0; }

std::string RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing key '" + key + "'");
    return it->second;
}

std::string RunConfig::get_or(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
}

int RunConfig::get_int(const std::string& key) const {
    try {
        return std::stoi(get(key));
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + get(key));
    }
}

double RunConfig::get_double(const std::string& key) const {
    try {
        return std::stod(get(key));
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not a number: " + get(key));
    }
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("config: key '" + key + "' is not a boolean: " + v);
}

uint64_t RunConfig::get_u64(const std::string& key) const {
    try {
        return std::stoull(get(key));
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + get(key));
    }
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    return os.str();
}

uint64_t RunConfig::hash() const {
    const std::string text = canonical();
    return fnv1a64(text.data(), text.size());
}

std::string RunConfig::hash_hex() const {
    std::ostringstream os;
    os << std::hex << hash();
    return os.str();
}

void RunConfig::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("config: cannot write " + path);
    f << canonical();
}

}  // namespace polystyle::cli

#include "padiclab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace padiclab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    size_t h = line.find('#');
    return h == std::string::npos ? line : line.substr(0, h);
}

[[noreturn]] void fail(int line, const std::string& what) {
    std::ostringstream os;
    os << "config line " << line << ": " << what;
    throw ConfigError(os.str());
}

long long to_int(const std::string& s, int line) {
    size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        fail(line, "expected an integer, got '" + s + "'");
    }
    if (pos != s.size()) fail(line, "expected an integer, got '" + s + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& body, int line) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : body) {
        if (c == ',') {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    for (const auto& it : items)
        if (it.empty()) fail(line, "empty list item");
    return items;
}

struct Entry {
    std::string key;
    std::string value;              // scalar form, empty when is_list
    std::vector<std::string> list;  // list form
    bool is_list = false;
    int line = 0;
};

struct Block {
    std::string name;
    std::vector<Entry> entries;
    int line = 0;
};

std::vector<Block> tokenize(const std::string& text) {
    std::vector<Block> blocks;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    Block* open = nullptr;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (!open) {
            // expect `name {`
            if (line.back() != '{') fail(line_no, "expected 'block-name {'");
            std::string name = trim(line.substr(0, line.size() - 1));
            if (name.empty() || name.find_first_of(" \t") != std::string::npos)
                fail(line_no, "bad block name '" + name + "'");
            blocks.push_back({name, {}, line_no});
            open = &blocks.back();
            continue;
        }
        if (line == "}") {
            open = nullptr;
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value' or '}'");
        Entry e;
        e.line = line_no;
        e.key = trim(line.substr(0, eq));
        std::string rest = trim(line.substr(eq + 1));
        if (e.key.empty()) fail(line_no, "missing key before '='");
        if (!rest.empty() && rest[0] == '[') {
            // bracketed list, possibly spanning lines
            std::string body = rest.substr(1);
            while (body.find(']') == std::string::npos) {
                if (!std::getline(in, raw)) fail(e.line, "unterminated '[' list");
                ++line_no;
                body += " " + trim(strip_comment(raw));
            }
            size_t close = body.find(']');
            if (!trim(body.substr(close + 1)).empty())
                fail(line_no, "trailing text after ']'");
            e.is_list = true;
            e.list = split_list(body.substr(0, close), e.line);
        } else {
            if (rest.empty()) fail(line_no, "missing value for '" + e.key + "'");
            e.value = rest;
        }
        open->entries.push_back(std::move(e));
    }
    if (open) fail(line_no, "unterminated block '" + open->name + "'");
    return blocks;
}

const Entry* find_entry(const Block& b, const std::string& key) {
    for (const auto& e : b.entries)
        if (e.key == key) return &e;
    return nullptr;
}

long long scalar_int(const Block& b, const std::string& key, long long fallback) {
    const Entry* e = find_entry(b, key);
    if (!e) return fallback;
    if (e->is_list) fail(e->line, "'" + key + "' takes a single integer");
    return to_int(e->value, e->line);
}

void check_keys(const Block& b, const std::vector<std::string>& allowed) {
    for (const auto& e : b.entries)
        if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
            fail(e.line, "unknown key '" + e.key + "' in block '" + b.name + "'");
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    bool saw_field = false, saw_map = false, saw_exp = false, saw_out = false;
    for (const Block& b : tokenize(text)) {
        if (b.name == "field") {
            if (saw_field) fail(b.line, "duplicate field block");
            saw_field = true;
            check_keys(b, {"p", "r", "prec", "eisenstein"});
            cfg.field.p = scalar_int(b, "p", cfg.field.p);
            cfg.field.r = static_cast<int>(scalar_int(b, "r", cfg.field.r));
            cfg.field.prec = static_cast<int>(scalar_int(b, "prec", cfg.field.prec));
            if (const Entry* e = find_entry(b, "eisenstein")) {
                if (!e->is_list) fail(e->line, "'eisenstein' takes a bracketed list");
                for (const auto& it : e->list)
                    cfg.field.eisenstein.push_back(to_int(it, e->line));
                if (cfg.field.eisenstein.size() < 2 || cfg.field.eisenstein.back() != 1)
                    fail(e->line, "'eisenstein' must be monic, coefficients low to high");
            }
        } else if (b.name == "map") {
            if (saw_map) fail(b.line, "duplicate map block");
            saw_map = true;
            check_keys(b, {"p", "s", "N", "P"});
            long long mp = scalar_int(b, "p", 0);
            if (mp != 0 && saw_field && mp != cfg.field.p)
                fail(b.line, "map p disagrees with the field block");
            cfg.map.s = scalar_int(b, "s", cfg.map.s);
            cfg.map.N = static_cast<int>(scalar_int(b, "N", cfg.map.N));
            if (const Entry* e = find_entry(b, "P")) {
                if (!e->is_list) fail(e->line, "'P' takes a bracketed list");
                cfg.map.perturbations = e->list;
            }
        } else if (b.name == "variety") {
            check_keys(b, {"generators"});
            const Entry* e = find_entry(b, "generators");
            if (!e || !e->is_list) fail(b.line, "variety block needs 'generators = [..]'");
            cfg.variety_generators = e->list;
        } else if (b.name == "experiment") {
            if (saw_exp) fail(b.line, "duplicate experiment block");
            saw_exp = true;
            check_keys(b, {"kind", "period_bound", "depth", "precision", "degree_bound",
                           "seed", "branch", "start", "l_bound"});
            const Entry* k = find_entry(b, "kind");
            if (!k) fail(b.line, "experiment block needs 'kind'");
            cfg.experiment.kind = k->value;
            cfg.experiment.period_bound =
                scalar_int(b, "period_bound", cfg.experiment.period_bound);
            cfg.experiment.depth = scalar_int(b, "depth", cfg.experiment.depth);
            cfg.experiment.precision = scalar_int(b, "precision", cfg.experiment.precision);
            cfg.experiment.degree_bound =
                static_cast<int>(scalar_int(b, "degree_bound", cfg.experiment.degree_bound));
            cfg.experiment.seed =
                static_cast<std::uint64_t>(scalar_int(b, "seed", 0));
            cfg.experiment.l_bound = scalar_int(b, "l_bound", cfg.experiment.l_bound);
            if (const Entry* e = find_entry(b, "branch")) {
                if (e->value != "canonical" && e->value != "random" && e->value != "all")
                    fail(e->line, "branch must be canonical, random, or all");
                cfg.experiment.branch = e->value;
            }
            if (const Entry* e = find_entry(b, "start")) {
                if (!e->is_list) fail(e->line, "'start' takes a bracketed coordinate list");
                cfg.experiment.start = e->list;
            }
        } else if (b.name == "output") {
            if (saw_out) fail(b.line, "duplicate output block");
            saw_out = true;
            check_keys(b, {"path"});
            const Entry* e = find_entry(b, "path");
            if (!e || e->is_list) fail(b.line, "output block needs 'path = name'");
            cfg.output_path = e->value;
        } else {
            fail(b.line, "unknown block '" + b.name + "'");
        }
    }
    if (!saw_field) throw ConfigError("config: missing field block");
    if (!saw_map) throw ConfigError("config: missing map block");
    if (!saw_exp) throw ConfigError("config: missing experiment block");
    if (!saw_out) throw ConfigError("config: missing output block");
    const std::string& kind = cfg.experiment.kind;
    if (kind != "tv_gap" && kind != "dmm_check" && kind != "backward_dml" &&
        kind != "tilt_demo")
        throw ConfigError("config: unknown experiment kind '" + kind + "'");
    if (cfg.map.perturbations.empty())
        throw ConfigError("config: map block needs 'P = [..]' with N+1 entries");
    if (static_cast<int>(cfg.map.perturbations.size()) != cfg.map.N + 1)
        throw ConfigError("config: P must list exactly N+1 perturbations");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace padiclab
